#include <gtest/gtest.h>

#include "draws.hpp"
#include "eem/closed_form_equity.hpp"
#include "eem/forward_measure.hpp"
#include "eem/mc.hpp"
#include "eem/quadrature.hpp"

using namespace eem;

namespace {

MertonVasicekSpec frozen() {
  MertonVasicekSpec s;
  s.S_t = 100;
  s.sigma = 0.2;
  s.gamma = 0.3;
  s.rho = -0.3;
  s.alpha_r = 0.5;
  s.m_r = 0.05;
  s.sigma_r = 0.015;
  s.gamma_r = -0.1;
  s.r_t = 0.03;
  return s;
}

MargrabeSpec margrabe() {
  MargrabeSpec s;
  s.S1 = 100;
  s.sigma1 = 0.25;
  s.gamma1 = 0.2;
  s.rho1r = -0.2;
  s.S2 = 95;
  s.sigma2 = 0.3;
  s.gamma2 = 0.35;
  s.rho2r = 0.1;
  s.rho12 = 0.4;
  s.alpha_r = 0.5;
  s.m_r = 0.05;
  s.sigma_r = 0.015;
  s.gamma_r = -0.1;
  s.r_t = 0.03;
  return s;
}

BatchConfig quick(long n = 200'000) {
  BatchConfig c;
  c.n_paths = n;
  c.workers = 4;
  return c;
}

}  // namespace

TEST(Merton, ReducesToConstantRateFormula) {
  Draws d(51);
  for (int k = 0; k < 50; ++k) {
    const GBMSpec s{d.u(50, 150), d.u(-0.1, 0.2), d.u(0.05, 0.6), d.u(0.0, 0.08)};
    const double t = d.u(0, 1), H = t + d.u(0, 2), T = H + d.u(0.01, 2), K = d.u(50, 150);
    MertonInputs in{s.S0 * std::exp(s.mu * (H - t)), std::exp(-s.r * (T - H)), s.sigma * std::sqrt(T - t), K};
    const double want = bs_expected_call({s, K, {t, H, T}});
    EXPECT_NEAR(merton_expected_call(in), want, 1e-12 * std::max(1.0, want));
    const MertonDHat dh = merton_dhat(in);
    EXPECT_NEAR(dh.d1 - dh.d2, in.vp, 1e-14);
  }
}

TEST(Merton, LimitsAndHomogeneity) {
  MertonInputs in{110, 0.95, 0.0, 100};
  EXPECT_DOUBLE_EQ(merton_expected_call(in), 110 - 95.0);
  in.vp = 0.3;
  const double v = merton_expected_call(in);
  EXPECT_GE(v, 15.0);
  MertonInputs sc = in;
  sc.E_SH *= 3.0;
  sc.K *= 3.0;
  EXPECT_NEAR(merton_expected_call(sc), 3.0 * v, 1e-12);
  EXPECT_THROW(merton_expected_call({-1, 1, 0.2, 100}), ParameterError);
}

TEST(MertonVasicek, DeterministicRates) {
  auto s = frozen();
  s.sigma_r = 0.0;
  const HorizonSpec hz{0, 1, 3};
  // r(u) = m + (r_t - m) e^{-alpha u}
  auto rint = [&](double a, double b) {
    return gl_integrate([&](double u) { return s.m_r + (s.r_t - s.m_r) * std::exp(-s.alpha_r * u); }, a, b, 8);
  };
  const double ES = s.S_t * std::exp(rint(0, 1) + s.gamma * s.sigma * 1.0);
  EXPECT_NEAR(expected_asset_price_vasicek(s, hz), ES, 1e-10);
  s.gamma = 0.0;
  EXPECT_NEAR(expected_asset_price_vasicek(s, hz), s.S_t * std::exp(rint(0, 1)), 1e-10);
  s.gamma = 0.3;
  const double P = std::exp(-rint(1, 3));
  EXPECT_NEAR(vasicek_expected_bond(s.rates(), s.r_t, hz), P, 1e-12);
  const double v = merton_expected_call({ES, P, s.sigma * std::sqrt(3.0), 100.0});
  EXPECT_NEAR(merton_vasicek_expected_call(s, 100.0, hz), v, 1e-10);
}

TEST(MertonVasicek, NestingAtCurrentHorizon) {
  const auto s = frozen();
  EXPECT_DOUBLE_EQ(expected_asset_price_vasicek(s, {0, 0, 2}), s.S_t);
  const double P = vasicek_expected_bond(s.rates(), s.r_t, {0, 0, 2});
  const double vp = merton_vasicek_vp(s, {0, 0, 2});
  const double d1 = std::log(s.S_t / (100 * P)) / vp + 0.5 * vp;
  EXPECT_NEAR(merton_vasicek_expected_call(s, 100, {0, 0, 2}), s.S_t * norm_cdf(d1) - 100 * P * norm_cdf(d1 - vp),
              1e-10);
}

TEST(MertonVasicek, MonteCarlo) {
  const auto s = frozen();
  const HorizonSpec hz{0, 1, 3};
  const auto mc = mc_merton_vasicek_call(s, 100, hz, quick());
  EXPECT_LE(std::abs(mc.mean - merton_vasicek_expected_call(s, 100, hz)), 3 * mc.standard_error);
  const auto ma = mc_expected_asset_vasicek(s, hz, quick());
  EXPECT_LE(std::abs(ma.mean - expected_asset_price_vasicek(s, hz)), 3 * ma.standard_error);
}

TEST(Margrabe, SymmetricAssetsGiveZero) {
  MargrabeSpec s = margrabe();
  s.S2 = s.S1;
  s.sigma2 = s.sigma1;
  s.gamma2 = s.gamma1;
  s.rho2r = s.rho1r;
  s.rho12 = 1.0;
  EXPECT_EQ(margrabe_expected_exchange(s, {0, 1, 2}), 0.0);
}

TEST(Margrabe, ParityAndNesting) {
  const auto s = margrabe();
  Draws d(52);
  for (int k = 0; k < 50; ++k) {
    const double t = d.u(0, 1), H = t + d.u(0, 2), T = H + d.u(0.1, 2);
    const HorizonSpec hz{t, H, T};
    const double a = margrabe_expected_exchange(s, hz), b = margrabe_expected_exchange(s.swapped(), hz);
    const double e1 = expected_asset_price_vasicek(s.asset(1), hz), e2 = expected_asset_price_vasicek(s.asset(2), hz);
    EXPECT_NEAR(a - b, e2 - e1, 1e-10);
  }
  const double v = margrabe_vp(s, {0, 0, 2});
  const double d1 = std::log(s.S2 / s.S1) / v + 0.5 * v;
  EXPECT_NEAR(margrabe_expected_exchange(s, {0, 0, 2}), s.S2 * norm_cdf(d1) - s.S1 * norm_cdf(d1 - v), 1e-12);
}

TEST(Margrabe, DependsOnRatesAtFixedVp) {
  const auto s = margrabe();
  auto t = s;
  t.alpha_r = 1.2;
  t.sigma_r = 0.03;
  const HorizonSpec hz{0, 1, 2};
  EXPECT_EQ(margrabe_vp(s, hz), margrabe_vp(t, hz));
  EXPECT_GT(std::abs(margrabe_expected_exchange(s, hz) - margrabe_expected_exchange(t, hz)), 1e-4);
}

TEST(Margrabe, MonteCarlo) {
  const auto s = margrabe();
  const HorizonSpec hz{0, 1, 2.5};
  const auto mc = mc_margrabe(s, hz, quick());
  EXPECT_LE(std::abs(mc.mean - margrabe_expected_exchange(s, hz)), 3 * mc.standard_error);
}

TEST(CDG, NoLossGivesRiskFreeExactly) {
  CDGSpec s;
  s.omega = 0.0;
  const CDGState x;
  const HorizonSpec hz{0, 1, 5};
  const auto r = cdg_expected_bond(s, x, hz);
  EXPECT_EQ(r.value, vasicek_expected_bond(s.rates(), x.r_t, hz));
}

TEST(CDG, ProbabilityBoundsAndMonotonicity) {
  CDGSpec s;
  const CDGState x;
  const HorizonSpec hz{0, 1, 5};
  const auto r = cdg_expected_bond(s, x, hz);
  EXPECT_GE(r.default_probability, 0.0);
  EXPECT_LE(r.default_probability, 1.0);
  for (double q : r.q) EXPECT_GE(q, -1e-9);
  EXPECT_GE(r.value, (1 - s.omega) * r.expected_riskfree);
  EXPECT_LE(r.value, r.expected_riskfree);
  CDGSpec hi = s;
  hi.sigma = 0.3;
  EXPECT_GT(cdg_expected_bond(hi, x, hz).default_probability, r.default_probability);
  EXPECT_THROW(cdg_expected_bond(s, {0.1, 0.03}, hz), DomainError);
}

TEST(CDG, UnreachableBarrier) {
  CDGSpec s;
  s.lnK = 5.0;
  const auto r = cdg_expected_bond(s, {-0.6, 0.03}, {0, 1, 5});
  EXPECT_LT(r.default_probability, 1e-12);
  EXPECT_NEAR(r.value, r.expected_riskfree, 1e-12);
}

TEST(CDG, DriftedBrownianFirstPassage) {
  CDGSpec s;
  s.lambda = 1e-9;
  s.phi = 0.0;
  s.nu = 0.0;
  s.sigma_r = 0.0;
  s.gamma_r = 0.0;
  s.m_r = 0.03;
  s.n_grid = 400;
  const CDGState x{-0.4, 0.03};
  const HorizonSpec hz{0, 0, 2};
  const double nu = 0.5 * s.sigma * s.sigma - s.m_r, d = s.lnK - x.l_t, T = 2.0, sT = s.sigma * std::sqrt(T);
  const double want =
      norm_cdf((-d + nu * T) / sT) + std::exp(2 * nu * d / (s.sigma * s.sigma)) * norm_cdf((-d - nu * T) / sT);
  BatchConfig cfg = quick(100'000);
  cfg.steps_per_year = 500;
  const auto mc = simulate_first_passage(s, x, hz, cfg);
  EXPECT_LE(std::abs(mc.mean - want), 3 * mc.standard_error) << mc.mean << " vs " << want;
  EXPECT_NEAR(cdg_expected_bond(s, x, hz).default_probability, want, 5e-3);
}

TEST(CDG, MonteCarloFirstPassage) {
  CDGSpec s;
  const CDGState x;
  const HorizonSpec hz{0, 1, 5};
  BatchConfig cfg = quick(50'000);
  cfg.steps_per_year = 500;
  const auto mc = simulate_first_passage(s, x, hz, cfg);
  const double q = cdg_expected_bond(s, x, hz).default_probability;
  EXPECT_LE(std::abs(mc.mean - q), 3 * mc.standard_error + 0.002) << mc.mean << " vs " << q;
}

TEST(CDG, FarBarrierMonteCarlo) {
  CDGSpec s;
  s.lnK = 3.0;
  BatchConfig cfg = quick(20'000);
  cfg.steps_per_year = 100;
  const auto mc = simulate_first_passage(s, {-0.6, 0.03}, {0, 1, 5}, cfg);
  EXPECT_LE(mc.mean, 3 * mc.standard_error + 1e-12);
}
