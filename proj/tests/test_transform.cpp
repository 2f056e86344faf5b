#include <gtest/gtest.h>

#include "draws.hpp"
#include "eem/closed_form_equity.hpp"
#include "eem/mc.hpp"
#include "eem/transform.hpp"

using namespace eem;

namespace {

Vec<double> v1(double x) { return Vec<double>::Constant(1, x); }
Vec<cd> c1(cd x) { return Vec<cd>::Constant(1, x); }

HestonParams heston() {
  HestonParams p;
  p.r = 0.03;
  p.v0 = 0.05;
  p.kappa = 1.5;
  p.theta = 0.06;
  p.kappa_q = 2.0;
  p.theta_q = 0.05;
  p.sigma_v = 0.3;
  p.rho = -0.6;
  p.lambda_s = 1.5;
  return p;
}

// ln S drift integral over [a, b] under the regime switch at H.
double drift_int(double mu, double r, double sig, double a, double b, double H) {
  const double pre = std::max(0.0, std::min(b, H) - a), post = std::max(0.0, b - std::max(a, H));
  return (mu - 0.5 * sig * sig) * pre + (r - 0.5 * sig * sig) * post;
}

}  // namespace

TEST(RTransform, UnitAtZero) {
  const auto chi = gbm_chi(0.08, 0.2, 0.0), chs = gbm_chi(0.0, 0.2, 0.0);
  const cd v = r_transform(chi, chs, c1(0.0), v1(std::log(100.0)), {0, 1, 2});
  EXPECT_EQ(v, cd(1.0));
  const cd f = forward_start_r_transform(chi, chs, 0.0, 0.0, 0.0, v1(std::log(100.0)), 0, 0.5, 1, 2);
  EXPECT_EQ(f, cd(1.0));
}

TEST(RTransform, LognormalMoments) {
  Draws d(41);
  for (int k = 0; k < 30; ++k) {
    const double mu = d.u(-0.1, 0.2), r = d.u(0, 0.08), s = d.u(0.05, 0.5), S = d.u(50, 150);
    const double t = d.u(0, 1), H = t + d.u(0, 2), T = H + d.u(0, 2);
    const cd z(d.u(-1, 2), d.u(-3, 3));
    const auto chi = gbm_chi(mu, s, r), chs = gbm_chi(r, s, r);
    const double m = std::log(S) + drift_int(mu, r, s, t, T, H), var = s * s * (T - t);
    const cd want = std::exp(-r * (T - H) + z * m + 0.5 * z * z * var);
    const cd got = r_transform(chi, chs, c1(z), v1(std::log(S)), {t, H, T});
    EXPECT_LE(std::abs(got - want), 1e-10 * std::abs(want));
  }
}

TEST(RTransform, NestsToQTransform) {
  const auto p = heston();
  const auto chi = heston_chi(p, false), chs = heston_chi(p, true);
  Vec<double> Y(2);
  Y << std::log(100.0), p.v0;
  Draws d(42);
  for (int k = 0; k < 20; ++k) {
    Vec<cd> z(2);
    z << cd(d.u(-0.5, 1.5), d.u(-20, 20)), cd(0.0, 0.0);
    const double t = d.u(0, 1), T = t + d.u(0.1, 3);
    const cd a = r_transform(chi, chs, z, Y, {t, t, T});
    const cd b = q_transform(chs, z, Y, T - t);
    EXPECT_LE(std::abs(a - b), 1e-10);
  }
}

TEST(RTransform, ConjugateSymmetry) {
  const auto p = heston();
  const auto chi = heston_chi(p, false), chs = heston_chi(p, true);
  Vec<double> Y(2);
  Y << std::log(100.0), p.v0;
  Vec<cd> z(2), zc(2);
  z << cd(0.3, 7.0), cd(0.0, 0.0);
  zc = z.conjugate();
  const cd a = r_transform(chi, chs, z, Y, {0, 0.5, 2});
  const cd b = r_transform(chi, chs, zc, Y, {0, 0.5, 2});
  EXPECT_LE(std::abs(a - std::conj(b)), 1e-13);
}

TEST(ExtendedTransform, ZeroWeightAndGaussianMean) {
  const double mu = 0.09, r = 0.02, s = 0.3, S = 80.0;
  const auto chi = gbm_chi(mu, s, 0.0), chs = gbm_chi(r, s, 0.0);
  const HorizonSpec hz{0.0, 1.2, 2.5};
  EXPECT_EQ(extended_r_transform(chi, chs, v1(0.0), c1(0.3), v1(std::log(S)), hz), cd(0.0));
  const cd mean = extended_r_transform(chi, chs, v1(1.0), c1(0.0), v1(std::log(S)), hz);
  EXPECT_NEAR(mean.real(), std::log(S) + drift_int(mu, r, s, 0.0, 2.5, 1.2), 1e-12);
  EXPECT_NEAR(mean.imag(), 0.0, 1e-14);
}

TEST(ExtendedTransform, MatchesFiniteDifference) {
  const auto p = heston();
  const auto chi = heston_chi(p, false), chs = heston_chi(p, true);
  Vec<double> Y(2);
  Y << std::log(100.0), p.v0;
  const HorizonSpec hz{0, 0.75, 2};
  Vec<double> v(2);
  v << 1.0, 2.0;
  Vec<cd> z(2);
  z << cd(0.4, 1.5), cd(-0.2, 0.0);
  const double eps = 1e-5;
  const cd up = r_transform(chi, chs, (z + eps * v.cast<cd>()).eval(), Y, hz);
  const cd dn = r_transform(chi, chs, (z - eps * v.cast<cd>()).eval(), Y, hz);
  const cd fd = (up - dn) / (2.0 * eps);
  const cd ex = extended_r_transform(chi, chs, v, z, Y, hz);
  EXPECT_LE(std::abs(ex - fd) / std::abs(ex), 1e-6);
}

TEST(ForwardStartTransform, LognormalJointMoment) {
  const double mu = 0.1, r = 0.03, s = 0.25, S = 100.0;
  const auto chi = gbm_chi(mu, s, r), chs = gbm_chi(r, s, r);
  for (double H : {0.3, 1.4}) {
    const double t = 0.0, T0 = 0.8, T = 2.0;
    const cd a1(0.7), a2(0.4), z(0.2, 1.3);
    const cd e0 = a1 + a2, e1 = a1 + z;
    const double m0 = std::log(S) + drift_int(mu, r, s, t, T0, H), m1 = drift_int(mu, r, s, T0, T, H);
    const cd want = std::exp(-r * (T - H) + e0 * m0 + 0.5 * e0 * e0 * s * s * (T0 - t) + e1 * m1 +
                             0.5 * e1 * e1 * s * s * (T - T0));
    const cd got = forward_start_r_transform(chi, chs, a1, a2, z, v1(std::log(S)), t, T0, H, T);
    EXPECT_LE(std::abs(got - want), 1e-10 * std::abs(want)) << "H = " << H;
  }
  EXPECT_THROW(forward_start_r_transform(chi, chs, 1.0, 0.0, 0.0, v1(0.0), 0.5, 0.2, 1, 2), DomainError);
}

TEST(Fourier, MatchesBlackScholesLimit) {
  Draws d(43);
  for (int k = 0; k < 20; ++k) {
    const GBMSpec s{d.u(60, 140), d.u(-0.05, 0.15), d.u(0.1, 0.5), d.u(0, 0.06)};
    const double t = 0, H = d.u(0, 2), T = H + d.u(0.1, 2), K = d.u(60, 140);
    const auto h = expected_call_handle(gbm_chi(s.mu, s.sigma, s.r), gbm_chi(s.r, s.sigma, s.r), v1(std::log(s.S0)),
                                        {t, H, T});
    const auto res = fourier_expected_call(h, K);
    EXPECT_NEAR(res.value, bs_expected_call({s, K, {t, H, T}}), 1e-6);
    EXPECT_GE(res.Pi1, -1e-8);
    EXPECT_LE(res.Pi1, 1 + 1e-8);
  }
}

TEST(Fourier, DeepInTheMoneyAndMonotone) {
  const GBMSpec s{100, 0.08, 0.2, 0.03};
  const auto h = expected_call_handle(gbm_chi(s.mu, s.sigma, s.r), gbm_chi(s.r, s.sigma, s.r), v1(std::log(100.0)),
                                      {0, 1, 2});
  const auto deep = fourier_expected_call(h, 1.0);
  EXPECT_NEAR(deep.Pi1, 1.0, 1e-6);
  EXPECT_NEAR(deep.Pi2, 1.0, 1e-6);
  double p1 = 2, p2 = 2;
  for (double K = 40; K <= 200; K += 10) {
    const auto r = fourier_expected_call(h, K);
    EXPECT_LE(r.Pi1, p1 + 1e-8);
    EXPECT_LE(r.Pi2, p2 + 1e-8);
    p1 = r.Pi1;
    p2 = r.Pi2;
  }
  EXPECT_THROW(fourier_expected_call(h, -1.0), ParameterError);
}

TEST(Fourier, ForwardStartBothBranches) {
  const GBMSpec s{100, 0.1, 0.2, 0.03};
  for (double H : {0.25, 0.5, 1.5}) {
    const double T0 = 0.5, T = 2.0, k = 1.05;
    const auto h = forward_start_handle(gbm_chi(s.mu, s.sigma, s.r), gbm_chi(s.r, s.sigma, s.r), v1(std::log(100.0)),
                                        0.0, T0, H, T);
    EXPECT_NEAR(fourier_expected_call(h, k).value, fso_expected_price({s, k, T0, {0.0, H, T}}), 1e-6) << H;
  }
}

TEST(Fourier, HestonNestingWithinEngine) {
  const auto p = heston();
  const auto chi = heston_chi(p, false), chs = heston_chi(p, true);
  Vec<double> Y(2);
  Y << std::log(100.0), p.v0;
  // H = t with the physical characteristic replaced by the risk-neutral one changes nothing.
  const double a = fourier_expected_call(expected_call_handle(chi, chs, Y, {0, 0, 1.5}), 95.0).value;
  const double b = fourier_expected_call(expected_call_handle(chs, chs, Y, {0, 0, 1.5}), 95.0).value;
  EXPECT_NEAR(a, b, 1e-10);
}

TEST(Fourier, HestonAgainstMonteCarlo) {
  const auto p = heston();
  Vec<double> Y(2);
  Y << std::log(100.0), p.v0;
  const HorizonSpec hz{0, 0.5, 1.5};
  const double K = 100.0;
  const double v = fourier_expected_call(expected_call_handle(heston_chi(p, false), heston_chi(p, true), Y, hz), K).value;
  BatchConfig cfg;
  cfg.n_paths = 200'000;
  cfg.steps_per_year = 200;
  cfg.workers = 4;
  const auto mc = mc_heston_call(p, 100.0, K, hz, cfg);
  EXPECT_LE(std::abs(v - mc.mean), 3 * mc.standard_error) << v << " vs " << mc.mean << " se " << mc.standard_error;
}

TEST(Fourier, MertonJumpAgainstPoissonSeries) {
  MertonJumpParams p;
  const double S = 100, K = 105;
  const HorizonSpec hz{0, 0.7, 1.6};
  const double kbar = std::exp(p.jump_mean + 0.5 * p.jump_sd * p.jump_sd) - 1;
  // Condition on jump counts before and after H.
  double want = 0.0, w1 = std::exp(-p.intensity * hz.pre());
  for (int n1 = 0; n1 < 40; ++n1) {
    double w2 = std::exp(-p.intensity * hz.post());
    for (int n2 = 0; n2 < 40; ++n2) {
      const int n = n1 + n2;
      const double m = std::log(S) + (p.mu - p.intensity * kbar - 0.5 * p.sigma * p.sigma) * hz.pre() +
                       (p.r - p.intensity * kbar - 0.5 * p.sigma * p.sigma) * hz.post() + n * p.jump_mean;
      const double var = p.sigma * p.sigma * hz.total() + n * p.jump_sd * p.jump_sd, sd = std::sqrt(var);
      const double F = std::exp(m + 0.5 * var), d1 = (std::log(F / K) + 0.5 * var) / sd;
      want += w1 * w2 * std::exp(-p.r * hz.post()) * (F * norm_cdf(d1) - K * norm_cdf(d1 - sd));
      w2 *= p.intensity * hz.post() / (n2 + 1);
    }
    w1 *= p.intensity * hz.pre() / (n1 + 1);
  }
  const auto h = expected_call_handle(merton_jump_chi(p, false), merton_jump_chi(p, true), v1(std::log(S)), hz);
  EXPECT_NEAR(fourier_expected_call(h, K).value, want, 1e-6);
  BatchConfig cfg;
  cfg.n_paths = 200'000;
  const auto mc = mc_merton_jump_call(p, S, K, hz, cfg);
  EXPECT_LE(std::abs(mc.mean - want), 3 * mc.standard_error);
}

TEST(ComplexRiccati, BoundaryValues) {
  const auto chi = gbm_chi(0.05, 0.2, 0.01);
  const auto s = complex_riccati(chi, cd(0.3, 0.1), c1(cd(-0.5, 2.0)), 0.0, v1(0.0), 0.0);
  EXPECT_EQ(s.A, cd(0.3, 0.1));
  EXPECT_EQ(s.B(0), cd(-0.5, 2.0));
}
