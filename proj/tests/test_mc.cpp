#include <gtest/gtest.h>

#include "eem/closed_form_equity.hpp"
#include "eem/mc.hpp"
#include "eem/term_structure.hpp"

using namespace eem;

namespace {

const GBMSpec kFig{100.0, 0.1, 0.15, 0.03};
const HorizonSpec kFigH{0.0, 1.0, 2.0};

BatchConfig cfg(long n, int spy = 10) {
  BatchConfig c;
  c.n_paths = n;
  c.steps_per_year = spy;
  return c;
}

bool within(const MCEstimate& m, double want, double k = 3.0) { return std::abs(m.mean - want) <= k * m.standard_error; }

}  // namespace

TEST(CounterRng, StatelessStreams) {
  CounterRng a(7, 3), b(7, 3), c(7, 4);
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next_u64();
    EXPECT_EQ(x, b.next_u64());
    EXPECT_NE(x, c.next_u64());
  }
  CounterRng n(11, 0);
  double s = 0.0, s2 = 0.0;
  const int N = 200'000;
  for (int i = 0; i < N; ++i) {
    const double z = n.next_normal();
    s += z;
    s2 += z * z;
  }
  EXPECT_NEAR(s / N, 0.0, 4.0 / std::sqrt(N));
  EXPECT_NEAR(s2 / N, 1.0, 4.0 * std::sqrt(2.0 / N));
}

TEST(Batch, WorkerCountDoesNotChangeResult) {
  BatchConfig c1 = cfg(50'000), c8 = c1;
  c8.workers = 8;
  const auto a = mc_bs_expected(kFig, 100, Payoff::Call, kFigH, c1);
  const auto b = mc_bs_expected(kFig, 100, Payoff::Call, kFigH, c8);
  EXPECT_EQ(a.mean, b.mean);
  EXPECT_EQ(a.standard_error, b.standard_error);
  CDGSpec s;
  BatchConfig d1 = cfg(5'000, 100), d8 = d1;
  d8.workers = 8;
  EXPECT_EQ(simulate_first_passage(s, {}, {0, 1, 5}, d1).mean, simulate_first_passage(s, {}, {0, 1, 5}, d8).mean);
}

TEST(Batch, StandardErrorScaling) {
  const auto a = mc_bs_expected(kFig, 100, Payoff::Call, kFigH, cfg(50'000));
  const auto b = mc_bs_expected(kFig, 100, Payoff::Call, kFigH, cfg(200'000));
  EXPECT_NEAR(a.standard_error / b.standard_error, 2.0, 0.4);
  EXPECT_EQ(a.n_samples, 25'000);
  BatchConfig plain = cfg(50'000);
  plain.antithetic = false;
  EXPECT_EQ(mc_bs_expected(kFig, 100, Payoff::Call, kFigH, plain).n_samples, 50'000);
}

TEST(Batch, ZeroVolatilityIsDeterministic) {
  GBMSpec s = kFig;
  s.sigma = 0.0;
  const auto m = mc_bs_expected(s, 90, Payoff::Call, kFigH, cfg(10'000));
  const double ST = 100 * std::exp(0.1 + 0.03);
  EXPECT_NEAR(m.mean, std::exp(-0.03) * (ST - 90), 1e-10);
  EXPECT_EQ(m.standard_error, 0.0);
}

TEST(Batch, RejectsMisalignedGrid) {
  EXPECT_THROW(mc_bs_expected(kFig, 100, Payoff::Call, {0, 0.55, 2}, cfg(1000, 10)), AlignmentError);
  EXPECT_THROW(mc_bs_expected(kFig, 100, Payoff::Call, kFigH, cfg(0)), ParameterError);
}

TEST(DriftTrace, RegimeSwitch) {
  for (double d : mc_drift_trace(kFig, {0, 0, 2}, 10)) EXPECT_EQ(d, kFig.r);
  for (double d : mc_drift_trace(kFig, {0, 2, 2}, 10)) EXPECT_EQ(d, kFig.mu);
  const auto tr = mc_drift_trace(kFig, kFigH, 10);
  ASSERT_EQ(tr.size(), 20u);
  EXPECT_EQ(tr[9], kFig.mu);
  EXPECT_EQ(tr[10], kFig.r);
}

TEST(Equity, CallPutAndFso) {
  for (Payoff p : {Payoff::Call, Payoff::Put}) {
    const auto m = mc_bs_expected(kFig, 105, p, kFigH, cfg(200'000));
    const double want = p == Payoff::Call ? bs_expected_call({kFig, 105, kFigH}) : bs_expected_put({kFig, 105, kFigH});
    EXPECT_TRUE(within(m, want)) << m.mean << " vs " << want;
  }
  for (double T0 : {0.5, 1.5}) {
    const ForwardStartInputs in{kFig, 1.05, T0, kFigH};
    const auto m = mc_fso(in, cfg(200'000));
    EXPECT_TRUE(within(m, fso_expected_price(in))) << T0 << ": " << m.mean << " vs " << fso_expected_price(in);
  }
}

TEST(Equity, NestedMatchesSinglePass) {
  const auto nested = mc_bs_nested(kFig, 100, kFigH, 4'000, 256, cfg(0));
  const double want = bs_expected_call({kFig, 100, kFigH});
  EXPECT_TRUE(within(nested, want)) << nested.mean << " vs " << want;
}

TEST(Rates, VasicekExact) {
  const ShortRateParams p{0.5, 0.05, 0.02, -0.1};
  const HorizonSpec hz{0, 1, 3};
  const auto b = mc_vasicek_bond(p, 0.03, hz, cfg(100'000));
  EXPECT_TRUE(within(b, vasicek_expected_bond(p, 0.03, hz)));
  const double elb = expected_log_bond_atsm(vasicek_as_atsm(p), Vec<double>::Constant(1, 0.03), hz);
  // ln P(H, T) is affine in the normals, so antithetic pairs are exact.
  EXPECT_NEAR(mc_vasicek_log_bond(p, 0.03, hz, cfg(10'000)).mean, elb, 1e-12);
  BatchConfig plain = cfg(100'000);
  plain.antithetic = false;
  EXPECT_TRUE(within(mc_vasicek_log_bond(p, 0.03, hz, plain), elb));
  EXPECT_NEAR(mc_vasicek_mean_rate(p, 0.03, 2.0, cfg(10'000)).mean, 0.05 + (0.03 - 0.05) * std::exp(-1.0), 1e-12);
}

TEST(Rates, CirEulerBiasShrinks) {
  const ShortRateParams p{0.6, 0.05, 0.1, -0.2};
  const HorizonSpec hz{0, 1, 3};
  const double want = cir_expected_bond(p, 0.03, hz);
  const auto coarse = mc_cir_bond(p, 0.03, hz, cfg(200'000, 5));
  const auto fine = mc_cir_bond(p, 0.03, hz, cfg(200'000, 200));
  EXPECT_TRUE(within(fine, want)) << fine.mean << " vs " << want;
  EXPECT_LE(std::abs(fine.mean - want), std::abs(coarse.mean - want) + 3 * fine.standard_error);
  EXPECT_EQ(fine.scheme.find("euler") != std::string::npos, true);
}
