#include <gtest/gtest.h>

#include "draws.hpp"
#include "eem/closed_form_equity.hpp"
#include "eem/quadrature.hpp"

using namespace eem;

namespace {

const GBMSpec kFig{100.0, 0.1, 0.15, 0.03};

// Direct integration of the discounted payoff against the lognormal law of S_T.
double lognormal_oracle(const GBMSpec& s, double K, const HorizonSpec& hz, bool call) {
  const double m = std::log(s.S0) + (s.mu - 0.5 * s.sigma * s.sigma) * hz.pre() +
                   (s.r - 0.5 * s.sigma * s.sigma) * hz.post();
  const double v = s.sigma * std::sqrt(hz.total());
  auto f = [&](double z) {
    const double S = std::exp(m + v * z);
    return norm_pdf(z) * (call ? std::max(S - K, 0.0) : std::max(K - S, 0.0));
  };
  const double zk = (std::log(K) - m) / v;
  const double sum = call ? gl_integrate(f, zk, 12.0, 64) : gl_integrate(f, -12.0, zk, 64);
  return std::exp(-s.r * hz.post()) * sum;
}

}  // namespace

TEST(BSExpected, MatchesLognormalIntegration) {
  Draws dr(3);
  for (int k = 0; k < 50; ++k) {
    const GBMSpec s{dr.u(50, 150), dr.u(-0.1, 0.2), dr.u(0.05, 0.6), dr.u(0.0, 0.08)};
    const double t = dr.u(0, 1), H = t + dr.u(0, 2), T = H + dr.u(0.01, 2);
    const HorizonSpec hz{t, H, T};
    const double K = dr.u(50, 150);
    EXPECT_NEAR(bs_expected_call({s, K, hz}), lognormal_oracle(s, K, hz, true), 1e-8);
    EXPECT_NEAR(bs_expected_put({s, K, hz}), lognormal_oracle(s, K, hz, false), 1e-8);
  }
}

TEST(BSExpected, FigureOneContinuous) {
  // One-year horizon on the Figure 1 parameters: the tree value converges here.
  const double v = bs_expected_call({kFig, 100.0, {0.0, 1.0, 2.0}});
  EXPECT_NEAR(v, 100.0 * std::exp(0.1) * norm_cdf((std::log(1.0) + 0.1 + 0.03) / (0.15 * std::sqrt(2.0)) +
                                                  0.5 * 0.15 * std::sqrt(2.0)) -
                     100.0 * std::exp(-0.03) *
                         norm_cdf((0.13) / (0.15 * std::sqrt(2.0)) - 0.5 * 0.15 * std::sqrt(2.0)),
              1e-12);
}

TEST(BSExpected, Nesting) {
  Draws dr(5);
  for (int k = 0; k < 50; ++k) {
    const GBMSpec s{dr.u(50, 150), dr.u(-0.1, 0.2), dr.u(0.05, 0.6), dr.u(0.0, 0.08)};
    const double t = dr.u(0, 1), T = t + dr.u(0.01, 3), K = dr.u(50, 150);
    const double cur = bs_call(s.S0, K, s.sigma, s.r, T - t);
    EXPECT_LE(rel_err(bs_expected_call({s, K, {t, t, T}}), cur), 1e-10);
    // H = T: the physical expectation of the payoff.
    const double phys = lognormal_oracle({s.S0, s.mu, s.sigma, s.mu}, K, {t, t, T}, true) *
                        std::exp(s.mu * (T - t));
    EXPECT_NEAR(bs_expected_call({s, K, {t, T, T}}), phys, 1e-8);
  }
}

TEST(BSExpected, DHatIdentitiesAndParity) {
  Draws dr(6);
  for (int k = 0; k < 50; ++k) {
    const GBMSpec s{dr.u(50, 150), dr.u(-0.1, 0.2), dr.u(0.05, 0.6), dr.u(0.0, 0.08)};
    const double t = dr.u(0, 1), H = t + dr.u(0, 2), T = H + dr.u(0.01, 2), K = dr.u(50, 150);
    const HorizonSpec hz{t, H, T};
    const DHat d = bs_expected_dhat({s, K, hz});
    EXPECT_NEAR(d.d1 - d.d2, d.vp, 1e-14);
    EXPECT_NEAR(d.vp, s.sigma * std::sqrt(T - t), 1e-15);
    const double c = bs_expected_call({s, K, hz}), p = bs_expected_put({s, K, hz});
    const double fwd = s.S0 * std::exp(s.mu * (H - t)), kd = K * std::exp(-s.r * (T - H));
    EXPECT_NEAR(c - p, fwd - kd, 1e-12 * std::max(1.0, fwd));
  }
}

TEST(BSExpected, Boundaries) {
  const HorizonSpec hz{0.0, 1.0, 2.0};
  EXPECT_DOUBLE_EQ(bs_expected_call({kFig, 0.0, hz}), 100.0 * std::exp(0.1));
  EXPECT_DOUBLE_EQ(bs_expected_put({kFig, 0.0, hz}), 0.0);
  EXPECT_DOUBLE_EQ(bs_expected_call({kFig, 90.0, {1.0, 1.0, 1.0}}), 10.0);
  GBMSpec flat = kFig;
  flat.sigma = 0.0;
  EXPECT_NEAR(bs_expected_call({flat, 90.0, hz}), 100.0 * std::exp(0.1) - 90.0 * std::exp(-0.03), 1e-12);
  EXPECT_THROW(bs_expected_call({kFig, -1.0, hz}), ParameterError);
  EXPECT_THROW(bs_expected_call({kFig, 100.0, {0.0, 3.0, 2.0}}), DomainError);
}

TEST(BSExpected, JensenAndMonotoneInDrift) {
  const HorizonSpec hz{0.0, 1.0, 2.0};
  double prev = -1.0;
  for (double mu = -0.5; mu <= 0.5; mu += 0.05) {
    GBMSpec s = kFig;
    s.mu = mu;
    const double v = bs_expected_call({s, 100.0, hz});
    EXPECT_GT(v, prev);
    prev = v;
  }
}

TEST(ForwardStart, BranchesAndContinuity) {
  Draws dr(8);
  for (int k = 0; k < 50; ++k) {
    const GBMSpec s{dr.u(50, 150), dr.u(-0.1, 0.2), dr.u(0.05, 0.6), dr.u(0.0, 0.08)};
    const double t = dr.u(0, 1), T0 = t + dr.u(0, 1), T = T0 + dr.u(0.1, 2), kk = dr.u(0.7, 1.3);
    // Continuity at H = T0.
    const double a = fso_expected_price({s, kk, T0, {t, T0, T}});
    const double early = s.S0 * std::exp(s.mu * (T0 - t)) * bs_call(1.0, kk, s.sigma, s.r, T - T0);
    EXPECT_NEAR(a, early, 1e-12 * std::max(1.0, a));
    // H < T0 and H > T0 both reduce to current prices at H = t.
    EXPECT_LE(rel_err(fso_expected_price({s, kk, T0, {t, t, T}}), s.S0 * bs_call(1.0, kk, s.sigma, s.r, T - T0)),
              1e-10);
    const double H = T0 + dr.u(0, T - T0);
    const double late = s.S0 * std::exp(s.mu * (T0 - t)) *
                        bs_expected_call({{1.0, s.mu, s.sigma, s.r}, kk, {T0, H, T}});
    EXPECT_NEAR(fso_expected_price({s, kk, T0, {t, H, T}}), late, 1e-12 * std::max(1.0, late));
  }
}

TEST(ForwardStart, Errors) {
  EXPECT_THROW(fso_expected_price({kFig, -0.1, 0.5, {0.0, 1.0, 2.0}}), ParameterError);
  EXPECT_THROW(fso_expected_price({kFig, 1.0, 3.0, {0.0, 1.0, 2.0}}), DomainError);
}

TEST(CurrentBS, PutCallParity) {
  Draws dr(4);
  for (int k = 0; k < 50; ++k) {
    const double S = dr.u(50, 150), K = dr.u(50, 150), v = dr.u(0.05, 0.6), r = dr.u(0, 0.1), tau = dr.u(0.01, 3);
    EXPECT_NEAR(bs_call(S, K, v, r, tau) - bs_put(S, K, v, r, tau), S - K * std::exp(-r * tau), 1e-11);
  }
}
