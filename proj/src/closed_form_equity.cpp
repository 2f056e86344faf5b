#include "eem/closed_form_equity.hpp"

#include <algorithm>
#include <cmath>

namespace eem {

double bs_call(double S, double K, double sigma, double r, double tau) {
  if (tau <= 0.0) return std::max(S - K, 0.0);
  const double df = std::exp(-r * tau);
  if (K <= 0.0) return S;
  const double v = sigma * std::sqrt(tau);
  if (v <= 0.0) return std::max(S - K * df, 0.0);
  const double d1 = (std::log(S / K) + r * tau) / v + 0.5 * v;
  return S * norm_cdf(d1) - K * df * norm_cdf(d1 - v);
}

double bs_put(double S, double K, double sigma, double r, double tau) {
  if (tau <= 0.0) return std::max(K - S, 0.0);
  const double df = std::exp(-r * tau);
  if (K <= 0.0) return 0.0;
  const double v = sigma * std::sqrt(tau);
  if (v <= 0.0) return std::max(K * df - S, 0.0);
  const double d1 = (std::log(S / K) + r * tau) / v + 0.5 * v;
  return K * df * norm_cdf(v - d1) - S * norm_cdf(-d1);
}

namespace {

void check(const BSExpectedInputs& in) {
  in.spec.validate();
  in.hz.validate();
  if (!(in.K >= 0.0)) throw ParameterError("expected call: K must be non-negative");
}

}  // namespace

DHat bs_expected_dhat(const BSExpectedInputs& in) {
  check(in);
  const auto& s = in.spec;
  DHat d;
  d.vp = s.sigma * std::sqrt(in.hz.total());
  d.d1 = (std::log(s.S0 / in.K) + s.mu * in.hz.pre() + s.r * in.hz.post()) / d.vp + 0.5 * d.vp;
  d.d2 = d.d1 - d.vp;
  return d;
}

double bs_expected_call(const BSExpectedInputs& in) {
  check(in);
  const auto& s = in.spec;
  const double fwd = s.S0 * std::exp(s.mu * in.hz.pre());
  if (in.hz.total() <= 0.0) return std::max(s.S0 - in.K, 0.0);
  if (in.K == 0.0) return fwd;
  const double kdisc = in.K * std::exp(-s.r * in.hz.post());
  const DHat d = bs_expected_dhat(in);
  if (!(d.vp > 0.0)) return std::max(fwd - kdisc, 0.0);
  return fwd * norm_cdf(d.d1) - kdisc * norm_cdf(d.d2);
}

double bs_expected_put(const BSExpectedInputs& in) {
  check(in);
  const auto& s = in.spec;
  const double fwd = s.S0 * std::exp(s.mu * in.hz.pre());
  if (in.hz.total() <= 0.0) return std::max(in.K - s.S0, 0.0);
  if (in.K == 0.0) return 0.0;
  const double kdisc = in.K * std::exp(-s.r * in.hz.post());
  const DHat d = bs_expected_dhat(in);
  if (!(d.vp > 0.0)) return std::max(kdisc - fwd, 0.0);
  return kdisc * norm_cdf(-d.d2) - fwd * norm_cdf(-d.d1);
}

double fso_expected_price(const ForwardStartInputs& in) {
  in.spec.validate();
  in.hz.validate();
  if (in.k < 0.0) throw ParameterError("forward start: k must be non-negative");
  if (!(in.hz.t <= in.T0 && in.T0 <= in.hz.T)) throw DomainError("forward start: require t <= T0 <= T");
  const auto& s = in.spec;
  if (in.hz.H <= in.T0) {
    return s.S0 * std::exp(s.mu * in.hz.pre()) * bs_call(1.0, in.k, s.sigma, s.r, in.hz.T - in.T0);
  }
  BSExpectedInputs unit{GBMSpec{1.0, s.mu, s.sigma, s.r}, in.k, HorizonSpec{in.T0, in.hz.H, in.hz.T}};
  return s.S0 * std::exp(s.mu * (in.T0 - in.hz.t)) * bs_expected_call(unit);
}

}  // namespace eem
