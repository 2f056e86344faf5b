#include "eem/fspd.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>

#include <Eigen/Dense>

namespace eem {

void StrikeGrid::validate() const {
  if (K.size() < 5) throw GridError("fspd: strike grid needs at least 5 nodes, got " + std::to_string(K.size()));
  const double h = spacing();
  if (!(h > 0.0)) throw GridError("fspd: strikes must be strictly increasing");
  if (!(K.front() > 0.0)) throw GridError("fspd: strikes must be positive");
  for (std::size_t i = 1; i < K.size(); ++i)
    if (std::abs((K[i] - K[i - 1]) - h) > 1e-9 * std::max(1.0, h))
      throw GridError("fspd: strike grid is not uniform at index " + std::to_string(i));
}

StrikeGrid uniform_grid(double lo, double hi, int n) {
  if (n < 2 || !(hi > lo)) throw GridError("fspd: need hi > lo and n >= 2");
  StrikeGrid g;
  g.K.resize(n);
  const double h = (hi - lo) / (n - 1);
  for (int i = 0; i < n; ++i) g.K[i] = lo + i * h;
  return g;
}

StrikeGrid default_grid(const GBMSpec& spec, const HorizonSpec& hz, int n, double width) {
  spec.validate();
  hz.validate();
  const double v = spec.sigma * std::sqrt(hz.total());
  const double m = std::log(spec.S0) + (spec.mu - 0.5 * spec.sigma * spec.sigma) * hz.pre() +
                   (spec.r - 0.5 * spec.sigma * spec.sigma) * hz.post();
  if (v == 0.0) throw GridError("default grid: zero variance of ln S_T");
  return uniform_grid(std::exp(m - width * v), std::exp(m + width * v), n);
}

ExpectedFSPD fspd_second_difference(const StrikeGrid& grid, const std::vector<double>& c, double clip_tol) {
  grid.validate();
  if (c.size() != grid.size()) throw GridError("fspd: price vector does not match the strike grid");
  const double h = grid.spacing();
  const std::size_t n = grid.size();
  ExpectedFSPD g;
  g.K.assign(grid.K.begin() + 1, grid.K.end() - 1);
  g.density.resize(n - 2);
  double scale = 0.0;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    g.density[i - 1] = (c[i + 1] - 2.0 * c[i] + c[i - 1]) / (h * h);
    scale = std::max(scale, std::abs(g.density[i - 1]));
  }
  g.min_raw = *std::min_element(g.density.begin(), g.density.end());
  for (double& d : g.density) {
    if (d >= 0.0) continue;
    if (d >= -clip_tol * scale) {
      d = 0.0;
      ++g.clipped;
    } else {
      g.negative_lobe = true;
    }
  }
  double mass = 0.0;
  for (std::size_t i = 0; i < g.density.size(); ++i)
    mass += (i == 0 || i + 1 == g.density.size() ? 0.5 : 1.0) * g.density[i] * h;
  g.normalizer = mass;
  return g;
}

namespace {

// Newton steps kept inside a shrinking bracket, bisection otherwise.
template <typename F, typename DF>
double safeguarded_newton(F&& f, DF&& df, double lo, double hi, double x, const InversionOptions& o,
                          const char* what) {
  double flo = f(lo);
  for (int it = 0; it < o.max_iter; ++it) {
    const double fx = f(x);
    if (std::abs(fx) < o.tol) return x;
    if ((fx < 0.0) == (flo < 0.0)) {
      lo = x;
      flo = fx;
    } else {
      hi = x;
    }
    const double d = df(x);
    double xn = d > 0.0 ? x - fx / d : 0.5 * (lo + hi);
    if (!(xn > lo && xn < hi)) xn = 0.5 * (lo + hi);
    if (hi - lo < 1e-15 * std::max(1.0, std::abs(x))) return xn;
    x = xn;
  }
  throw InversionError(std::string(what) + ": no convergence in " + std::to_string(o.max_iter) +
                       " iterations, last bracket [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
}

}  // namespace

double implied_vol_invert(double price, double S, double K, double r, double tau, const InversionOptions& o) {
  if (!(S > 0.0) || !(K > 0.0) || !(tau > 0.0)) throw DomainError("implied vol: S, K, tau must be positive");
  const double lower = std::max(S - K * std::exp(-r * tau), 0.0);
  if (!(price > lower) || !(price < S))
    throw InversionError("implied vol: price " + std::to_string(price) + " outside no-arbitrage bounds (" +
                         std::to_string(lower) + ", " + std::to_string(S) + ")");
  const double lo = 1e-8, hi = 10.0;
  auto f = [&](double s) { return bs_call(S, K, s, r, tau) - price; };
  if (f(hi) < 0.0) throw InversionError("implied vol: root above sigma = 10");
  auto vega = [&](double s) {
    const double d1 = (std::log(S / K) + (r + 0.5 * s * s) * tau) / (s * std::sqrt(tau));
    return S * norm_pdf(d1) * std::sqrt(tau);
  };
  return safeguarded_newton(f, vega, lo, hi, 0.2, o, "implied vol");
}

double implied_drift_invert(double expected_price, double S, double K, double r, double sigma,
                            const HorizonSpec& hz, const InversionOptions& o) {
  hz.validate();
  if (!(hz.pre() > 0.0)) throw DomainError("implied drift: H must exceed t, the price does not depend on mu");
  auto price = [&](double mu) { return bs_expected_call({{S, mu, sigma, r}, K, hz}); };
  auto f = [&](double mu) { return price(mu) - expected_price; };
  auto df = [&](double mu) {
    const DHat d = bs_expected_dhat({{S, mu, sigma, r}, K, hz});
    return hz.pre() * S * std::exp(mu * hz.pre()) * norm_cdf(d.d1);
  };
  double lo = -1.0, hi = 1.0;
  for (int k = 0; k < 3 && !(f(lo) < 0.0 && f(hi) > 0.0); ++k) {
    lo *= 2.0;
    hi *= 2.0;
  }
  if (!(f(lo) < 0.0 && f(hi) > 0.0))
    throw InversionError("implied drift: price " + std::to_string(expected_price) + " not attained for mu in [" +
                         std::to_string(lo) + ", " + std::to_string(hi) + "]");
  return safeguarded_newton(f, df, lo, hi, r, o, "implied drift");
}

CurveFit smooth_curve_fit(const std::vector<double>& x, const std::vector<double>& y, const StrikeGrid& grid,
                          double penalty) {
  grid.validate();
  if (x.size() != y.size()) throw ParameterError("curve fit: x and y must be aligned");
  if (x.size() < 4) throw ParameterError("curve fit: need at least 4 observations");
  if (!(penalty >= 0.0)) throw ParameterError("curve fit: penalty must be non-negative");
  const int n = static_cast<int>(grid.size()), m = static_cast<int>(x.size());
  const double h = grid.spacing();
  Eigen::MatrixXd W = Eigen::MatrixXd::Zero(m, n);
  for (int i = 0; i < m; ++i) {
    const int j = std::clamp(static_cast<int>(std::floor((x[i] - grid.K[0]) / h)), 0, n - 2);
    const double w = (x[i] - grid.K[j]) / h;
    W(i, j) = 1.0 - w;
    W(i, j + 1) = w;
  }
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(n - 2, n);
  for (int i = 0; i < n - 2; ++i) D.row(i).segment(i, 3) << 1.0, -2.0, 1.0;
  const Eigen::VectorXd yv = Eigen::Map<const Eigen::VectorXd>(y.data(), m);
  const Eigen::VectorXd rhs = W.transpose() * yv;
  Eigen::MatrixXd A = W.transpose() * W + penalty * D.transpose() * D;

  CurveFit out;
  out.penalty = penalty;
  Eigen::LDLT<Eigen::MatrixXd> ldlt(A);
  const Eigen::VectorXd piv = ldlt.vectorD().cwiseAbs();
  const bool singular = ldlt.info() != Eigen::Success || piv.minCoeff() <= 1e-12 * piv.maxCoeff();
  if (singular) {
    out.fallback = true;
    out.penalty = std::max(penalty, 1e-10);
    A = W.transpose() * W + out.penalty * D.transpose() * D;
    A.diagonal().array() += 1e-10 * std::max(1.0, A.diagonal().maxCoeff());
    ldlt.compute(A);
  }
  const Eigen::VectorXd f = ldlt.solve(rhs);
  out.values.assign(f.data(), f.data() + n);
  return out;
}

PayoffPrice price_arbitrary_payoff(const ExpectedFSPD& g, const std::function<double(double)>& h) {
  if (g.K.size() < 3) throw GridError("payoff pricing: density needs at least 3 nodes");
  const double dk = g.K[1] - g.K[0];
  PayoffPrice p;
  double mass = 0.0;
  for (std::size_t i = 0; i < g.K.size(); ++i) {
    const double w = (i == 0 || i + 1 == g.K.size() ? 0.5 : 1.0) * dk;
    p.value += w * g.density[i] * h(g.K[i]);
    mass += w * g.density[i];
  }
  p.tail_mass = g.normalizer > 0.0 ? 1.0 - mass / g.normalizer : 0.0;
  p.tail_warning = std::abs(p.tail_mass) > 0.01;
  if (p.tail_warning)
    std::cerr << "warning: truncated tail mass " << p.tail_mass << " exceeds 1% of the density\n";
  return p;
}

FSPDExtraction fspd_extract(double S, double r, const HorizonSpec& hz, const std::vector<FSPDObservation>& obs,
                            const StrikeGrid& grid, double penalty_sigma, double penalty_mu) {
  hz.validate();
  grid.validate();
  if (obs.size() < 5) throw GridError("fspd extract: need at least 5 observed strikes");
  std::vector<double> xs, iv;
  for (const auto& o : obs) {
    xs.push_back(o.K);
    iv.push_back(implied_vol_invert(o.call, S, o.K, r, hz.total()));
  }
  FSPDExtraction out;
  out.sigma = smooth_curve_fit(xs, iv, grid, penalty_sigma);
  // Implied drift per observation using the fitted volatility at its strike.
  const double h = grid.spacing();
  const int n = static_cast<int>(grid.size());
  auto sigma_at = [&](double k) {
    const int j = std::clamp(static_cast<int>(std::floor((k - grid.K[0]) / h)), 0, n - 2);
    const double w = (k - grid.K[j]) / h;
    return (1.0 - w) * out.sigma.values[j] + w * out.sigma.values[j + 1];
  };
  std::vector<double> mus;
  for (const auto& o : obs) mus.push_back(implied_drift_invert(o.expected_call, S, o.K, r, sigma_at(o.K), hz));
  out.mu = smooth_curve_fit(xs, mus, grid, penalty_mu);
  out.expected_calls.resize(n);
  for (int j = 0; j < n; ++j)
    out.expected_calls[j] = bs_expected_call({{S, out.mu.values[j], out.sigma.values[j], r}, grid.K[j], hz});
  out.density = fspd_second_difference(grid, out.expected_calls);
  out.density.normalizer = std::exp(-r * hz.post());
  return out;
}

}  // namespace eem
