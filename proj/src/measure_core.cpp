#include "eem/measure_core.hpp"

#include <algorithm>
#include <cmath>

namespace eem {

double r_drift(const GBMSpec& spec, double s, const HorizonSpec& hz) {
  hz.validate();
  if (s < hz.t || s > hz.T) throw DomainError("r_drift: s outside [t, T]");
  return s < hz.H ? spec.mu : spec.r;
}

RegimeDrift r_regime(const GBMSpec& spec, const HorizonSpec& hz) {
  hz.validate();
  const double mu = spec.mu, r = spec.r;
  return RegimeDrift{[mu](double) { return mu; }, [r](double) { return r; }, hz.H};
}

namespace {

bool near_integer(double x, long& n) {
  const double k = std::round(x);
  if (std::abs(x - k) > 1e-9 * std::max(1.0, std::abs(x))) return false;
  n = static_cast<long>(k);
  return true;
}

double payoff_value(Payoff p, double S, double K) {
  return p == Payoff::Call ? std::max(S - K, 0.0) : std::max(K - S, 0.0);
}

void check_prob(double p, const char* name) {
  if (!(p > 0.0 && p < 1.0))
    throw ParameterError(std::string("binomial: ") + name + " probability outside (0,1)");
}

// Backward induction over one regime: v[j] <- disc*(p*v[j+1] + (1-p)*v[j]).
void roll_back(std::vector<double>& v, int levels, double p, double disc) {
  for (int n = static_cast<int>(v.size()) - 1, k = 0; k < levels; ++k, --n)
    for (int j = 0; j < n; ++j) v[j] = disc * (p * v[j + 1] + (1.0 - p) * v[j]);
  v.resize(v.size() - levels);
}

}  // namespace

BinomialTree build_binomial(const GBMSpec& spec, const HorizonSpec& hz, const BinomialOptions& opt) {
  spec.validate();
  hz.validate();
  if (opt.steps_per_year < 1) throw ParameterError("binomial: steps_per_year must be >= 1");

  BinomialTree tr;
  const int spy_max = opt.auto_align ? 4 * opt.steps_per_year : opt.steps_per_year;
  bool aligned = false;
  for (int spy = opt.steps_per_year; spy <= spy_max && !aligned; ++spy) {
    long n_tot = 0, n_pre = 0;
    if (near_integer(hz.total() * spy, n_tot) && near_integer(hz.pre() * spy, n_pre)) {
      aligned = true;
      tr.dt = 1.0 / spy;
      tr.n_pre = static_cast<int>(n_pre);
      tr.n_post = static_cast<int>(n_tot - n_pre);
    }
  }
  if (!aligned) throw AlignmentError("binomial: H or T does not fall on a tree level");

  tr.u = std::exp(spec.sigma * std::sqrt(tr.dt));
  tr.d = 1.0 / tr.u;
  if (!(tr.u > tr.d)) throw ParameterError("binomial: degenerate u == d");
  tr.p_up = (std::exp(spec.mu * tr.dt) - tr.d) / (tr.u - tr.d);
  tr.q_up = (std::exp(spec.r * tr.dt) - tr.d) / (tr.u - tr.d);
  if (tr.n_pre > 0) check_prob(tr.p_up, "physical");
  if (tr.n_post > 0) check_prob(tr.q_up, "risk-neutral");
  return tr;
}

ExpectedPriceResult binomial_expected_price(const GBMSpec& spec, double K, const HorizonSpec& hz,
                                            int steps_per_year, Payoff payoff, bool auto_align,
                                            BinomialTree* tree) {
  if (!(K >= 0.0)) throw ParameterError("binomial: K must be non-negative");
  BinomialTree tr = build_binomial(spec, hz, {steps_per_year, auto_align});
  const int n = tr.n_pre + tr.n_post;

  std::vector<double> v(n + 1);
  for (int j = 0; j <= n; ++j)
    v[j] = payoff_value(payoff, spec.S0 * std::pow(tr.u, j) * std::pow(tr.d, n - j), K);

  roll_back(v, tr.n_post, tr.q_up, std::exp(-spec.r * tr.dt));
  tr.h_values = v;
  roll_back(v, tr.n_pre, tr.p_up, 1.0);

  ExpectedPriceResult res;
  res.value = v[0];
  res.method = "binomial_R_tree";
  res.steps = n;
  if (tree) *tree = std::move(tr);
  return res;
}

double iterated_expectation_oracle(const GBMSpec& spec, double K, const HorizonSpec& hz,
                                   int steps_per_year, Payoff payoff, bool auto_align) {
  if (!(K >= 0.0)) throw ParameterError("binomial: K must be non-negative");
  const BinomialTree tr = build_binomial(spec, hz, {steps_per_year, auto_align});
  const int n = tr.n_pre + tr.n_post;
  const double disc = std::exp(-spec.r * tr.dt);

  // Pass 1: a separate Q subtree for every node on the H level.
  std::vector<double> at_h(tr.n_pre + 1);
  for (int i = 0; i <= tr.n_pre; ++i) {
    std::vector<double> w(tr.n_post + 1);
    for (int k = 0; k <= tr.n_post; ++k) {
      const int j = i + k;
      w[k] = payoff_value(payoff, spec.S0 * std::pow(tr.u, j) * std::pow(tr.d, n - j), K);
    }
    roll_back(w, tr.n_post, tr.q_up, disc);
    at_h[i] = w[0];
  }
  // Pass 2: physical expectation of the H-level prices, no discounting.
  roll_back(at_h, tr.n_pre, tr.p_up, 1.0);
  return at_h[0];
}

}  // namespace eem
