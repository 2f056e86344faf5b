#pragma once

#include <functional>
#include <string>
#include <vector>

#include "eem/core.hpp"

namespace eem {

struct GBMSpec {
  double S0 = 100.0;
  double mu = 0.0;
  double sigma = 0.2;
  double r = 0.0;

  void validate() const {
    if (!(S0 > 0.0)) throw ParameterError("gbm: S0 must be positive");
    if (!(sigma >= 0.0)) throw ParameterError("gbm: sigma must be non-negative");
    if (!std::isfinite(mu) || !std::isfinite(r)) throw ParameterError("gbm: non-finite drift");
  }
  double gamma() const { return (mu - r) / sigma; }
};

enum class Payoff { Call, Put };

struct ExpectedPriceResult {
  double value = 0.0;
  std::string method;
  double tolerance = 0.0;   // achieved or requested, method dependent
  long steps = 0;           // tree levels / ODE steps / quadrature nodes
  double standard_error = 0.0;
};

// Piecewise drift with the on/after branch active at s == H.
struct RegimeDrift {
  std::function<double(double)> drift_before_H;
  std::function<double(double)> drift_on_after_H;
  double switch_time = 0.0;

  double operator()(double s) const {
    return s < switch_time ? drift_before_H(s) : drift_on_after_H(s);
  }
};

double r_drift(const GBMSpec& spec, double s, const HorizonSpec& hz);
RegimeDrift r_regime(const GBMSpec& spec, const HorizonSpec& hz);

struct BinomialTree {
  double dt = 0.0;
  double u = 0.0;
  double d = 0.0;
  double p_up = 0.0;  // physical, periods before H
  double q_up = 0.0;  // risk neutral, periods on/after H
  int n_pre = 0;
  int n_post = 0;
  std::vector<double> h_values;  // claim prices at the H level, index = number of up moves
};

struct BinomialOptions {
  int steps_per_year = 1;
  bool auto_align = false;
};

BinomialTree build_binomial(const GBMSpec& spec, const HorizonSpec& hz, const BinomialOptions& opt);

ExpectedPriceResult binomial_expected_price(const GBMSpec& spec, double K, const HorizonSpec& hz,
                                            int steps_per_year, Payoff payoff,
                                            bool auto_align = false, BinomialTree* tree = nullptr);

double iterated_expectation_oracle(const GBMSpec& spec, double K, const HorizonSpec& hz,
                                   int steps_per_year, Payoff payoff = Payoff::Call,
                                   bool auto_align = false);

}  // namespace eem
