#pragma once

#include <functional>
#include <vector>

#include "eem/closed_form_equity.hpp"

namespace eem {

struct StrikeGrid {
  std::vector<double> K;

  double spacing() const { return K.size() > 1 ? K[1] - K[0] : 0.0; }
  std::size_t size() const { return K.size(); }
  // Uniform, increasing, positive, at least five nodes.
  void validate() const;
};

StrikeGrid uniform_grid(double lo, double hi, int n);
// Spans the mean of ln S_T +/- `width` integrated standard deviations, uniform in K.
StrikeGrid default_grid(const GBMSpec& spec, const HorizonSpec& hz, int n = 121, double width = 5.0);

struct ExpectedFSPD {
  std::vector<double> K;        // interior nodes
  std::vector<double> density;  // expected discounted density at each node
  double normalizer = 0.0;      // E^P[P(H, T)]; defaults to the grid integral, overwrite when known
  int clipped = 0;              // small negatives set to zero
  bool negative_lobe = false;
  double min_raw = 0.0;
};

// Central second difference of expected call prices in the strike.
ExpectedFSPD fspd_second_difference(const StrikeGrid& grid, const std::vector<double>& expected_calls,
                                    double clip_tol = 1e-8);

struct InversionOptions {
  int max_iter = 100;
  double tol = 1e-10;
};

// Black-Scholes implied volatility of a current call, tau = T - t.
double implied_vol_invert(double price, double S, double K, double r, double tau, const InversionOptions& o = {});
// Physical drift reproducing an expected call price given sigma.
double implied_drift_invert(double expected_price, double S, double K, double r, double sigma,
                            const HorizonSpec& hz, const InversionOptions& o = {});

struct CurveFit {
  std::vector<double> values;  // on the grid nodes
  double penalty = 0.0;        // penalty actually used
  bool fallback = false;       // regularization floor applied
};

// Penalized least squares: |W f - y|^2 + penalty |D2 f|^2 with W linear interpolation to x.
CurveFit smooth_curve_fit(const std::vector<double>& x, const std::vector<double>& y, const StrikeGrid& grid,
                          double penalty);

struct PayoffPrice {
  double value = 0.0;
  double tail_mass = 0.0;  // 1 - integral / normalizer
  bool tail_warning = false;
};

PayoffPrice price_arbitrary_payoff(const ExpectedFSPD& g, const std::function<double(double)>& h);

struct FSPDObservation {
  double K = 0.0;
  double call = 0.0;           // current call, maturity T
  double expected_call = 0.0;  // expected call at H
};

struct FSPDExtraction {
  CurveFit sigma;
  CurveFit mu;
  std::vector<double> expected_calls;
  ExpectedFSPD density;
};

FSPDExtraction fspd_extract(double S, double r, const HorizonSpec& hz, const std::vector<FSPDObservation>& obs,
                            const StrikeGrid& grid, double penalty_sigma = 1e-3, double penalty_mu = 1e-3);

}  // namespace eem
