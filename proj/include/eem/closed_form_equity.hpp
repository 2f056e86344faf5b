#pragma once

#include "eem/measure_core.hpp"

namespace eem {

struct BSExpectedInputs {
  GBMSpec spec;
  double K = 100.0;
  HorizonSpec hz;
};

struct ForwardStartInputs {
  GBMSpec spec;
  double k = 1.0;
  double T0 = 0.0;
  HorizonSpec hz;
};

struct DHat {
  double d1 = 0.0;
  double d2 = 0.0;
  double vp = 0.0;
};

// Current Black-Scholes call and put with time to maturity tau.
double bs_call(double S, double K, double sigma, double r, double tau);
double bs_put(double S, double K, double sigma, double r, double tau);

DHat bs_expected_dhat(const BSExpectedInputs& in);
double bs_expected_call(const BSExpectedInputs& in);
double bs_expected_put(const BSExpectedInputs& in);

double fso_expected_price(const ForwardStartInputs& in);

}  // namespace eem
