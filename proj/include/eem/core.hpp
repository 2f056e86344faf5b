#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace eem {

// Bad user input: exit code 2 at the CLI.
struct InputError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct DomainError : InputError {
  using InputError::InputError;
};
struct ParameterError : InputError {
  using InputError::InputError;
};
struct AlignmentError : InputError {
  using InputError::InputError;
};
struct GridError : InputError {
  using InputError::InputError;
};

// Numerical failure: exit code 3 at the CLI.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DivergenceError : NumericalError {
  using NumericalError::NumericalError;
};
struct ToleranceError : NumericalError {
  double estimate;
  ToleranceError(const std::string& what, double est) : NumericalError(what), estimate(est) {}
};
struct InversionError : NumericalError {
  using NumericalError::NumericalError;
};

struct HorizonSpec {
  double t = 0.0;
  double H = 0.0;
  double T = 0.0;

  void validate() const {
    if (!std::isfinite(t) || !std::isfinite(H) || !std::isfinite(T))
      throw DomainError("horizon: non-finite time");
    if (t < 0.0) throw DomainError("horizon: t must be non-negative");
    if (!(t <= H && H <= T)) throw DomainError("horizon: require t <= H <= T");
  }
  double pre() const { return H - t; }
  double post() const { return T - H; }
  double total() const { return T - t; }
};

enum class MeasureTag { P, Q, R, QT, R1T, R1S };

inline const char* to_string(MeasureTag m) {
  switch (m) {
    case MeasureTag::P: return "P";
    case MeasureTag::Q: return "Q";
    case MeasureTag::R: return "R";
    case MeasureTag::QT: return "QT";
    case MeasureTag::R1T: return "R1T";
    case MeasureTag::R1S: return "R1S";
  }
  return "?";
}

inline double norm_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

inline double norm_pdf(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

// (1 - e^{-a tau}) / a, with the series limit near a = 0.
inline double B_alpha(double a, double tau) {
  const double x = a * tau;
  if (std::abs(a) < 1e-10 || std::abs(x) < 1e-10) return tau * (1.0 - 0.5 * x + x * x / 6.0);
  return -std::expm1(-x) / a;
}

}  // namespace eem
