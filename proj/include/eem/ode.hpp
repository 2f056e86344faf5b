#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <string>
#include <unsupported/Eigen/MatrixFunctions>
#include <vector>

#include "eem/core.hpp"

namespace eem {

template <typename Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using cd = std::complex<double>;

inline int default_steps(double tau, int per_year = 200) {
  return std::max(4, static_cast<int>(std::ceil(per_year * tau - 1e-9)));
}

template <typename Scalar, typename Rhs>
Vec<Scalar> rk4_step(Rhs& f, double tau, const Vec<Scalar>& y, double h) {
  const Vec<Scalar> k1 = f(tau, y);
  const Vec<Scalar> k2 = f(tau + 0.5 * h, (y + (0.5 * h) * k1).eval());
  const Vec<Scalar> k3 = f(tau + 0.5 * h, (y + (0.5 * h) * k2).eval());
  const Vec<Scalar> k4 = f(tau + h, (y + h * k3).eval());
  return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

// Fixed-step classical RK4; returns the state at every grid point (size steps + 1).
template <typename Scalar, typename Rhs>
std::vector<Vec<Scalar>> rk4_path(Rhs&& f, const Vec<Scalar>& y0, double tau_max, int steps,
                                  double guard = 1e150) {
  std::vector<Vec<Scalar>> out;
  out.reserve(steps + 1);
  out.push_back(y0);
  if (tau_max <= 0.0) return out;
  const double h = tau_max / steps;
  for (int k = 0; k < steps; ++k) {
    Vec<Scalar> y = rk4_step<Scalar>(f, k * h, out.back(), h);
    if (!y.allFinite() || y.cwiseAbs().maxCoeff() > guard)
      throw DivergenceError("riccati: solution diverged at tau = " + std::to_string((k + 1) * h));
    out.push_back(std::move(y));
  }
  return out;
}

// exp(M) by scaling and squaring with a Pade approximant.
template <typename Derived>
Mat<typename Derived::Scalar> expm(const Eigen::MatrixBase<Derived>& M) {
  return M.eval().exp();
}

// e^{-K tau} (y - theta) + theta computed with the intercept k0 = K theta,
// so a singular K is fine.
inline Vec<double> ou_mean(const Mat<double>& K, const Vec<double>& k0, const Vec<double>& y,
                           double tau) {
  const Eigen::Index n = K.rows();
  Mat<double> M = Mat<double>::Zero(n + 1, n + 1);
  M.topLeftCorner(n, n) = -K * tau;
  M.topRightCorner(n, 1) = k0 * tau;
  Vec<double> z(n + 1);
  z << y, 1.0;
  return (expm(M) * z).head(n);
}

}  // namespace eem
