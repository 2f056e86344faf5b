#pragma once

#include <vector>

#include "eem/ode.hpp"

namespace eem {

// dY = K(Theta - Y)ds + Sigma sqrt(V) dW,  V_ii = alpha_i + beta_i'Y,
// r = delta0 + delta_y'Y, market prices of risk sqrt(V) gamma.
struct AffineModelSpec {
  int N = 1;
  Mat<double> K_mat;
  Vec<double> Theta;
  Mat<double> Sigma;
  Vec<double> alpha;
  Mat<double> beta;  // row i is beta_i'
  double delta0 = 0.0;
  Vec<double> delta_y;
  Vec<double> gamma;

  void validate() const;
  void check_state(const Vec<double>& Y) const;

  Vec<double> intercept() const { return K_mat * Theta; }
  // K* = K + Sigma Phi with Phi_i = gamma_i beta_i'.
  Mat<double> K_star() const { return K_mat + Sigma * (gamma.asDiagonal() * beta); }
  // K* Theta* = K Theta - Sigma psi with psi_i = gamma_i alpha_i.
  Vec<double> intercept_star() const { return intercept() - Sigma * gamma.cwiseProduct(alpha); }
  Vec<double> Theta_star() const { return K_star().lu().solve(intercept_star()); }
};

struct RiccatiSolution {
  double h = 0.0;
  std::vector<double> tau;
  std::vector<double> A;
  std::vector<Vec<double>> B;
  double richardson = 0.0;  // |end(h) - end(2h)| / 15, max over components

  double A_end() const { return A.back(); }
  const Vec<double>& B_end() const { return B.back(); }
  // Linear interpolation between grid nodes.
  double A_at(double s) const;
  Vec<double> B_at(double s) const;
};

// Drift K_mat(Theta - Y) supplied through its intercept k0 = K_mat Theta.
RiccatiSolution riccati_solve_affine(const Vec<double>& b, const Vec<double>& c, const Mat<double>& K_mat,
                                     const Vec<double>& k0, const Mat<double>& Sigma,
                                     const Vec<double>& alpha, const Mat<double>& beta, double tau_max,
                                     int steps);

RiccatiSolution riccati_solve(const Vec<double>& b, const Vec<double>& c, const Mat<double>& K_mat,
                              const Vec<double>& Theta, const Mat<double>& Sigma, const Vec<double>& alpha,
                              const Mat<double>& beta, double tau_max, int steps);

struct OdeOptions {
  int steps_per_year = 200;
};

double atsm_current_bond(const AffineModelSpec& spec, const Vec<double>& Y_t, double tau,
                         const OdeOptions& opt = {});
double expected_bond_price_atsm(const AffineModelSpec& spec, const Vec<double>& Y_t, const HorizonSpec& hz,
                                const OdeOptions& opt = {});
double expected_log_bond_atsm(const AffineModelSpec& spec, const Vec<double>& Y_t, const HorizonSpec& hz,
                              const OdeOptions& opt = {});
double expected_yield(const AffineModelSpec& spec, const Vec<double>& Y_t, const HorizonSpec& hz,
                      const OdeOptions& opt = {});
Vec<double> expected_state_R(const AffineModelSpec& spec, const Vec<double>& Y_t, double tau);

// One-factor short-rate models.
struct ShortRateParams {
  double alpha_r = 0.5;
  double m_r = 0.05;
  double sigma_r = 0.02;
  double gamma_r = 0.0;
};

struct AB {
  double A = 0.0;
  double B = 0.0;
};

AB vasicek_AB(double alpha, double m, double sigma, double b, double c, double tau);
double vasicek_expected_bond(const ShortRateParams& p, double r_t, const HorizonSpec& hz);
AffineModelSpec vasicek_as_atsm(const ShortRateParams& p);

AB cir_AB(double alpha, double m, double sigma, double b, double c, double tau);
double cir_expected_bond(const ShortRateParams& p, double r_t, const HorizonSpec& hz);
AffineModelSpec cir_as_atsm(const ShortRateParams& p);

// A1r(3) with state (v, theta, r).
struct A1r3Params {
  double alpha_v = 1.0, m_v = 0.01, eta = 0.1;
  double alpha_theta = 0.2, m_theta = 0.05, sigma_theta_v = 0.0;
  double zeta = 0.01, beta_theta = 0.0, sigma_theta_r = 0.0, delta_r = 0.0;
  double alpha_rv = 0.0, alpha_r = 1.0, sigma_rv = 0.0, sigma_r_theta = 0.0;
  double gamma1 = 0.0, gamma2 = 0.0, gamma3 = 0.0;
};

// C and D of the A1r(3) system in closed form, boundary lambda, forcing mu.
double a1r3_D(double alpha_r, double lam3, double mu3, double tau);
double a1r3_C(double alpha_theta, double alpha_r, double lam2, double lam3, double mu2, double mu3, double tau);

AffineModelSpec a1r3_as_atsm(const A1r3Params& p);
double a1r3_expected_bond(const A1r3Params& p, const Vec<double>& state, const HorizonSpec& hz,
                          const OdeOptions& opt = {});

// r = alpha + beta'Y + Y'Psi Y,  dY = (mu + xi Y)ds + Sigma dW,
// market prices of risk Sigma^{-1}(gamma0 + gamma1 Y).
struct QTSMSpec {
  double alpha = 0.0;
  Vec<double> beta;
  Mat<double> Psi;
  Vec<double> mu;
  Mat<double> xi;
  Mat<double> Sigma;
  Vec<double> gamma0;
  Mat<double> gamma1;

  int N() const { return static_cast<int>(mu.size()); }
  void validate() const;
  bool is_qtsm3() const;
};

struct QuadraticSolution {
  double A = 0.0;
  Vec<double> B;
  Mat<double> C;
};

QuadraticSolution qtsm_riccati(const Vec<double>& b, const Mat<double>& c, const Vec<double>& d,
                               const Mat<double>& q, const Vec<double>& mu, const Mat<double>& xi,
                               const Mat<double>& Sigma, double tau, int steps);

struct ABC {
  double A = 0.0;
  double B = 0.0;
  double C = 0.0;
};

// Closed form of the one-dimensional quadratic Riccati system.
ABC qtsm1_closed(double mu, double xi, double s, double b, double c, double q, double tau);

double qtsm_expected_bond(const QTSMSpec& spec, const Vec<double>& Y_t, const HorizonSpec& hz,
                          const OdeOptions& opt = {});
double qtsm3_expected_bond(const QTSMSpec& spec, const Vec<double>& Y_t, const HorizonSpec& hz);

}  // namespace eem
