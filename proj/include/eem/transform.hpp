#pragma once

#include <functional>
#include <vector>

#include "eem/ode.hpp"

namespace eem {

// Jump-size transform theta(c) = E[exp(c'J)] and its gradient.
struct JumpTransform {
  std::function<cd(const Vec<cd>&)> theta;
  std::function<Vec<cd>(const Vec<cd>&)> grad;
};

JumpTransform no_jumps();
// Normal jump of size N(mean, sd^2) in one state component.
JumpTransform normal_jumps(int N, int component, double mean, double sd);
// Exponential jump with the given mean in one state component.
JumpTransform exponential_jumps(int N, int component, double mean);

// Drift k0 + k1 Y, covariance h0 + sum_k h1[k] Y_k, intensity l0 + l1'Y,
// short rate rho0 + rho1'Y.  h1[k] is the N x N slice multiplying Y_k.
struct AJDCharacteristic {
  Vec<double> k0;
  Mat<double> k1;
  Mat<double> h0;
  std::vector<Mat<double>> h1;
  double l0 = 0.0;
  Vec<double> l1;
  double rho0 = 0.0;
  Vec<double> rho1;
  JumpTransform jump = no_jumps();

  int N() const { return static_cast<int>(k0.size()); }
  void validate() const;
};

struct ComplexRiccatiSolution {
  cd A{0.0};
  Vec<cd> B;
  cd D{0.0};
  Vec<cd> E;
  long steps = 0;      // accepted RK4 steps including halvings
  int halvings = 0;
};

struct TransformOptions {
  int steps_per_year = 200;
  int max_halving_depth = 12;
};

// One leg of the complex Riccati system over tau with boundary (b0, b1)
// and discount coefficients (c0, c1).  When `extended` the linear (D, E)
// system with boundary (d0, d1) is carried along.
ComplexRiccatiSolution complex_riccati(const AJDCharacteristic& chi, cd b0, const Vec<cd>& b1, double c0,
                                       const Vec<double>& c1, double tau, const TransformOptions& opt = {},
                                       bool extended = false, cd d0 = 0.0, const Vec<cd>& d1 = {});

cd q_transform(const AJDCharacteristic& chi_star, const Vec<cd>& z, const Vec<double>& Y_t, double tau,
               const TransformOptions& opt = {});
cd r_transform(const AJDCharacteristic& chi, const AJDCharacteristic& chi_star, const Vec<cd>& z,
               const Vec<double>& Y_t, const HorizonSpec& hz, const TransformOptions& opt = {});
cd extended_r_transform(const AJDCharacteristic& chi, const AJDCharacteristic& chi_star, const Vec<double>& v,
                        const Vec<cd>& z, const Vec<double>& Y_t, const HorizonSpec& hz,
                        const TransformOptions& opt = {});
// E^R[exp(-int_H^T r) S_T^a1 S_T0^a2 (S_T/S_T0)^z] with ln S in state component `asset`.
cd forward_start_r_transform(const AJDCharacteristic& chi, const AJDCharacteristic& chi_star, cd a1, cd a2,
                             cd z, const Vec<double>& Y_t, double t, double T0, double H, double T,
                             int asset = 0, const TransformOptions& opt = {});

struct QuadOptions {
  double abs_tol = 1e-8;
  double u_max = 50.0;
  int max_doublings = 4;
  int max_depth = 30;
};

struct InversionResult {
  double value = 0.0;
  double Pi1 = 0.0;
  double Pi2 = 0.0;
  long nodes = 0;
  double u_max = 0.0;
};

// Phi^1, Phi^2 are normalized characteristic functions of ln(S_T) (or of
// ln(S_T/S_T0)) under the two share/bond measures.
struct TransformHandle {
  std::function<cd(double)> phi1;
  std::function<cd(double)> phi2;
  double norm1 = 1.0;
  double norm2 = 1.0;
};

// 1/2 + 1/pi int_0^inf Re[e^{-iu ln k} Phi(u) / (iu)] du
double fourier_probability(const std::function<cd(double)>& phi, double log_k, const QuadOptions& q,
                           long* nodes = nullptr, double* u_used = nullptr);
InversionResult fourier_expected_call(const TransformHandle& h, double k, const QuadOptions& q = {});

TransformHandle expected_call_handle(const AJDCharacteristic& chi, const AJDCharacteristic& chi_star,
                                     const Vec<double>& Y_t, const HorizonSpec& hz, int asset = 0,
                                     const TransformOptions& opt = {});
TransformHandle forward_start_handle(const AJDCharacteristic& chi, const AJDCharacteristic& chi_star,
                                     const Vec<double>& Y_t, double t, double T0, double H, double T,
                                     int asset = 0, const TransformOptions& opt = {});

// Built-in characteristics.
// Y = ln S with constant r; drift mu under the physical measure.
AJDCharacteristic gbm_chi(double drift, double sigma, double r);

struct HestonParams {
  double r = 0.03;
  double v0 = 0.04;
  double kappa = 2.0;       // physical
  double theta = 0.04;      // physical
  double kappa_q = 2.0;     // risk neutral
  double theta_q = 0.04;    // risk neutral
  double sigma_v = 0.3;
  double rho = -0.5;
  double lambda_s = 0.0;    // equity premium per unit variance
};

// Y = (ln S, v).  under_q selects the risk-neutral characteristic.
AJDCharacteristic heston_chi(const HestonParams& p, bool under_q);

struct MertonJumpParams {
  double r = 0.03;
  double mu = 0.08;     // physical expected return
  double sigma = 0.2;
  double intensity = 0.5;
  double jump_mean = -0.1;
  double jump_sd = 0.15;
};

AJDCharacteristic merton_jump_chi(const MertonJumpParams& p, bool under_q);

}  // namespace eem
