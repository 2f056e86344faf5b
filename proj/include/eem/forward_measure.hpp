#pragma once

#include <vector>

#include "eem/term_structure.hpp"

namespace eem {

struct MertonInputs {
  double E_SH = 100.0;
  double E_PHT = 1.0;
  double vp = 0.2;
  double K = 100.0;
};

struct MertonDHat {
  double d1 = 0.0;
  double d2 = 0.0;
};

MertonDHat merton_dhat(const MertonInputs& in);
double merton_expected_call(const MertonInputs& in);

struct MertonVasicekSpec {
  double S_t = 100.0;
  double sigma = 0.2;
  double gamma = 0.0;
  double rho = 0.0;  // correlation of asset and rate shocks
  double alpha_r = 0.5;
  double m_r = 0.05;
  double sigma_r = 0.015;
  double gamma_r = 0.0;
  double r_t = 0.03;

  void validate() const;
  ShortRateParams rates() const { return {alpha_r, m_r, sigma_r, gamma_r}; }
};

double expected_asset_price_vasicek(const MertonVasicekSpec& s, const HorizonSpec& hz);
// sqrt of the integrated variance of ln(S/P(., T)) over [t, T].
double merton_vasicek_vp(const MertonVasicekSpec& s, const HorizonSpec& hz);
double merton_vasicek_expected_call(const MertonVasicekSpec& s, double K, const HorizonSpec& hz);

// Exchange of asset 1 for asset 2 with Vasicek rates.
struct MargrabeSpec {
  double S1 = 100.0, sigma1 = 0.2, gamma1 = 0.0, rho1r = 0.0;
  double S2 = 100.0, sigma2 = 0.2, gamma2 = 0.0, rho2r = 0.0;
  double rho12 = 0.0;
  double alpha_r = 0.5, m_r = 0.05, sigma_r = 0.015, gamma_r = 0.0, r_t = 0.03;

  void validate() const;
  MertonVasicekSpec asset(int j) const;
  MargrabeSpec swapped() const;
};

double margrabe_vp(const MargrabeSpec& s, const HorizonSpec& hz);
double margrabe_expected_exchange(const MargrabeSpec& s, const HorizonSpec& hz);

struct CDGSpec {
  double lambda = 0.2;
  double nu = 0.15625;
  double phi = 2.8;
  double sigma = 0.25;
  double gamma_S = 0.2;
  double rho = -0.25;
  double alpha_r = 0.5, m_r = 0.05, sigma_r = 0.02, gamma_r = -0.1;
  double lnK = 0.0;
  double omega = 0.56;
  int n_grid = 200;

  double l_bar() const { return sigma * sigma / (2.0 * lambda) - nu; }
  void validate() const;
  ShortRateParams rates() const { return {alpha_r, m_r, sigma_r, gamma_r}; }
};

struct CDGState {
  double l_t = -0.6;
  double r_t = 0.03;
};

// Gaussian law of (l, r) under the R1T measure.
struct CDGMoments {
  double mean_l = 0.0;
  double mean_r = 0.0;
  Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();
};

// Instantaneous drift intercept of (l, r) at time s under R1T.
Eigen::Vector2d cdg_drift_intercept(const CDGSpec& s, const HorizonSpec& hz, double time);
Eigen::Matrix2d cdg_drift_matrix(const CDGSpec& s);
Eigen::Matrix2d cdg_diffusion_cov(const CDGSpec& s);
Eigen::Matrix2d cdg_transition(const CDGSpec& s, double tau);  // exp(F tau)
CDGMoments cdg_moments(const CDGSpec& s, const CDGState& x, const HorizonSpec& hz, double u);
// Cov(l_u, l_s) for u >= s, both conditional on time-t information.
double cdg_cov_l(const CDGSpec& s, const HorizonSpec& hz, double u, double sv);

struct CDGResult {
  double value = 0.0;
  double expected_riskfree = 0.0;
  double default_probability = 0.0;
  std::vector<double> q;
  int skipped = 0;
};

CDGResult cdg_expected_bond(const CDGSpec& s, const CDGState& x, const HorizonSpec& hz);

}  // namespace eem
