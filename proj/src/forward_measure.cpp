#include "eem/forward_measure.hpp"

#include <algorithm>
#include <cmath>

#include "eem/quadrature.hpp"

namespace eem {

MertonDHat merton_dhat(const MertonInputs& in) {
  MertonDHat d;
  d.d1 = std::log(in.E_SH / (in.E_PHT * in.K)) / in.vp + 0.5 * in.vp;
  d.d2 = d.d1 - in.vp;
  return d;
}

double merton_expected_call(const MertonInputs& in) {
  if (!(in.E_SH > 0.0) || !(in.E_PHT > 0.0) || !(in.K > 0.0) || !(in.vp >= 0.0))
    throw ParameterError("merton: inputs must be positive, vp non-negative");
  const double kp = in.K * in.E_PHT;
  if (in.vp == 0.0) return std::max(in.E_SH - kp, 0.0);
  const MertonDHat d = merton_dhat(in);
  return in.E_SH * norm_cdf(d.d1) - kp * norm_cdf(d.d2);
}

void MertonVasicekSpec::validate() const {
  if (!(S_t > 0.0)) throw ParameterError("merton-vasicek: S_t must be positive");
  if (!(sigma > 0.0)) throw ParameterError("merton-vasicek: sigma must be positive");
  if (!(alpha_r > 0.0)) throw ParameterError("merton-vasicek: alpha_r must be positive");
  if (!(sigma_r >= 0.0)) throw ParameterError("merton-vasicek: sigma_r must be non-negative");
  if (std::abs(rho) > 1.0) throw ParameterError("merton-vasicek: |rho| must be <= 1");
}

double expected_asset_price_vasicek(const MertonVasicekSpec& s, const HorizonSpec& hz) {
  hz.validate();
  s.validate();
  const double tau = hz.pre();
  const double a = s.alpha_r;
  const double Ba = B_alpha(a, tau), B2a = B_alpha(2.0 * a, tau);
  const double v2 = s.sigma_r * s.sigma_r / (2.0 * a * a);
  const double c = s.rho * s.sigma * s.sigma_r / a;
  const double expo = (s.m_r + s.gamma * s.sigma + v2 + c) * tau + (s.r_t - s.m_r) * Ba + v2 * (B2a - 2.0 * Ba) -
                      c * Ba;
  return s.S_t * std::exp(expo);
}

double merton_vasicek_vp(const MertonVasicekSpec& s, const HorizonSpec& hz) {
  hz.validate();
  s.validate();
  const double tau = hz.total();
  const double a = s.alpha_r;
  const double Ba = B_alpha(a, tau), B2a = B_alpha(2.0 * a, tau);
  const double w = s.sigma_r * s.sigma_r / (a * a);
  const double c = 2.0 * s.rho * s.sigma * s.sigma_r / a;
  const double v2 = (s.sigma * s.sigma + w + c) * tau + w * (B2a - 2.0 * Ba) - c * Ba;
  return std::sqrt(std::max(v2, 0.0));
}

double merton_vasicek_expected_call(const MertonVasicekSpec& s, double K, const HorizonSpec& hz) {
  MertonInputs in;
  in.E_SH = expected_asset_price_vasicek(s, hz);
  in.E_PHT = vasicek_expected_bond(s.rates(), s.r_t, hz);
  in.vp = merton_vasicek_vp(s, hz);
  in.K = K;
  return merton_expected_call(in);
}

// --------------------------------------------------------------- Margrabe

void MargrabeSpec::validate() const {
  if (!(sigma1 > 0.0) || !(sigma2 > 0.0)) throw ParameterError("margrabe: volatilities must be positive");
  if (std::abs(rho12) > 1.0 || std::abs(rho1r) > 1.0 || std::abs(rho2r) > 1.0)
    throw ParameterError("margrabe: correlations must lie in [-1, 1]");
  const double det = 1.0 - rho12 * rho12 - rho1r * rho1r - rho2r * rho2r + 2.0 * rho12 * rho1r * rho2r;
  if (det < -1e-12) throw ParameterError("margrabe: correlation matrix is not positive semidefinite");
}

MertonVasicekSpec MargrabeSpec::asset(int j) const {
  MertonVasicekSpec m;
  m.S_t = j == 1 ? S1 : S2;
  m.sigma = j == 1 ? sigma1 : sigma2;
  m.gamma = j == 1 ? gamma1 : gamma2;
  m.rho = j == 1 ? rho1r : rho2r;
  m.alpha_r = alpha_r;
  m.m_r = m_r;
  m.sigma_r = sigma_r;
  m.gamma_r = gamma_r;
  m.r_t = r_t;
  return m;
}

MargrabeSpec MargrabeSpec::swapped() const {
  MargrabeSpec s = *this;
  std::swap(s.S1, s.S2);
  std::swap(s.sigma1, s.sigma2);
  std::swap(s.gamma1, s.gamma2);
  std::swap(s.rho1r, s.rho2r);
  return s;
}

double margrabe_vp(const MargrabeSpec& s, const HorizonSpec& hz) {
  const double v2 = s.sigma1 * s.sigma1 + s.sigma2 * s.sigma2 - 2.0 * s.rho12 * s.sigma1 * s.sigma2;
  return std::sqrt(std::max(v2, 0.0) * hz.total());
}

double margrabe_expected_exchange(const MargrabeSpec& s, const HorizonSpec& hz) {
  hz.validate();
  s.validate();
  const double e1 = expected_asset_price_vasicek(s.asset(1), hz);
  const double e2 = expected_asset_price_vasicek(s.asset(2), hz);
  const double vp = margrabe_vp(s, hz);
  if (vp == 0.0) return std::max(e2 - e1, 0.0);
  const double d1 = std::log(e2 / e1) / vp + 0.5 * vp;
  return e2 * norm_cdf(d1) - e1 * norm_cdf(d1 - vp);
}

// -------------------------------------------------------------------- CDG

void CDGSpec::validate() const {
  if (!(lambda > 0.0)) throw ParameterError("cdg: lambda must be positive");
  if (!(omega >= 0.0 && omega <= 1.0)) throw ParameterError("cdg: omega must lie in [0, 1]");
  if (n_grid < 2) throw ParameterError("cdg: n_grid must be >= 2");
  if (!(sigma > 0.0)) throw ParameterError("cdg: sigma must be positive");
  if (!(alpha_r > 0.0)) throw ParameterError("cdg: alpha_r must be positive");
  if (std::abs(rho) >= 1.0) throw ParameterError("cdg: |rho| must be < 1");
}

Eigen::Vector2d cdg_drift_intercept(const CDGSpec& s, const HorizonSpec& hz, double u) {
  const double a = s.alpha_r;
  const double rss = s.rho * s.sigma * s.sigma_r;
  const double sr2 = s.sigma_r * s.sigma_r;
  double al = s.lambda * s.l_bar() + rss * B_alpha(a, hz.T - u);
  double ar = a * s.m_r - s.sigma_r * s.gamma_r - sr2 * B_alpha(a, hz.T - u);
  if (u < hz.H) {
    al -= rss * B_alpha(a, hz.H - u) + s.sigma * s.gamma_S;
    ar += sr2 * B_alpha(a, hz.H - u) + s.sigma_r * s.gamma_r;
  }
  return {al, ar};
}

Eigen::Matrix2d cdg_drift_matrix(const CDGSpec& s) {
  Eigen::Matrix2d F;
  F << -s.lambda, -(1.0 + s.lambda * s.phi), 0.0, -s.alpha_r;
  return F;
}

Eigen::Matrix2d cdg_diffusion_cov(const CDGSpec& s) {
  Eigen::Matrix2d G;
  const double c = -s.rho * s.sigma * s.sigma_r;
  G << s.sigma * s.sigma, c, c, s.sigma_r * s.sigma_r;
  return G;
}

Eigen::Matrix2d cdg_transition(const CDGSpec& s, double tau) {
  const double el = std::exp(-s.lambda * tau), ea = std::exp(-s.alpha_r * tau);
  const double gap = s.lambda - s.alpha_r;
  const double cross = std::abs(gap) < 1e-10 ? tau * el : (ea - el) / gap;
  Eigen::Matrix2d E;
  E << el, -(1.0 + s.lambda * s.phi) * cross, 0.0, ea;
  return E;
}

namespace {

// Integrate f over [a, b] splitting at the regime switch H.
template <typename F>
auto split_integral(F&& f, double a, double b, double H) -> decltype(gl_integrate(f, a, b)) {
  if (a < H && H < b) return gl_integrate(f, a, H) + gl_integrate(f, H, b);
  return gl_integrate(f, a, b);
}

Eigen::Matrix2d cdg_cov(const CDGSpec& s, double t, double u) {
  if (u <= t) return Eigen::Matrix2d::Zero();
  const Eigen::Matrix2d G = cdg_diffusion_cov(s);
  auto f = [&](double v) -> Eigen::Matrix2d {
    const Eigen::Matrix2d E = cdg_transition(s, u - v);
    return E * G * E.transpose();
  };
  return gl_integrate(f, t, u, 8);
}

}  // namespace

CDGMoments cdg_moments(const CDGSpec& s, const CDGState& x, const HorizonSpec& hz, double u) {
  const Eigen::Vector2d x0(x.l_t, x.r_t);
  Eigen::Vector2d m = cdg_transition(s, u - hz.t) * x0;
  if (u > hz.t) {
    auto f = [&](double v) -> Eigen::Vector2d { return cdg_transition(s, u - v) * cdg_drift_intercept(s, hz, v); };
    m += split_integral(f, hz.t, u, hz.H);
  }
  CDGMoments r;
  r.mean_l = m(0);
  r.mean_r = m(1);
  r.cov = cdg_cov(s, hz.t, u);
  return r;
}

double cdg_cov_l(const CDGSpec& s, const HorizonSpec& hz, double u, double sv) {
  return (cdg_transition(s, u - sv) * cdg_cov(s, hz.t, sv))(0, 0);
}

CDGResult cdg_expected_bond(const CDGSpec& s, const CDGState& x, const HorizonSpec& hz) {
  hz.validate();
  s.validate();
  if (x.l_t >= s.lnK) throw DomainError("cdg: l_t >= ln K, the firm is already in default");
  CDGResult res;
  res.expected_riskfree = vasicek_expected_bond(s.rates(), x.r_t, hz);

  const int n = s.n_grid;
  const double dt = hz.total() / n;
  std::vector<double> Mi(n + 1), Si(n + 1), Mh(n + 1), Sh(n + 1);
  std::vector<Eigen::Matrix2d> Ch(n + 1);
  for (int i = 1; i <= n; ++i) {
    const auto a = cdg_moments(s, x, hz, hz.t + i * dt);
    Mi[i] = a.mean_l;
    Si[i] = a.cov(0, 0);
    const auto b = cdg_moments(s, x, hz, hz.t + (i - 0.5) * dt);
    Mh[i] = b.mean_l;
    Sh[i] = b.cov(0, 0);
    Ch[i] = b.cov;
  }

  res.q.assign(n + 1, 0.0);
  double total = 0.0;
  for (int i = 1; i <= n; ++i) {
    const double ui = hz.t + i * dt;
    if (Si[i] < 1e-14) {
      ++res.skipped;
      continue;
    }
    const double Na = norm_cdf((Mi[i] - s.lnK) / std::sqrt(Si[i]));
    double acc = Na, Nbii = 0.0;
    for (int j = 1; j <= i; ++j) {
      if (Sh[j] < 1e-14) continue;
      const double sj = hz.t + (j - 0.5) * dt;
      const double V = (cdg_transition(s, ui - sj) * Ch[j])(0, 0);
      const double Mt = Mi[i] + V / Sh[j] * (s.lnK - Mh[j]);
      const double St = Si[i] * (1.0 - V * V / (Si[i] * Sh[j]));
      const double Nb = St > 0.0 ? norm_cdf((Mt - s.lnK) / std::sqrt(St)) : (Mt >= s.lnK ? 1.0 : 0.0);
      if (j < i)
        acc -= Nb * res.q[j];
      else
        Nbii = Nb;
    }
    if (!(Nbii > 1e-12)) throw NumericalError("cdg: recursion unstable, N(b_ii) vanished");
    res.q[i] = acc / Nbii;
    if (res.q[i] < -1e-9) throw NumericalError("cdg: negative first-passage mass in the recursion");
    total += res.q[i];
  }
  res.q.erase(res.q.begin());
  res.default_probability = total;
  if (total > 1.0 + 1e-9) throw NumericalError("cdg: default probability exceeds one");
  res.value = res.expected_riskfree * (1.0 - s.omega * total);
  return res;
}

}  // namespace eem
