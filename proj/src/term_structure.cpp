#include "eem/term_structure.hpp"

#include <algorithm>
#include <cmath>

namespace eem {

void AffineModelSpec::validate() const {
  const auto n = static_cast<Eigen::Index>(N);
  if (N < 1) throw ParameterError("atsm: N must be >= 1");
  if (K_mat.rows() != n || K_mat.cols() != n || Sigma.rows() != n || Sigma.cols() != n ||
      beta.rows() != n || beta.cols() != n)
    throw ParameterError("atsm: matrix dimensions must be N x N");
  if (Theta.size() != n || alpha.size() != n || delta_y.size() != n || gamma.size() != n)
    throw ParameterError("atsm: vector dimensions must be N");
  if (!K_mat.allFinite() || !Theta.allFinite() || !Sigma.allFinite() || !alpha.allFinite() ||
      !beta.allFinite() || !delta_y.allFinite() || !gamma.allFinite() || !std::isfinite(delta0))
    throw ParameterError("atsm: non-finite parameter");
}

void AffineModelSpec::check_state(const Vec<double>& Y) const {
  if (Y.size() != N) throw ParameterError("atsm: state dimension must be N");
  const Vec<double> v = alpha + beta * Y;
  if ((v.array() < -1e-14).any()) throw ParameterError("atsm: negative variance alpha_i + beta_i'Y at Y_t");
}

double RiccatiSolution::A_at(double s) const {
  if (tau.size() == 1 || s <= 0.0) return A.front();
  const double x = std::clamp(s / h, 0.0, static_cast<double>(tau.size() - 1));
  const auto i = std::min(static_cast<std::size_t>(x), tau.size() - 2);
  const double w = x - static_cast<double>(i);
  return (1.0 - w) * A[i] + w * A[i + 1];
}

Vec<double> RiccatiSolution::B_at(double s) const {
  if (tau.size() == 1 || s <= 0.0) return B.front();
  const double x = std::clamp(s / h, 0.0, static_cast<double>(tau.size() - 1));
  const auto i = std::min(static_cast<std::size_t>(x), tau.size() - 2);
  const double w = x - static_cast<double>(i);
  return (1.0 - w) * B[i] + w * B[i + 1];
}

namespace {

struct AffineRhs {
  const Vec<double>& c;
  const Mat<double>& K;
  const Vec<double>& k0;
  const Mat<double>& Sigma;
  const Vec<double>& alpha;
  const Mat<double>& beta;

  // y = (A, B)
  Vec<double> operator()(double, const Vec<double>& y) const {
    const Eigen::Index n = K.rows();
    const auto B = y.tail(n);
    const Vec<double> sb2 = (Sigma.transpose() * B).array().square();
    Vec<double> dy(n + 1);
    dy(0) = k0.dot(B) - 0.5 * alpha.dot(sb2);
    dy.tail(n) = -K.transpose() * B - 0.5 * beta.transpose() * sb2 + c;
    return dy;
  }
};

}  // namespace

RiccatiSolution riccati_solve_affine(const Vec<double>& b, const Vec<double>& c, const Mat<double>& K_mat,
                                     const Vec<double>& k0, const Mat<double>& Sigma,
                                     const Vec<double>& alpha, const Mat<double>& beta, double tau_max,
                                     int steps) {
  if (steps < 4) throw ParameterError("riccati: steps must be >= 4");
  if (tau_max < 0.0) throw DomainError("riccati: negative tau");
  const Eigen::Index n = K_mat.rows();
  AffineRhs rhs{c, K_mat, k0, Sigma, alpha, beta};
  Vec<double> y0(n + 1);
  y0 << 0.0, b;

  RiccatiSolution sol;
  if (tau_max == 0.0) {
    sol.tau = {0.0};
    sol.A = {0.0};
    sol.B = {b};
    return sol;
  }
  const auto path = rk4_path<double>(rhs, y0, tau_max, steps);
  sol.h = tau_max / steps;
  for (int k = 0; k <= steps; ++k) {
    sol.tau.push_back(k * sol.h);
    sol.A.push_back(path[k](0));
    sol.B.push_back(path[k].tail(n));
  }
  if (steps % 2 == 0) {
    const auto coarse = rk4_path<double>(rhs, y0, tau_max, steps / 2);
    sol.richardson = (path.back() - coarse.back()).cwiseAbs().maxCoeff() / 15.0;
  }
  return sol;
}

RiccatiSolution riccati_solve(const Vec<double>& b, const Vec<double>& c, const Mat<double>& K_mat,
                              const Vec<double>& Theta, const Mat<double>& Sigma, const Vec<double>& alpha,
                              const Mat<double>& beta, double tau_max, int steps) {
  return riccati_solve_affine(b, c, K_mat, K_mat * Theta, Sigma, alpha, beta, tau_max, steps);
}

namespace {

RiccatiSolution starred_leg(const AffineModelSpec& s, double tau, const OdeOptions& opt) {
  const Vec<double> zero = Vec<double>::Zero(s.N);
  return riccati_solve_affine(zero, s.delta_y, s.K_star(), s.intercept_star(), s.Sigma, s.alpha, s.beta,
                              tau, default_steps(tau, opt.steps_per_year));
}

}  // namespace

double atsm_current_bond(const AffineModelSpec& spec, const Vec<double>& Y_t, double tau,
                         const OdeOptions& opt) {
  spec.validate();
  spec.check_state(Y_t);
  const auto q = starred_leg(spec, tau, opt);
  return std::exp(-spec.delta0 * tau - q.A_end() - q.B_end().dot(Y_t));
}

double expected_bond_price_atsm(const AffineModelSpec& spec, const Vec<double>& Y_t, const HorizonSpec& hz,
                                const OdeOptions& opt) {
  hz.validate();
  spec.validate();
  spec.check_state(Y_t);
  if (hz.post() == 0.0) return 1.0;  // P(T, T)
  const auto q = starred_leg(spec, hz.post(), opt);
  const Vec<double> zero = Vec<double>::Zero(spec.N);
  const auto p = riccati_solve_affine(q.B_end(), zero, spec.K_mat, spec.intercept(), spec.Sigma, spec.alpha,
                                      spec.beta, hz.pre(), default_steps(hz.pre(), opt.steps_per_year));
  return std::exp(-spec.delta0 * hz.post() - q.A_end() - p.A_end() - p.B_end().dot(Y_t));
}

Vec<double> expected_state_R(const AffineModelSpec& spec, const Vec<double>& Y_t, double tau) {
  return ou_mean(spec.K_mat, spec.intercept(), Y_t, tau);
}

double expected_log_bond_atsm(const AffineModelSpec& spec, const Vec<double>& Y_t, const HorizonSpec& hz,
                              const OdeOptions& opt) {
  hz.validate();
  spec.validate();
  spec.check_state(Y_t);
  const auto q = starred_leg(spec, hz.post(), opt);
  const Vec<double> ey = expected_state_R(spec, Y_t, hz.pre());
  return -spec.delta0 * hz.post() - q.A_end() - q.B_end().dot(ey);
}

double expected_yield(const AffineModelSpec& spec, const Vec<double>& Y_t, const HorizonSpec& hz,
                      const OdeOptions& opt) {
  hz.validate();
  if (!(hz.H < hz.T)) throw DomainError("expected_yield: requires H < T");
  return -expected_log_bond_atsm(spec, Y_t, hz, opt) / hz.post();
}

// ---------------------------------------------------------------- Vasicek

AB vasicek_AB(double alpha, double m, double sigma, double b, double c, double tau) {
  const double Ba = B_alpha(alpha, tau);
  const double B2a = B_alpha(2.0 * alpha, tau);
  const double e = std::exp(-alpha * tau);
  // integral of B_alpha^2 over [0, tau]
  double iBa2;
  if (std::abs(alpha * tau) < 1e-4)
    iBa2 = tau * tau * tau * (1.0 / 3.0 - alpha * tau / 4.0 + 7.0 * alpha * alpha * tau * tau / 60.0);
  else
    iBa2 = (2.0 * tau - 2.0 * Ba - alpha * Ba * Ba) / (2.0 * alpha * alpha);
  // integral of B_alpha over [0, tau]
  const double iBa = std::abs(alpha * tau) < 1e-4
                         ? tau * tau * (0.5 - alpha * tau / 6.0 + alpha * alpha * tau * tau / 24.0)
                         : (tau - Ba) / alpha;
  AB r;
  r.B = b * e + c * Ba;
  r.A = alpha * m * (b * Ba + c * iBa) - 0.5 * sigma * sigma * (b * b * B2a + b * c * Ba * Ba + c * c * iBa2);
  return r;
}

namespace {

void check_short_rate(const ShortRateParams& p, const char* who) {
  if (!(p.alpha_r > 0.0)) throw ParameterError(std::string(who) + ": alpha_r must be positive");
  if (!(p.sigma_r >= 0.0)) throw ParameterError(std::string(who) + ": sigma_r must be non-negative");
}

}  // namespace

double vasicek_expected_bond(const ShortRateParams& p, double r_t, const HorizonSpec& hz) {
  hz.validate();
  check_short_rate(p, "vasicek");
  if (hz.post() == 0.0) return 1.0;  // P(T, T)
  const double m_star = p.m_r - p.sigma_r * p.gamma_r / p.alpha_r;
  const AB q = vasicek_AB(p.alpha_r, m_star, p.sigma_r, 0.0, 1.0, hz.post());
  const AB P = vasicek_AB(p.alpha_r, p.m_r, p.sigma_r, q.B, 0.0, hz.pre());
  return std::exp(-q.A - P.A - P.B * r_t);
}

AffineModelSpec vasicek_as_atsm(const ShortRateParams& p) {
  AffineModelSpec s;
  s.N = 1;
  s.K_mat = Mat<double>::Constant(1, 1, p.alpha_r);
  s.Theta = Vec<double>::Constant(1, p.m_r);
  s.Sigma = Mat<double>::Constant(1, 1, p.sigma_r);
  s.alpha = Vec<double>::Ones(1);
  s.beta = Mat<double>::Zero(1, 1);
  s.delta0 = 0.0;
  s.delta_y = Vec<double>::Ones(1);
  s.gamma = Vec<double>::Constant(1, p.gamma_r);
  return s;
}

// -------------------------------------------------------------------- CIR

AB cir_AB(double alpha, double m, double sigma, double b, double c, double tau) {
  const double s2 = sigma * sigma;
  const double beta = std::sqrt(alpha * alpha + 2.0 * s2 * c);
  const double eb = std::exp(beta * tau);
  const double den = b * s2 * (eb - 1.0) + beta - alpha + eb * (beta + alpha);
  AB r;
  r.B = (b * (beta + alpha + eb * (beta - alpha)) + 2.0 * c * (eb - 1.0)) / den;
  r.A = -(2.0 * alpha * m / s2) * (std::log(2.0 * beta) + 0.5 * (beta + alpha) * tau - std::log(den));
  return r;
}

double cir_expected_bond(const ShortRateParams& p, double r_t, const HorizonSpec& hz) {
  hz.validate();
  check_short_rate(p, "cir");
  if (!(p.sigma_r > 0.0)) throw ParameterError("cir: sigma_r must be positive");
  if (r_t < 0.0) throw ParameterError("cir: r_t must be non-negative");
  const double a_star = p.alpha_r + p.gamma_r * p.sigma_r;
  if (!(a_star > 0.0)) throw ParameterError("cir: alpha_r + gamma_r sigma_r must be positive");
  if (hz.post() == 0.0) return 1.0;  // P(T, T)
  const double m_star = p.alpha_r * p.m_r / a_star;
  const AB q = cir_AB(a_star, m_star, p.sigma_r, 0.0, 1.0, hz.post());
  const AB P = cir_AB(p.alpha_r, p.m_r, p.sigma_r, q.B, 0.0, hz.pre());
  return std::exp(-q.A - P.A - P.B * r_t);
}

AffineModelSpec cir_as_atsm(const ShortRateParams& p) {
  AffineModelSpec s = vasicek_as_atsm(p);
  s.alpha = Vec<double>::Zero(1);
  s.beta = Mat<double>::Ones(1, 1);
  return s;
}

// ----------------------------------------------------------------- A1r(3)

double a1r3_D(double alpha_r, double lam3, double mu3, double tau) {
  return lam3 * std::exp(-alpha_r * tau) + mu3 * B_alpha(alpha_r, tau);
}

double a1r3_C(double alpha_theta, double alpha_r, double lam2, double lam3, double mu2, double mu3,
              double tau) {
  const double et = std::exp(-alpha_theta * tau);
  const double er = std::exp(-alpha_r * tau);
  const double gap = alpha_theta - alpha_r;
  double cross;
  if (std::abs(gap) < 1e-10)
    cross = tau * er * (1.0 - 0.5 * gap * tau);
  else
    cross = (er - et) / gap;
  return lam2 * et + (mu2 + mu3) * B_alpha(alpha_theta, tau) + (lam3 * alpha_r - mu3) * cross;
}

AffineModelSpec a1r3_as_atsm(const A1r3Params& p) {
  AffineModelSpec s;
  s.N = 3;
  s.K_mat.resize(3, 3);
  s.K_mat << p.alpha_v, 0.0, 0.0, 0.0, p.alpha_theta, 0.0, p.alpha_rv, -p.alpha_r, p.alpha_r;
  Vec<double> k0(3);
  k0 << p.alpha_v * p.m_v, p.alpha_theta * p.m_theta, p.alpha_rv * p.m_v;
  s.Theta = s.K_mat.lu().solve(k0);
  s.Sigma.resize(3, 3);
  s.Sigma << p.eta, 0.0, 0.0, p.sigma_theta_v * p.eta, 1.0, p.sigma_theta_r, p.sigma_rv * p.eta,
      p.sigma_r_theta, 1.0;
  s.alpha.resize(3);
  s.alpha << 0.0, p.zeta * p.zeta, p.delta_r;
  s.beta = Mat<double>::Zero(3, 3);
  s.beta(0, 0) = 1.0;
  s.beta(1, 0) = p.beta_theta;
  s.beta(2, 0) = 1.0;
  s.delta0 = 0.0;
  s.delta_y = Vec<double>::Unit(3, 2);
  s.gamma.resize(3);
  s.gamma << p.gamma1, p.gamma2, p.gamma3;
  return s;
}

namespace {

struct A1r3Coeffs {
  double alpha_v, m_v, alpha_theta, m_theta, alpha_r, alpha_rv, alpha_theta_v, m_r;
};

A1r3Coeffs a1r3_physical(const A1r3Params& p) {
  return {p.alpha_v, p.m_v, p.alpha_theta, p.m_theta, p.alpha_r, p.alpha_rv, 0.0, 0.0};
}

A1r3Coeffs a1r3_starred(const A1r3Params& p) {
  A1r3Coeffs c;
  const double z2 = p.zeta * p.zeta;
  c.alpha_v = p.alpha_v + p.gamma1 * p.eta;
  c.m_v = p.alpha_v * p.m_v / c.alpha_v;
  c.alpha_theta = p.alpha_theta;
  c.m_theta = (p.alpha_theta * p.m_theta - p.gamma2 * z2 - p.gamma3 * p.sigma_theta_r * p.delta_r) / p.alpha_theta;
  c.alpha_r = p.alpha_r;
  c.alpha_rv = p.alpha_rv + p.gamma1 * p.sigma_rv * p.eta + p.gamma2 * p.sigma_r_theta * p.beta_theta + p.gamma3;
  c.alpha_theta_v = -p.gamma1 * p.sigma_theta_v * p.eta - p.gamma2 * p.beta_theta - p.gamma3 * p.sigma_theta_r;
  c.m_r = p.alpha_rv * p.m_v - c.alpha_rv * c.m_v - p.gamma2 * p.sigma_r_theta * z2 - p.gamma3 * p.delta_r;
  return c;
}

struct A1r3Leg {
  double A, B, C, D;
};

// (A, B) integrated with C, D in closed form; lam = boundary, mu = forcing.
A1r3Leg a1r3_leg(const A1r3Params& p, const A1r3Coeffs& k, const Eigen::Vector3d& lam,
                 const Eigen::Vector3d& mu, double tau, int steps) {
  const double e2 = p.eta * p.eta, z2 = p.zeta * p.zeta;
  auto CD = [&](double s) {
    return std::pair{a1r3_C(k.alpha_theta, k.alpha_r, lam(1), lam(2), mu(1), mu(2), s),
                     a1r3_D(k.alpha_r, lam(2), mu(2), s)};
  };
  auto rhs = [&](double s, const Vec<double>& y) {
    const auto [C, D] = CD(s);
    const double B = y(1);
    Vec<double> dy(2);
    dy(0) = B * k.alpha_v * k.m_v + C * k.alpha_theta * k.m_theta + D * (k.alpha_rv * k.m_v + k.m_r) -
            0.5 * C * C * (p.sigma_theta_r * p.sigma_theta_r * p.delta_r + z2) -
            0.5 * D * D * (p.sigma_r_theta * p.sigma_r_theta * z2 + p.delta_r) -
            C * D * (p.sigma_r_theta * z2 + p.sigma_theta_r * p.delta_r);
    dy(1) = -B * k.alpha_v + C * k.alpha_theta_v - D * k.alpha_rv - 0.5 * B * B * e2 -
            0.5 * C * C * (p.beta_theta + p.sigma_theta_v * p.sigma_theta_v * e2 + p.sigma_theta_r * p.sigma_theta_r) -
            0.5 * D * D * (p.sigma_rv * p.sigma_rv * e2 + p.sigma_r_theta * p.sigma_r_theta * p.beta_theta + 1.0) -
            B * C * p.sigma_theta_v * e2 - B * D * p.sigma_rv * e2 -
            C * D * (p.sigma_theta_v * p.sigma_rv * e2 + p.sigma_r_theta * p.beta_theta + p.sigma_theta_r) + mu(0);
    return dy;
  };
  Vec<double> y0(2);
  y0 << 0.0, lam(0);
  const auto path = rk4_path<double>(rhs, y0, tau, steps);
  const auto [C, D] = CD(tau);
  return {path.back()(0), path.back()(1), C, D};
}

}  // namespace

double a1r3_expected_bond(const A1r3Params& p, const Vec<double>& state, const HorizonSpec& hz,
                          const OdeOptions& opt) {
  hz.validate();
  if (!(p.eta > 0.0) || !(p.zeta > 0.0) || p.delta_r < 0.0)
    throw ParameterError("a1r3: require eta > 0, zeta > 0, delta_r >= 0");
  if (state.size() != 3 || state(0) < 0.0) throw ParameterError("a1r3: state (v, theta, r) with v >= 0");
  if (!(p.alpha_theta > 0.0) || !(p.alpha_r > 0.0)) throw ParameterError("a1r3: alpha_theta, alpha_r > 0");
  const A1r3Coeffs ks = a1r3_starred(p);
  if (!(ks.alpha_v > 0.0)) throw ParameterError("a1r3: starred alpha_v must be positive");
  if (hz.post() == 0.0) return 1.0;  // P(T, T)
  const auto q = a1r3_leg(p, ks, Eigen::Vector3d::Zero(), Eigen::Vector3d(0.0, 0.0, 1.0), hz.post(),
                          default_steps(hz.post(), opt.steps_per_year));
  const auto P = a1r3_leg(p, a1r3_physical(p), Eigen::Vector3d(q.B, q.C, q.D), Eigen::Vector3d::Zero(),
                          hz.pre(), default_steps(hz.pre(), opt.steps_per_year));
  return std::exp(-q.A - P.A - P.B * state(0) - P.C * state(1) - P.D * state(2));
}

// ------------------------------------------------------------------- QTSM

void QTSMSpec::validate() const {
  const Eigen::Index n = mu.size();
  if (n < 1) throw ParameterError("qtsm: empty state");
  if (beta.size() != n || gamma0.size() != n || Psi.rows() != n || Psi.cols() != n || xi.rows() != n ||
      xi.cols() != n || Sigma.rows() != n || Sigma.cols() != n || gamma1.rows() != n || gamma1.cols() != n)
    throw ParameterError("qtsm: dimension mismatch");
  const Mat<double> Ps = 0.5 * (Psi + Psi.transpose());
  if ((Psi - Ps).cwiseAbs().maxCoeff() > 1e-12) throw ParameterError("qtsm: Psi must be symmetric");
  Eigen::SelfAdjointEigenSolver<Mat<double>> es(Ps);
  if (es.eigenvalues().minCoeff() < -1e-12) throw ParameterError("qtsm: Psi is not positive semidefinite");
  if (es.eigenvalues().minCoeff() > 1e-12) {
    if (alpha - 0.25 * beta.dot(Ps.ldlt().solve(beta)) < -1e-12)
      throw ParameterError("qtsm: alpha - beta'Psi^{-1}beta/4 must be non-negative");
  }
  Eigen::EigenSolver<Mat<double>> ex(xi);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto ev = ex.eigenvalues()(i);
    if (std::abs(ev.imag()) > 1e-10 || !(ev.real() < 0.0))
      throw ParameterError("qtsm: xi must have negative real eigenvalues");
  }
  const Mat<double> Si = Sigma.inverse();
  const Mat<double> G = Si.transpose() * Si * gamma1;
  if ((G - G.transpose()).cwiseAbs().maxCoeff() > 1e-10 * std::max(1.0, G.cwiseAbs().maxCoeff()))
    throw ParameterError("qtsm: Sigma^{-1}'Sigma^{-1}gamma1 must be symmetric");
}

bool QTSMSpec::is_qtsm3() const {
  auto diag = [](const Mat<double>& m) { return (m - Mat<double>(m.diagonal().asDiagonal())).cwiseAbs().maxCoeff() == 0.0; };
  return diag(xi) && diag(gamma1) && diag(Sigma) && beta.isZero(0.0) && Psi.isIdentity(0.0);
}

QuadraticSolution qtsm_riccati(const Vec<double>& b, const Mat<double>& c, const Vec<double>& d,
                               const Mat<double>& q, const Vec<double>& mu, const Mat<double>& xi,
                               const Mat<double>& Sigma, double tau, int steps) {
  const Eigen::Index n = mu.size();
  const Mat<double> SS = Sigma * Sigma.transpose();
  // state = (A, B, vec(C))
  auto rhs = [&](double, const Vec<double>& y) {
    const auto B = y.segment(1, n);
    const Eigen::Map<const Mat<double>> C(y.data() + 1 + n, n, n);
    Vec<double> dy(1 + n + n * n);
    dy(0) = mu.dot(B) - 0.5 * B.dot(SS * B) + (SS * C).trace();
    dy.segment(1, n) = xi.transpose() * B + 2.0 * C * mu - 2.0 * C * SS * B + d;
    Eigen::Map<Mat<double>> dC(dy.data() + 1 + n, n, n);
    dC = -2.0 * C * SS * C + C * xi + xi.transpose() * C + q;
    return dy;
  };
  Vec<double> y0(1 + n + n * n);
  y0(0) = 0.0;
  y0.segment(1, n) = b;
  y0.tail(n * n) = Eigen::Map<const Vec<double>>(c.data(), n * n);
  const auto path = rk4_path<double>(rhs, y0, tau, steps);
  const Vec<double>& y = path.back();
  QuadraticSolution s;
  s.A = y(0);
  s.B = y.segment(1, n);
  s.C = Eigen::Map<const Mat<double>>(y.data() + 1 + n, n, n);
  return s;
}

double qtsm_expected_bond(const QTSMSpec& spec, const Vec<double>& Y_t, const HorizonSpec& hz,
                          const OdeOptions& opt) {
  hz.validate();
  spec.validate();
  const Eigen::Index n = spec.mu.size();
  if (Y_t.size() != n) throw ParameterError("qtsm: state dimension mismatch");
  if (hz.post() == 0.0) return 1.0;  // P(T, T)
  const Vec<double> mu_s = spec.mu - spec.gamma0;
  const Mat<double> xi_s = spec.xi - spec.gamma1;
  const auto q = qtsm_riccati(Vec<double>::Zero(n), Mat<double>::Zero(n, n), spec.beta, spec.Psi, mu_s, xi_s,
                              spec.Sigma, hz.post(), default_steps(hz.post(), opt.steps_per_year));
  const auto P = qtsm_riccati(q.B, q.C, Vec<double>::Zero(n), Mat<double>::Zero(n, n), spec.mu, spec.xi,
                              spec.Sigma, hz.pre(), default_steps(hz.pre(), opt.steps_per_year));
  return std::exp(-spec.alpha * hz.post() - q.A - P.A - P.B.dot(Y_t) - Y_t.dot(P.C * Y_t));
}

ABC qtsm1_closed(double mu, double xi, double s, double b, double c, double q, double tau) {
  const double s2 = s * s;
  const double be = std::sqrt(xi * xi + 2.0 * s2 * q);
  const double e1 = std::expm1(be * tau);
  const double e2 = std::expm1(2.0 * be * tau);
  const double den = (2.0 * c * s2 + be - xi) * e2 + 2.0 * be;
  ABC r;
  r.C = (c * (2.0 * be + e2 * (be + xi)) + q * e2) / den;
  r.B = (2.0 * b * be * be * std::exp(be * tau) + 2.0 * mu * ((q + c * (xi + be)) * e1 * e1 + 2.0 * c * be * e1)) /
        (be * den);
  r.A = (mu / be) * (mu / be) * q * tau -
        (b * b * be * s2 * e2 - 2.0 * b * mu * e1 * ((be - xi) * e1 + 2.0 * be)) / (2.0 * be * den) -
        mu * mu * e1 * (((be - 2.0 * xi) * q - 2.0 * c * xi * xi) * e1 + 2.0 * be * q) / (be * be * be * den) -
        0.5 * (std::log(2.0 * be) + (be - xi) * tau - std::log(den));
  return r;
}

double qtsm3_expected_bond(const QTSMSpec& spec, const Vec<double>& Y_t, const HorizonSpec& hz) {
  hz.validate();
  spec.validate();
  if (!spec.is_qtsm3()) throw ParameterError("qtsm3: requires diagonal xi, gamma1, Sigma, beta = 0, Psi = I");
  const Eigen::Index n = spec.mu.size();
  if (Y_t.size() != n) throw ParameterError("qtsm: state dimension mismatch");
  if (hz.post() == 0.0) return 1.0;  // P(T, T)
  double expo = -spec.alpha * hz.post();
  for (Eigen::Index i = 0; i < n; ++i) {
    const double s = spec.Sigma(i, i);
    const ABC q = qtsm1_closed(spec.mu(i) - spec.gamma0(i), spec.xi(i, i) - spec.gamma1(i, i), s, 0.0, 0.0, 1.0,
                               hz.post());
    const ABC P = qtsm1_closed(spec.mu(i), spec.xi(i, i), s, q.B, q.C, 0.0, hz.pre());
    expo -= q.A + P.A + P.B * Y_t(i) + P.C * Y_t(i) * Y_t(i);
  }
  return std::exp(expo);
}

}  // namespace eem
