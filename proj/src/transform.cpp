#include "eem/transform.hpp"

#include "eem/quadrature.hpp"

#include <cmath>
#include <numbers>

namespace eem {

JumpTransform no_jumps() {
  return {[](const Vec<cd>&) { return cd(1.0); },
          [](const Vec<cd>& c) { return Vec<cd>::Zero(c.size()).eval(); }};
}

JumpTransform normal_jumps(int N, int component, double mean, double sd) {
  auto th = [=](const Vec<cd>& c) {
    const cd x = c(component);
    return std::exp(x * mean + 0.5 * x * x * sd * sd);
  };
  auto gr = [=](const Vec<cd>& c) {
    Vec<cd> g = Vec<cd>::Zero(N);
    const cd x = c(component);
    g(component) = (mean + x * sd * sd) * std::exp(x * mean + 0.5 * x * x * sd * sd);
    return g;
  };
  return {th, gr};
}

JumpTransform exponential_jumps(int N, int component, double mean) {
  auto th = [=](const Vec<cd>& c) { return 1.0 / (1.0 - mean * c(component)); };
  auto gr = [=](const Vec<cd>& c) {
    Vec<cd> g = Vec<cd>::Zero(N);
    const cd d = 1.0 - mean * c(component);
    g(component) = mean / (d * d);
    return g;
  };
  return {th, gr};
}

void AJDCharacteristic::validate() const {
  const Eigen::Index n = k0.size();
  if (n < 1) throw ParameterError("ajd: empty state");
  if (k1.rows() != n || k1.cols() != n || h0.rows() != n || h0.cols() != n ||
      static_cast<Eigen::Index>(h1.size()) != n || l1.size() != n || rho1.size() != n)
    throw ParameterError("ajd: dimension mismatch");
  for (const auto& m : h1)
    if (m.rows() != n || m.cols() != n) throw ParameterError("ajd: h1 slice dimension mismatch");
  if (!jump.theta || !jump.grad) throw ParameterError("ajd: jump transform missing");
  Eigen::SelfAdjointEigenSolver<Mat<double>> es(0.5 * (h0 + h0.transpose()));
  if (es.eigenvalues().minCoeff() < -1e-12) throw ParameterError("ajd: h0 must be positive semidefinite");
  if (l0 < 0.0) throw ParameterError("ajd: l0 must be non-negative");
}

namespace {

struct ComplexRhs {
  const AJDCharacteristic& chi;
  double c0;
  const Vec<double>& c1;
  bool extended;

  // y = (A, B, D, E) with D, E present only when extended
  Vec<cd> operator()(double, const Vec<cd>& y) const {
    const Eigen::Index n = chi.k0.size();
    const Vec<cd> B = y.segment(1, n);
    const Vec<cd> mB = -B;
    const cd th = chi.jump.theta(mB) - 1.0;
    const Vec<cd> h0B = chi.h0.cast<cd>() * B;
    Vec<cd> dy(y.size());
    dy(0) = (chi.k0.cast<cd>().transpose() * B)(0) - 0.5 * (B.transpose() * h0B)(0) - chi.l0 * th + c0;
    Vec<cd> dB = chi.k1.transpose().cast<cd>() * B - chi.l1.cast<cd>() * th + c1.cast<cd>();
    for (Eigen::Index k = 0; k < n; ++k) dB(k) -= 0.5 * (B.transpose() * (chi.h1[k].cast<cd>() * B))(0);
    dy.segment(1, n) = dB;
    if (extended) {
      const Vec<cd> E = y.segment(n + 2, n);
      const cd gE = (chi.jump.grad(mB).transpose() * E)(0);
      dy(n + 1) = (chi.k0.cast<cd>().transpose() * E)(0) - (B.transpose() * (chi.h0.cast<cd>() * E))(0) + chi.l0 * gE;
      Vec<cd> dE = chi.k1.transpose().cast<cd>() * E + chi.l1.cast<cd>() * gE;
      for (Eigen::Index k = 0; k < n; ++k) dE(k) -= (B.transpose() * (chi.h1[k].cast<cd>() * E))(0);
      dy.segment(n + 2, n) = dE;
    }
    return dy;
  }
};

struct PhaseStepper {
  ComplexRhs& f;
  int max_depth;
  long steps = 0;
  int halvings = 0;

  Vec<cd> step(const Vec<cd>& y, double tau, double h, int depth) {
    Vec<cd> y1 = rk4_step<cd>(f, tau, y, h);
    if (depth < max_depth && std::abs((y1(0) - y(0)).imag()) > 0.5 * std::numbers::pi) {
      ++halvings;
      const Vec<cd> mid = step(y, tau, 0.5 * h, depth + 1);
      return step(mid, tau + 0.5 * h, 0.5 * h, depth + 1);
    }
    ++steps;
    return y1;
  }
};

}  // namespace

ComplexRiccatiSolution complex_riccati(const AJDCharacteristic& chi, cd b0, const Vec<cd>& b1, double c0,
                                       const Vec<double>& c1, double tau, const TransformOptions& opt,
                                       bool extended, cd d0, const Vec<cd>& d1) {
  const Eigen::Index n = chi.k0.size();
  if (b1.size() != n || c1.size() != n) throw ParameterError("transform: boundary dimension mismatch");
  if (extended && d1.size() != n) throw ParameterError("transform: extended boundary dimension mismatch");
  if (tau < 0.0) throw DomainError("transform: negative tau");
  Vec<cd> y(extended ? 2 * n + 2 : n + 1);
  y(0) = b0;
  y.segment(1, n) = b1;
  if (extended) {
    y(n + 1) = d0;
    y.segment(n + 2, n) = d1;
  }
  ComplexRiccatiSolution sol;
  if (tau > 0.0) {
    ComplexRhs rhs{chi, c0, c1, extended};
    PhaseStepper st{rhs, opt.max_halving_depth};
    const int steps = default_steps(tau, opt.steps_per_year);
    const double h = tau / steps;
    for (int k = 0; k < steps; ++k) {
      y = st.step(y, k * h, h, 0);
      if (!y.allFinite() || y.cwiseAbs().maxCoeff() > 1e150)
        throw DivergenceError("transform: complex Riccati diverged at tau = " + std::to_string((k + 1) * h));
    }
    sol.steps = st.steps;
    sol.halvings = st.halvings;
  }
  sol.A = y(0);
  sol.B = y.segment(1, n);
  if (extended) {
    sol.D = y(n + 1);
    sol.E = y.segment(n + 2, n);
  }
  return sol;
}

cd q_transform(const AJDCharacteristic& chi_star, const Vec<cd>& z, const Vec<double>& Y_t, double tau,
               const TransformOptions& opt) {
  chi_star.validate();
  const auto s = complex_riccati(chi_star, 0.0, -z, chi_star.rho0, chi_star.rho1, tau, opt);
  return std::exp(-s.A - (s.B.transpose() * Y_t.cast<cd>())(0));
}

cd r_transform(const AJDCharacteristic& chi, const AJDCharacteristic& chi_star, const Vec<cd>& z,
               const Vec<double>& Y_t, const HorizonSpec& hz, const TransformOptions& opt) {
  hz.validate();
  chi.validate();
  chi_star.validate();
  const Vec<double> zero = Vec<double>::Zero(chi.N());
  const auto q = complex_riccati(chi_star, 0.0, -z, chi_star.rho0, chi_star.rho1, hz.post(), opt);
  const auto p = complex_riccati(chi, q.A, q.B, 0.0, zero, hz.pre(), opt);
  return std::exp(-p.A - (p.B.transpose() * Y_t.cast<cd>())(0));
}

cd extended_r_transform(const AJDCharacteristic& chi, const AJDCharacteristic& chi_star, const Vec<double>& v,
                        const Vec<cd>& z, const Vec<double>& Y_t, const HorizonSpec& hz,
                        const TransformOptions& opt) {
  hz.validate();
  chi.validate();
  chi_star.validate();
  const Vec<double> zero = Vec<double>::Zero(chi.N());
  const auto q = complex_riccati(chi_star, 0.0, -z, chi_star.rho0, chi_star.rho1, hz.post(), opt, true, 0.0,
                                 v.cast<cd>());
  const auto p = complex_riccati(chi, q.A, q.B, 0.0, zero, hz.pre(), opt, true, q.D, q.E);
  const Vec<cd> Y = Y_t.cast<cd>();
  return std::exp(-p.A - (p.B.transpose() * Y)(0)) * (p.D + (p.E.transpose() * Y)(0));
}

cd forward_start_r_transform(const AJDCharacteristic& chi, const AJDCharacteristic& chi_star, cd a1, cd a2,
                             cd z, const Vec<double>& Y_t, double t, double T0, double H, double T, int asset,
                             const TransformOptions& opt) {
  if (!(t <= H && H <= T && t <= T0 && T0 <= T)) throw DomainError("forward start transform: invalid ordering");
  chi.validate();
  chi_star.validate();
  const int n = chi.N();
  const Vec<double> zero = Vec<double>::Zero(n);
  const Vec<cd> e = Vec<cd>::Unit(n, asset);
  cd A = 0.0;
  Vec<cd> B = -(a1 + z) * e;
  auto leg = [&](const AJDCharacteristic& c, bool discount, double tau) {
    const auto s = discount ? complex_riccati(c, A, B, c.rho0, c.rho1, tau, opt)
                            : complex_riccati(c, A, B, 0.0, zero, tau, opt);
    A = s.A;
    B = s.B;
  };
  if (H <= T0) {
    leg(chi_star, true, T - T0);
    B -= (a2 - z) * e;
    leg(chi_star, true, T0 - H);
    leg(chi, false, H - t);
  } else {
    leg(chi_star, true, T - H);
    leg(chi, false, H - T0);
    B -= (a2 - z) * e;
    leg(chi, false, T0 - t);
  }
  return std::exp(-A - (B.transpose() * Y_t.cast<cd>())(0));
}

// ----------------------------------------------------------- quadrature

namespace {

constexpr int kGL = 16;

template <typename F>
double gl_panel(F& f, double a, double b, long& nodes) {
  const auto& g = GaussLegendre<kGL>::get();
  const double c = 0.5 * (a + b), r = 0.5 * (b - a);
  double s = 0.0;
  for (int i = 0; i < kGL; ++i) s += g.w[i] * f(c + r * g.x[i]);
  nodes += kGL;
  return r * s;
}

template <typename F>
double adaptive(F& f, double a, double b, double whole, double tol, int depth, int max_depth, long& nodes) {
  const double m = 0.5 * (a + b);
  const double left = gl_panel(f, a, m, nodes);
  const double right = gl_panel(f, m, b, nodes);
  const double err = std::abs(left + right - whole);
  if (err <= tol) return left + right;
  if (depth >= max_depth) throw ToleranceError("fourier: quadrature did not converge", left + right);
  return adaptive(f, a, m, left, 0.5 * tol, depth + 1, max_depth, nodes) +
         adaptive(f, m, b, right, 0.5 * tol, depth + 1, max_depth, nodes);
}

}  // namespace

double fourier_probability(const std::function<cd(double)>& phi, double log_k, const QuadOptions& q, long* nodes,
                           double* u_used) {
  auto f = [&](double u) {
    const cd v = std::exp(cd(0.0, -u * log_k)) * phi(u) / cd(0.0, u);
    return v.real();
  };
  double u_max = q.u_max;
  for (int k = 0; k < q.max_doublings && std::abs(phi(u_max)) / u_max > 1e-12; ++k) u_max *= 2.0;
  if (std::abs(phi(u_max)) / u_max > q.abs_tol)
    throw ToleranceError("fourier: integrand has not decayed at u_max", 0.0);
  long n = 0;
  const int panels = 8;
  const double w = u_max / panels;
  double total = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double a = p * w, b = (p + 1) * w;
    const double whole = gl_panel(f, a, b, n);
    total += adaptive(f, a, b, whole, q.abs_tol * std::numbers::pi / panels, 0, q.max_depth, n);
  }
  if (nodes) *nodes += n;
  if (u_used) *u_used = u_max;
  return 0.5 + total / std::numbers::pi;
}

InversionResult fourier_expected_call(const TransformHandle& h, double k, const QuadOptions& q) {
  if (!(k > 0.0)) throw ParameterError("fourier: strike must be positive");
  InversionResult r;
  const double lk = std::log(k);
  r.Pi1 = fourier_probability(h.phi1, lk, q, &r.nodes, &r.u_max);
  r.Pi2 = fourier_probability(h.phi2, lk, q, &r.nodes, &r.u_max);
  r.value = h.norm1 * r.Pi1 - k * h.norm2 * r.Pi2;
  return r;
}

TransformHandle expected_call_handle(const AJDCharacteristic& chi, const AJDCharacteristic& chi_star,
                                     const Vec<double>& Y_t, const HorizonSpec& hz, int asset,
                                     const TransformOptions& opt) {
  const int n = chi.N();
  const Vec<cd> e = Vec<cd>::Unit(n, asset);
  TransformHandle h;
  h.norm1 = r_transform(chi, chi_star, e, Y_t, hz, opt).real();
  h.norm2 = r_transform(chi, chi_star, Vec<cd>::Zero(n), Y_t, hz, opt).real();
  h.phi1 = [=](double u) {
    return r_transform(chi, chi_star, (cd(1.0, u) * e).eval(), Y_t, hz, opt) / h.norm1;
  };
  h.phi2 = [=](double u) {
    return r_transform(chi, chi_star, (cd(0.0, u) * e).eval(), Y_t, hz, opt) / h.norm2;
  };
  return h;
}

TransformHandle forward_start_handle(const AJDCharacteristic& chi, const AJDCharacteristic& chi_star,
                                     const Vec<double>& Y_t, double t, double T0, double H, double T, int asset,
                                     const TransformOptions& opt) {
  TransformHandle h;
  h.norm1 = forward_start_r_transform(chi, chi_star, 1.0, 0.0, 0.0, Y_t, t, T0, H, T, asset, opt).real();
  h.norm2 = forward_start_r_transform(chi, chi_star, 0.0, 1.0, 0.0, Y_t, t, T0, H, T, asset, opt).real();
  h.phi1 = [=](double u) {
    return forward_start_r_transform(chi, chi_star, 1.0, 0.0, cd(0.0, u), Y_t, t, T0, H, T, asset, opt) / h.norm1;
  };
  h.phi2 = [=](double u) {
    return forward_start_r_transform(chi, chi_star, 0.0, 1.0, cd(0.0, u), Y_t, t, T0, H, T, asset, opt) / h.norm2;
  };
  return h;
}

// ------------------------------------------------------------- built-ins

AJDCharacteristic gbm_chi(double drift, double sigma, double r) {
  AJDCharacteristic c;
  c.k0 = Vec<double>::Constant(1, drift - 0.5 * sigma * sigma);
  c.k1 = Mat<double>::Zero(1, 1);
  c.h0 = Mat<double>::Constant(1, 1, sigma * sigma);
  c.h1 = {Mat<double>::Zero(1, 1)};
  c.l1 = Vec<double>::Zero(1);
  c.rho0 = r;
  c.rho1 = Vec<double>::Zero(1);
  return c;
}

AJDCharacteristic heston_chi(const HestonParams& p, bool under_q) {
  AJDCharacteristic c;
  const double kappa = under_q ? p.kappa_q : p.kappa;
  const double theta = under_q ? p.theta_q : p.theta;
  const double prem = under_q ? 0.0 : p.lambda_s;
  c.k0.resize(2);
  c.k0 << p.r, kappa * theta;
  c.k1.resize(2, 2);
  c.k1 << 0.0, prem - 0.5, 0.0, -kappa;
  c.h0 = Mat<double>::Zero(2, 2);
  Mat<double> hv(2, 2);
  hv << 1.0, p.rho * p.sigma_v, p.rho * p.sigma_v, p.sigma_v * p.sigma_v;
  c.h1 = {Mat<double>::Zero(2, 2), hv};
  c.l1 = Vec<double>::Zero(2);
  c.rho0 = p.r;
  c.rho1 = Vec<double>::Zero(2);
  return c;
}

AJDCharacteristic merton_jump_chi(const MertonJumpParams& p, bool under_q) {
  const double kbar = std::exp(p.jump_mean + 0.5 * p.jump_sd * p.jump_sd) - 1.0;
  const double drift = (under_q ? p.r : p.mu) - p.intensity * kbar;
  AJDCharacteristic c = gbm_chi(drift, p.sigma, p.r);
  c.l0 = p.intensity;
  c.jump = normal_jumps(1, 0, p.jump_mean, p.jump_sd);
  return c;
}

}  // namespace eem
