#include "eem/mc.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

#include "eem/quadrature.hpp"

namespace eem {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream)
    : key_(mix64(seed + kGolden) ^ mix64(stream * kGolden + 0x632BE59BD9B4E019ull)) {}

std::uint64_t CounterRng::next_u64() { return mix64(key_ + (++ctr_) * kGolden); }

double CounterRng::next_uniform() { return ((next_u64() >> 11) + 0.5) * 0x1.0p-53; }

double CounterRng::next_normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = next_uniform(), u2 = next_uniform();
  const double rad = std::sqrt(-2.0 * std::log(u1));
  const double ang = 2.0 * std::numbers::pi * u2;
  spare_ = rad * std::sin(ang);
  has_spare_ = true;
  return rad * std::cos(ang);
}

namespace {

int aligned_steps(double tau, int spy, const char* what) {
  if (tau <= 0.0) return 0;
  const double x = tau * spy;
  const long n = std::lround(x);
  if (std::abs(x - n) > 1e-9 * std::max(1.0, x))
    throw AlignmentError(std::string("mc: ") + what + " does not land on a step boundary at " +
                         std::to_string(spy) + " steps per year");
  return static_cast<int>(std::max(n, 1L));
}

void check_cfg(const BatchConfig& cfg) {
  if (cfg.steps_per_year < 1) throw ParameterError("mc: steps_per_year must be >= 1");
  if (cfg.n_paths < 2) throw ParameterError("mc: n_paths must be >= 2");
}

MCEstimate tag(MCEstimate e, const char* scheme, double dt, MeasureTag m = MeasureTag::R) {
  e.scheme = scheme;
  e.dt = dt;
  e.measure = m;
  return e;
}

// Exact one-step transition of dX = (a + F X) ds + G dW over dt.
struct GaussStep {
  Eigen::MatrixXd E;
  Eigen::VectorXd c;
  Eigen::MatrixXd L;

  GaussStep() = default;
  GaussStep(const Eigen::MatrixXd& F, const Eigen::VectorXd& a, const Eigen::MatrixXd& GG, double dt) {
    const int n = static_cast<int>(F.rows());
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n + 1, n + 1);
    M.topLeftCorner(n, n) = F * dt;
    M.topRightCorner(n, 1) = a * dt;
    const Eigen::MatrixXd eM = M.exp();
    E = eM.topLeftCorner(n, n);
    c = eM.topRightCorner(n, 1);
    // Van Loan block exponential for the noise covariance.
    Eigen::MatrixXd V = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    V.topLeftCorner(n, n) = -F * dt;
    V.topRightCorner(n, n) = GG * dt;
    V.bottomRightCorner(n, n) = F.transpose() * dt;
    const Eigen::MatrixXd eV = V.exp();
    Eigen::MatrixXd Q = eV.bottomRightCorner(n, n).transpose() * eV.topRightCorner(n, n);
    Q = 0.5 * (Q + Q.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Q);
    L = es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
  }

  template <typename Z>
  Eigen::VectorXd apply(const Eigen::VectorXd& x, Z& z) const {
    Eigen::VectorXd w(L.cols());
    for (int i = 0; i < w.size(); ++i) w(i) = z();
    return E * x + c + L * w;
  }
};

// Physical intercept before H, risk-neutral from H on; F shared.
struct RegimeGauss {
  GaussStep pre, post;
  bool has_pre = false, has_post = false;

  RegimeGauss(const Eigen::MatrixXd& F, const Eigen::VectorXd& aP, const Eigen::VectorXd& aQ,
              const Eigen::MatrixXd& GG, const HorizonSpec& hz) {
    if (hz.pre() > 0.0) {
      pre = GaussStep(F, aP, GG, hz.pre());
      has_pre = true;
    }
    if (hz.post() > 0.0) {
      post = GaussStep(F, aQ, GG, hz.post());
      has_post = true;
    }
  }
};

// State (r, I, ln S_1, ..., ln S_k) under Vasicek rates.
struct VasicekAssets {
  Eigen::MatrixXd F, GG;
  Eigen::VectorXd aP, aQ, x0;
};

VasicekAssets vasicek_assets(const ShortRateParams& p, double r_t, const std::vector<MertonVasicekSpec>& assets,
                             const Eigen::MatrixXd& asset_corr) {
  const int k = static_cast<int>(assets.size());
  const int n = 2 + k;
  VasicekAssets v;
  v.F = Eigen::MatrixXd::Zero(n, n);
  v.F(0, 0) = -p.alpha_r;
  v.F(1, 0) = 1.0;
  v.aP = Eigen::VectorXd::Zero(n);
  v.aQ = Eigen::VectorXd::Zero(n);
  v.aP(0) = p.alpha_r * p.m_r;
  v.aQ(0) = p.alpha_r * p.m_r - p.sigma_r * p.gamma_r;
  v.GG = Eigen::MatrixXd::Zero(n, n);
  v.GG(0, 0) = p.sigma_r * p.sigma_r;
  v.x0 = Eigen::VectorXd::Zero(n);
  v.x0(0) = r_t;
  for (int j = 0; j < k; ++j) {
    const auto& a = assets[j];
    v.F(2 + j, 0) = 1.0;
    v.aP(2 + j) = a.gamma * a.sigma - 0.5 * a.sigma * a.sigma;
    v.aQ(2 + j) = -0.5 * a.sigma * a.sigma;
    v.GG(2 + j, 2 + j) = a.sigma * a.sigma;
    v.GG(0, 2 + j) = v.GG(2 + j, 0) = a.rho * a.sigma * p.sigma_r;
    for (int i = 0; i < j; ++i)
      v.GG(2 + i, 2 + j) = v.GG(2 + j, 2 + i) = asset_corr(i, j) * assets[i].sigma * a.sigma;
    v.x0(2 + j) = std::log(a.S_t);
  }
  return v;
}

// Draw X_H under P, reset the integrated rate, then X_T under Q.
template <typename Z>
void vasicek_assets_path(const RegimeGauss& g, const Eigen::VectorXd& x0, Z& z, Eigen::VectorXd& xH,
                         Eigen::VectorXd& xT) {
  xH = g.has_pre ? g.pre.apply(x0, z) : x0;
  xH(1) = 0.0;
  xT = g.has_post ? g.post.apply(xH, z) : xH;
}

double gbm_segment(double lnS, double drift, double sigma, double tau, int n, NormalStream& z) {
  if (n == 0) return lnS;
  const double dt = tau / n, sd = sigma * std::sqrt(dt), m = (drift - 0.5 * sigma * sigma) * dt;
  for (int i = 0; i < n; ++i) lnS += m + sd * z();
  return lnS;
}

}  // namespace

std::vector<double> mc_drift_trace(const GBMSpec& spec, const HorizonSpec& hz, int spy) {
  hz.validate();
  const int n = aligned_steps(hz.total(), spy, "T");
  aligned_steps(hz.pre(), spy, "H");
  const double dt = hz.total() / std::max(n, 1);
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) {
    // Step starts are rounded to the grid so that s == H is recognised exactly.
    const double s = i * dt + hz.t;
    const bool on_after = std::abs(s - hz.H) < 1e-12 || s > hz.H;
    out[i] = on_after ? spec.r : spec.mu;
  }
  return out;
}

MCEstimate mc_gbm_payoff(const GBMSpec& spec, const std::function<double(double)>& h, const HorizonSpec& hz,
                         const BatchConfig& cfg) {
  hz.validate();
  spec.validate();
  check_cfg(cfg);
  const int n1 = aligned_steps(hz.pre(), cfg.steps_per_year, "H");
  const int n2 = aligned_steps(hz.post(), cfg.steps_per_year, "T");
  const double disc = std::exp(-spec.r * hz.post()), lnS0 = std::log(spec.S0);
  auto f = [&](NormalStream& z) {
    double x = gbm_segment(lnS0, spec.mu, spec.sigma, hz.pre(), n1, z);
    x = gbm_segment(x, spec.r, spec.sigma, hz.post(), n2, z);
    return disc * h(std::exp(x));
  };
  return tag(run_mc(f, cfg), "gbm-exact-log-steps", 1.0 / cfg.steps_per_year);
}

MCEstimate mc_bs_expected(const GBMSpec& spec, double K, Payoff payoff, const HorizonSpec& hz,
                          const BatchConfig& cfg) {
  if (payoff == Payoff::Call) return mc_gbm_payoff(spec, [K](double s) { return std::max(s - K, 0.0); }, hz, cfg);
  return mc_gbm_payoff(spec, [K](double s) { return std::max(K - s, 0.0); }, hz, cfg);
}

MCEstimate mc_fso(const ForwardStartInputs& in, const BatchConfig& cfg) {
  const auto& hz = in.hz;
  const auto& sp = in.spec;
  hz.validate();
  sp.validate();
  check_cfg(cfg);
  if (!(hz.t <= in.T0 && in.T0 <= hz.T)) throw DomainError("mc fso: require t <= T0 <= T");
  // Segment boundaries in time order; the drift switches at H.
  std::vector<double> pts{hz.t, in.T0, hz.H, hz.T};
  std::sort(pts.begin(), pts.end());
  struct Seg {
    double tau, drift;
    int n;
    bool ends_at_T0;
  };
  std::vector<Seg> segs;
  const int spy = cfg.steps_per_year;
  for (int i = 0; i < 3; ++i) {
    const double tau = pts[i + 1] - pts[i];
    aligned_steps(pts[i + 1] - hz.t, spy, "a key date");
    const double drift = pts[i] < hz.H ? sp.mu : sp.r;
    segs.push_back({tau, drift, aligned_steps(tau, spy, "a key date"), pts[i + 1] == in.T0});
  }
  const double disc = std::exp(-sp.r * hz.post()), lnS0 = std::log(sp.S0);
  auto f = [&](NormalStream& z) {
    double x = lnS0, x0 = in.T0 == hz.t ? lnS0 : 0.0;
    for (const auto& s : segs) {
      x = gbm_segment(x, s.drift, sp.sigma, s.tau, s.n, z);
      if (s.ends_at_T0) x0 = x;
    }
    return disc * std::max(std::exp(x) - in.k * std::exp(x0), 0.0);
  };
  return tag(run_mc(f, cfg), "gbm-exact-log-steps", 1.0 / spy);
}

MCEstimate mc_bs_nested(const GBMSpec& spec, double K, const HorizonSpec& hz, long outer, long inner,
                        const BatchConfig& cfg) {
  hz.validate();
  spec.validate();
  if (inner < 1) throw ParameterError("mc nested: inner must be >= 1");
  BatchConfig c = cfg;
  c.n_paths = outer;
  c.antithetic = false;
  const double disc = std::exp(-spec.r * hz.post());
  const double s1 = spec.sigma * std::sqrt(hz.pre()), s2 = spec.sigma * std::sqrt(hz.post());
  const double m1 = (spec.mu - 0.5 * spec.sigma * spec.sigma) * hz.pre();
  const double m2 = (spec.r - 0.5 * spec.sigma * spec.sigma) * hz.post();
  auto f = [&](NormalStream& z) {
    const double xH = std::log(spec.S0) + m1 + s1 * z();
    double acc = 0.0;
    for (long j = 0; j < inner; ++j) acc += std::max(std::exp(xH + m2 + s2 * z()) - K, 0.0);
    return disc * acc / inner;
  };
  return tag(run_mc(f, c), "nested-exact", 0.0);
}

MCEstimate mc_vasicek_bond(const ShortRateParams& p, double r_t, const HorizonSpec& hz, const BatchConfig& cfg) {
  hz.validate();
  check_cfg(cfg);
  const VasicekAssets v = vasicek_assets(p, r_t, {}, Eigen::MatrixXd());
  const RegimeGauss g(v.F, v.aP, v.aQ, v.GG, hz);
  auto f = [&](NormalStream& z) {
    Eigen::VectorXd xH, xT;
    vasicek_assets_path(g, v.x0, z, xH, xT);
    return std::exp(-xT(1));
  };
  return tag(run_mc(f, cfg), "gaussian-exact", hz.total());
}

MCEstimate mc_vasicek_log_bond(const ShortRateParams& p, double r_t, const HorizonSpec& hz,
                               const BatchConfig& cfg) {
  hz.validate();
  check_cfg(cfg);
  const double m_star = p.m_r - p.sigma_r * p.gamma_r / p.alpha_r;
  const AB q = vasicek_AB(p.alpha_r, m_star, p.sigma_r, 0.0, 1.0, hz.post());
  const VasicekAssets v = vasicek_assets(p, r_t, {}, Eigen::MatrixXd());
  const RegimeGauss g(v.F, v.aP, v.aQ, v.GG, hz);
  auto f = [&](NormalStream& z) {
    const Eigen::VectorXd xH = g.has_pre ? g.pre.apply(v.x0, z) : v.x0;
    return -q.A - q.B * xH(0);
  };
  return tag(run_mc(f, cfg), "gaussian-exact", hz.pre());
}

MCEstimate mc_vasicek_mean_rate(const ShortRateParams& p, double r_t, double tau, const BatchConfig& cfg) {
  check_cfg(cfg);
  const HorizonSpec hz{0.0, tau, tau};
  hz.validate();
  const VasicekAssets v = vasicek_assets(p, r_t, {}, Eigen::MatrixXd());
  const RegimeGauss g(v.F, v.aP, v.aQ, v.GG, hz);
  auto f = [&](NormalStream& z) { return g.has_pre ? g.pre.apply(v.x0, z)(0) : r_t; };
  return tag(run_mc(f, cfg), "gaussian-exact", tau, MeasureTag::P);
}

MCEstimate mc_cir_bond(const ShortRateParams& p, double r_t, const HorizonSpec& hz, const BatchConfig& cfg) {
  hz.validate();
  check_cfg(cfg);
  if (r_t < 0.0) throw ParameterError("mc cir: r_t must be non-negative");
  const int spy = cfg.steps_per_year;
  const int n1 = aligned_steps(hz.pre(), spy, "H");
  const int n2 = aligned_steps(hz.post(), spy, "T");
  const double dt1 = n1 ? hz.pre() / n1 : 0.0, dt2 = n2 ? hz.post() / n2 : 0.0;
  const double a_star = p.alpha_r + p.gamma_r * p.sigma_r;
  const double am = p.alpha_r * p.m_r;
  // Full truncation: drift and diffusion use max(r, 0).
  auto step = [&](double r, double kappa, double dt, double zz) {
    const double rp = std::max(r, 0.0);
    return r + (am - kappa * rp) * dt + p.sigma_r * std::sqrt(rp * dt) * zz;
  };
  auto f = [&](NormalStream& z) {
    double r = r_t;
    for (int i = 0; i < n1; ++i) r = step(r, p.alpha_r, dt1, z());
    double I = 0.0;
    for (int i = 0; i < n2; ++i) {
      const double rn = step(r, a_star, dt2, z());
      I += 0.5 * (std::max(r, 0.0) + std::max(rn, 0.0)) * dt2;
      r = rn;
    }
    return std::exp(-I);
  };
  return tag(run_mc(f, cfg), "cir-full-truncation-euler", 1.0 / spy);
}

MCEstimate mc_expected_asset_vasicek(const MertonVasicekSpec& s, const HorizonSpec& hz, const BatchConfig& cfg) {
  hz.validate();
  s.validate();
  check_cfg(cfg);
  const VasicekAssets v = vasicek_assets(s.rates(), s.r_t, {s}, Eigen::MatrixXd::Identity(1, 1));
  const RegimeGauss g(v.F, v.aP, v.aQ, v.GG, hz);
  auto f = [&](NormalStream& z) {
    const Eigen::VectorXd xH = g.has_pre ? g.pre.apply(v.x0, z) : v.x0;
    return std::exp(xH(2));
  };
  return tag(run_mc(f, cfg), "gaussian-exact", hz.pre());
}

MCEstimate mc_merton_vasicek_call(const MertonVasicekSpec& s, double K, const HorizonSpec& hz,
                                  const BatchConfig& cfg) {
  hz.validate();
  s.validate();
  check_cfg(cfg);
  const VasicekAssets v = vasicek_assets(s.rates(), s.r_t, {s}, Eigen::MatrixXd::Identity(1, 1));
  const RegimeGauss g(v.F, v.aP, v.aQ, v.GG, hz);
  auto f = [&](NormalStream& z) {
    Eigen::VectorXd xH, xT;
    vasicek_assets_path(g, v.x0, z, xH, xT);
    return std::exp(-xT(1)) * std::max(std::exp(xT(2)) - K, 0.0);
  };
  return tag(run_mc(f, cfg), "gaussian-exact", hz.total());
}

MCEstimate mc_margrabe(const MargrabeSpec& s, const HorizonSpec& hz, const BatchConfig& cfg) {
  hz.validate();
  s.validate();
  check_cfg(cfg);
  Eigen::MatrixXd corr = Eigen::MatrixXd::Identity(2, 2);
  corr(0, 1) = corr(1, 0) = s.rho12;
  const VasicekAssets v = vasicek_assets(s.asset(1).rates(), s.r_t, {s.asset(1), s.asset(2)}, corr);
  const RegimeGauss g(v.F, v.aP, v.aQ, v.GG, hz);
  auto f = [&](NormalStream& z) {
    Eigen::VectorXd xH, xT;
    vasicek_assets_path(g, v.x0, z, xH, xT);
    return std::exp(-xT(1)) * std::max(std::exp(xT(3)) - std::exp(xT(2)), 0.0);
  };
  return tag(run_mc(f, cfg), "gaussian-exact", hz.total());
}

MCEstimate mc_heston_call(const HestonParams& p, double S0, double K, const HorizonSpec& hz,
                          const BatchConfig& cfg) {
  hz.validate();
  check_cfg(cfg);
  const int spy = cfg.steps_per_year;
  const int n1 = aligned_steps(hz.pre(), spy, "H");
  const int n2 = aligned_steps(hz.post(), spy, "T");
  const double rc = std::sqrt(std::max(1.0 - p.rho * p.rho, 0.0));
  auto seg = [&](double& x, double& v, double kappa, double theta, double prem, double tau, int n,
                 NormalStream& z) {
    if (n == 0) return;
    const double dt = tau / n, sq = std::sqrt(dt);
    for (int i = 0; i < n; ++i) {
      const double vp = std::max(v, 0.0), sv = std::sqrt(vp);
      const double z1 = z(), z2 = p.rho * z1 + rc * z();
      x += (p.r + (prem - 0.5) * vp) * dt + sv * sq * z1;
      v += kappa * (theta - vp) * dt + p.sigma_v * sv * sq * z2;
    }
  };
  const double disc = std::exp(-p.r * hz.post());
  auto f = [&](NormalStream& z) {
    double x = std::log(S0), v = p.v0;
    seg(x, v, p.kappa, p.theta, p.lambda_s, hz.pre(), n1, z);
    seg(x, v, p.kappa_q, p.theta_q, 0.0, hz.post(), n2, z);
    return disc * std::max(std::exp(x) - K, 0.0);
  };
  return tag(run_mc(f, cfg), "heston-full-truncation-euler", 1.0 / spy);
}

MCEstimate mc_merton_jump_call(const MertonJumpParams& p, double S0, double K, const HorizonSpec& hz,
                               const BatchConfig& cfg) {
  hz.validate();
  check_cfg(cfg);
  const double kbar = std::exp(p.jump_mean + 0.5 * p.jump_sd * p.jump_sd) - 1.0;
  auto seg = [&](double x, double mu, double tau, NormalStream& z) {
    if (tau <= 0.0) return x;
    // Poisson count by inversion; uniforms are not mirrored by the antithetic partner.
    const double lam = p.intensity * tau, u = z.rng.next_uniform();
    long n = 0;
    double pk = std::exp(-lam), cdf = pk;
    while (u > cdf && n < 1000) {
      ++n;
      pk *= lam / n;
      cdf += pk;
    }
    x += (mu - p.intensity * kbar - 0.5 * p.sigma * p.sigma) * tau + p.sigma * std::sqrt(tau) * z();
    if (n > 0) x += n * p.jump_mean + p.jump_sd * std::sqrt(static_cast<double>(n)) * z();
    return x;
  };
  const double disc = std::exp(-p.r * hz.post());
  auto f = [&](NormalStream& z) {
    double x = seg(std::log(S0), p.mu, hz.pre(), z);
    x = seg(x, p.r, hz.post(), z);
    return disc * std::max(std::exp(x) - K, 0.0);
  };
  return tag(run_mc(f, cfg), "jump-diffusion-exact", 0.0);
}

MCEstimate simulate_first_passage(const CDGSpec& s, const CDGState& x, const HorizonSpec& hz,
                                  const BatchConfig& cfg) {
  hz.validate();
  s.validate();
  check_cfg(cfg);
  const int spy = cfg.steps_per_year;
  const int n = aligned_steps(hz.total(), spy, "T");
  aligned_steps(hz.pre(), spy, "H");
  const double dt = hz.total() / n;
  const Eigen::Matrix2d E = cdg_transition(s, dt);
  // Noise covariance over one step by Gauss-Legendre on E(dt - v) GG' E'.
  const Eigen::Matrix2d GG = cdg_diffusion_cov(s);
  const Eigen::Matrix2d Qd = gl_integrate(
      [&](double v) -> Eigen::Matrix2d {
        const Eigen::Matrix2d Ev = cdg_transition(s, dt - v);
        return Ev * GG * Ev.transpose();
      },
      0.0, dt, 1);
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(0.5 * (Qd + Qd.transpose()));
  const Eigen::Matrix2d L = es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
  // Intercepts integrated per step; the switch sits on a step boundary.
  std::vector<Eigen::Vector2d> c(n);
  for (int i = 0; i < n; ++i) {
    const double s0 = hz.t + i * dt;
    c[i] = gl_integrate(
        [&](double v) -> Eigen::Vector2d {
          return cdg_transition(s, dt - v) * cdg_drift_intercept(s, hz, std::min(s0 + v, hz.T));
        },
        0.0, dt, 1);
  }
  const double b = s.lnK, var = s.sigma * s.sigma * dt;
  auto f = [&](NormalStream& z) {
    Eigen::Vector2d y(x.l_t, x.r_t);
    if (y(0) >= b) return 1.0;
    double survive = 1.0;
    for (int i = 0; i < n; ++i) {
      const Eigen::Vector2d w(z(), z());
      const Eigen::Vector2d yn = E * y + c[i] + L * w;
      if (yn(0) >= b) return 1.0;
      survive *= 1.0 - std::exp(-2.0 * (b - y(0)) * (b - yn(0)) / var);
      y = yn;
    }
    return 1.0 - survive;
  };
  return tag(run_mc(f, cfg), "gaussian-exact-steps-bridge", dt, MeasureTag::R1T);
}

MCEstimate simulate_expected_price(const ModelSpec& model, const Claim& claim, const HorizonSpec& hz,
                                   const BatchConfig& cfg) {
  auto unsupported = [](const char* m) -> MCEstimate {
    throw ParameterError(std::string("simulate_expected_price: claim not supported for ") + m);
  };
  if (const auto* g = std::get_if<GBMSpec>(&model)) {
    switch (claim.kind) {
      case ClaimKind::Call: return mc_bs_expected(*g, claim.K, Payoff::Call, hz, cfg);
      case ClaimKind::Put: return mc_bs_expected(*g, claim.K, Payoff::Put, hz, cfg);
      case ClaimKind::ForwardStart: return mc_fso({*g, claim.k, claim.T0, hz}, cfg);
      case ClaimKind::Asset: return mc_gbm_payoff(*g, [](double s) { return s; }, hz, cfg);
      default: return unsupported("gbm");
    }
  }
  if (const auto* v = std::get_if<VasicekModel>(&model)) {
    if (claim.kind != ClaimKind::ZeroBond) return unsupported("vasicek");
    return mc_vasicek_bond(v->p, v->r_t, hz, cfg);
  }
  if (const auto* c = std::get_if<CIRModel>(&model)) {
    if (claim.kind != ClaimKind::ZeroBond) return unsupported("cir");
    return mc_cir_bond(c->p, c->r_t, hz, cfg);
  }
  if (const auto* m = std::get_if<MertonVasicekSpec>(&model)) {
    switch (claim.kind) {
      case ClaimKind::Call: return mc_merton_vasicek_call(*m, claim.K, hz, cfg);
      case ClaimKind::Asset: return mc_expected_asset_vasicek(*m, hz, cfg);
      case ClaimKind::ZeroBond: return mc_vasicek_bond(m->rates(), m->r_t, hz, cfg);
      default: return unsupported("merton-vasicek");
    }
  }
  const auto& x = std::get<MargrabeSpec>(model);
  if (claim.kind != ClaimKind::Exchange) return unsupported("margrabe");
  return mc_margrabe(x, hz, cfg);
}

}  // namespace eem
