#include "commands.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

namespace eem::cli {

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

ModelFile effective_model(const ModelFile& src, const RunConfig& cfg) {
  ModelFile m = src;
  if (cfg.seed) m.mc.seed = *cfg.seed;
  if (cfg.paths) m.mc.n_paths = *cfg.paths;
  if (cfg.tolerance && cfg.command == "price") m.abs_tol = *cfg.tolerance;
  if (m.method == "binomial" && m.steps_per_year == 0) m.steps_per_year = 50;
  return m;
}

std::vector<double> horizon_grid(const ModelFile& m, const RunConfig& cfg) {
  std::vector<double> hs = cfg.horizons;
  if (hs.empty())
    for (int i = 0; i <= 10; ++i) hs.push_back(m.t + (m.T - m.t) * i / 10.0);
  for (double H : hs)
    if (!(m.t <= H && H <= m.T)) throw InputError("horizons: " + num(H) + " outside [t, T]");
  return hs;
}

namespace {

struct Priced {
  double value = 0.0;
  std::string method;
  std::string diagnostic;
};

Priced price_at(const ModelFile& m, double H) {
  const HorizonSpec hz{m.t, H, m.T};
  hz.validate();
  TransformOptions topt;
  topt.steps_per_year = m.ode_steps_per_year;
  QuadOptions q;
  q.abs_tol = m.abs_tol;
  auto fourier = [&](const TransformHandle& h, double strike) {
    const InversionResult r = fourier_expected_call(h, strike, q);
    return Priced{r.value, "fourier", "nodes=" + std::to_string(r.nodes) + ";u_max=" + num(r.u_max)};
  };

  if (m.model == "gbm") {
    const GBMSpec& s = m.gbm;
    if (m.method == "binomial") {
      const Payoff p = m.claim == "put" ? Payoff::Put : Payoff::Call;
      BinomialTree tr;
      const double v = binomial_expected_price(s, m.K, hz, m.steps_per_year, p, false, &tr).value;
      return {v, "binomial", "steps=" + std::to_string(tr.n_pre + tr.n_post) + ";p_up=" + num(tr.p_up) +
                                 ";q_up=" + num(tr.q_up)};
    }
    if (m.method == "fourier") {
      const Vec<double> Y = Vec<double>::Constant(1, std::log(s.S0));
      const auto chi = gbm_chi(s.mu, s.sigma, s.r), chs = gbm_chi(s.r, s.sigma, s.r);
      if (m.claim == "forward_start")
        return fourier(forward_start_handle(chi, chs, Y, m.t, m.T0, H, m.T, 0, topt), m.k);
      return fourier(expected_call_handle(chi, chs, Y, hz, 0, topt), m.K);
    }
    if (m.claim == "call") return {bs_expected_call({s, m.K, hz}), "closed_form", ""};
    if (m.claim == "put") return {bs_expected_put({s, m.K, hz}), "closed_form", ""};
    if (m.claim == "forward_start") return {fso_expected_price({s, m.k, m.T0, hz}), "closed_form", ""};
    return {s.S0 * std::exp(s.mu * hz.pre()), "closed_form", ""};
  }
  if (m.model == "vasicek") return {vasicek_expected_bond(m.rates, m.r_t, hz), "closed_form", ""};
  if (m.model == "cir") return {cir_expected_bond(m.rates, m.r_t, hz), "closed_form", ""};
  if (m.model == "merton_vasicek") {
    if (m.claim == "call")
      return {merton_vasicek_expected_call(m.mv, m.K, hz), "closed_form", "vp=" + num(merton_vasicek_vp(m.mv, hz))};
    if (m.claim == "asset") return {expected_asset_price_vasicek(m.mv, hz), "closed_form", ""};
    return {vasicek_expected_bond(m.mv.rates(), m.mv.r_t, hz), "closed_form", ""};
  }
  if (m.model == "margrabe")
    return {margrabe_expected_exchange(m.mg, hz), "closed_form", "vp=" + num(margrabe_vp(m.mg, hz))};
  if (m.model == "cdg") {
    const CDGResult r = cdg_expected_bond(m.cdg, m.cdg_state, hz);
    return {r.value, "recursion",
            "n_grid=" + std::to_string(m.cdg.n_grid) + ";default_probability=" + num(r.default_probability) +
                ";skipped=" + std::to_string(r.skipped)};
  }
  // heston
  Vec<double> Y(2);
  Y << std::log(m.heston_S0), m.heston.v0;
  return fourier(expected_call_handle(heston_chi(m.heston, false), heston_chi(m.heston, true), Y, hz, 0, topt), m.K);
}

MCEstimate simulate_at(const ModelFile& m, double H) {
  const HorizonSpec hz{m.t, H, m.T};
  if (m.model == "cdg") {
    // Value is the expected risk-free bond times one minus the expected loss.
    const CDGResult r = cdg_expected_bond(m.cdg, m.cdg_state, hz);
    MCEstimate e = simulate_first_passage(m.cdg, m.cdg_state, hz, m.mc);
    e.mean = r.expected_riskfree * (1.0 - m.cdg.omega * e.mean);
    e.standard_error *= r.expected_riskfree * m.cdg.omega;
    return e;
  }
  if (m.model == "heston") return mc_heston_call(m.heston, m.heston_S0, m.K, hz, m.mc);
  Claim c;
  c.K = m.K;
  c.k = m.k;
  c.T0 = m.T0;
  static const std::map<std::string, ClaimKind> kinds{
      {"call", ClaimKind::Call},         {"put", ClaimKind::Put},     {"forward_start", ClaimKind::ForwardStart},
      {"zero_bond", ClaimKind::ZeroBond}, {"asset", ClaimKind::Asset}, {"exchange", ClaimKind::Exchange}};
  c.kind = kinds.at(m.claim);
  ModelSpec spec = m.gbm;
  if (m.model == "vasicek") spec = VasicekModel{m.rates, m.r_t};
  if (m.model == "cir") spec = CIRModel{m.rates, m.r_t};
  if (m.model == "merton_vasicek") spec = m.mv;
  if (m.model == "margrabe") spec = m.mg;
  return simulate_expected_price(spec, c, hz, m.mc);
}

}  // namespace

std::vector<TermStructureRow> price_term_structure(const ModelFile& src, const RunConfig& cfg) {
  const ModelFile m = effective_model(src, cfg);
  const auto hs = horizon_grid(m, cfg);
  const double k_se = cfg.command == "mc-check" && cfg.tolerance ? *cfg.tolerance : 3.0;
  const double now = price_at(m, m.t).value;
  std::vector<TermStructureRow> rows;
  for (double H : hs) {
    const Priced p = price_at(m, H);
    TermStructureRow row;
    row.H = H;
    row.expected_price = p.value;
    row.expected_simple_return = H == m.t ? 0.0 : p.value / now - 1.0;
    row.method = p.method;
    row.diagnostic = p.diagnostic;
    if (cfg.mc_check || cfg.command == "mc-check") {
      row.mc = simulate_at(m, H);
      const double diff = row.mc->mean - p.value;
      if (row.mc->standard_error > 0.0) {
        row.mc_z = diff / row.mc->standard_error;
        row.mc_pass = std::abs(row.mc_z) <= k_se;
      } else {
        row.mc_pass = std::abs(diff) <= 1e-12 * std::max(1.0, std::abs(p.value));
      }
    }
    rows.push_back(row);
  }
  return rows;
}

void write_term_structure(std::ostream& os, const ModelFile& src, const RunConfig& cfg,
                          const std::vector<TermStructureRow>& rows) {
  const ModelFile m = effective_model(src, cfg);
  const bool mc = cfg.mc_check || cfg.command == "mc-check";
  os << "# command=" << cfg.command << " model=" << m.model << " claim=" << m.claim << " method=" << m.method
     << " t=" << num(m.t) << " T=" << num(m.T) << "\n";
  os << "# settings steps_per_year=" << m.steps_per_year << " ode_steps_per_year=" << m.ode_steps_per_year
     << " abs_tol=" << num(m.abs_tol);
  if (mc) {
    os << " mc_paths=" << m.mc.n_paths << " mc_steps_per_year=" << m.mc.steps_per_year << " seed=" << m.mc.seed
       << " antithetic=" << (m.mc.antithetic ? 1 : 0) << " workers=" << m.mc.workers;
    if (cfg.command == "mc-check") os << " se_multiple=" << num(cfg.tolerance.value_or(3.0));
  }
  os << "\n";
  os << "H,expected_price,expected_simple_return,method,diagnostic";
  if (mc) os << ",mc_mean,mc_standard_error,mc_scheme";
  if (cfg.command == "mc-check") os << ",mc_z,mc_pass";
  os << "\n";
  for (const auto& r : rows) {
    os << num(r.H) << "," << num(r.expected_price) << "," << num(r.expected_simple_return) << "," << r.method << ","
       << r.diagnostic;
    if (mc) os << "," << num(r.mc->mean) << "," << num(r.mc->standard_error) << "," << r.mc->scheme;
    if (cfg.command == "mc-check") os << "," << num(r.mc_z) << "," << (r.mc_pass ? 1 : 0);
    os << "\n";
  }
}

std::vector<FSPDObservation> read_observations(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("observations: cannot open '" + path + "'");
  std::string line;
  std::vector<FSPDObservation> out;
  int lineno = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      if (line.rfind("K,call,expected_call", 0) != 0)
        throw InputError("observations: header must be K,call,expected_call");
      header = true;
      continue;
    }
    std::istringstream ss(line);
    FSPDObservation o;
    char c1 = 0, c2 = 0;
    if (!(ss >> o.K >> c1 >> o.call >> c2 >> o.expected_call) || c1 != ',' || c2 != ',')
      throw InputError("observations: line " + std::to_string(lineno) + ": expected three numbers");
    out.push_back(o);
  }
  return out;
}

namespace {

StrikeGrid obs_grid(const std::vector<FSPDObservation>& obs, int n) {
  if (obs.size() < 5) throw GridError("fspd: need at least 5 observed strikes, got " + std::to_string(obs.size()));
  double lo = obs.front().K, hi = lo;
  for (const auto& o : obs) {
    lo = std::min(lo, o.K);
    hi = std::max(hi, o.K);
  }
  return uniform_grid(lo, hi, n);
}

HorizonSpec fspd_horizon(const ModelFile& m, double H) {
  if (m.model != "gbm") throw InputError("model: fspd needs a gbm spec for S0 and r");
  return {m.t, H, m.T};
}

}  // namespace

FSPDRun run_fspd(const ModelFile& m, const std::vector<FSPDObservation>& obs, double H, int grid_points,
                 double penalty, double clip_tol) {
  FSPDRun run;
  run.H = H;
  run.penalty = penalty;
  run.clip_tol = clip_tol;
  run.grid = obs_grid(obs, grid_points);
  const HorizonSpec hz = fspd_horizon(m, H);
  run.extraction = fspd_extract(m.gbm.S0, m.gbm.r, hz, obs, run.grid, penalty, penalty);
  // Re-clip with the requested tolerance.
  ExpectedFSPD d = fspd_second_difference(run.grid, run.extraction.expected_calls, clip_tol);
  d.normalizer = run.extraction.density.normalizer;
  run.extraction.density = d;
  return run;
}

void write_fspd(std::ostream& os, const ModelFile& m, const FSPDRun& run) {
  const auto& d = run.extraction.density;
  os << "# command=fspd model=" << m.model << " t=" << num(m.t) << " H=" << num(run.H) << " T=" << num(m.T) << "\n";
  os << "# settings grid_points=" << run.grid.size() << " dK=" << num(run.grid.spacing())
     << " penalty=" << num(run.penalty) << " clip_tol=" << num(run.clip_tol) << " normalizer=" << num(d.normalizer)
     << " clipped=" << d.clipped << " negative_lobe=" << (d.negative_lobe ? 1 : 0) << "\n";
  os << "K,density,fitted_sigma,fitted_mu,expected_call\n";
  for (std::size_t i = 0; i < d.K.size(); ++i)
    os << num(d.K[i]) << "," << num(d.density[i]) << "," << num(run.extraction.sigma.values[i + 1]) << ","
       << num(run.extraction.mu.values[i + 1]) << "," << num(run.extraction.expected_calls[i + 1]) << "\n";
}

std::vector<SweepRow> penalty_sweep(const ModelFile& m, const std::vector<FSPDObservation>& obs, double H,
                                    int grid_points, const std::vector<double>& penalties) {
  const StrikeGrid g = obs_grid(obs, grid_points);
  const HorizonSpec hz = fspd_horizon(m, H);
  std::vector<SweepRow> out;
  for (double p : penalties) {
    const auto ex = fspd_extract(m.gbm.S0, m.gbm.r, hz, obs, g, p, p);
    SweepRow row;
    row.penalty = p;
    const auto& f = ex.sigma.values;
    for (std::size_t i = 1; i + 1 < f.size(); ++i) row.sigma_roughness += std::pow(f[i + 1] - 2 * f[i] + f[i - 1], 2);
    const double h = g.spacing();
    for (const auto& o : obs) {
      const double pos = std::min((o.K - g.K.front()) / h, double(g.size() - 1));
      const std::size_t j = std::min<std::size_t>(static_cast<std::size_t>(pos), g.size() - 2);
      const double w = pos - j, fit = (1 - w) * f[j] + w * f[j + 1];
      const double iv = implied_vol_invert(o.call, m.gbm.S0, o.K, m.gbm.r, hz.total());
      row.sigma_rss += (fit - iv) * (fit - iv);
    }
    for (std::size_t i = 0; i < ex.density.K.size(); ++i)
      row.density_integral += (i == 0 || i + 1 == ex.density.K.size() ? 0.5 : 1.0) * h * ex.density.density[i];
    out.push_back(row);
  }
  return out;
}

void write_sweep(std::ostream& os, const ModelFile& m, double H, const std::vector<SweepRow>& rows) {
  os << "# command=fspd penalty_sweep model=" << m.model << " t=" << num(m.t) << " H=" << num(H) << " T=" << num(m.T)
     << "\n";
  os << "penalty,sigma_roughness,sigma_rss,density_integral\n";
  for (const auto& r : rows)
    os << num(r.penalty) << "," << num(r.sigma_roughness) << "," << num(r.sigma_rss) << "," << num(r.density_integral)
       << "\n";
}

}  // namespace eem::cli
