#include "spec_io.hpp"

#include <fstream>
#include <map>
#include <set>
#include <utility>
#include <vector>

namespace eem::cli {

using nlohmann::json;

namespace {

using Fields = std::vector<std::pair<const char*, double*>>;

Fields param_fields(ModelFile& m) {
  if (m.model == "gbm") return {{"S0", &m.gbm.S0}, {"mu", &m.gbm.mu}, {"sigma", &m.gbm.sigma}, {"r", &m.gbm.r}};
  if (m.model == "vasicek" || m.model == "cir")
    return {{"alpha_r", &m.rates.alpha_r}, {"m_r", &m.rates.m_r}, {"sigma_r", &m.rates.sigma_r},
            {"gamma_r", &m.rates.gamma_r}, {"r_t", &m.r_t}};
  if (m.model == "merton_vasicek") {
    auto& s = m.mv;
    return {{"S_t", &s.S_t},         {"sigma", &s.sigma}, {"gamma", &s.gamma},     {"rho", &s.rho},
            {"alpha_r", &s.alpha_r}, {"m_r", &s.m_r},     {"sigma_r", &s.sigma_r}, {"gamma_r", &s.gamma_r},
            {"r_t", &s.r_t}};
  }
  if (m.model == "margrabe") {
    auto& s = m.mg;
    return {{"S1", &s.S1},           {"sigma1", &s.sigma1}, {"gamma1", &s.gamma1},   {"rho1r", &s.rho1r},
            {"S2", &s.S2},           {"sigma2", &s.sigma2}, {"gamma2", &s.gamma2},   {"rho2r", &s.rho2r},
            {"rho12", &s.rho12},     {"alpha_r", &s.alpha_r}, {"m_r", &s.m_r},       {"sigma_r", &s.sigma_r},
            {"gamma_r", &s.gamma_r}, {"r_t", &s.r_t}};
  }
  if (m.model == "cdg") {
    auto& s = m.cdg;
    return {{"lambda", &s.lambda},   {"nu", &s.nu},       {"phi", &s.phi},         {"sigma", &s.sigma},
            {"gamma_S", &s.gamma_S}, {"rho", &s.rho},     {"alpha_r", &s.alpha_r}, {"m_r", &s.m_r},
            {"sigma_r", &s.sigma_r}, {"gamma_r", &s.gamma_r}, {"lnK", &s.lnK},    {"omega", &s.omega},
            {"l_t", &m.cdg_state.l_t}, {"r_t", &m.cdg_state.r_t}};
  }
  if (m.model == "heston") {
    auto& p = m.heston;
    return {{"S0", &m.heston_S0}, {"r", &p.r},         {"v0", &p.v0},       {"kappa", &p.kappa},
            {"theta", &p.theta},  {"kappa_q", &p.kappa_q}, {"theta_q", &p.theta_q}, {"sigma_v", &p.sigma_v},
            {"rho", &p.rho},      {"lambda_s", &p.lambda_s}};
  }
  throw InputError("model: unknown model '" + m.model + "'");
}

const std::set<std::string>& claims_for(const std::string& model) {
  static const std::map<std::string, std::set<std::string>> table{
      {"gbm", {"call", "put", "forward_start", "asset"}},
      {"vasicek", {"zero_bond"}},
      {"cir", {"zero_bond"}},
      {"merton_vasicek", {"call", "asset", "zero_bond"}},
      {"margrabe", {"exchange"}},
      {"cdg", {"defaultable_bond"}},
      {"heston", {"call"}},
  };
  return table.at(model);
}

// Reads an object, rejecting unknown keys and wrong types with the full path.
class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw InputError(path_ + ": expected an object");
  }

  bool has(const char* key) const { return j_.contains(key); }

  void num(const char* key, double& out, bool required = false) {
    seen_.insert(key);
    if (!j_.contains(key)) {
      if (required) throw InputError(where(key) + ": missing");
      return;
    }
    if (!j_.at(key).is_number()) throw InputError(where(key) + ": expected a number");
    out = j_.at(key).get<double>();
  }

  template <typename I>
  void integer(const char* key, I& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    if (!j_.at(key).is_number_integer()) throw InputError(where(key) + ": expected an integer");
    out = j_.at(key).get<I>();
  }

  void boolean(const char* key, bool& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    if (!j_.at(key).is_boolean()) throw InputError(where(key) + ": expected true or false");
    out = j_.at(key).get<bool>();
  }

  void str(const char* key, std::string& out, bool required = false) {
    seen_.insert(key);
    if (!j_.contains(key)) {
      if (required) throw InputError(where(key) + ": missing");
      return;
    }
    if (!j_.at(key).is_string()) throw InputError(where(key) + ": expected a string");
    out = j_.at(key).get<std::string>();
  }

  Reader child(const char* key) {
    seen_.insert(key);
    return Reader(j_.contains(key) ? j_.at(key) : empty(), where(key));
  }

  void finish() const {
    for (const auto& [k, v] : j_.items())
      if (!seen_.count(k)) throw InputError(where(k.c_str()) + ": unknown field");
  }

 private:
  static const json& empty() {
    static const json e = json::object();
    return e;
  }
  std::string where(const char* key) const { return path_.empty() ? key : path_ + "." + key; }

  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

}  // namespace

ModelFile parse_model(const json& j) {
  ModelFile m;
  Reader root(j, "");
  root.str("model", m.model, true);
  {
    Reader p = root.child("params");
    for (auto& [name, ptr] : param_fields(m)) p.num(name, *ptr, true);
    if (m.model == "cdg") p.integer("n_grid", m.cdg.n_grid);
    p.finish();
  }
  {
    Reader c = root.child("claim");
    c.str("type", m.claim, true);
    if (!claims_for(m.model).count(m.claim))
      throw InputError("claim.type: '" + m.claim + "' is not available for model '" + m.model + "'");
    if (m.claim == "call" || m.claim == "put") c.num("K", m.K, true);
    if (m.claim == "forward_start") {
      c.num("k", m.k, true);
      c.num("T0", m.T0, true);
    }
    c.finish();
  }
  {
    Reader h = root.child("horizon");
    h.num("t", m.t, true);
    h.num("T", m.T, true);
    if (h.has("H")) {
      double H = 0.0;
      h.num("H", H);
      m.H = H;
    }
    h.finish();
    if (!(m.t >= 0.0 && m.T >= m.t)) throw InputError("horizon: require 0 <= t <= T");
    if (m.H && !(m.t <= *m.H && *m.H <= m.T)) throw InputError("horizon.H: require t <= H <= T");
  }
  {
    Reader n = root.child("method");
    n.str("name", m.method);
    n.integer("steps_per_year", m.steps_per_year);
    n.integer("ode_steps_per_year", m.ode_steps_per_year);
    n.num("abs_tol", m.abs_tol);
    n.finish();
    static const std::set<std::string> methods{"closed_form", "binomial", "fourier"};
    if (!methods.count(m.method)) throw InputError("method.name: unknown method '" + m.method + "'");
    if (m.method == "binomial" && !(m.model == "gbm" && (m.claim == "call" || m.claim == "put")))
      throw InputError("method.name: binomial needs a gbm call or put");
    if (m.method == "fourier" && !(m.claim == "call" || m.claim == "forward_start"))
      throw InputError("method.name: fourier needs a call or forward-start claim");
    if (m.method == "fourier" && m.model != "gbm" && m.model != "heston")
      throw InputError("method.name: fourier is available for gbm and heston");
    if (m.model == "heston" && m.method != "fourier") throw InputError("method.name: heston requires fourier");
  }
  {
    Reader c = root.child("mc");
    c.integer("paths", m.mc.n_paths);
    c.integer("steps_per_year", m.mc.steps_per_year);
    c.integer("seed", m.mc.seed);
    c.boolean("antithetic", m.mc.antithetic);
    c.integer("workers", m.mc.workers);
    c.finish();
  }
  root.finish();
  return m;
}

ModelFile load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("model: cannot open '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw InputError("model: " + path + ": " + e.what());
  }
  return parse_model(j);
}

json to_json(const ModelFile& src) {
  ModelFile m = src;
  json j;
  j["model"] = m.model;
  json p = json::object();
  for (auto& [name, ptr] : param_fields(m)) p[name] = *ptr;
  if (m.model == "cdg") p["n_grid"] = m.cdg.n_grid;
  j["params"] = p;
  json c{{"type", m.claim}};
  if (m.claim == "call" || m.claim == "put") c["K"] = m.K;
  if (m.claim == "forward_start") {
    c["k"] = m.k;
    c["T0"] = m.T0;
  }
  j["claim"] = c;
  j["horizon"] = {{"t", m.t}, {"T", m.T}};
  if (m.H) j["horizon"]["H"] = *m.H;
  j["method"] = {{"name", m.method},
                 {"steps_per_year", m.steps_per_year},
                 {"ode_steps_per_year", m.ode_steps_per_year},
                 {"abs_tol", m.abs_tol}};
  j["mc"] = {{"paths", m.mc.n_paths},
             {"steps_per_year", m.mc.steps_per_year},
             {"seed", m.mc.seed},
             {"antithetic", m.mc.antithetic},
             {"workers", m.mc.workers}};
  return j;
}

}  // namespace eem::cli
