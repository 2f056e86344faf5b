#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"

using namespace eem;
using namespace eem::cli;

namespace {

struct Options {
  std::string model;
  std::string out;
  std::vector<double> horizons;
  std::optional<double> tolerance;
  std::optional<std::uint64_t> seed;
  std::optional<long> paths;
  bool mc_check = false;
  std::string observations;
  double penalty = 1e-3;
  int grid_points = 121;
  bool sweep = false;
};

void common(CLI::App* c, Options& o) {
  c->add_option("--model", o.model, "model spec (JSON)")->required();
  c->add_option("--horizons", o.horizons, "comma-separated H values")->delimiter(',');
  c->add_option("--out", o.out, "output CSV (default stdout)");
  c->add_option("--tolerance", o.tolerance, "numerical tolerance override");
  c->add_option("--seed", o.seed, "Monte Carlo seed");
  c->add_option("--paths", o.paths, "Monte Carlo paths");
}

// Optional EEM_OUTPUT_DIR prefixes relative output paths.
std::string output_path(const std::string& out) {
  const char* dir = std::getenv("EEM_OUTPUT_DIR");
  if (!dir || out.empty() || std::filesystem::path(out).is_absolute()) return out;
  return (std::filesystem::path(dir) / out).string();
}

template <typename W>
void emit(const std::string& out, W&& write) {
  if (out.empty()) {
    write(std::cout);
    return;
  }
  const std::string p = output_path(out);
  std::ofstream f(p);
  if (!f) throw InputError("out: cannot write '" + p + "'");
  write(f);
}

int run(const std::string& command, const Options& o) {
  const ModelFile m = load_model(o.model);
  RunConfig cfg;
  cfg.command = command;
  cfg.horizons = o.horizons;
  cfg.tolerance = o.tolerance;
  cfg.seed = o.seed;
  cfg.paths = o.paths;
  cfg.mc_check = o.mc_check;

  if (command == "fspd") {
    if (o.horizons.size() > 1) throw InputError("horizons: fspd takes a single H");
    const double H = o.horizons.empty() ? m.H.value_or(m.t) : o.horizons.front();
    if (!(m.t <= H && H <= m.T)) throw InputError("horizons: H outside [t, T]");
    const auto obs = read_observations(o.observations);
    if (o.sweep) {
      const std::vector<double> pens{1e-6, 1e-5, 1e-4, 1e-3, 1e-2, 1e-1, 1.0, 10.0, 100.0};
      const auto rows = penalty_sweep(m, obs, H, o.grid_points, pens);
      emit(o.out, [&](std::ostream& os) { write_sweep(os, m, H, rows); });
      return 0;
    }
    const auto r = run_fspd(m, obs, H, o.grid_points, o.penalty, o.tolerance.value_or(1e-8));
    emit(o.out, [&](std::ostream& os) { write_fspd(os, m, r); });
    if (r.extraction.density.negative_lobe) std::cerr << "warning: density has a negative lobe beyond the clip tolerance\n";
    return 0;
  }

  const auto rows = price_term_structure(m, cfg);
  emit(o.out, [&](std::ostream& os) { write_term_structure(os, m, cfg, rows); });
  if (command == "mc-check")
    for (const auto& r : rows)
      if (!r.mc_pass) {
        std::cerr << "mc-check: H=" << num(r.H) << " closed form " << num(r.expected_price) << " vs MC "
                  << num(r.mc->mean) << " (z=" << num(r.mc_z) << ")\n";
        return 3;
      }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"expected prices under the regime-switched measure"};
  app.require_subcommand(1);
  Options o;
  auto* price = app.add_subcommand("price", "term structure of expected prices over H");
  common(price, o);
  price->add_flag("--mc-check", o.mc_check, "append a Monte Carlo column");
  auto* mc = app.add_subcommand("mc-check", "closed form against Monte Carlo; exit 3 outside the SE band");
  common(mc, o);
  auto* fspd = app.add_subcommand("fspd", "expected future state-price density from observations");
  common(fspd, o);
  fspd->add_option("--observations", o.observations, "CSV with K,call,expected_call")->required();
  fspd->add_option("--penalty", o.penalty, "smoothing penalty for the fitted curves");
  fspd->add_option("--grid-points", o.grid_points, "uniform strike nodes over the observed range");
  fspd->add_flag("--penalty-sweep", o.sweep, "emit the smoothing diagnostic over a penalty ladder");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  const std::string command = price->parsed() ? "price" : mc->parsed() ? "mc-check" : "fspd";
  try {
    return run(command, o);
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 3;
  }
}
