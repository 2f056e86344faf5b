#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "eem/fspd.hpp"
#include "spec_io.hpp"

namespace eem::cli {

struct RunConfig {
  std::string command = "price";
  std::vector<double> horizons;  // empty: eleven points from t to T
  std::optional<double> tolerance;
  std::optional<std::uint64_t> seed;
  std::optional<long> paths;
  bool mc_check = false;
};

struct TermStructureRow {
  double H = 0.0;
  double expected_price = 0.0;
  double expected_simple_return = 0.0;  // E_t[F_H] / F_t - 1
  std::string method;
  std::string diagnostic;
  std::optional<MCEstimate> mc;
  double mc_z = 0.0;
  bool mc_pass = true;
};

// Effective settings after command-line overrides.
ModelFile effective_model(const ModelFile& m, const RunConfig& cfg);
std::vector<double> horizon_grid(const ModelFile& m, const RunConfig& cfg);

std::vector<TermStructureRow> price_term_structure(const ModelFile& m, const RunConfig& cfg);
void write_term_structure(std::ostream& os, const ModelFile& m, const RunConfig& cfg,
                          const std::vector<TermStructureRow>& rows);

// Observations CSV with header K,call,expected_call.
std::vector<FSPDObservation> read_observations(const std::string& path);

struct FSPDRun {
  StrikeGrid grid;
  FSPDExtraction extraction;
  double H = 0.0;
  double penalty = 1e-3;
  double clip_tol = 1e-8;
};

FSPDRun run_fspd(const ModelFile& m, const std::vector<FSPDObservation>& obs, double H, int grid_points,
                 double penalty, double clip_tol);
void write_fspd(std::ostream& os, const ModelFile& m, const FSPDRun& run);

struct SweepRow {
  double penalty = 0.0;
  double sigma_roughness = 0.0;  // sum of squared second differences of the fitted curve
  double sigma_rss = 0.0;        // residual sum of squares at the observed strikes
  double density_integral = 0.0;
};

std::vector<SweepRow> penalty_sweep(const ModelFile& m, const std::vector<FSPDObservation>& obs, double H,
                                    int grid_points, const std::vector<double>& penalties);
void write_sweep(std::ostream& os, const ModelFile& m, double H, const std::vector<SweepRow>& rows);

std::string num(double x);  // 17 significant digits

}  // namespace eem::cli
