#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "eem/forward_measure.hpp"
#include "eem/mc.hpp"
#include "eem/transform.hpp"

namespace eem::cli {

// A model spec file: one model, one claim, a horizon window and numerics.
struct ModelFile {
  std::string model = "gbm";  // gbm | vasicek | cir | merton_vasicek | margrabe | cdg | heston
  std::string claim = "call";  // call | put | forward_start | zero_bond | asset | exchange | defaultable_bond
  double K = 100.0;
  double k = 1.0;
  double T0 = 0.0;

  double t = 0.0;
  double T = 1.0;
  std::optional<double> H;  // used by fspd

  std::string method = "closed_form";  // closed_form | binomial | fourier
  int steps_per_year = 0;              // binomial tree; 0 means the method default
  int ode_steps_per_year = 200;        // transform Riccati integration
  double abs_tol = 1e-8;               // Fourier quadrature

  BatchConfig mc;

  GBMSpec gbm{100.0, 0.08, 0.2, 0.03};
  ShortRateParams rates;
  double r_t = 0.03;
  MertonVasicekSpec mv;
  MargrabeSpec mg;
  CDGSpec cdg;
  CDGState cdg_state;
  HestonParams heston;
  double heston_S0 = 100.0;
};

// Schema errors raise InputError naming the offending field path.
ModelFile parse_model(const nlohmann::json& j);
ModelFile load_model(const std::string& path);
nlohmann::json to_json(const ModelFile& m);

}  // namespace eem::cli
