#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "eem/closed_form_equity.hpp"
#include "eem/forward_measure.hpp"
#include "eem/transform.hpp"

namespace eem {

struct BatchConfig {
  long n_paths = 1'000'000;
  int steps_per_year = 50;
  std::uint64_t seed = 20240601;
  bool antithetic = true;
  int workers = 1;
  long block = 4096;  // samples per reduction block, fixed across worker counts
};

struct MCEstimate {
  double mean = 0.0;
  double standard_error = 0.0;
  long n_paths = 0;
  long n_samples = 0;  // independent samples (antithetic pairs count once)
  std::string scheme;
  double dt = 0.0;
  MeasureTag measure = MeasureTag::R;
};

// SplitMix64 finalizer applied to (key, counter): a stateless stream per path.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream);
  std::uint64_t next_u64();
  double next_uniform();  // in (0, 1)
  double next_normal();

 private:
  std::uint64_t key_;
  std::uint64_t ctr_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// Normals for one path; the antithetic partner flips the sign.
struct NormalStream {
  CounterRng rng;
  double sign = 1.0;
  double operator()() { return sign * rng.next_normal(); }
};

// Runs f(NormalStream&) -> double over the batch with a deterministic,
// worker-count independent reduction.
template <typename F>
MCEstimate run_mc(F&& f, const BatchConfig& cfg);

// Drift used by the stepped GBM simulator at each step start.
std::vector<double> mc_drift_trace(const GBMSpec& spec, const HorizonSpec& hz, int steps_per_year);

MCEstimate mc_bs_expected(const GBMSpec& spec, double K, Payoff payoff, const HorizonSpec& hz,
                          const BatchConfig& cfg = {});
// Any function of S_T, discounted from T to H.
MCEstimate mc_gbm_payoff(const GBMSpec& spec, const std::function<double(double)>& h, const HorizonSpec& hz,
                         const BatchConfig& cfg = {});
MCEstimate mc_fso(const ForwardStartInputs& in, const BatchConfig& cfg = {});
// Outer physical paths to H, inner risk-neutral paths to T for each.
MCEstimate mc_bs_nested(const GBMSpec& spec, double K, const HorizonSpec& hz, long outer, long inner,
                        const BatchConfig& cfg = {});

MCEstimate mc_vasicek_bond(const ShortRateParams& p, double r_t, const HorizonSpec& hz, const BatchConfig& cfg = {});
MCEstimate mc_vasicek_log_bond(const ShortRateParams& p, double r_t, const HorizonSpec& hz,
                               const BatchConfig& cfg = {});
MCEstimate mc_vasicek_mean_rate(const ShortRateParams& p, double r_t, double tau, const BatchConfig& cfg = {});
MCEstimate mc_cir_bond(const ShortRateParams& p, double r_t, const HorizonSpec& hz, const BatchConfig& cfg = {});
MCEstimate mc_expected_asset_vasicek(const MertonVasicekSpec& s, const HorizonSpec& hz, const BatchConfig& cfg = {});
MCEstimate mc_merton_vasicek_call(const MertonVasicekSpec& s, double K, const HorizonSpec& hz,
                                  const BatchConfig& cfg = {});
MCEstimate mc_margrabe(const MargrabeSpec& s, const HorizonSpec& hz, const BatchConfig& cfg = {});
MCEstimate mc_heston_call(const HestonParams& p, double S0, double K, const HorizonSpec& hz,
                          const BatchConfig& cfg = {});
MCEstimate mc_merton_jump_call(const MertonJumpParams& p, double S0, double K, const HorizonSpec& hz,
                               const BatchConfig& cfg = {});

struct VasicekModel {
  ShortRateParams p;
  double r_t = 0.03;
};

struct CIRModel {
  ShortRateParams p;
  double r_t = 0.03;
};

using ModelSpec = std::variant<GBMSpec, VasicekModel, CIRModel, MertonVasicekSpec, MargrabeSpec>;

enum class ClaimKind { Call, Put, ForwardStart, ZeroBond, Asset, Exchange };

struct Claim {
  ClaimKind kind = ClaimKind::Call;
  double K = 100.0;
  double k = 1.0;   // forward-start moneyness
  double T0 = 0.0;  // forward-start strike date
};

// E^R[exp(-int_H^T r) F_T] for the claim under the model, dispatched to the
// matching simulator.  Unsupported pairs raise ParameterError.
MCEstimate simulate_expected_price(const ModelSpec& model, const Claim& claim, const HorizonSpec& hz,
                                   const BatchConfig& cfg = {});

// R1T first-passage probability of l to ln K before T, bridge corrected.
MCEstimate simulate_first_passage(const CDGSpec& s, const CDGState& x, const HorizonSpec& hz,
                                  const BatchConfig& cfg = {});

}  // namespace eem

#include "eem/mc_impl.hpp"
