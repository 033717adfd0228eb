#pragma once

// Monte-Carlo realization of the spatial model: PPP gateways and active EDs,
// duty-cycle channel availability, nearest-available-gateway association,
// per-cell random scheduling, SF allocation, Rayleigh fading and capture.
//
// Geometry is split in three zones around the typical ED at the origin:
//   near field  (r < near radius)  every gateway, channel mask and ED is drawn;
//   far field   (near..far radius) active interferers only, drawn as a
//                                  PPP of density P_Act * lambda_gw_a;
//   tail        (r > far radius)   replaced by its mean interference.

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "lora/analysis.hpp"
#include "lora/kernels.hpp"
#include "lora/model.hpp"
#include "lora/rng.hpp"
#include "lora/stats.hpp"

namespace lora::sim {

using stats::Estimate;

enum class Fidelity {
  Full,     ///< near-field interferer activity follows the simulated cell loads
  Thinned,  ///< every available gateway is active on a channel w.p. P_Act
};

std::string_view to_string(Fidelity fidelity);
Fidelity parse_fidelity(std::string_view text);

struct SimConfig {
  double region_radius_m = 0.0;  ///< near-field radius; 0 picks near_factor * scale
  double far_radius_m = 0.0;     ///< far-field radius; 0 picks far_factor * scale
  double near_factor = 5.0;
  double far_factor = 60.0;
  std::uint64_t n_iterations = 100000;
  std::uint64_t rng_seed = 1;
  bool interference_enabled = true;
  Fidelity fidelity = Fidelity::Full;
  unsigned threads = 1;  ///< 0 uses the hardware concurrency
};

/// Mean distance scale to the nearest available gateway, 1/sqrt(pi lambda_gw_a).
double distance_scale(const DerivedParams& derived);

struct Realization {
  // Near-field gateways.
  std::vector<double> gw_x, gw_y;
  std::vector<std::uint64_t> gw_mask;  ///< bit c set: channel c free
  std::vector<std::uint32_t> available;  ///< indices of gateways with a free channel
  // Per available gateway (same order as `available`).
  std::vector<double> avail_x, avail_y;
  std::vector<double> avail_dist2;   ///< squared distance to the origin
  std::vector<double> avail_fading;  ///< |h|^2 of the link to the origin
  // Active EDs other than the typical one.
  std::vector<double> ed_x, ed_y;
  std::vector<std::uint32_t> ed_cell;  ///< index into `available`
  bool degenerate = true;
  std::uint32_t serving = 0;  ///< index into `available`
  int channel = -1;           ///< channel the typical ED is scheduled on
  // Far-field interferers, already thinned by P_Act.
  std::vector<double> far_dist2, far_fading, far_u_sf;
};

struct Schedule {
  std::vector<std::uint32_t> load;  ///< active EDs per available gateway
  std::vector<std::uint32_t> free;  ///< free channels per available gateway
  bool selected = false;            ///< typical ED served by its gateway
  std::vector<std::uint8_t> active_on_channel;  ///< available gateway transmits on `channel`
  std::vector<double> u_sf;                     ///< SF draw of that transmission
  double typical_act = 0.0;  ///< A * min(load + 1, free) / ((load + 1) n_ch) of the serving cell
  double sampled_act = 0.0;  ///< one random central gateway, scaled by the central count
};

/// Per-scheme test outcomes for the typical ED.
struct SchemeOutcome {
  std::array<std::array<bool, kNumSf>, kNumSf> sir{};  ///< [wanted][interferer]
  std::array<bool, kNumSf> joint_co{};
  std::array<bool, kNumSf> joint_both{};
};

struct Outcome {
  bool selected = false;
  std::array<bool, kNumSf> snr{};
  std::array<SchemeOutcome, 2> schemes{};  ///< fair, random
};

struct SchemeEstimates {
  SfScheme scheme = SfScheme::FairCollision;
  std::array<std::array<Estimate, kNumSf>, kNumSf> sir{};
  std::array<std::array<Estimate, kNumSf>, 2> pcov{};        ///< [mode][sf], product form
  std::array<std::array<Estimate, kNumSf>, 2> pcov_joint{};  ///< [mode][sf], joint event
  std::array<std::array<Estimate, kNumSf>, 2> ase_per_sf{};
  std::array<Estimate, 2> ase_total{};
};

struct SimResult {
  std::uint64_t n_iterations = 0;
  std::uint64_t n_degenerate = 0;
  Estimate degenerate_rate;
  Estimate p_act;          ///< from the typical ED's cell
  Estimate p_act_sampled;  ///< from one random cell near the origin
  Estimate p_sel;
  Estimate available_fraction;  ///< available / all gateways, estimates mu
  Estimate gateway_count;
  double gateway_count_variance = 0.0;
  std::array<Estimate, kNumSf> pcov_snr{};
  std::array<SchemeEstimates, 2> schemes{};
  double near_radius_m = 0.0;
  double far_radius_m = 0.0;
  kernels::Isa isa = kernels::Isa::Scalar;
  std::vector<std::string> warnings;

  const SchemeEstimates& scheme(SfScheme s) const {
    return schemes[s == SfScheme::FairCollision ? 0 : 1];
  }
};

class Simulator {
 public:
  Simulator(const NetworkParams& params, const SimConfig& cfg);

  const DerivedParams& derived() const { return derived_; }
  const SimConfig& config() const { return cfg_; }
  double near_radius() const { return near_radius_; }
  double far_radius() const { return far_radius_; }
  double analytic_p_act() const { return p_act_; }
  const std::vector<std::string>& warnings() const { return warnings_; }

  Realization sample_realization(std::uint64_t stream_index) const;
  Schedule simulate_load(const Realization& real, std::uint64_t stream_index) const;
  Outcome evaluate_typical(const Realization& real, const Schedule& schedule) const;

  SimResult run() const;

 private:
  NetworkParams params_;
  SimConfig cfg_;
  DerivedParams derived_;
  RejectionMatrix rej_;
  std::array<SfAllocation, 2> alloc_;
  double p_act_ = 0.0;
  double near_radius_ = 0.0;
  double far_radius_ = 0.0;
  std::array<std::array<double, kNumSf>, 2> tail_mean_{};  ///< [scheme][sf] tail interference
  std::vector<std::string> warnings_;
};

/// Convenience wrapper: Simulator(params, cfg).run().
SimResult run(const NetworkParams& params, const SimConfig& cfg);

}  // namespace lora::sim
