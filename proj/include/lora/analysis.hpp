#pragma once

// Closed-form downlink performance of a multi-gateway LoRa network:
// channel activity, ED selection, SNR/SIR coverage and area spectral
// efficiency.

#include <array>
#include <string_view>

#include "lora/model.hpp"
#include "lora/special.hpp"

namespace lora::analysis {

/// Which interferers the SIR test accounts for: same-SF only, or every SF
/// through the capture matrix.
enum class InterferenceMode { CoOnly, CoAndInter };

std::string_view to_string(InterferenceMode mode);
InterferenceMode parse_mode(std::string_view text);

struct PerfResult {
  double p_act = 0.0;
  double p_sel = 0.0;
  std::array<double, kNumSf> pcov_snr{};
  std::array<double, kNumSf> pcov_sir{};
  std::array<double, kNumSf> pcov{};
  std::array<double, kNumSf> ase_per_sf{};  ///< bit/s/m^2
  double ase_total = 0.0;                   ///< bit/s/m^2
};

/// Probability that one channel of an available gateway serves an ED.
/// `a_ratio` is active EDs per available gateway; the gateway has `n_ch`
/// channels each free with probability `rho`.
double active_prob(double a_ratio, int n_ch, double rho);
double active_prob(const DerivedParams& derived);

/// Probability that an active ED is scheduled on some available channel.
double selection_prob(double a_ratio, int n_ch, double rho);
double selection_prob(const DerivedParams& derived);

/// P(SIR_{k, k~} >= Delta_{k, k~}) against a PPP of SF-k~ interferers of
/// density p_{k~} * p_act * lambda_gw_a beyond the serving distance.
double p_sir(Sf k, Sf k_tilde, const SfAllocation& alloc, double p_act, const RejectionMatrix& rej,
             double delta);

double pcov_sir(Sf k, const SfAllocation& alloc, InterferenceMode mode, double p_act,
                const RejectionMatrix& rej, double delta);

/// P(SNR >= gamma_D,k) for an ED associated with its nearest available
/// gateway under Rayleigh fading; evaluated by quadrature.
double pcov_snr(Sf k, const DerivedParams& derived, const special::QuadratureSpec& quad = {});

double coverage(Sf k, const SfAllocation& alloc, InterferenceMode mode, const DerivedParams& derived,
                const RejectionMatrix& rej, const special::QuadratureSpec& quad = {});

/// Full per-SF breakdown and summed ASE for one scheme and mode.
PerfResult ase(const SfAllocation& alloc, InterferenceMode mode, const DerivedParams& derived,
               const RejectionMatrix& rej, const special::QuadratureSpec& quad = {});

}  // namespace lora::analysis
