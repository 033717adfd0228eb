#pragma once

// Parameter sweeps over the closed forms and, optionally, the simulator;
// CSV output and the analytic-vs-simulation validation report.

#include <array>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "lora/analysis.hpp"
#include "lora/model.hpp"
#include "lora/simulator.hpp"

namespace lora::sweep {

enum class SweepVariable { PTotDbm, DensityRatio, DutyCycle, ActiveTheta };

std::string_view to_string(SweepVariable variable);
SweepVariable parse_variable(std::string_view text);

struct SweepSpec {
  SweepVariable variable = SweepVariable::PTotDbm;
  std::vector<double> values = {25.0};
  NetworkParams fixed;
  std::vector<SfScheme> schemes = {SfScheme::FairCollision, SfScheme::Random};
  std::vector<analysis::InterferenceMode> modes = {analysis::InterferenceMode::CoOnly,
                                                   analysis::InterferenceMode::CoAndInter};
  bool with_simulation = false;
  sim::SimConfig sim;
};

/// Throws ValidationError: empty or non-increasing values, empty scheme or
/// mode sets, invalid fixed parameters, zero iterations.
void validate(const SweepSpec& spec);

/// Fixed parameters with the sweep variable set to `value`. DensityRatio
/// sets lambda_ed so that theta * lambda_ed / lambda_gw equals `value`.
NetworkParams apply(const SweepSpec& spec, double value);

struct PointResult {
  double value = 0.0;
  NetworkParams params;
  std::string error;  ///< empty when the point evaluated cleanly
  std::vector<std::string> warnings;
  std::array<std::array<analysis::PerfResult, 2>, 2> analytic{};  ///< [scheme][mode]
  std::optional<sim::SimResult> sim;

  bool ok() const { return error.empty(); }
};

/// Evaluates every sweep point. Analytic-only sweeps run points in parallel;
/// with simulation the points run in order and the simulator is threaded.
/// Failed points carry an error message and do not stop the sweep.
std::vector<PointResult> evaluate(const SweepSpec& spec);

/// One row per (point, scheme, mode, SF) after a metadata header.
void write_csv(std::ostream& out, const SweepSpec& spec, const std::vector<PointResult>& points);

struct ValidationRow {
  double sweep_value = 0.0;
  std::string quantity;
  std::string scheme;  ///< empty when scheme-independent
  std::string mode;
  int sf = 0;  ///< 0 when not per-SF
  double analytic = 0.0;
  double estimate = 0.0;
  double std_error = 0.0;
  bool pass = false;
};

/// |analytic - estimate| <= 3 * std_error for every analytic quantity.
std::vector<ValidationRow> validation_rows(const SweepSpec& spec, const std::vector<PointResult>& points);

void write_validation_csv(std::ostream& out, const SweepSpec& spec, const std::vector<ValidationRow>& rows);

}  // namespace lora::sweep
