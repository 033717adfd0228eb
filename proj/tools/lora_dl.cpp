// lora-dl: analytical and Monte-Carlo evaluation of LoRa downlink coverage
// and area spectral efficiency over parameter sweeps.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "lora/config.hpp"
#include "lora/errors.hpp"
#include "lora/sweep.hpp"

namespace {

enum Exit { kOk = 0, kUsage = 1, kValidationFailed = 2, kNumeric = 3 };

struct CommonOptions {
  std::string config_path;
  std::string out_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> iterations;
  std::optional<unsigned> threads;
};

void add_common(CLI::App* cmd, CommonOptions& o, const std::string& out_help) {
  cmd->add_option("--config", o.config_path, "Configuration file (defaults when omitted)")->check(CLI::ExistingFile);
  cmd->add_option("--out", o.out_path, out_help);
  cmd->add_option("--seed", o.seed, "Override sim.seed");
  cmd->add_option("--iterations", o.iterations, "Override sim.iterations");
  cmd->add_option("--threads", o.threads, "Override sim.threads (0 = all cores)");
}

lora::sweep::SweepSpec load_spec(const CommonOptions& o) {
  std::istringstream defaults(lora::config::default_text());
  auto spec = o.config_path.empty() ? lora::config::parse(defaults) : lora::config::load(o.config_path);
  if (o.seed) spec.sim.rng_seed = *o.seed;
  if (o.iterations) spec.sim.n_iterations = *o.iterations;
  if (o.threads) spec.sim.threads = *o.threads;
  return spec;
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw lora::ConfigError("cannot write '" + path + "'");
  out << text;
}

void report_warnings(const std::vector<lora::sweep::PointResult>& points) {
  for (const auto& p : points) {
    for (const auto& w : p.warnings) std::cerr << "warning (value " << p.value << "): " << w << '\n';
    if (!p.ok()) std::cerr << "error (value " << p.value << "): " << p.error << '\n';
  }
}

int run_sweep(const CommonOptions& o, bool no_sim) {
  auto spec = load_spec(o);
  if (no_sim) spec.with_simulation = false;
  const auto points = lora::sweep::evaluate(spec);
  std::ostringstream csv;
  lora::sweep::write_csv(csv, spec, points);
  emit(o.out_path, csv.str());
  report_warnings(points);
  for (const auto& p : points)
    if (!p.ok()) return kNumeric;
  return kOk;
}

int run_validate(const CommonOptions& o) {
  auto spec = load_spec(o);
  spec.with_simulation = true;
  const auto points = lora::sweep::evaluate(spec);
  const auto rows = lora::sweep::validation_rows(spec, points);
  report_warnings(points);

  bool failed = false;
  bool errored = false;
  std::printf("%-12s %-10s %-7s %-5s %-3s %14s %14s %12s %7s  %s\n", "value", "quantity", "scheme", "mode",
              "sf", "analytic", "estimate", "std_error", "z", "verdict");
  for (const auto& r : rows) {
    if (r.quantity.rfind("error", 0) == 0 || r.quantity == "no simulation") {
      errored = true;
      std::printf("%-12g %s\n", r.sweep_value, r.quantity.c_str());
      continue;
    }
    const double z = r.std_error > 0.0 ? (r.estimate - r.analytic) / r.std_error : 0.0;
    std::printf("%-12g %-10s %-7s %-5s %-3s %14.8g %14.8g %12.4g %7.2f  %s\n", r.sweep_value, r.quantity.c_str(),
                r.scheme.c_str(), r.mode.c_str(), r.sf > 0 ? std::to_string(r.sf).c_str() : "", r.analytic,
                r.estimate, r.std_error, z, r.pass ? "pass" : "FAIL");
    failed = failed || !r.pass;
  }
  if (!o.out_path.empty()) {
    std::ostringstream csv;
    lora::sweep::write_validation_csv(csv, spec, rows);
    emit(o.out_path, csv.str());
  }
  if (errored) return kNumeric;
  return failed ? kValidationFailed : kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"LoRa downlink coverage and area spectral efficiency: closed forms and Monte-Carlo"};
  app.set_version_flag("--version", std::string(LORA_VERSION));
  app.require_subcommand(1);

  CommonOptions sweep_opts;
  bool no_sim = false;
  auto* sweep_cmd = app.add_subcommand("sweep", "Evaluate a parameter sweep and write CSV");
  add_common(sweep_cmd, sweep_opts, "Output CSV path (stdout when omitted)");
  sweep_cmd->add_flag("--no-sim", no_sim, "Skip the Monte-Carlo columns");

  CommonOptions validate_opts;
  auto* validate_cmd = app.add_subcommand("validate", "Compare every closed form with simulation (3 std errors)");
  add_common(validate_cmd, validate_opts, "Also write the table as CSV to this path");

  std::string init_out;
  auto* init_cmd = app.add_subcommand("init-config", "Write a configuration template with the default values");
  init_cmd->add_option("--out", init_out, "Output path (stdout when omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*sweep_cmd) return run_sweep(sweep_opts, no_sim);
    if (*validate_cmd) return run_validate(validate_opts);
    if (*init_cmd) {
      emit(init_out, lora::config::default_text());
      return kOk;
    }
  } catch (const lora::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kUsage;
  } catch (const lora::ValidationError& e) {
    std::cerr << "invalid parameters: " << e.what() << '\n';
    return kUsage;
  } catch (const lora::ConvergenceError& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return kNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNumeric;
  }
  return kUsage;
}
