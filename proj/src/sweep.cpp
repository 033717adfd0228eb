#include "lora/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <sstream>
#include <thread>

#include "lora/config.hpp"
#include "lora/csv.hpp"
#include "lora/errors.hpp"
#include "lora/kernels.hpp"

namespace lora::sweep {

namespace {

std::size_t scheme_slot(SfScheme s) { return s == SfScheme::FairCollision ? 0 : 1; }
std::size_t mode_slot(analysis::InterferenceMode m) {
  return m == analysis::InterferenceMode::CoOnly ? 0 : 1;
}

PointResult evaluate_point(const SweepSpec& spec, double value) {
  PointResult pr;
  pr.value = value;
  try {
    pr.params = apply(spec, value);
    pr.warnings = lora::validate(pr.params);
    const DerivedParams d = derive(pr.params);
    const RejectionMatrix rej = rejection_matrix();
    for (SfScheme s : {SfScheme::FairCollision, SfScheme::Random}) {
      const SfAllocation alloc = sf_allocation(s);
      for (auto m : {analysis::InterferenceMode::CoOnly, analysis::InterferenceMode::CoAndInter})
        pr.analytic[scheme_slot(s)][mode_slot(m)] = analysis::ase(alloc, m, d, rej);
    }
    if (spec.with_simulation) {
      const sim::Simulator simulator(pr.params, spec.sim);
      pr.sim = simulator.run();
      pr.warnings.insert(pr.warnings.end(), pr.sim->warnings.begin(), pr.sim->warnings.end());
    }
  } catch (const std::exception& e) {
    pr.error = e.what();
  }
  return pr;
}

void write_metadata(csv::Writer& w, const SweepSpec& spec) {
  w.comment(std::string("lora-dl ") + LORA_VERSION);
  w.comment("kernels = " + std::string(kernels::to_string(kernels::active().isa)));
  w.comment("seed = " + std::to_string(spec.sim.rng_seed));
  w.comment("config begin");
  std::istringstream lines(config::format(spec));
  // The thread count never changes the output, so it is left out.
  for (std::string line; std::getline(lines, line);)
    if (line.rfind("sim.threads", 0) != 0) w.comment(line);
  w.comment("config end");
}

}  // namespace

std::string_view to_string(SweepVariable v) {
  switch (v) {
    case SweepVariable::PTotDbm: return "p_tot_dbm";
    case SweepVariable::DensityRatio: return "density_ratio";
    case SweepVariable::DutyCycle: return "duty_cycle";
    case SweepVariable::ActiveTheta: return "theta_active";
  }
  return "p_tot_dbm";
}

SweepVariable parse_variable(std::string_view text) {
  for (auto v : {SweepVariable::PTotDbm, SweepVariable::DensityRatio, SweepVariable::DutyCycle,
                 SweepVariable::ActiveTheta})
    if (text == to_string(v)) return v;
  throw DomainError("unknown sweep variable '" + std::string(text) + "'");
}

void validate(const SweepSpec& spec) {
  if (spec.values.empty()) throw ValidationError("sweep values must not be empty");
  for (std::size_t i = 0; i < spec.values.size(); ++i) {
    if (!std::isfinite(spec.values[i])) throw ValidationError("sweep values must be finite");
    if (i > 0 && !(spec.values[i] > spec.values[i - 1]))
      throw ValidationError("sweep values must be strictly increasing");
  }
  if (spec.schemes.empty()) throw ValidationError("at least one SF allocation scheme is required");
  if (spec.modes.empty()) throw ValidationError("at least one interference mode is required");
  lora::validate(spec.fixed);
  if (spec.with_simulation && spec.sim.n_iterations < 1)
    throw ValidationError("sim.iterations must be >= 1");
}

NetworkParams apply(const SweepSpec& spec, double value) {
  NetworkParams p = spec.fixed;
  switch (spec.variable) {
    case SweepVariable::PTotDbm: p.p_tot_dbm = value; break;
    case SweepVariable::DutyCycle: p.rho = value; break;
    case SweepVariable::ActiveTheta: p.theta_active = value; break;
    case SweepVariable::DensityRatio:
      if (!(p.theta_active > 0.0)) throw ValidationError("density_ratio sweeps need theta_active > 0");
      p.lambda_ed = value * p.lambda_gw / p.theta_active;
      break;
  }
  return p;
}

std::vector<PointResult> evaluate(const SweepSpec& spec) {
  validate(spec);
  const std::size_t n = spec.values.size();
  std::vector<PointResult> points(n);
  unsigned threads = spec.sim.threads == 0 ? std::max(1U, std::thread::hardware_concurrency()) : spec.sim.threads;
  if (spec.with_simulation || threads <= 1 || n == 1) {
    for (std::size_t i = 0; i < n; ++i) points[i] = evaluate_point(spec, spec.values[i]);
    return points;
  }
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) points[i] = evaluate_point(spec, spec.values[i]);
    });
  for (auto& th : pool) th.join();
  return points;
}

void write_csv(std::ostream& out, const SweepSpec& spec, const std::vector<PointResult>& points) {
  csv::Writer w(out);
  write_metadata(w, spec);
  w.row({"sweep_variable", "sweep_value", "scheme", "mode", "sf", "p_act", "p_sel", "pcov_snr", "pcov_sir",
         "pcov", "ase_sf", "ase_total", "sim_p_act", "sim_p_act_se", "sim_p_sel", "sim_p_sel_se",
         "sim_pcov_snr", "sim_pcov_snr_se", "sim_pcov", "sim_pcov_se", "sim_pcov_joint",
         "sim_pcov_joint_se", "sim_ase_sf", "sim_ase_sf_se", "sim_ase_total", "sim_ase_total_se",
         "sim_degenerate_rate", "status"});
  const auto num = csv::number;
  const std::string variable(to_string(spec.variable));
  for (const PointResult& pr : points) {
    std::string status = "ok";
    if (!pr.ok()) {
      status = "error: " + pr.error;
    } else if (!pr.warnings.empty()) {
      status = "warning: " + pr.warnings.front();
    }
    for (SfScheme s : spec.schemes) {
      for (auto m : spec.modes) {
        const auto& a = pr.analytic[scheme_slot(s)][mode_slot(m)];
        for (std::size_t k = 0; k < kNumSf; ++k) {
          std::vector<std::string> row = {variable, num(pr.value), std::string(to_string(s)),
                                          std::string(analysis::to_string(m)), std::to_string(kMinSf + k)};
          if (!pr.ok()) {
            row.resize(27);
            row.push_back(status);
            w.row(row);
            continue;
          }
          for (double v : {a.p_act, a.p_sel, a.pcov_snr[k], a.pcov_sir[k], a.pcov[k], a.ase_per_sf[k], a.ase_total})
            row.push_back(num(v));
          if (pr.sim) {
            const sim::SimResult& r = *pr.sim;
            const sim::SchemeEstimates& se = r.scheme(s);
            const std::size_t mi = mode_slot(m);
            for (const stats::Estimate& e : {r.p_act, r.p_sel, r.pcov_snr[k], se.pcov[mi][k], se.pcov_joint[mi][k],
                                             se.ase_per_sf[mi][k], se.ase_total[mi]}) {
              row.push_back(num(e.mean));
              row.push_back(num(e.std_error));
            }
            row.push_back(num(r.degenerate_rate.mean));
          } else {
            row.resize(27);
          }
          row.push_back(status);
          w.row(row);
        }
      }
    }
  }
}

std::vector<ValidationRow> validation_rows(const SweepSpec& spec, const std::vector<PointResult>& points) {
  std::vector<ValidationRow> rows;
  auto add = [&rows](double value, std::string quantity, std::string scheme, std::string mode, int sf,
                     double analytic, const stats::Estimate& e) {
    ValidationRow r{value, std::move(quantity), std::move(scheme), std::move(mode), sf, analytic, e.mean,
                    e.std_error, false};
    r.pass = std::abs(analytic - e.mean) <= 3.0 * e.std_error;
    rows.push_back(std::move(r));
  };
  for (const PointResult& pr : points) {
    if (!pr.ok() || !pr.sim) {
      ValidationRow r;
      r.sweep_value = pr.value;
      r.quantity = pr.ok() ? "no simulation" : "error: " + pr.error;
      r.analytic = r.estimate = r.std_error = std::nan("");
      rows.push_back(r);
      continue;
    }
    const sim::SimResult& sr = *pr.sim;
    const analysis::PerfResult& base = pr.analytic[0][0];
    add(pr.value, "p_act", "", "", 0, base.p_act, sr.p_act);
    add(pr.value, "p_sel", "", "", 0, base.p_sel, sr.p_sel);
    for (std::size_t k = 0; k < kNumSf; ++k)
      add(pr.value, "pcov_snr", "", "", kMinSf + static_cast<int>(k), base.pcov_snr[k], sr.pcov_snr[k]);
    for (SfScheme s : spec.schemes) {
      for (auto m : spec.modes) {
        const auto& a = pr.analytic[scheme_slot(s)][mode_slot(m)];
        const auto& se = sr.scheme(s);
        const std::string sn(to_string(s)), mn(analysis::to_string(m));
        // Without interference the simulator only applies the SNR test.
        const bool sir = spec.sim.interference_enabled;
        double ase_total = 0.0;
        for (std::size_t k = 0; k < kNumSf; ++k) {
          const double pcov = sir ? a.pcov[k] : a.pcov_snr[k];
          ase_total += sir ? a.ase_per_sf[k] : a.ase_per_sf[k] / a.pcov_sir[k];
          add(pr.value, "pcov", sn, mn, kMinSf + static_cast<int>(k), pcov, se.pcov[mode_slot(m)][k]);
        }
        add(pr.value, "ase_total", sn, mn, 0, ase_total, se.ase_total[mode_slot(m)]);
      }
    }
  }
  return rows;
}

void write_validation_csv(std::ostream& out, const SweepSpec& spec, const std::vector<ValidationRow>& rows) {
  csv::Writer w(out);
  write_metadata(w, spec);
  w.row({"sweep_variable", "sweep_value", "quantity", "scheme", "mode", "sf", "analytic", "estimate",
         "std_error", "z", "pass"});
  const std::string variable(to_string(spec.variable));
  for (const ValidationRow& r : rows) {
    const double z = r.std_error > 0.0 ? (r.estimate - r.analytic) / r.std_error : std::nan("");
    w.row({variable, csv::number(r.sweep_value), r.quantity, r.scheme, r.mode, r.sf > 0 ? std::to_string(r.sf) : "",
           csv::number(r.analytic), csv::number(r.estimate), csv::number(r.std_error), csv::number(z),
           r.pass ? "pass" : "fail"});
  }
}

}  // namespace lora::sweep
