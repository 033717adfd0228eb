#include "lora/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <numbers>
#include <sstream>
#include <thread>

#include "lora/errors.hpp"

namespace lora::sim {

namespace {

using rng::Purpose;
using rng::Stream;

constexpr std::size_t kFair = 0;
constexpr std::size_t kRandom = 1;
constexpr std::size_t kChunk = 64;

// Indicator-matrix layout: selection, six SNR tests, then per scheme the
// 36 SIR tests and the 12 joint-event flags.
constexpr std::size_t kColSelected = 0;
constexpr std::size_t kColSnr = 1;
constexpr std::size_t kSchemeBase = 1 + kNumSf;
constexpr std::size_t kSchemeCols = kNumSf * kNumSf + 2 * kNumSf;
constexpr std::size_t kNumCols = kSchemeBase + 2 * kSchemeCols;

constexpr std::size_t col_sir(std::size_t s, std::size_t k, std::size_t kt) {
  return kSchemeBase + s * kSchemeCols + k * kNumSf + kt;
}
constexpr std::size_t col_joint(std::size_t s, std::size_t mode, std::size_t k) {
  return kSchemeBase + s * kSchemeCols + kNumSf * kNumSf + mode * kNumSf + k;
}

void uniform_in_disk(Stream& s, double radius, double& x, double& y) {
  const double r2 = radius * radius;
  do {
    x = radius * (2.0 * s.uniform() - 1.0);
    y = radius * (2.0 * s.uniform() - 1.0);
  } while (x * x + y * y > r2);
}

struct Record {
  bool degenerate = true;
  std::uint32_t n_gw = 0;
  std::uint32_t n_avail = 0;
  double typical_act = 0.0;
  double sampled_act = 0.0;
  Outcome outcome;
};

}  // namespace

std::string_view to_string(Fidelity fidelity) {
  return fidelity == Fidelity::Full ? "full" : "thinned";
}

Fidelity parse_fidelity(std::string_view text) {
  if (text == "full") return Fidelity::Full;
  if (text == "thinned") return Fidelity::Thinned;
  throw DomainError("unknown fidelity '" + std::string(text) + "'");
}

double distance_scale(const DerivedParams& d) {
  return 1.0 / std::sqrt(std::numbers::pi * d.lambda_gw_a);
}

Simulator::Simulator(const NetworkParams& params, const SimConfig& cfg)
    : params_(params), cfg_(cfg), derived_(derive(params)), rej_(rejection_matrix()) {
  if (cfg.n_iterations < 1) throw ValidationError("n_iterations must be >= 1");
  if (params.n_ch > 64) throw ValidationError("the simulator supports at most 64 channels");
  if (!(cfg.near_factor > 0.0) || !(cfg.far_factor > 0.0))
    throw ValidationError("near_factor and far_factor must be > 0");
  alloc_[kFair] = sf_allocation(SfScheme::FairCollision);
  alloc_[kRandom] = sf_allocation(SfScheme::Random);
  p_act_ = analysis::active_prob(derived_);

  const double scale = distance_scale(derived_);
  near_radius_ = cfg.region_radius_m > 0.0 ? cfg.region_radius_m : cfg.near_factor * scale;
  far_radius_ = cfg.far_radius_m > 0.0 ? cfg.far_radius_m : cfg.far_factor * scale;
  if (far_radius_ < near_radius_) far_radius_ = near_radius_;
  if (near_radius_ < 5.0 * scale) {
    std::ostringstream os;
    os << "near-field radius " << near_radius_ << " m is below 5x the distance scale (" << 5.0 * scale
       << " m); boundary truncation bias may be visible";
    warnings_.push_back(os.str());
  }

  // Mean interference beyond the far radius from a PPP of density
  // p_k * P_Act * lambda_gw_a with unit-mean fading.
  const double beta = params.beta;
  const double tail = 2.0 * std::numbers::pi * std::pow(far_radius_, 2.0 - beta) / (beta - 2.0);
  for (std::size_t s = 0; s < 2; ++s)
    for (std::size_t k = 0; k < kNumSf; ++k)
      tail_mean_[s][k] = alloc_[s].p[k] * p_act_ * derived_.lambda_gw_a * tail;
}

Realization Simulator::sample_realization(std::uint64_t stream_index) const {
  const auto& kern = kernels::active();
  const std::uint64_t seed = cfg_.rng_seed;
  const int n_ch = params_.n_ch;
  const double r_near = near_radius_;
  const double area = std::numbers::pi * r_near * r_near;
  Realization real;

  Stream gs(seed, stream_index, Purpose::Gateways);
  const std::uint64_t n_gw = gs.poisson(params_.lambda_gw * area);
  real.gw_x.resize(n_gw);
  real.gw_y.resize(n_gw);
  real.gw_mask.resize(n_gw);
  for (std::uint64_t g = 0; g < n_gw; ++g) {
    uniform_in_disk(gs, r_near, real.gw_x[g], real.gw_y[g]);
    std::uint64_t mask = 0;
    for (int c = 0; c < n_ch; ++c)
      if (gs.uniform() < params_.rho) mask |= std::uint64_t{1} << c;
    real.gw_mask[g] = mask;
    if (mask != 0) {
      real.available.push_back(static_cast<std::uint32_t>(g));
      real.avail_x.push_back(real.gw_x[g]);
      real.avail_y.push_back(real.gw_y[g]);
      real.avail_dist2.push_back(real.gw_x[g] * real.gw_x[g] + real.gw_y[g] * real.gw_y[g]);
    }
  }
  if (real.available.empty()) return real;
  real.degenerate = false;

  const auto nearest = std::min_element(real.avail_dist2.begin(), real.avail_dist2.end());
  real.serving = static_cast<std::uint32_t>(nearest - real.avail_dist2.begin());
  const std::uint64_t serving_mask = real.gw_mask[real.available[real.serving]];
  const auto pick = static_cast<int>(gs.below(static_cast<std::uint64_t>(std::popcount(serving_mask))));
  std::uint64_t rest = serving_mask;
  for (int i = 0; i < pick; ++i) rest &= rest - 1;
  real.channel = std::countr_zero(rest);

  Stream fs(seed, stream_index, Purpose::Fading);
  real.avail_fading.resize(real.available.size());
  for (auto& h : real.avail_fading) h = fs.exponential();

  Stream ds(seed, stream_index, Purpose::Devices);
  const std::uint64_t n_ed = ds.poisson(derived_.lambda_ed_a * area);
  real.ed_x.resize(n_ed);
  real.ed_y.resize(n_ed);
  for (std::uint64_t e = 0; e < n_ed; ++e) uniform_in_disk(ds, r_near, real.ed_x[e], real.ed_y[e]);
  real.ed_cell.resize(n_ed);
  std::vector<double> ed_dist2(n_ed);
  kern.nearest_site(real.avail_x, real.avail_y, real.ed_x, real.ed_y, real.ed_cell, ed_dist2);

  if (cfg_.interference_enabled && far_radius_ > r_near) {
    Stream ff(seed, stream_index, Purpose::FarField);
    const double inner2 = r_near * r_near;
    const double span2 = far_radius_ * far_radius_ - inner2;
    const std::uint64_t n_far = ff.poisson(p_act_ * derived_.lambda_gw_a * std::numbers::pi * span2);
    real.far_dist2.resize(n_far);
    real.far_fading.resize(n_far);
    real.far_u_sf.resize(n_far);
    for (std::uint64_t i = 0; i < n_far; ++i) {
      real.far_dist2[i] = inner2 + span2 * ff.uniform();
      real.far_fading[i] = ff.exponential();
      real.far_u_sf[i] = ff.uniform();
    }
  }
  return real;
}

Schedule Simulator::simulate_load(const Realization& real, std::uint64_t stream_index) const {
  Schedule sch;
  if (real.degenerate) return sch;
  const std::size_t m = real.available.size();
  sch.load.assign(m, 0);
  sch.free.resize(m);
  for (std::uint32_t cell : real.ed_cell) ++sch.load[cell];
  for (std::size_t j = 0; j < m; ++j)
    sch.free[j] = static_cast<std::uint32_t>(std::popcount(real.gw_mask[real.available[j]]));

  Stream ss(cfg_.rng_seed, stream_index, Purpose::Scheduling);
  // The typical ED competes with the other EDs of its cell for tau slots.
  const double contenders = sch.load[real.serving] + 1.0;
  sch.selected = ss.uniform() * contenders < sch.free[real.serving];

  sch.active_on_channel.assign(m, 0);
  sch.u_sf.assign(m, 0.0);
  const std::uint64_t bit = std::uint64_t{1} << real.channel;
  for (std::size_t j = 0; j < m; ++j) {
    const double u_act = ss.uniform();
    sch.u_sf[j] = ss.uniform();
    if (j == real.serving) continue;
    if (cfg_.fidelity == Fidelity::Thinned) {
      sch.active_on_channel[j] = u_act < p_act_;
    } else if (real.gw_mask[real.available[j]] & bit) {
      // Served EDs take distinct uniformly random free channels, so a given
      // free channel is busy with probability min(load, tau) / tau.
      const std::uint32_t served = std::min(sch.load[j], sch.free[j]);
      sch.active_on_channel[j] = u_act * sch.free[j] < served;
    }
  }

  // Each ED carries an equal share of its cell's busy channels, so the
  // typical ED's cell gives an unbiased per-gateway activity.
  const double cell = sch.load[real.serving] + 1.0;
  sch.typical_act = derived_.a_ratio * std::min<double>(cell, sch.free[real.serving]) / (cell * params_.n_ch);

  // One gateway drawn from a small central disk, weighted by the disk's
  // count. The disk stays far from the near-field edge, where truncated
  // competition inflates cell loads.
  const double r_in = 0.25 * near_radius_;
  std::vector<std::size_t> inner;
  for (std::size_t j = 0; j < m; ++j)
    if (real.avail_dist2[j] < r_in * r_in) inner.push_back(j);
  if (!inner.empty()) {
    const std::size_t j = inner[ss.below(inner.size())];
    const double expected = derived_.lambda_gw_a * std::numbers::pi * r_in * r_in;
    sch.sampled_act = static_cast<double>(inner.size()) * std::min(sch.load[j], sch.free[j]) /
                      (params_.n_ch * expected);
  }
  return sch;
}

Outcome Simulator::evaluate_typical(const Realization& real, const Schedule& sch) const {
  Outcome out;
  if (real.degenerate) return out;
  out.selected = sch.selected;
  const auto& kern = kernels::active();
  const double half_beta = 0.5 * params_.beta;
  const double h0 = real.avail_fading[real.serving];
  const double d0 = real.avail_dist2[real.serving];
  const double gain0 = h0 * std::pow(d0, -half_beta);
  const double snr = derived_.p_tx_ch_mw * gain0 / (derived_.sigma2_mw * derived_.k0);
  for (std::size_t k = 0; k < kNumSf; ++k) out.snr[k] = snr >= derived_.gamma_d_lin[k];

  if (!cfg_.interference_enabled) {
    for (auto& so : out.schemes) {
      for (auto& row : so.sir) row.fill(true);
      so.joint_co = out.snr;
      so.joint_both = out.snr;
    }
    return out;
  }

  std::vector<double> d2, fading, u_sf;
  const std::size_t reserve = real.far_dist2.size() + real.available.size();
  d2.reserve(reserve);
  fading.reserve(reserve);
  u_sf.reserve(reserve);
  for (std::size_t j = 0; j < real.available.size(); ++j) {
    if (!sch.active_on_channel[j]) continue;
    d2.push_back(real.avail_dist2[j]);
    fading.push_back(real.avail_fading[j]);
    u_sf.push_back(sch.u_sf[j]);
  }
  d2.insert(d2.end(), real.far_dist2.begin(), real.far_dist2.end());
  fading.insert(fading.end(), real.far_fading.begin(), real.far_fading.end());
  u_sf.insert(u_sf.end(), real.far_u_sf.begin(), real.far_u_sf.end());

  std::vector<double> gains(d2.size());
  kern.path_gains(d2, fading, half_beta, gains);

  std::vector<std::uint8_t> cls(d2.size());
  for (std::size_t s = 0; s < 2; ++s) {
    for (std::size_t i = 0; i < cls.size(); ++i) cls[i] = static_cast<std::uint8_t>(alloc_[s].draw_index(u_sf[i]));
    std::array<double, kNumSf> interference = tail_mean_[s];
    kern.sum_by_class(gains, cls, interference);
    SchemeOutcome& so = out.schemes[s];
    for (std::size_t k = 0; k < kNumSf; ++k) {
      bool all = true;
      for (std::size_t kt = 0; kt < kNumSf; ++kt) {
        so.sir[k][kt] = gain0 >= rej_.delta_lin[k][kt] * interference[kt];
        all = all && so.sir[k][kt];
      }
      so.joint_co[k] = out.snr[k] && so.sir[k][k];
      so.joint_both[k] = out.snr[k] && all;
    }
  }
  return out;
}

SimResult Simulator::run() const {
  const std::uint64_t n = cfg_.n_iterations;
  std::vector<Record> records(n);

  auto work = [&](std::uint64_t i) {
    Record& rec = records[i];
    const Realization real = sample_realization(i);
    rec.n_gw = static_cast<std::uint32_t>(real.gw_x.size());
    rec.n_avail = static_cast<std::uint32_t>(real.available.size());
    rec.degenerate = real.degenerate;
    if (real.degenerate) return;
    const Schedule sch = simulate_load(real, i);
    rec.typical_act = sch.typical_act;
    rec.sampled_act = sch.sampled_act;
    rec.outcome = evaluate_typical(real, sch);
  };

  unsigned threads = cfg_.threads == 0 ? std::max(1U, std::thread::hardware_concurrency()) : cfg_.threads;
  const std::uint64_t chunks = (n + kChunk - 1) / kChunk;
  threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, chunks));
  kernels::active();  // resolve the dispatch before spawning workers
  if (threads <= 1) {
    for (std::uint64_t i = 0; i < n; ++i) work(i);
  } else {
    std::atomic<std::uint64_t> next{0};
    std::vector<std::exception_ptr> errors(threads);
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back([&, t] {
        try {
          for (std::uint64_t c = next++; c < chunks; c = next++)
            for (std::uint64_t i = c * kChunk; i < std::min(n, (c + 1) * kChunk); ++i) work(i);
        } catch (...) {
          errors[t] = std::current_exception();
          next = chunks;
        }
      });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }

  // Reduction in stream order.
  SimResult res;
  res.n_iterations = n;
  res.near_radius_m = near_radius_;
  res.far_radius_m = far_radius_;
  res.isa = kernels::active().isa;
  res.warnings = warnings_;

  std::vector<double> degenerate(n), n_gw(n), n_avail(n);
  std::vector<double> typical, sampled;
  std::size_t ok = 0;
  for (std::uint64_t i = 0; i < n; ++i) {
    const Record& r = records[i];
    degenerate[i] = r.degenerate;
    n_gw[i] = r.n_gw;
    n_avail[i] = r.n_avail;
    if (r.degenerate) continue;
    ++ok;
    typical.push_back(r.typical_act);
    sampled.push_back(r.sampled_act);
  }
  res.n_degenerate = n - ok;
  res.degenerate_rate = stats::mean_of(degenerate);
  res.gateway_count = stats::mean_of(n_gw);
  {
    const double mean = res.gateway_count.mean;
    double ss = 0.0;
    for (double v : n_gw) ss += (v - mean) * (v - mean);
    res.gateway_count_variance = n > 1 ? ss / static_cast<double>(n - 1) : 0.0;
  }
  res.available_fraction = stats::ratio_of(n_avail, n_gw);
  res.p_act = stats::mean_of(typical);
  res.p_act_sampled = stats::mean_of(sampled);

  stats::IndicatorMatrix ind(kNumCols);
  ind.resize(ok);
  std::size_t row = 0;
  for (const Record& r : records) {
    if (r.degenerate) continue;
    const Outcome& o = r.outcome;
    ind.set(row, kColSelected, o.selected);
    for (std::size_t k = 0; k < kNumSf; ++k) ind.set(row, kColSnr + k, o.snr[k]);
    for (std::size_t s = 0; s < 2; ++s) {
      for (std::size_t k = 0; k < kNumSf; ++k) {
        for (std::size_t kt = 0; kt < kNumSf; ++kt) ind.set(row, col_sir(s, k, kt), o.schemes[s].sir[k][kt]);
        ind.set(row, col_joint(s, 0, k), o.schemes[s].joint_co[k]);
        ind.set(row, col_joint(s, 1, k), o.schemes[s].joint_both[k]);
      }
    }
    ++row;
  }

  const std::vector<double> m = ind.means();
  res.p_sel = ind.mean(kColSelected);
  for (std::size_t k = 0; k < kNumSf; ++k) res.pcov_snr[k] = ind.mean(kColSnr + k);

  for (std::size_t s = 0; s < 2; ++s) {
    SchemeEstimates& se = res.schemes[s];
    se.scheme = alloc_[s].scheme;
    for (std::size_t k = 0; k < kNumSf; ++k)
      for (std::size_t kt = 0; kt < kNumSf; ++kt) se.sir[k][kt] = ind.mean(col_sir(s, k, kt));
    for (std::size_t mode = 0; mode < 2; ++mode) {
      std::vector<double> ase_grad(kNumCols, 0.0);
      double ase_value = 0.0;
      for (std::size_t k = 0; k < kNumSf; ++k) {
        // Product of the SNR marginal and the SIR marginals the mode uses.
        std::vector<std::size_t> factors = {kColSnr + k};
        if (mode == 0) {
          factors.push_back(col_sir(s, k, k));
        } else {
          for (std::size_t kt = 0; kt < kNumSf; ++kt) factors.push_back(col_sir(s, k, kt));
        }
        double value = 1.0;
        for (std::size_t c : factors) value *= m[c];
        std::vector<double> grad(kNumCols, 0.0);
        for (std::size_t a = 0; a < factors.size(); ++a) {
          double others = 1.0;
          for (std::size_t b = 0; b < factors.size(); ++b)
            if (b != a) others *= m[factors[b]];
          grad[factors[a]] += others;
        }
        se.pcov[mode][k] = ind.delta(value, grad, m);
        se.pcov_joint[mode][k] = ind.mean(col_joint(s, mode, k));

        // ASE_k = lambda_ed_a * p_k * R_k * P_Sel * Pcov_k.
        const double c_k = derived_.lambda_ed_a * alloc_[s].p[k] * derived_.rate_bps[k];
        std::vector<double> g_ase(kNumCols, 0.0);
        for (std::size_t c = 0; c < kNumCols; ++c) g_ase[c] = c_k * m[kColSelected] * grad[c];
        g_ase[kColSelected] += c_k * value;
        const double ase_k = c_k * m[kColSelected] * value;
        se.ase_per_sf[mode][k] = ind.delta(ase_k, g_ase, m);
        ase_value += ase_k;
        for (std::size_t c = 0; c < kNumCols; ++c) ase_grad[c] += g_ase[c];
      }
      se.ase_total[mode] = ind.delta(ase_value, ase_grad, m);
    }
  }
  return res;
}

SimResult run(const NetworkParams& params, const SimConfig& cfg) { return Simulator(params, cfg).run(); }

}  // namespace lora::sim
