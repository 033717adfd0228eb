#include "lora/analysis.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <numbers>
#include <string>

#include "lora/errors.hpp"

namespace lora::analysis {

namespace {

constexpr double kClampSlack = 1e-9;

double clamp_probability(double p) {
  assert(p > -kClampSlack && p < 1.0 + kClampSlack);
  return std::clamp(p, 0.0, 1.0);
}

void check_inputs(double a_ratio, int n_ch, double rho) {
  if (!(a_ratio >= 0.0) || !std::isfinite(a_ratio)) throw DomainError("A must be finite and >= 0");
  if (n_ch < 1) throw DomainError("n_ch must be >= 1");
  if (!(rho > 0.0 && rho <= 1.0)) throw DomainError("rho must lie in (0, 1]");
}

// P{i of n_ch channels free} / mu, conditioned on at least one free.
double available_channels_weight(int n_ch, int i, double rho, double mu) {
  if (rho == 1.0) return i == n_ch ? 1.0 : 0.0;
  const double log_v = std::lgamma(n_ch + 1.0) - std::lgamma(i + 1.0) - std::lgamma(n_ch - i + 1.0) +
                       i * std::log(rho) + (n_ch - i) * std::log1p(-rho);
  return std::exp(log_v) / mu;
}

// Probability of k active EDs in a typical cell (gamma cell-area law).
double cell_load_pmf(int k, double a_ratio) {
  const double s = kVoronoiShape;
  const double log_t = s * std::log(s) + std::lgamma(k + s) + k * std::log(a_ratio) - std::lgamma(s) -
                       std::lgamma(k + 1.0) - (k + s) * std::log(a_ratio + s);
  return std::exp(log_t);
}

}  // namespace

std::string_view to_string(InterferenceMode mode) {
  return mode == InterferenceMode::CoOnly ? "co" : "both";
}

InterferenceMode parse_mode(std::string_view text) {
  if (text == "co") return InterferenceMode::CoOnly;
  if (text == "both" || text == "bo") return InterferenceMode::CoAndInter;
  throw DomainError("unknown interference mode '" + std::string(text) + "'");
}

double active_prob(double a_ratio, int n_ch, double rho) {
  check_inputs(a_ratio, n_ch, rho);
  if (a_ratio == 0.0) return 0.0;
  const double mu = availability(rho, n_ch);
  double total = 0.0;
  for (int i = 1; i <= n_ch; ++i) {
    double idle = 0.0;
    for (int k = 0; k < i; ++k) idle += (1.0 - static_cast<double>(k) / i) * cell_load_pmf(k, a_ratio);
    const double unused = static_cast<double>(n_ch - i) / n_ch + static_cast<double>(i) / n_ch * idle;
    total += clamp_probability(1.0 - unused) * available_channels_weight(n_ch, i, rho, mu);
  }
  return clamp_probability(total);
}

double active_prob(const DerivedParams& d) {
  return active_prob(d.a_ratio, d.params.n_ch, d.params.rho);
}

double selection_prob(double a_ratio, int n_ch, double rho) {
  check_inputs(a_ratio, n_ch, rho);
  if (a_ratio == 0.0) return 1.0;
  const double mu = availability(rho, n_ch);
  const double s = kVoronoiShape;
  const double z = a_ratio / (a_ratio + s);
  double total = 0.0;
  for (int i = 1; i <= n_ch; ++i) {
    // B1 / Gamma(i+1) in log space; the hypergeometric factors grow like
    // (1-z)^-(s+1) and cancel most of it.
    const double log_b1 = s * std::log(s) + std::lgamma(i + s + 1.0) + i * std::log(a_ratio) -
                          std::lgamma(s) - (i + s + 1.0) * std::log(a_ratio + s);
    const double scale = std::exp(log_b1 - std::lgamma(i + 1.0));
    const double b2 = special::hyp2f1(1.0, i + s + 1.0, i + 1.0, z);
    const double b3 = i * special::hyp2f1(1.0, i + s + 1.0, i + 2.0, z) / (i + 1.0);
    const double blocked = scale * (b2 - b3);
    total += clamp_probability(1.0 - blocked) * available_channels_weight(n_ch, i, rho, mu);
  }
  return clamp_probability(total);
}

double selection_prob(const DerivedParams& d) {
  return selection_prob(d.a_ratio, d.params.n_ch, d.params.rho);
}

double p_sir(Sf k, Sf k_tilde, const SfAllocation& alloc, double p_act, const RejectionMatrix& rej,
             double delta) {
  if (!(p_act >= 0.0 && p_act <= 1.0)) throw DomainError("p_act must lie in [0, 1]");
  const double load = alloc[k_tilde] * p_act;
  if (load == 0.0) return 1.0;
  return 1.0 / (1.0 + load * special::theta(rej.linear(k, k_tilde), delta));
}

double pcov_sir(Sf k, const SfAllocation& alloc, InterferenceMode mode, double p_act,
                const RejectionMatrix& rej, double delta) {
  if (mode == InterferenceMode::CoOnly) return p_sir(k, k, alloc, p_act, rej, delta);
  double product = 1.0;
  for (int kt : Sf::all()) product *= p_sir(k, Sf(kt), alloc, p_act, rej, delta);
  return product;
}

double pcov_snr(Sf k, const DerivedParams& d, const special::QuadratureSpec& quad) {
  // With t = pi lambda (x / K0)^delta the x^(delta-1) endpoint singularity
  // disappears and the integral becomes int exp(-t - s t^(1/delta)) dt.
  const double noise_per_gain = d.gamma_d(k) * d.sigma2_mw / d.p_tx_ch_mw;
  const double s = noise_per_gain * d.k0 * std::pow(std::numbers::pi * d.lambda_gw_a, -1.0 / d.delta);
  const double inv_delta = 1.0 / d.delta;
  if (s == 0.0) return 1.0;
  const double value =
      special::integrate([&](double t) { return std::exp(-t - s * std::pow(t, inv_delta)); }, quad);
  return clamp_probability(value);
}

double coverage(Sf k, const SfAllocation& alloc, InterferenceMode mode, const DerivedParams& d,
                const RejectionMatrix& rej, const special::QuadratureSpec& quad) {
  return pcov_snr(k, d, quad) * pcov_sir(k, alloc, mode, active_prob(d), rej, d.delta);
}

PerfResult ase(const SfAllocation& alloc, InterferenceMode mode, const DerivedParams& d,
               const RejectionMatrix& rej, const special::QuadratureSpec& quad) {
  PerfResult r;
  r.p_act = active_prob(d);
  r.p_sel = selection_prob(d);
  for (int kv : Sf::all()) {
    const Sf k(kv);
    const std::size_t i = k.index();
    r.pcov_snr[i] = pcov_snr(k, d, quad);
    r.pcov_sir[i] = pcov_sir(k, alloc, mode, r.p_act, rej, d.delta);
    r.pcov[i] = r.pcov_snr[i] * r.pcov_sir[i];
    r.ase_per_sf[i] = alloc[k] * d.lambda_ed_a * d.rate(k) * r.p_sel * r.pcov[i];
    r.ase_total += r.ase_per_sf[i];
  }
  return r;
}

}  // namespace lora::analysis
