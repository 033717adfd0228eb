#include "lora/model.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "lora/errors.hpp"

namespace lora {

Sf Sf::from_index(std::size_t index) {
  if (index >= kNumSf) throw DomainError("SF index out of range: " + std::to_string(index));
  return Sf(kMinSf + static_cast<int>(index));
}

std::size_t Sf::index() const {
  if (!valid()) throw DomainError("spreading factor out of range: SF" + std::to_string(value_));
  return static_cast<std::size_t>(value_ - kMinSf);
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

double linear_to_db(double linear) {
  if (!(linear > 0.0)) throw DomainError("linear_to_db: argument must be positive");
  return 10.0 * std::log10(linear);
}

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw ValidationError(what);
}

}  // namespace

std::vector<std::string> validate(const NetworkParams& p) {
  require(std::isfinite(p.lambda_gw) && p.lambda_gw > 0.0, "lambda_gw must be > 0");
  require(std::isfinite(p.lambda_ed) && p.lambda_ed > 0.0, "lambda_ed must be > 0");
  require(p.lambda_gw < p.lambda_ed, "lambda_gw must be < lambda_ed");
  require(p.theta_active >= 0.0 && p.theta_active <= 1.0, "theta_active must lie in [0, 1]");
  require(p.rho > 0.0 && p.rho <= 1.0, "rho (duty cycle) must lie in (0, 1]");
  require(p.n_ch >= 1, "n_ch must be a positive integer");
  require(std::isfinite(p.p_tot_dbm), "p_tot_dbm must be finite");
  require(std::isfinite(p.beta) && p.beta > 2.0, "beta (path-loss exponent) must be > 2");
  require(std::isfinite(p.fc_hz) && p.fc_hz > 0.0, "fc_hz must be > 0");
  require(std::isfinite(p.bw_hz) && p.bw_hz > 0.0, "bw_hz must be > 0");
  require(std::isfinite(p.nf_db), "nf_db must be finite");
  require(p.cr >= 1 && p.cr <= 4, "cr (coding rate index) must be in {1, 2, 3, 4}");

  std::vector<std::string> warnings;
  if (p.lambda_gw / p.lambda_ed > 0.1) {
    std::ostringstream os;
    os << "lambda_gw/lambda_ed = " << p.lambda_gw / p.lambda_ed
       << " > 0.1; the model assumes far fewer gateways than end-devices";
    warnings.push_back(os.str());
  }
  if (p.rho > 0.1) {
    std::ostringstream os;
    os << "duty cycle " << p.rho << " exceeds the regulatory range 0.1%..10%";
    warnings.push_back(os.str());
  }
  return warnings;
}

double availability(double rho, int n_ch) { return 1.0 - std::pow(1.0 - rho, n_ch); }

double DerivedParams::path_loss(double r) const { return k0 * std::pow(r, params.beta); }

DerivedParams derive(const NetworkParams& params) {
  validate(params);
  DerivedParams d;
  d.params = params;
  d.mu = availability(params.rho, params.n_ch);
  d.lambda_gw_a = d.mu * params.lambda_gw;
  d.lambda_ed_a = params.theta_active * params.lambda_ed;
  d.a_ratio = d.lambda_ed_a / d.lambda_gw_a;
  const double k = 4.0 * std::numbers::pi * params.fc_hz / kSpeedOfLight;
  d.k0 = k * k;
  d.delta = 2.0 / params.beta;
  d.p_tx_ch_mw = dbm_to_mw(params.p_tot_dbm) / params.n_ch;
  d.sigma2_mw = dbm_to_mw(kThermalNoiseDbmHz + params.nf_db + 10.0 * std::log10(params.bw_hz));
  const double coding = 4.0 / (4.0 + params.cr);
  for (std::size_t i = 0; i < kNumSf; ++i) {
    const int sf = kMinSf + static_cast<int>(i);
    d.gamma_d_lin[i] = db_to_linear(kQosThresholdDb[i]);
    d.rate_bps[i] = sf * (params.bw_hz / std::ldexp(1.0, sf)) * coding;
  }
  return d;
}

std::string_view to_string(SfScheme scheme) {
  return scheme == SfScheme::FairCollision ? "fair" : "random";
}

SfScheme parse_scheme(std::string_view text) {
  if (text == "fair" || text == "fair-collision" || text == "fa") return SfScheme::FairCollision;
  if (text == "random" || text == "ra") return SfScheme::Random;
  throw DomainError("unknown SF allocation scheme '" + std::string(text) + "'");
}

std::size_t SfAllocation::draw_index(double u) const {
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < kNumSf; ++i) {
    acc += p[i];
    if (u < acc) return i;
  }
  return kNumSf - 1;
}

SfAllocation sf_allocation(SfScheme scheme) {
  SfAllocation a;
  a.scheme = scheme;
  if (scheme == SfScheme::Random) {
    a.p.fill(1.0 / kNumSf);
    return a;
  }
  // p_k proportional to k / 2^k: every SF sees the same collision rate.
  double norm = 0.0;
  for (std::size_t i = 0; i < kNumSf; ++i) {
    const int k = kMinSf + static_cast<int>(i);
    a.p[i] = k / std::ldexp(1.0, k);
    norm += a.p[i];
  }
  for (auto& v : a.p) v /= norm;
  return a;
}

RejectionMatrix rejection_matrix() {
  RejectionMatrix m;
  m.delta_db = {{
      {1, -8, -9, -9, -9, -9},
      {-11, 1, -11, -12, -13, -13},
      {-15, -13, 1, -13, -14, -15},
      {-19, -18, -17, 1, -17, -18},
      {-22, -22, -21, -20, 1, -20},
      {-25, -25, -25, -24, -23, 1},
  }};
  for (std::size_t i = 0; i < kNumSf; ++i)
    for (std::size_t j = 0; j < kNumSf; ++j) m.delta_lin[i][j] = db_to_linear(m.delta_db[i][j]);
  return m;
}

}  // namespace lora
