#pragma once

// Network parameters, the quantities they force, SF allocation schemes and
// the capture-threshold matrix. dB/dBm quantities are converted to linear
// scale here and nowhere else.

#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace lora {

inline constexpr int kNumSf = 6;
inline constexpr int kMinSf = 7;
inline constexpr int kMaxSf = 12;

inline constexpr double kSpeedOfLight = 3.0e8;       // m/s
inline constexpr double kThermalNoiseDbmHz = -174.0;  // dBm/Hz

/// Shape constant of the gamma approximation to the Poisson-Voronoi cell
/// area; governs the per-cell load distributions.
inline constexpr double kVoronoiShape = 3.5;

/// Spreading factor SF7..SF12. Storage order is index() = value - 7.
class Sf {
 public:
  constexpr explicit Sf(int value) : value_(value) {}
  static Sf from_index(std::size_t index);
  static constexpr std::array<int, kNumSf> all() { return {7, 8, 9, 10, 11, 12}; }

  constexpr int value() const { return value_; }
  std::size_t index() const;
  bool valid() const { return value_ >= kMinSf && value_ <= kMaxSf; }

  friend constexpr bool operator==(Sf, Sf) = default;

 private:
  int value_;
};

/// QoS SNR thresholds for SF7..SF12, in dB.
inline constexpr std::array<double, kNumSf> kQosThresholdDb = {-6.0, -9.0, -12.0, -15.0, -17.5, -20.0};

double db_to_linear(double db);
double linear_to_db(double linear);
inline double dbm_to_mw(double dbm) { return db_to_linear(dbm); }
inline double mw_to_dbm(double mw) { return linear_to_db(mw); }

/// User-facing parameters. Densities are per m^2; defaults are the
/// reference operating point (2 GW/km^2, 1000 ED/km^2, ...).
struct NetworkParams {
  double lambda_gw = 2.0e-6;
  double lambda_ed = 1000.0e-6;
  double theta_active = 0.01;
  double rho = 0.01;
  int n_ch = 8;
  double p_tot_dbm = 25.0;
  double beta = 2.9;
  double fc_hz = 868.0e6;
  double bw_hz = 125.0e3;
  double nf_db = 6.0;
  int cr = 1;
};

/// Throws ValidationError naming the violated invariant. Returns soft
/// warnings (density ratio, duty-cycle range).
std::vector<std::string> validate(const NetworkParams& params);

struct DerivedParams {
  NetworkParams params;
  double mu = 0.0;           ///< P(a gateway has >= 1 available channel)
  double lambda_gw_a = 0.0;  ///< available-gateway density, per m^2
  double lambda_ed_a = 0.0;  ///< active-ED density, per m^2
  double a_ratio = 0.0;      ///< lambda_ed_a / lambda_gw_a
  double k0 = 0.0;           ///< path-loss constant (4 pi fc / c)^2
  double delta = 0.0;        ///< 2 / beta
  double p_tx_ch_mw = 0.0;   ///< per-channel transmit power
  double sigma2_mw = 0.0;    ///< noise power
  std::array<double, kNumSf> gamma_d_lin{};
  std::array<double, kNumSf> rate_bps{};

  double gamma_d(Sf k) const { return gamma_d_lin[k.index()]; }
  double rate(Sf k) const { return rate_bps[k.index()]; }
  /// Path loss K0 r^beta at distance r (m).
  double path_loss(double r) const;
};

DerivedParams derive(const NetworkParams& params);

/// Probability that a gateway with `n_ch` channels, each free with
/// probability `rho`, has at least one free channel.
double availability(double rho, int n_ch);

enum class SfScheme { FairCollision, Random };

std::string_view to_string(SfScheme scheme);
SfScheme parse_scheme(std::string_view text);

struct SfAllocation {
  SfScheme scheme = SfScheme::FairCollision;
  std::array<double, kNumSf> p{};

  double operator[](Sf k) const { return p[k.index()]; }
  /// Index of the SF whose cumulative-probability bin contains u in [0, 1).
  std::size_t draw_index(double u) const;
};

SfAllocation sf_allocation(SfScheme scheme);

struct RejectionMatrix {
  std::array<std::array<double, kNumSf>, kNumSf> delta_db{};
  std::array<std::array<double, kNumSf>, kNumSf> delta_lin{};

  double db(Sf wanted, Sf interferer) const { return delta_db[wanted.index()][interferer.index()]; }
  double linear(Sf wanted, Sf interferer) const {
    return delta_lin[wanted.index()][interferer.index()];
  }
};

/// Capture thresholds (dB), rows = wanted SF, columns = interfering SF.
RejectionMatrix rejection_matrix();

}  // namespace lora
