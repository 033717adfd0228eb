#pragma once

// Counter-based random numbers. Every Monte-Carlo realization owns an
// independent set of streams keyed by (seed, stream index), so results do
// not depend on how realizations are spread over threads.

#include <array>
#include <cstdint>
#include <limits>

namespace lora::rng {

/// Philox4x64 with 10 rounds (Salmon et al., SC'11).
class Philox4x64 {
 public:
  using Counter = std::array<std::uint64_t, 4>;
  using Key = std::array<std::uint64_t, 2>;

  static Counter encrypt(Counter counter, Key key);
};

/// Sub-stream purposes within one realization.
enum class Purpose : std::uint64_t {
  Gateways = 1,
  Devices = 2,
  Fading = 3,
  Scheduling = 4,
  FarField = 5,
};

/// A stream of 64-bit words from Philox keyed by (seed, stream) and a
/// purpose tag. Satisfies UniformRandomBitGenerator.
class Stream {
 public:
  using result_type = std::uint64_t;

  Stream(std::uint64_t seed, std::uint64_t stream, Purpose purpose = Purpose::Gateways);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()();

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }
  /// Uniform on (0, 1].
  double uniform_open() { return static_cast<double>(((*this)() >> 11) + 1) * 0x1.0p-53; }
  /// Unit-mean exponential.
  double exponential();
  /// Poisson variate: inversion below mean 30, std::poisson_distribution above.
  std::uint64_t poisson(double mean);
  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);

 private:
  Philox4x64::Key key_;
  Philox4x64::Counter counter_;
  Philox4x64::Counter block_{};
  int used_ = 4;
};

}  // namespace lora::rng
