#pragma once

// Monte-Carlo estimators with standard errors.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace lora::stats {

struct Estimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::uint64_t n = 0;
};

/// Sample mean with std_error = sample-std / sqrt(n).
Estimate mean_of(std::span<const double> x);

/// Ratio of sums sum(x) / sum(y) with a linearised (delta-method) error.
Estimate ratio_of(std::span<const double> x, std::span<const double> y);

/// Rows of 0/1 indicators, one row per realization.
class IndicatorMatrix {
 public:
  explicit IndicatorMatrix(std::size_t n_cols = 0);

  void resize(std::size_t n_rows);
  void set(std::size_t row, std::size_t col, bool value);
  bool get(std::size_t row, std::size_t col) const;

  std::size_t rows() const { return n_rows_; }
  std::size_t cols() const { return n_cols_; }

  Estimate mean(std::size_t col) const;
  std::vector<double> means() const;

  /// Error of a smooth function of the column means, given its value and
  /// gradient at the means. Zero gradient entries are skipped.
  Estimate delta(double value, std::span<const double> gradient) const;
  /// Same, reusing column means computed earlier by means().
  Estimate delta(double value, std::span<const double> gradient, std::span<const double> col_means) const;

 private:
  std::size_t n_cols_;
  std::size_t words_per_row_;
  std::size_t n_rows_ = 0;
  std::vector<std::uint64_t> bits_;
};

}  // namespace lora::stats
