#include "lora/stats.hpp"

#include <cmath>

#include "lora/errors.hpp"

namespace lora::stats {

Estimate mean_of(std::span<const double> x) {
  Estimate e;
  e.n = x.size();
  if (x.empty()) return e;
  double sum = 0.0;
  for (double v : x) sum += v;
  e.mean = sum / static_cast<double>(x.size());
  if (x.size() < 2) return e;
  double ss = 0.0;
  for (double v : x) ss += (v - e.mean) * (v - e.mean);
  const double n = static_cast<double>(x.size());
  e.std_error = std::sqrt(ss / (n - 1.0) / n);
  return e;
}

Estimate ratio_of(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw DomainError("ratio_of: length mismatch");
  Estimate e;
  e.n = x.size();
  double sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
  }
  if (sy == 0.0) return e;
  e.mean = sx / sy;
  if (x.size() < 2) return e;
  const double n = static_cast<double>(x.size());
  const double y_bar = sy / n;
  double ss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double z = (x[i] - e.mean * y[i]) / y_bar;
    ss += z * z;
  }
  e.std_error = std::sqrt(ss / (n - 1.0) / n);
  return e;
}

IndicatorMatrix::IndicatorMatrix(std::size_t n_cols)
    : n_cols_(n_cols), words_per_row_((n_cols + 63) / 64) {}

void IndicatorMatrix::resize(std::size_t n_rows) {
  n_rows_ = n_rows;
  bits_.assign(n_rows * words_per_row_, 0);
}

void IndicatorMatrix::set(std::size_t row, std::size_t col, bool value) {
  std::uint64_t& w = bits_[row * words_per_row_ + col / 64];
  const std::uint64_t bit = std::uint64_t{1} << (col % 64);
  w = value ? (w | bit) : (w & ~bit);
}

bool IndicatorMatrix::get(std::size_t row, std::size_t col) const {
  return (bits_[row * words_per_row_ + col / 64] >> (col % 64)) & 1U;
}

Estimate IndicatorMatrix::mean(std::size_t col) const {
  Estimate e;
  e.n = n_rows_;
  if (n_rows_ == 0) return e;
  std::uint64_t hits = 0;
  for (std::size_t r = 0; r < n_rows_; ++r) hits += get(r, col);
  const double n = static_cast<double>(n_rows_);
  e.mean = static_cast<double>(hits) / n;
  if (n_rows_ > 1) e.std_error = std::sqrt(e.mean * (1.0 - e.mean) / (n - 1.0));
  return e;
}

std::vector<double> IndicatorMatrix::means() const {
  std::vector<double> m(n_cols_);
  for (std::size_t c = 0; c < n_cols_; ++c) m[c] = mean(c).mean;
  return m;
}

Estimate IndicatorMatrix::delta(double value, std::span<const double> gradient) const {
  return delta(value, gradient, means());
}

Estimate IndicatorMatrix::delta(double value, std::span<const double> gradient,
                                std::span<const double> m) const {
  if (gradient.size() != n_cols_ || m.size() != n_cols_)
    throw DomainError("IndicatorMatrix::delta: size mismatch");
  Estimate e;
  e.mean = value;
  e.n = n_rows_;
  if (n_rows_ < 2) return e;
  std::vector<std::size_t> used;
  double centre = 0.0;
  for (std::size_t c = 0; c < n_cols_; ++c) {
    if (gradient[c] != 0.0) {
      used.push_back(c);
      centre += gradient[c] * m[c];
    }
  }
  double ss = 0.0;
  for (std::size_t r = 0; r < n_rows_; ++r) {
    double score = -centre;
    for (std::size_t c : used)
      if (get(r, c)) score += gradient[c];
    ss += score * score;
  }
  const double n = static_cast<double>(n_rows_);
  e.std_error = std::sqrt(ss / (n - 1.0) / n);
  return e;
}

}  // namespace lora::stats
