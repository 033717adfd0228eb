#pragma once

// Independent reference computations used by the unit and acceptance tests.
// None of these call into lora::special or lora::analysis.

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/special_functions/binomial.hpp>
#include <boost/math/special_functions/hypergeometric_1F1.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include <cmath>

namespace oracle {

using Big = boost::multiprecision::cpp_bin_float_50;

/// Theta(x) as the fading average of the confluent form:
/// int_0^inf e^-h (1F1(-delta; 1-delta; -x h) - 1) dh.
inline double theta_confluent(double x, double delta) {
  boost::math::quadrature::exp_sinh<double> integrator;
  auto f = [=](double h) {
    return std::exp(-h) * (boost::math::hypergeometric_1F1(-delta, 1.0 - delta, -x * h) - 1.0);
  };
  return integrator.integrate(f, 1e-13);
}

/// Theta(x) as the interference-field integral int_1^inf x / (x + v^(1/delta)) dv.
inline double theta_radial(double x, double delta) {
  boost::math::quadrature::exp_sinh<double> integrator;
  auto f = [=](double w) {
    const double v = 1.0 + w;
    return x / (x + std::pow(v, 1.0 / delta));
  };
  return integrator.integrate(f, 1e-13);
}

inline Big binomial_weight(int n_ch, int i, Big rho) {
  using boost::multiprecision::pow;
  const Big c = boost::math::binomial_coefficient<double>(n_ch, i);
  return c * pow(rho, i) * pow(Big(1) - rho, n_ch - i);
}

/// Selection probability by the direct double sum over available channels
/// and the other EDs sharing the cell of the typical ED.
inline double selection_sum(double a_ratio, int n_ch, double rho_d) {
  using boost::multiprecision::exp;
  using boost::multiprecision::lgamma;
  using boost::multiprecision::log;
  const Big a = a_ratio, rho = rho_d, s = Big(7) / 2;
  const Big mu = Big(1) - boost::multiprecision::pow(Big(1) - rho, n_ch);
  const Big log_norm = s * log(s) - lgamma(s) - (s + 1) * log(a + s);
  const Big log_z = log(a) - log(a + s);
  Big total = 0;
  for (int i = 1; i <= n_ch; ++i) {
    Big p = 0;
    Big pk = exp(log_norm + lgamma(s + 1));
    const Big z = exp(log_z);
    for (int k = 0; k < 1000000; ++k) {
      const Big share = k < i ? Big(1) : Big(i) / (k + 1);
      p += pk * share;
      if (k > i && k > a_ratio && pk < Big(1e-40)) break;
      pk *= (Big(k) + s + 1) / (k + 1) * z;
    }
    total += binomial_weight(n_ch, i, rho) / mu * p;
  }
  return static_cast<double>(total);
}

/// Active probability as E[min(load, free channels)] / n_ch over a typical
/// cell, summing the cell-load law to convergence.
inline double active_sum(double a_ratio, int n_ch, double rho_d) {
  using boost::multiprecision::exp;
  using boost::multiprecision::lgamma;
  using boost::multiprecision::log;
  const Big a = a_ratio, rho = rho_d, s = Big(7) / 2;
  const Big mu = Big(1) - boost::multiprecision::pow(Big(1) - rho, n_ch);
  const Big log_norm = s * log(s) - lgamma(s) - s * log(a + s);
  const Big log_z = log(a) - log(a + s);
  Big total = 0;
  for (int i = 1; i <= n_ch; ++i) {
    // E[min(K, i)] = i - sum_{k < i} (i - k) P(K = k)
    Big deficit = 0;
    for (int k = 0; k < i; ++k) deficit += (i - k) * exp(log_norm + lgamma(Big(k) + s) - lgamma(Big(k) + 1) + k * log_z);
    total += binomial_weight(n_ch, i, rho) / mu * (Big(i) - deficit) / n_ch;
  }
  return static_cast<double>(total);
}

}  // namespace oracle
