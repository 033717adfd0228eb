#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <cmath>
#include <numbers>

#include "lora/errors.hpp"
#include "lora/special.hpp"
#include "oracles.hpp"

using namespace lora;

namespace {

// Direct Gauss series in 50-digit arithmetic; valid for |z| < 1.
double hyp2f1_big(double a, double b, double c, double z) {
  oracle::Big term = 1, sum = 1;
  for (int n = 0; n < 200000; ++n) {
    term *= (oracle::Big(a) + n) * (oracle::Big(b) + n) / ((oracle::Big(c) + n) * (n + 1)) * z;
    sum += term;
    if (n > 10 && abs(term) < abs(sum) * oracle::Big(1e-30)) break;
  }
  return static_cast<double>(sum);
}

double hyp1f1_big(double a, double b, double z) {
  oracle::Big term = 1, sum = 1;
  for (int n = 0; n < 200000; ++n) {
    term *= (oracle::Big(a) + n) / ((oracle::Big(b) + n) * (n + 1)) * z;
    sum += term;
    if (n > std::abs(z) && abs(term) < abs(sum) * oracle::Big(1e-30)) break;
  }
  return static_cast<double>(sum);
}

bool rel_close(double a, double b, double tol) { return std::abs(a - b) <= tol * std::max(std::abs(b), 1e-300); }

}  // namespace

TEST_SUITE("specialfn") {
  TEST_CASE("gamma at integers and half-integers") {
    CHECK(special::gamma(1.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(special::gamma(5.0) == doctest::Approx(24.0).epsilon(1e-15));
    CHECK(special::gamma(0.5) == doctest::Approx(std::sqrt(std::numbers::pi)).epsilon(1e-15));
    CHECK(special::gamma(3.5) == doctest::Approx(15.0 / 8.0 * std::sqrt(std::numbers::pi)).epsilon(1e-15));
  }

  TEST_CASE("gamma and log_gamma match an independent implementation") {
    for (double x = 0.05; x < 60.0; x *= 1.37) {
      CHECK(rel_close(special::gamma(x), boost::math::tgamma(x), 1e-13));
      CHECK(std::abs(special::log_gamma(x) - boost::math::lgamma(x)) <= 1e-13 * std::max(1.0, std::abs(boost::math::lgamma(x))));
    }
  }

  TEST_CASE("gamma recurrence") {
    for (double x = 0.3; x < 40.0; x += 0.77)
      CHECK(rel_close(special::gamma(x + 1.0), x * special::gamma(x), 1e-13));
  }

  TEST_CASE("gamma rejects non-positive arguments") {
    CHECK_THROWS_AS(special::gamma(0.0), DomainError);
    CHECK_THROWS_AS(special::gamma(-2.0), DomainError);
    CHECK_THROWS_AS(special::log_gamma(-0.5), DomainError);
  }

  TEST_CASE("hyp2f1 trivial values") {
    CHECK(special::hyp2f1(1.3, 2.2, 3.1, 0.0) == 1.0);
    CHECK(special::hyp2f1(0.0, 2.2, 3.1, 0.7) == 1.0);
    // 2F1(1, 1; 2; z) = -ln(1-z) / z
    for (double z : {-3.0, -0.9, -0.2, 0.1, 0.5, 0.9, 0.97, 0.995})
      CHECK(rel_close(special::hyp2f1(1.0, 1.0, 2.0, z), -std::log1p(-z) / z, 1e-12));
    // 2F1(a, b; b; z) = (1-z)^-a
    for (double z : {-5.0, -0.5, 0.3, 0.96})
      CHECK(rel_close(special::hyp2f1(0.7, 1.9, 1.9, z), std::pow(1.0 - z, -0.7), 1e-12));
  }

  TEST_CASE("hyp2f1 against a 50-digit series") {
    const double params[][3] = {{1.0, -0.6896551724137931, 0.3103448275862069},
                                {1.0, 5.5, 2.0},
                                {0.5, 0.25, 1.5},
                                {1.0, 9.5, 6.0},
                                {2.5, 1.5, 0.75},
                                {0.3, 0.7, 2.1}};
    for (const auto& p : params)
      for (double z : {-0.9, -0.5, -0.1, 0.2, 0.6, 0.9, 0.94})
        CHECK(rel_close(special::hyp2f1(p[0], p[1], p[2], z), hyp2f1_big(p[0], p[1], p[2], z), 1e-11));
  }

  TEST_CASE("hyp2f1 frozen reference values") {
    // 30-digit values from an arbitrary-precision library.
    CHECK(rel_close(special::hyp2f1(1, -0.6896551724137931, 0.3103448275862069, -0.5), 2.0073930538685229933, 1e-12));
    CHECK(rel_close(special::hyp2f1(1, 5.5, 2, 0.3), 2.9467000149147533898, 1e-12));
    CHECK(rel_close(special::hyp2f1(1, 5.5, 2, 0.97), 1632939.3129682617703, 1e-10));
    CHECK(rel_close(special::hyp2f1(0.5, 0.25, 1.5, 0.99), 1.182942565344074938, 1e-11));
    CHECK(rel_close(special::hyp2f1(2.5, 1.5, 0.75, -3.0), -0.055550662387031525364, 1e-10));
    CHECK(rel_close(special::hyp2f1(1, -0.8, 0.2, -1.2589254117941673), 5.3787143712330041666, 1e-12));
    CHECK(rel_close(special::hyp2f1(1, 12.5, 9, 0.9487), 3327.5108647575156715, 1e-10));
    CHECK(rel_close(special::hyp2f1(0.3, 0.7, 2.1, 0.96), 1.1780519100564779518, 1e-11));
  }

  TEST_CASE("hyp2f1 domain errors") {
    CHECK_THROWS_AS(special::hyp2f1(1, 1, 2, 1.0), DomainError);
    CHECK_THROWS_AS(special::hyp2f1(1, 1, -2.0, 0.5), DomainError);
    CHECK_THROWS_AS(special::hyp2f1(1, 1, 2, std::nan("")), DomainError);
  }

  TEST_CASE("hyp1f1 against a 50-digit series and frozen values") {
    for (double a : {-0.69, 0.5, 1.2, 3.0})
      for (double b : {0.31, 1.5, 2.2})
        for (double z : {-12.0, -3.0, -0.4, 0.0, 0.8, 6.0})
          CHECK(rel_close(special::hyp1f1(a, b, z), hyp1f1_big(a, b, z), 1e-11));
    CHECK(rel_close(special::hyp1f1(-0.6896551724137931, 0.3103448275862069, -2.0), 4.6843323723862439869, 1e-12));
    CHECK(rel_close(special::hyp1f1(0.5, 1.5, 3.0), 4.222211992888511908, 1e-12));
    CHECK(rel_close(special::hyp1f1(1.2, 2.2, -10.0), 0.069513487899288511289, 1e-11));
    CHECK(rel_close(special::hyp1f1(-0.5, 0.5, 7.5), -161.28821692363669417, 1e-11));
    CHECK_THROWS_AS(special::hyp1f1(1.0, -1.0, 0.5), DomainError);
  }

  TEST_CASE("theta basics") {
    CHECK(special::theta(0.0, 0.5) == 0.0);
    CHECK_THROWS_AS(special::theta(-1.0, 0.5), DomainError);
    CHECK_THROWS_AS(special::theta(1.0, 1.0), DomainError);
    // Monotone increasing in x.
    double prev = 0.0;
    for (double x = 1e-3; x < 2.0; x *= 1.5) {
      const double t = special::theta(x, 2.0 / 2.9);
      CHECK(t > prev);
      prev = t;
    }
  }

  TEST_CASE("theta matches two quadrature routes") {
    for (double beta : {2.5, 2.9, 4.0}) {
      const double delta = 2.0 / beta;
      for (double db = -25.0; db <= 1.0; db += 2.0) {
        const double x = std::pow(10.0, db / 10.0);
        const double t = special::theta(x, delta);
        CHECK(rel_close(t, oracle::theta_confluent(x, delta), 1e-8));
        CHECK(rel_close(t, oracle::theta_radial(x, delta), 1e-8));
      }
    }
  }

  TEST_CASE("Gauss-Kronrod tables match the published 7/15 rule") {
    using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
    // Exactness: the 15-point Kronrod rule integrates degree-22 polynomials.
    for (int p = 0; p <= 22; ++p) {
      const double exact = (p % 2 == 0) ? 2.0 / (p + 1) : 0.0;
      const double got = special::integrate([p](double x) { return std::pow(x, p); }, -1.0, 1.0, {1.0, 1.0, 1});
      CHECK(std::abs(got - exact) < 1e-14);
    }
    const double boost_value = GK::integrate([](double x) { return std::cos(3.0 * x) * std::exp(x); }, -1.0, 1.0, 0);
    const double ours = special::integrate([](double x) { return std::cos(3.0 * x) * std::exp(x); }, -1.0, 1.0, {1.0, 1.0, 1});
    CHECK(std::abs(ours - boost_value) < 1e-14);
  }

  TEST_CASE("integrate on finite and infinite ranges") {
    CHECK(special::integrate([](double t) { return std::sqrt(t); }, 0.0, 1.0) == doctest::Approx(2.0 / 3.0).epsilon(1e-10));
    CHECK(special::integrate([](double t) { return std::exp(-t); }) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(special::integrate([](double t) { return 1.0 / (1.0 + t * t); }) ==
          doctest::Approx(std::numbers::pi / 2).epsilon(1e-10));
    CHECK(special::integrate([](double) { return 1.0; }, 2.0, 2.0) == 0.0);
    CHECK_THROWS_AS(special::integrate([](double) { return 1.0; }, 1.0, 0.0), DomainError);
    CHECK_THROWS_AS(special::integrate([](double t) { return 1.0 / t; }, 0.0, 1.0), ConvergenceError);
  }
}
