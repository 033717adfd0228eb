#include "lora/special.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <string>
#include <vector>

#include "lora/errors.hpp"

namespace lora::special {

namespace {

constexpr int kMaxSeriesTerms = 10000;
constexpr double kSeriesEps = 1e-17;
// Beyond this the direct 2F1 series converges too slowly to be useful.
constexpr double kDirectSeriesLimit = 0.95;

bool is_nonpositive_integer(double x) { return x <= 0.0 && std::nearbyint(x) == x; }

double rgamma(double x) {
  if (is_nonpositive_integer(x)) return 0.0;
  return 1.0 / std::tgamma(x);
}

// Sum of a hypergeometric-type series given the term ratio. Stops once the
// terms shrink geometrically and the bounded tail is below kSeriesEps.
template <typename Ratio>
double sum_series(Ratio ratio, double z_abs, const char* name) {
  double term = 1.0;
  double sum = 1.0;
  for (int n = 0; n < kMaxSeriesTerms; ++n) {
    const double r = ratio(n);
    term *= r;
    sum += term;
    if (term == 0.0) return sum;
    const double next = std::max(std::abs(ratio(n + 1)), z_abs);
    if (next < 1.0 && std::abs(term) / (1.0 - next) <= kSeriesEps * std::abs(sum)) return sum;
  }
  throw ConvergenceError(std::string(name) + ": series did not converge in " +
                             std::to_string(kMaxSeriesTerms) + " terms",
                         std::abs(term));
}

double gauss_series(double a, double b, double c, double z) {
  return sum_series(
      [=](int n) { return (a + n) * (b + n) / ((c + n) * (n + 1.0)) * z; }, std::abs(z),
      "hyp2f1");
}

// 2F1 for z in (0, 1).
double hyp2f1_unit_interval(double a, double b, double c, double z) {
  if (z <= kDirectSeriesLimit) return gauss_series(a, b, c, z);
  const double s = c - a - b;
  if (std::abs(s - std::nearbyint(s)) > 1e-9) {
    const double w = 1.0 - z;
    const double gc = std::tgamma(c);
    const double first = gc * std::tgamma(s) * rgamma(c - a) * rgamma(c - b);
    const double second = gc * std::tgamma(-s) * rgamma(a) * rgamma(b);
    double value = 0.0;
    if (first != 0.0) value += first * gauss_series(a, b, 1.0 - s, w);
    if (second != 0.0) value += second * std::pow(w, s) * gauss_series(c - a, c - b, 1.0 + s, w);
    return value;
  }
  // Integer c-a-b: the connection formula degenerates; fall back on the series.
  return gauss_series(a, b, c, z);
}

// 7-point Gauss / 15-point Kronrod abscissae and weights on [-1, 1].
constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
// Gauss weights for the odd Kronrod nodes 1, 3, 5 and the centre.
constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double a;
  double b;
  double value;
  double error;
};

struct LargerError {
  bool operator()(const Segment& x, const Segment& y) const {
    if (x.error != y.error) return x.error < y.error;
    return x.a > y.a;
  }
};

Segment kronrod15(const std::function<double(double)>& f, double a, double b) {
  const double centre = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(centre);
  double kronrod = fc * kKronrodWeights[7];
  double gauss = fc * kGaussWeights[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kKronrodNodes[j];
    const double pair = f(centre - dx) + f(centre + dx);
    kronrod += kKronrodWeights[j] * pair;
    if (j % 2 == 1) gauss += kGaussWeights[j / 2] * pair;
  }
  kronrod *= half;
  gauss *= half;
  return {a, b, kronrod, std::abs(kronrod - gauss)};
}

}  // namespace

double gamma(double x) {
  if (!(x > 0.0) || !std::isfinite(x)) throw DomainError("gamma: argument must be positive");
  return std::tgamma(x);
}

double log_gamma(double x) {
  if (!(x > 0.0) || !std::isfinite(x)) throw DomainError("log_gamma: argument must be positive");
  return std::lgamma(x);
}

double hyp2f1(double a, double b, double c, double z) {
  if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(c) || !std::isfinite(z))
    throw DomainError("hyp2f1: non-finite argument");
  if (is_nonpositive_integer(c)) throw DomainError("hyp2f1: c is a non-positive integer");
  if (z >= 1.0) throw DomainError("hyp2f1: z must be < 1");
  if (z == 0.0 || a == 0.0 || b == 0.0) return 1.0;
  if (z < 0.0) {
    // Pfaff: 2F1(a,b;c;z) = (1-z)^-a 2F1(a, c-b; c; z/(z-1)).
    const double w = z / (z - 1.0);
    return std::pow(1.0 - z, -a) * hyp2f1_unit_interval(a, c - b, c, w);
  }
  return hyp2f1_unit_interval(a, b, c, z);
}

double hyp1f1(double a, double b, double z) {
  if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(z))
    throw DomainError("hyp1f1: non-finite argument");
  if (is_nonpositive_integer(b)) throw DomainError("hyp1f1: b is a non-positive integer");
  if (z == 0.0 || a == 0.0) return 1.0;
  if (z < 0.0) {
    // Kummer: 1F1(a;b;z) = e^z 1F1(b-a; b; -z).
    return std::exp(z) * hyp1f1(b - a, b, -z);
  }
  return sum_series([=](int n) { return (a + n) / ((b + n) * (n + 1.0)) * z; }, 0.0, "hyp1f1");
}

double theta(double x, double delta) {
  if (!(x >= 0.0) || !std::isfinite(x)) throw DomainError("theta: x must be a finite ratio >= 0");
  if (!(delta > 0.0 && delta < 1.0)) throw DomainError("theta: delta must lie in (0, 1)");
  if (x == 0.0) return 0.0;
  return std::max(0.0, hyp2f1(1.0, -delta, 1.0 - delta, -x) - 1.0);
}

double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadratureSpec& spec) {
  if (!(spec.rel_tol > 0.0) || !(spec.abs_tol > 0.0) || spec.max_subdivisions < 1)
    throw DomainError("integrate: invalid quadrature spec");
  if (!(b > a)) {
    if (a == b) return 0.0;
    throw DomainError("integrate: interval must satisfy a <= b");
  }

  std::priority_queue<Segment, std::vector<Segment>, LargerError> queue;
  Segment first = kronrod15(f, a, b);
  double total = first.value;
  double error = first.error;
  queue.push(first);

  int segments = 1;
  while (true) {
    if (!std::isfinite(total) || !std::isfinite(error))
      throw ConvergenceError("integrate: non-finite integrand value", error);
    if (error <= std::max(spec.abs_tol, spec.rel_tol * std::abs(total))) break;
    if (segments >= spec.max_subdivisions)
      throw ConvergenceError("integrate: subdivision limit reached, error estimate " +
                                 std::to_string(error),
                             error);
    const Segment worst = queue.top();
    queue.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    const Segment left = kronrod15(f, worst.a, mid);
    const Segment right = kronrod15(f, mid, worst.b);
    total += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    queue.push(left);
    queue.push(right);
    ++segments;
  }

  // Re-sum in interval order to shed the drift of the running totals.
  std::vector<Segment> parts;
  parts.reserve(queue.size());
  while (!queue.empty()) {
    parts.push_back(queue.top());
    queue.pop();
  }
  std::sort(parts.begin(), parts.end(), [](const Segment& x, const Segment& y) { return x.a < y.a; });
  double sum = 0.0;
  for (const auto& s : parts) sum += s.value;
  return sum;
}

double integrate(const std::function<double(double)>& f, const QuadratureSpec& spec) {
  auto mapped = [&f](double t) {
    const double s = 1.0 - t;
    return f(t / s) / (s * s);
  };
  return integrate(mapped, 0.0, 1.0, spec);
}

}  // namespace lora::special
