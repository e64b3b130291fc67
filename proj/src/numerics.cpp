#include "evtrust/numerics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>
#include <string>

#include "evtrust/errors.hpp"

namespace evtrust {

namespace {

constexpr double kHalfLog2Pi = 0.91893853320467274178032973640562;

// Godfrey's coefficients for g = 607/128, n = 15.
constexpr double kLanczosG = 607.0 / 128.0;
constexpr std::array<double, 15> kLanczos = {
    0.99999999999999709182,     57.156235665862923517,
    -59.597960355475491248,     14.136097974741747174,
    -0.49191381609762019978,    .33994649984811888699e-4,
    .46523628927048575665e-4,   -.98374475304879564677e-4,
    .15808870322491248884e-3,   -.21026444172410488319e-3,
    .21743961811521264320e-3,   -.16431810653676389022e-3,
    .84418223983852743293e-4,   -.26190838401581408670e-4,
    .36899182659531622704e-5,
};

double lanczos_log_gamma(double x) {
  const double z = x - 1.0;
  double sum = kLanczos[0];
  for (std::size_t k = 1; k < kLanczos.size(); ++k) {
    sum += kLanczos[k] / (z + static_cast<double>(k));
  }
  const double t = z + kLanczosG + 0.5;
  return kHalfLog2Pi + (z + 0.5) * std::log(t) - t + std::log(sum);
}

// ln Γ(x) - [(x - 1/2) ln x - x + ln √(2π)], the Stirling remainder.
// Asymptotic Bernoulli series, accurate to ~1e-16 for x >= 10.
double stirling_correction(double x) {
  constexpr std::array<double, 7> kCoef = {
      1.0 / 12.0,     -1.0 / 360.0,          1.0 / 1260.0, -1.0 / 1680.0,
      1.0 / 1188.0,   -691.0 / 360360.0,     1.0 / 156.0,
  };
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  double acc = 0.0;
  for (std::size_t k = kCoef.size(); k-- > 0;) acc = acc * inv2 + kCoef[k];
  return acc * inv;
}

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw DomainError(std::string(what) + " must be positive and finite, got " +
                      std::to_string(v));
  }
}

// Modified Lentz evaluation of the continued fraction for I_x(a, b).
double incomplete_beta_fraction(double x, double a, double b) {
  constexpr double kTiny = 1e-300;
  constexpr double kEps = 1e-16;
  const int max_iter = 1000 + static_cast<int>(20.0 * std::sqrt(std::max(a, b)));

  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= max_iter; ++m) {
    const double md = static_cast<double>(m);
    const double m2 = 2.0 * md;
    double aa = md * (b - md) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + md) * (qab + md) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) return h;
  }
  throw ConvergenceError("incomplete beta continued fraction did not converge", h);
}

// Gauss–Kronrod 7/15 abscissae and weights on [-1, 1].
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0,
};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714,
};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327,
};

struct Panel {
  double lo;
  double hi;
  double value;
  double error;
  int depth;

  bool operator<(const Panel& other) const { return error < other.error; }
};

double checked(const std::function<double(double)>& f, double x) {
  const double y = f(x);
  if (!std::isfinite(y)) {
    throw DomainError("integrand is not finite at x = " + std::to_string(x));
  }
  return y;
}

Panel kronrod(const std::function<double(double)>& f, double lo, double hi, int depth) {
  const double center = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  const double fc = checked(f, center);
  double kronrod_sum = fc * kWgk[7];
  double gauss_sum = fc * kWg[3];
  for (std::size_t j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    const double pair = checked(f, center - dx) + checked(f, center + dx);
    kronrod_sum += kWgk[j] * pair;
    if (j % 2 == 1) gauss_sum += kWg[j / 2] * pair;
  }
  const double value = kronrod_sum * half;
  const double error = std::fabs((kronrod_sum - gauss_sum) * half);
  return {lo, hi, value, error, depth};
}

}  // namespace

void Tolerance::validate() const {
  if (!(abs_tol > 0.0) || !std::isfinite(abs_tol)) {
    throw DomainError("tolerance abs_tol must be positive");
  }
  if (max_subdivisions < 1) {
    throw DomainError("tolerance max_subdivisions must be at least 1");
  }
}

double log_gamma(double x) {
  require_positive(x, "log_gamma argument");
  if (x >= 15.0) {
    return (x - 0.5) * std::log(x) - x + kHalfLog2Pi + stirling_correction(x);
  }
  if (x < 0.5) {
    // Γ(x) = Γ(x + 1) / x keeps the Lanczos sum away from its pole.
    return lanczos_log_gamma(x + 1.0) - std::log(x);
  }
  return lanczos_log_gamma(x);
}

double log_beta(double a, double b) {
  require_positive(a, "log_beta first argument");
  require_positive(b, "log_beta second argument");
  const double p = std::min(a, b);
  const double q = std::max(a, b);
  const double ratio = p / (p + q);

  if (p >= 10.0) {
    const double corr = stirling_correction(p) + stirling_correction(q) -
                        stirling_correction(p + q);
    return -0.5 * std::log(q) + kHalfLog2Pi + corr + (p - 0.5) * std::log(ratio) +
           q * std::log1p(-ratio);
  }
  if (q >= 10.0) {
    const double corr = stirling_correction(q) - stirling_correction(p + q);
    return log_gamma(p) + corr + p - p * std::log(p + q) +
           (q - 0.5) * std::log1p(-ratio);
  }
  return log_gamma(p) + log_gamma(q) - log_gamma(p + q);
}

double regularized_incomplete_beta(double x, double a, double b) {
  require_positive(a, "incomplete beta parameter a");
  require_positive(b, "incomplete beta parameter b");
  if (!(x >= 0.0 && x <= 1.0)) {
    throw DomainError("incomplete beta x must lie in [0, 1], got " + std::to_string(x));
  }
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;

  const bool flip = x > (a + 1.0) / (a + b + 2.0);
  const double xs = flip ? 1.0 - x : x;
  const double as = flip ? b : a;
  const double bs = flip ? a : b;
  const double log_front = as * std::log(xs) + bs * std::log1p(-xs) - log_beta(as, bs);
  const double value = std::exp(log_front) * incomplete_beta_fraction(xs, as, bs) / as;
  const double result = flip ? 1.0 - value : value;
  return std::clamp(result, 0.0, 1.0);
}

double integrate(const std::function<double(double)>& f, double lo, double hi,
                 const Tolerance& tol) {
  const std::array<double, 2> limits = {lo, hi};
  return integrate(f, std::span<const double>(limits), tol);
}

double integrate(const std::function<double(double)>& f,
                 std::span<const double> breakpoints, const Tolerance& tol) {
  tol.validate();
  if (breakpoints.size() < 2) {
    throw ArgumentError("integrate needs at least two breakpoints");
  }
  if (!std::is_sorted(breakpoints.begin(), breakpoints.end())) {
    throw ArgumentError("integration breakpoints must be sorted (lo <= hi)");
  }

  std::priority_queue<Panel> open;
  std::vector<Panel> settled;
  double total_error = 0.0;
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
    if (breakpoints[i + 1] == breakpoints[i]) continue;
    Panel p = kronrod(f, breakpoints[i], breakpoints[i + 1], 0);
    total_error += p.error;
    open.push(p);
  }

  constexpr std::size_t kMaxPanels = 200000;
  while (total_error > tol.abs_tol && !open.empty()) {
    Panel worst = open.top();
    open.pop();
    if (worst.depth >= tol.max_subdivisions || open.size() + settled.size() > kMaxPanels) {
      settled.push_back(worst);
      continue;
    }
    const double mid = 0.5 * (worst.lo + worst.hi);
    Panel left = kronrod(f, worst.lo, mid, worst.depth + 1);
    Panel right = kronrod(f, mid, worst.hi, worst.depth + 1);
    total_error += left.error + right.error - worst.error;
    open.push(left);
    open.push(right);
  }

  double value = 0.0;
  double error = 0.0;
  for (const Panel& p : settled) {
    value += p.value;
    error += p.error;
  }
  while (!open.empty()) {
    value += open.top().value;
    error += open.top().error;
    open.pop();
  }
  if (error > tol.abs_tol) {
    throw ConvergenceError("adaptive quadrature did not reach tolerance (estimated error " +
                               std::to_string(error) + ")",
                           value);
  }
  return value;
}

std::vector<double> UnitCrossings::roots() const {
  std::vector<double> out;
  if (lower) out.push_back(*lower);
  if (upper) out.push_back(*upper);
  return out;
}

UnitCrossings find_unit_crossings(const std::function<double(double)>& log_density,
                                  double peak_location, const Tolerance& tol) {
  tol.validate();
  constexpr int kMaxIterations = 200;
  const double peak = std::clamp(peak_location, 0.0, 1.0);
  const double at_peak = log_density(peak);

  // Invariant: g(below) < 0 < g(above), with `below` and `above` in either order.
  auto bisect = [&](double below, double above) {
    for (int i = 0; i < kMaxIterations && std::fabs(above - below) > tol.abs_tol; ++i) {
      const double mid = 0.5 * (below + above);
      if (log_density(mid) > 0.0) {
        above = mid;
      } else {
        below = mid;
      }
    }
    return 0.5 * (below + above);
  };

  UnitCrossings out;
  if (!(at_peak > 0.0)) return out;
  if (peak > 0.0 && log_density(0.0) < 0.0) out.lower = bisect(0.0, peak);
  if (peak < 1.0 && log_density(1.0) < 0.0) out.upper = bisect(1.0, peak);
  return out;
}

}  // namespace evtrust
