#include "evtrust/trust.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "evtrust/errors.hpp"

namespace evtrust {

namespace {

// n * ln(x) with 0 * ln(0) = 0, so <0, s> densities stay finite at x = 0.
double xlogx(double n, double x) { return n == 0.0 ? 0.0 : n * std::log(x); }
double xlog1mx(double n, double x) { return n == 0.0 ? 0.0 : n * std::log1p(-x); }

// Internal root tolerance for the certainty computation. The certainty is
// stationary in the crossing locations (f = 1 there), so this is generous.
constexpr Tolerance kCrossingTolerance{1e-14, 30};

}  // namespace

Evidence::Evidence(double r, double s) : r_(r), s_(s) {
  if (!std::isfinite(r) || !std::isfinite(s) || r < 0.0 || s < 0.0) {
    throw DomainError("evidence components must be finite and non-negative, got <" +
                      std::to_string(r) + ", " + std::to_string(s) + ">");
  }
}

Evidence Evidence::scaled(double factor) const { return {r_ * factor, s_ * factor}; }

Belief::Belief(double b, double d, double u) {
  for (double v : {b, d, u}) {
    if (!std::isfinite(v) || v < -kSumTolerance || v > 1.0 + kSumTolerance) {
      throw DomainError("belief components must lie in [0, 1]");
    }
  }
  if (std::fabs(b + d + u - 1.0) > kSumTolerance) {
    throw DomainError("belief components must sum to 1, got " + std::to_string(b + d + u));
  }
  b_ = std::clamp(b, 0.0, 1.0);
  d_ = std::clamp(d, 0.0, 1.0);
  u_ = std::clamp(u, 0.0, 1.0);
}

double expected_quality(const Evidence& e) {
  const double total = e.total();
  return total > 0.0 ? e.r() / total : 0.5;
}

double log_pcdf(const Evidence& e, double x) {
  if (!(x >= 0.0 && x <= 1.0)) {
    throw DomainError("density argument must lie in [0, 1], got " + std::to_string(x));
  }
  return xlogx(e.r(), x) + xlog1mx(e.s(), x) - log_beta(e.r() + 1.0, e.s() + 1.0);
}

double pcdf(const Evidence& e, double x) {
  if (!(x > 0.0 && x < 1.0)) {
    throw DomainError("density argument must lie in (0, 1), got " + std::to_string(x));
  }
  return std::exp(log_pcdf(e, x));
}

double certainty(const Evidence& e) {
  const double total = e.total();
  if (total == 0.0) return 0.0;

  const double r = e.r();
  const double s = e.s();
  const double a = r + 1.0;
  const double b = s + 1.0;
  const double log_norm = log_beta(a, b);
  auto log_density = [&](double x) { return xlogx(r, x) + xlog1mx(s, x) - log_norm; };

  const UnitCrossings crossings = find_unit_crossings(log_density, r / total, kCrossingTolerance);
  if (!crossings.lower && !crossings.upper && !(log_density(r / total) > 0.0)) return 0.0;

  // The density exceeds 1 exactly on [lo, hi]; certainty is the mass above
  // the uniform level there.
  const double lo = crossings.lower.value_or(0.0);
  const double hi = crossings.upper.value_or(1.0);
  const double mass = regularized_incomplete_beta(hi, a, b) - regularized_incomplete_beta(lo, a, b);
  return std::clamp(mass - (hi - lo), 0.0, 1.0);
}

Belief to_belief(const Evidence& e) {
  const double alpha = expected_quality(e);
  const double c = certainty(e);
  const double b = alpha * c;
  const double d = (1.0 - alpha) * c;
  return {b, d, 1.0 - b - d};
}

Evidence from_belief(const Belief& t) {
  const double mass = t.b() + t.d();
  if (mass <= 0.0) return {};

  const double alpha = t.b() / mass;
  const double target = t.certainty();
  auto certainty_at = [alpha](double total) {
    return certainty(Evidence(alpha * total, (1.0 - alpha) * total));
  };

  if (certainty_at(kMaxTotal) < target) {
    throw ConvergenceError("no evidence total up to 1e6 reaches certainty " +
                               std::to_string(target),
                           kMaxTotal);
  }

  // Certainty is increasing in the total at fixed α: bracket, then bisect.
  double lo = 0.0;
  double hi = 1.0;
  while (hi < kMaxTotal && certainty_at(hi) < target) {
    lo = hi;
    hi = std::min(2.0 * hi, kMaxTotal);
  }
  for (int i = 0; i < 200 && hi - lo > 1e-13 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (certainty_at(mid) < target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double total = 0.5 * (lo + hi);
  return {alpha * total, (1.0 - alpha) * total};
}

}  // namespace evtrust
