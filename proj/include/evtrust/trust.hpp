#pragma once

// Trust values in evidence space <r, s> and belief space <b, d, u>, the
// posterior density over the probability of a good outcome, and certainty.

#include "evtrust/numerics.hpp"

namespace evtrust {

/// Counts of positive (r) and negative (s) outcomes. Real-valued because
/// discounting produces fractional evidence. <0, 0> is a valid (vacuous) value.
class Evidence {
 public:
  constexpr Evidence() = default;
  Evidence(double r, double s);

  double r() const noexcept { return r_; }
  double s() const noexcept { return s_; }
  double total() const noexcept { return r_ + s_; }

  /// Componentwise scaling by a non-negative factor.
  Evidence scaled(double factor) const;

  friend bool operator==(const Evidence&, const Evidence&) = default;

 private:
  double r_ = 0.0;
  double s_ = 0.0;
};

/// Belief/disbelief/uncertainty triple summing to one. Components may be
/// exactly zero.
class Belief {
 public:
  static constexpr double kSumTolerance = 1e-9;

  constexpr Belief() = default;  // vacuous <0, 0, 1>
  Belief(double b, double d, double u);

  double b() const noexcept { return b_; }
  double d() const noexcept { return d_; }
  double u() const noexcept { return u_; }
  double certainty() const noexcept { return 1.0 - u_; }

  friend bool operator==(const Belief&, const Belief&) = default;

 private:
  double b_ = 0.0;
  double d_ = 0.0;
  double u_ = 1.0;
};

/// r / (r + s); 0.5 when there is no evidence.
double expected_quality(const Evidence& e);

/// ln of the posterior density x^r (1-x)^s / B(r+1, s+1) at x in [0, 1].
/// Endpoints are allowed here (the value may be -inf or finite).
double log_pcdf(const Evidence& e, double x);

/// Posterior density at x in (0, 1).
double pcdf(const Evidence& e, double x);

/// Half the L1 distance between the posterior density and the uniform
/// density. 0 for <0, 0>, approaching 1 as evidence grows without conflict.
double certainty(const Evidence& e);

/// <α c, (1 - α) c, 1 - c> with α = expected_quality(e), c = certainty(e).
Belief to_belief(const Evidence& e);

/// Inverse of to_belief. Keeps α = b / (b + d) and searches the evidence
/// total whose certainty is 1 - u. Throws ConvergenceError when the target
/// certainty needs more than kMaxTotal evidence.
Evidence from_belief(const Belief& t);

inline constexpr double kMaxTotal = 1e6;

}  // namespace evtrust
