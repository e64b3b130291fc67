#pragma once

// Special functions and quadrature on [0,1].
//
// Everything here is a pure function of its arguments. Densities are handled
// in log space by the callers; the functions below are accurate for arguments
// up to ~1e6, which covers evidence totals used anywhere in the library.

#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace evtrust {

struct Tolerance {
  double abs_tol = 1e-9;
  int max_subdivisions = 30;

  // Throws DomainError unless abs_tol > 0 and max_subdivisions >= 1.
  void validate() const;
};

/// ln Γ(x) for x > 0.
double log_gamma(double x);

/// ln B(a, b). For integers, exp(log_beta(r+1, s+1)) = r! s! / (r+s+1)!.
double log_beta(double a, double b);

/// Regularized incomplete beta I_x(a, b).
double regularized_incomplete_beta(double x, double a, double b);

/// Adaptive Gauss–Kronrod quadrature of f over [lo, hi].
///
/// Intervals are bisected, worst error estimate first, until the summed
/// estimate is within tol.abs_tol. No interval is split more than
/// tol.max_subdivisions times. Throws ConvergenceError (with the best
/// estimate) when the budget runs out.
double integrate(const std::function<double(double)>& f, double lo, double hi,
                 const Tolerance& tol = {});

/// Same as above, with the initial partition given by sorted breakpoints
/// (first and last are the integration limits). Useful when the integrand
/// has a known narrow feature that a single Kronrod rule could step over.
double integrate(const std::function<double(double)>& f,
                 std::span<const double> breakpoints, const Tolerance& tol = {});

/// Where a unimodal density crosses 1, i.e. log_density(x) = 0.
struct UnitCrossings {
  std::optional<double> lower;  // in [0, peak]
  std::optional<double> upper;  // in [peak, 1]

  std::vector<double> roots() const;
};

/// Bisection on [0, peak] and [peak, 1] for the zeros of log_density. A side
/// only yields a root when log_density changes sign across it, so an
/// everywhere-nonpositive log density (uniform or flatter) yields none.
UnitCrossings find_unit_crossings(const std::function<double(double)>& log_density,
                                  double peak_location, const Tolerance& tol = {});

}  // namespace evtrust
