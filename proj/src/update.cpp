#include "evtrust/update.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <string>
#include <vector>

#include "evtrust/errors.hpp"

namespace evtrust {

namespace {

constexpr double kSplitTolerance = 1e-9;

double xlogx(double n, double x) { return n == 0.0 ? 0.0 : n * std::log(x); }
double xlog1mx(double n, double x) { return n == 0.0 ? 0.0 : n * std::log1p(-x); }

// ln of the unnormalized likelihood x^r (1-x)^s.
double log_likelihood(const Evidence& e, double x) { return xlogx(e.r(), x) + xlog1mx(e.s(), x); }

void require_unit(double v, const char* what) {
  if (!(v >= 0.0 && v <= 1.0)) {
    throw DomainError(std::string(what) + " must lie in [0, 1], got " + std::to_string(v));
  }
}

void require_evidence(const Evidence& e, const char* what) {
  if (!(e.total() > 0.0)) {
    throw ArgumentError(std::string(what) + " must carry positive total evidence");
  }
}

std::string normalized_name(std::string_view name) {
  std::string out;
  for (char ch : name) {
    if (ch == '-' || ch == '_') continue;
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
  }
  return out;
}

// Mean of the report's posterior with the uniform prior folded in.
double shifted_mean(const Evidence& e) { return (e.r() + 1.0) / (e.total() + 2.0); }

}  // namespace

std::string_view to_string(UpdateMethod method) {
  switch (method) {
    case UpdateMethod::LinearWS: return "LinearWS";
    case UpdateMethod::Josang: return "Josang";
    case UpdateMethod::MaxCertainty: return "MaxCertainty";
    case UpdateMethod::Sensitivity: return "Sensitivity";
    case UpdateMethod::AverageBeta: return "AverageBeta";
    case UpdateMethod::AverageAlpha: return "AverageAlpha";
  }
  return "?";
}

UpdateMethod parse_update_method(std::string_view name) {
  for (auto m : {UpdateMethod::LinearWS, UpdateMethod::Josang, UpdateMethod::MaxCertainty,
                 UpdateMethod::Sensitivity, UpdateMethod::AverageBeta, UpdateMethod::AverageAlpha}) {
    if (name == to_string(m)) return m;
  }
  throw ArgumentError("unknown update method '" + std::string(name) +
                      "' (expected LinearWS, Josang, MaxCertainty, Sensitivity, AverageBeta or "
                      "AverageAlpha)");
}

std::string_view to_string(AccuracyMethod method) {
  switch (method) {
    case AccuracyMethod::Linear: return "Linear";
    case AccuracyMethod::MaxCertainty: return "MaxCertainty";
    case AccuracyMethod::Sensitivity: return "Sensitivity";
    case AccuracyMethod::Average: return "Average";
  }
  return "?";
}

AccuracyMethod parse_accuracy_method(std::string_view name) {
  const std::string key = normalized_name(name);
  for (auto m : {AccuracyMethod::Linear, AccuracyMethod::MaxCertainty, AccuracyMethod::Sensitivity,
                 AccuracyMethod::Average}) {
    if (key == normalized_name(to_string(m))) return m;
  }
  throw ArgumentError("unknown accuracy method '" + std::string(name) +
                      "' (expected linear, max-certainty, sensitivity or average)");
}

void UpdateConfig::validate() const { require_unit(beta, "discount factor beta"); }

Evidence general_update(double q, double p, double beta, double c_prime, const Evidence& prior) {
  require_unit(q, "accuracy q");
  require_unit(p, "inaccuracy p");
  require_unit(beta, "discount factor beta");
  require_unit(c_prime, "certainty weight");
  if (std::fabs(q + p - 1.0) > kSplitTolerance) {
    throw ArgumentError("accuracy split must satisfy q + p = 1");
  }
  const double keep = 1.0 - beta;
  return {c_prime * q + keep * prior.r(), c_prime * p + keep * prior.s()};
}

double accuracy_linear(double alpha, double alpha_prime) {
  require_unit(alpha, "alpha");
  require_unit(alpha_prime, "alpha'");
  return 1.0 - std::fabs(alpha - alpha_prime);
}

double accuracy_max_certainty(const Evidence& observed, double alpha_prime) {
  require_evidence(observed, "observation");
  require_unit(alpha_prime, "alpha'");
  const double alpha = expected_quality(observed);
  const double log_q = log_likelihood(observed, alpha_prime) - log_likelihood(observed, alpha);
  return std::clamp(std::exp(log_q), 0.0, 1.0);
}

double accuracy_sensitivity(double alpha, const Evidence& report) {
  require_evidence(report, "report");
  require_unit(alpha, "alpha");
  const double alpha_prime = expected_quality(report);
  const double log_q = log_likelihood(report, alpha) - log_likelihood(report, alpha_prime);
  return std::clamp(std::exp(log_q), 0.0, 1.0);
}

double accuracy_average(double alpha, const Evidence& report) {
  require_unit(alpha, "alpha");
  const double n = report.total();
  const double mean = shifted_mean(report);
  const double variance = (report.r() + 1.0) * (report.s() + 1.0) / ((n + 2.0) * (n + 2.0) * (n + 3.0));
  const double bias = alpha - mean;
  return std::clamp(1.0 - std::sqrt(bias * bias + variance), 0.0, 1.0);
}

double accuracy_average_integral(double alpha, const Evidence& report, const Tolerance& tol) {
  require_unit(alpha, "alpha");
  // Unnormalized likelihood scaled to 1 at its mode; both integrals share
  // the scale, so no special functions enter the ratio.
  const double mode = report.total() > 0.0 ? report.r() / report.total() : 0.5;
  const double log_peak = log_likelihood(report, mode);
  auto weight = [&](double x) { return std::exp(log_likelihood(report, x) - log_peak); };

  // Seed the partition around the bulk of the posterior so a narrow peak
  // cannot fall between Kronrod nodes.
  const double n = report.total();
  const double spread = std::sqrt((report.r() + 1.0) * (report.s() + 1.0)) / ((n + 2.0) * std::sqrt(n + 3.0));
  std::vector<double> points = {0.0, 1.0, mode, alpha};
  for (double k : {1.0, 3.0, 6.0, 12.0, 24.0}) {
    points.push_back(std::clamp(mode - k * spread, 0.0, 1.0));
    points.push_back(std::clamp(mode + k * spread, 0.0, 1.0));
  }
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());

  Tolerance inner = tol;
  inner.abs_tol = tol.abs_tol * std::min(1.0, spread);
  const double mass = integrate(weight, points, inner);
  const double moment = integrate([&](double x) { return weight(x) * (x - alpha) * (x - alpha); },
                                  points, inner);
  return std::clamp(1.0 - std::sqrt(moment / mass), 0.0, 1.0);
}

Evidence update_referrer(const UpdateConfig& config, const Evidence& observed,
                         const Evidence& report, const Evidence& prior) {
  config.validate();
  require_evidence(observed, "observation");

  double q = 0.0;
  double c_prime = 0.0;
  switch (config.method) {
    case UpdateMethod::LinearWS:
      q = accuracy_linear(expected_quality(observed), expected_quality(report));
      c_prime = certainty(report);
      break;
    case UpdateMethod::Josang: {
      require_evidence(report, "report");
      q = accuracy_linear(shifted_mean(observed), shifted_mean(report));
      c_prime = report.total() / (report.total() + 2.0);
      break;
    }
    case UpdateMethod::MaxCertainty:
      require_evidence(report, "report");
      q = accuracy_max_certainty(observed, expected_quality(report));
      c_prime = certainty(report);
      break;
    case UpdateMethod::Sensitivity:
      require_evidence(report, "report");
      q = accuracy_sensitivity(expected_quality(observed), report);
      c_prime = certainty(report);
      break;
    case UpdateMethod::AverageBeta:
      q = accuracy_average(expected_quality(observed), report);
      c_prime = certainty(observed) * certainty(report);
      break;
    case UpdateMethod::AverageAlpha:
      throw ArgumentError("AverageAlpha updates trust in history; use history_update");
  }
  return general_update(q, 1.0 - q, config.beta, c_prime, prior);
}

HistoryStep history_update(const HistoryState& state, const Evidence& observed,
                           HistoryConvention convention) {
  if (!(observed.total() > 0.0)) {
    return {state.carried, state, expected_quality(state.history_trust)};
  }
  const double alpha = expected_quality(observed);
  const double weight = certainty(observed) * certainty(state.carried);
  const double q = accuracy_average(alpha, state.carried);

  const double credit = convention == HistoryConvention::Prose ? q : 1.0 - q;
  const Evidence trust(state.history_trust.r() + weight * credit,
                       state.history_trust.s() + weight * (1.0 - credit));
  const double discount = expected_quality(trust);
  const Evidence combined(observed.r() + discount * state.carried.r(),
                          observed.s() + discount * state.carried.s());
  return {combined, HistoryState{combined, trust}, discount};
}

}  // namespace evtrust
