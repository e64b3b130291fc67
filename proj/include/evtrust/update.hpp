#pragma once

// Maintaining trust from feedback.
//
// A target (a referrer, or the client's own history of a provider) makes an
// estimate <r', s'> of a provider; the client then observes <r, s>. The
// estimate's accuracy q in [0, 1] is scored against the observation and the
// estimate is counted as c'q good and c'(1 - q) bad outcomes, where c' is a
// certainty weight. Older trust evidence is forgotten at rate beta.

#include <string_view>

#include "evtrust/numerics.hpp"
#include "evtrust/trust.hpp"

namespace evtrust {

enum class AccuracyMethod { Linear, MaxCertainty, Sensitivity, Average };

enum class UpdateMethod { LinearWS, Josang, MaxCertainty, Sensitivity, AverageBeta, AverageAlpha };

/// Canonical identifiers: "LinearWS", "Josang", "MaxCertainty", "Sensitivity",
/// "AverageBeta", "AverageAlpha".
std::string_view to_string(UpdateMethod method);
UpdateMethod parse_update_method(std::string_view name);

/// "Linear", "MaxCertainty", "Sensitivity", "Average". Parsing is
/// case-insensitive and ignores '-' and '_'.
std::string_view to_string(AccuracyMethod method);
AccuracyMethod parse_accuracy_method(std::string_view name);

struct UpdateConfig {
  UpdateMethod method = UpdateMethod::AverageBeta;
  double beta = 0.0;  // forgetting rate: 0 keeps everything, 1 keeps nothing
  Evidence referrer_prior{1.0, 1.0};
  Evidence observation_prior{};

  void validate() const;
};

/// Trust in history: the client's carried evidence about one provider and
/// the trust it places in that evidence as a predictor.
struct HistoryState {
  Evidence carried{};
  Evidence history_trust{0.9, 0.1};
};

struct HistoryStep {
  Evidence combined;
  HistoryState next;
  double discount = 0.0;  // retention weight applied to the carried evidence
};

/// Which side of the history trust an accurate step credits. Prose credits
/// accuracy q to the positive side, so consistent behavior raises the
/// retention weight. Printed is the transposed variant, kept for comparison.
enum class HistoryConvention { Prose, Printed };

/// <c'q + (1 - beta) r_R, c'p + (1 - beta) s_R>; requires q + p = 1.
Evidence general_update(double q, double p, double beta, double c_prime, const Evidence& prior);

/// 1 - |alpha - alpha'|.
double accuracy_linear(double alpha, double alpha_prime);

/// f(alpha') / f(alpha) under the observation's density. Requires an
/// observation with positive total.
double accuracy_max_certainty(const Evidence& observed, double alpha_prime);

/// l(alpha) / l(alpha') under the report's density. Requires a report with
/// positive total.
double accuracy_sensitivity(double alpha, const Evidence& report);

/// 1 - RMS distance between alpha and the report's posterior, in closed form.
double accuracy_average(double alpha, const Evidence& report);

/// The same quantity by quadrature of the second moment. Test oracle for
/// accuracy_average.
double accuracy_average_integral(double alpha, const Evidence& report, const Tolerance& tol = {});

/// Revise the trust in a referrer from one (observation, report) pair.
/// AverageAlpha is not a referrer method and is rejected.
Evidence update_referrer(const UpdateConfig& config, const Evidence& observed,
                         const Evidence& report, const Evidence& prior);

/// One step of trust in history. The carried evidence is scored against the
/// new observation, the history trust absorbs that score, and its expected
/// quality becomes the retention weight for the carried evidence.
HistoryStep history_update(const HistoryState& state, const Evidence& observed,
                           HistoryConvention convention = HistoryConvention::Prose);

}  // namespace evtrust
