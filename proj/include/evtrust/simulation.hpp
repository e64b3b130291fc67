#pragma once

// Seeded agent simulations: a client, a service provider whose per-step
// probability of good service follows a behavior profile, and referrers that
// report on the provider.
//
// Every run is single-threaded and a pure function of its configuration and
// seed. Each agent draws from its own RNG stream derived from the run seed,
// so sweeps can run in parallel without changing any result.

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "evtrust/trust.hpp"
#include "evtrust/update.hpp"

namespace evtrust {

/// Portable seeded generator. Only raw 64-bit outputs of mt19937_64 are used
/// (the standard distributions are implementation-defined).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Independent stream for (seed, stream_id), derived with splitmix64.
  static Rng stream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t next() { return engine_(); }
  double uniform01();  // [0, 1)
  double uniform(double lo, double hi);
  bool bernoulli(double p) { return uniform01() < p; }

 private:
  std::mt19937_64 engine_;
};

namespace profile {
struct Probability {
  double p = 0.9;
};
struct Periodic {};
struct Damping {};
struct Random {};
struct RandomWalk {
  double gamma = 0.1;
};
struct Momentum {
  double gamma = 0.1;
  double psi = 0.5;
};
}  // namespace profile

/// Per-step probability X_t that the provider serves well.
using BehaviorProfile = std::variant<profile::Probability, profile::Periodic, profile::Damping,
                                     profile::Random, profile::RandomWalk, profile::Momentum>;

namespace referrer {
struct Truthful {};
struct Rumor {
  int switch_step = 50;
  double exaggeration = 10.0;
};
struct Honest {};
struct GoodThenCorrupted {
  int switch_step = 50;
};
}  // namespace referrer

using ReferrerProfile = std::variant<referrer::Truthful, referrer::Rumor, referrer::Honest,
                                     referrer::GoodThenCorrupted>;

/// Text forms: "probability[:p]", "periodic", "damping", "random",
/// "randomwalk[:gamma]", "momentum[:gamma[,psi]]".
BehaviorProfile parse_behavior_profile(std::string_view text);
std::string to_string(const BehaviorProfile& profile);
void validate(const BehaviorProfile& profile);

/// Text forms: "truthful", "honest", "rumor[:switch[,factor]]", "corrupted[:switch]".
ReferrerProfile parse_referrer_profile(std::string_view text);
std::string to_string(const ReferrerProfile& profile);
void validate(const ReferrerProfile& profile);

struct ExperimentConfig {
  int timesteps = 100;
  int tx_per_step = 50;
  std::uint64_t seed = 1;
  UpdateMethod method = UpdateMethod::AverageBeta;
  double beta = 0.2;
  int horizon = 0;  // Damping horizon T; 0 means `timesteps`

  void validate() const;
  int effective_horizon() const { return horizon > 0 ? horizon : timesteps; }
};

struct TimestepRecord {
  int t = 0;
  Evidence predicted;
  Evidence observed;
  double alpha_pred = 0.5;
  double alpha_obs = 0.5;
  Evidence trust_state;           // referrer trust, or history trust
  double certainty_pred = 0.0;    // certainty of `predicted`
  double discount = 0.0;          // retention weight on past evidence this step
  std::optional<Evidence> secondary_trust;  // second referrer, when present
};

/// X_t for profile at step t >= 1. `prev` and `prev2` are X_{t-1} and
/// X_{t-2}; walks are clamped to [0, 1].
double behavior_value(const BehaviorProfile& profile, int t, double prev, double prev2, Rng& rng,
                      int horizon);

/// <k, n - k> for k successes of n Bernoulli(x) transactions.
Evidence sample_transactions(double x, int n, Rng& rng);

/// What a referrer claims at step t given its true experience.
Evidence make_report(const ReferrerProfile& profile, const Evidence& true_experience, int t);

/// Mean |alpha_pred - alpha_obs|. Throws ArgumentError on an empty series.
double prediction_error(std::span<const TimestepRecord> series);

/// One client, one provider following `provider`, one referrer. Each step the
/// referrer reports its accumulated experience (as distorted by its
/// profile), the client predicts the provider from the trust-discounted
/// report, transacts, and revises its trust in the referrer.
std::vector<TimestepRecord> run_referrer_experiment(const ExperimentConfig& config,
                                                    const BehaviorProfile& provider,
                                                    const ReferrerProfile& referrer);

/// Truthful referrer in front of a provider with the given profile.
std::vector<TimestepRecord> run_referrer_experiment(const ExperimentConfig& config,
                                                    const BehaviorProfile& provider);

/// Referrer with the given profile in front of a Probability(0.9) provider.
std::vector<TimestepRecord> run_referrer_experiment(const ExperimentConfig& config,
                                                    const ReferrerProfile& referrer);

/// One provider serving well with probability 0.9 per transaction, one
/// truthful referrer and one that is corrupted after step 50. The client's
/// estimate combines both reports. trust_state follows the good referrer,
/// secondary_trust the corrupted one.
std::vector<TimestepRecord> run_combination_experiment(const ExperimentConfig& config);

struct HistoryMode {
  enum class Kind { Amazon, FixedBeta, TrustInHistory };
  Kind kind = Kind::TrustInHistory;
  double beta = 0.0;  // forgetting rate, FixedBeta only
  HistoryConvention convention = HistoryConvention::Prose;  // TrustInHistory only

  static HistoryMode amazon() { return {Kind::Amazon, 0.0}; }
  static HistoryMode fixed_beta(double beta) { return {Kind::FixedBeta, beta}; }
  static HistoryMode trust_in_history(HistoryConvention c = HistoryConvention::Prose) {
    return {Kind::TrustInHistory, 0.0, c};
  }
};

std::string to_string(const HistoryMode& mode);

/// The client tracks a provider from its own observations only, carrying
/// past evidence forward undiscounted (Amazon), with a fixed forgetting rate
/// (FixedBeta) or with the self-tuned trust-in-history weight.
std::vector<TimestepRecord> run_history_experiment(const ExperimentConfig& config,
                                                   const BehaviorProfile& profile,
                                                   const HistoryMode& mode);

/// lo, lo + step, ..., up to hi inclusive (tolerant to rounding).
std::vector<double> make_grid(double lo, double hi, double step);

struct HistorySweepRow {
  std::string profile;
  double beta = 0.0;
  double fixed_beta_error = 0.0;
  double amazon_error = 0.0;
  double trust_in_history_error = 0.0;
};

/// Mean prediction error over `seeds` consecutive seeds starting at
/// base.seed, one row per (profile, beta).
std::vector<HistorySweepRow> sweep_history(
    const ExperimentConfig& base, std::span<const BehaviorProfile> profiles,
    std::span<const double> betas, int seeds,
    HistoryConvention convention = HistoryConvention::Prose);

struct ReferrerSweepRow {
  std::string profile;
  std::string method;
  double beta = 0.0;
  double error = 0.0;
  double final_trust = 0.0;  // expected quality of the referrer trust at the last step
};

std::vector<ReferrerSweepRow> sweep_referrer(const ExperimentConfig& base,
                                             std::span<const BehaviorProfile> profiles,
                                             std::span<const double> betas, int seeds);

}  // namespace evtrust
