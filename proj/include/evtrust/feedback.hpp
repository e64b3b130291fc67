#pragma once

// Predicting a seller's next rating from its earlier ratings. Ratings 1..5
// are normalized to v = (rating - 1) / 4 in [0, 1].

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "evtrust/simulation.hpp"
#include "evtrust/trust.hpp"
#include "evtrust/update.hpp"

namespace evtrust {

struct FeedbackRecord {
  std::string seller_id;
  long long t = 0;  // arrival order
  int rating = 0;   // 1..5

  friend bool operator==(const FeedbackRecord&, const FeedbackRecord&) = default;
};

struct AmazonConfig {
  enum class Mode { Unweighted, GeometricWeights, TrustInHistory };
  Mode mode = Mode::Unweighted;
  double lambda = 1.0;  // retention weight, GeometricWeights only

  static AmazonConfig unweighted() { return {Mode::Unweighted, 1.0}; }
  static AmazonConfig geometric(double lambda) { return {Mode::GeometricWeights, lambda}; }
  static AmazonConfig trust_in_history() { return {Mode::TrustInHistory, 1.0}; }

  void validate() const;
};

std::string to_string(AmazonConfig::Mode mode);

/// (rating - 1) / 4. Throws ArgumentError outside 1..5.
double normalize_rating(int rating);

/// <10 v, 10 (1 - v)>: each rating counts as ten transactions.
Evidence rating_to_evidence(int rating);

/// Reads "seller_id,t,rating" rows. Records come back grouped by seller in
/// order of first appearance, each group in file order. Throws ParseError
/// (with the 1-based line) on a missing file, malformed row, rating outside
/// 1..5 or t not strictly increasing within a seller.
std::vector<FeedbackRecord> load_feedback_csv(const std::filesystem::path& path);
std::vector<FeedbackRecord> parse_feedback_csv(std::string_view text);

/// Writes the same format load_feedback_csv reads.
std::string format_feedback_csv(std::span<const FeedbackRecord> records);

/// Streaming predictor: observe ratings one at a time, predict the next.
class FeedbackPredictor {
 public:
  explicit FeedbackPredictor(const AmazonConfig& config);

  /// Normalized prediction. Mean modes need at least one observation;
  /// TrustInHistory predicts 0.5 with no history.
  double predict() const;
  void observe(double normalized_value);
  std::size_t count() const noexcept { return count_; }
  const HistoryState& history_state() const noexcept { return state_; }

 private:
  AmazonConfig config_;
  std::size_t count_ = 0;
  double weighted_sum_ = 0.0;
  double weight_total_ = 0.0;
  HistoryState state_;
};

/// Prediction after observing `history` (normalized values) in order.
/// `state` seeds TrustInHistory (default: empty carried evidence and
/// history trust <0.9, 0.1>).
double predict_feedback(std::span<const double> history, const AmazonConfig& config,
                        const std::optional<HistoryState>& state = std::nullopt);

struct AmazonResult {
  std::string seller_id;
  AmazonConfig config;
  double error = 0.0;         // mean |prediction - actual|, normalized scale
  double error_scale5 = 0.0;  // same on the 1..5 scale
  std::size_t predictions = 0;
};

struct AmazonReport {
  std::vector<AmazonResult> rows;        // seller-major, configs in input order
  std::vector<std::string> skipped;      // sellers with fewer than two ratings
};

/// Predicts every rating of each seller from its predecessors under each
/// config. Sellers with fewer than two ratings are skipped and listed.
AmazonReport run_amazon_experiment(std::span<const FeedbackRecord> records,
                                   std::span<const AmazonConfig> configs);

/// Mean error per config over all predictions of all sellers (pooled).
std::vector<AmazonResult> pooled_errors(std::span<const FeedbackRecord> records,
                                        std::span<const AmazonConfig> configs);

/// Synthetic ratings 1 + Binomial(4, X_t), where X_t follows `profile`.
/// One RNG stream per seller.
std::vector<FeedbackRecord> generate_feedback(const BehaviorProfile& profile, int sellers,
                                              int ratings_per_seller, std::uint64_t seed);

}  // namespace evtrust
