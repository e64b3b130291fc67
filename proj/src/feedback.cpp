#include "evtrust/feedback.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "evtrust/errors.hpp"
#include "text_util.hpp"

namespace evtrust {

namespace {

constexpr double kTransactionsPerRating = 10.0;
constexpr std::string_view kHeader = "seller_id,t,rating";

Evidence value_to_evidence(double v) {
  return {kTransactionsPerRating * v, kTransactionsPerRating * (1.0 - v)};
}

}  // namespace

void AmazonConfig::validate() const {
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw ArgumentError("lambda must lie in [0, 1], got " + std::to_string(lambda));
  }
}

std::string to_string(AmazonConfig::Mode mode) {
  switch (mode) {
    case AmazonConfig::Mode::Unweighted: return "Unweighted";
    case AmazonConfig::Mode::GeometricWeights: return "GeometricWeights";
    case AmazonConfig::Mode::TrustInHistory: return "TrustInHistory";
  }
  return "?";
}

double normalize_rating(int rating) {
  if (rating < 1 || rating > 5) {
    throw ArgumentError("rating must be an integer from 1 to 5, got " + std::to_string(rating));
  }
  return (rating - 1) / 4.0;
}

Evidence rating_to_evidence(int rating) { return value_to_evidence(normalize_rating(rating)); }

std::vector<FeedbackRecord> parse_feedback_csv(std::string_view text) {
  std::vector<std::vector<FeedbackRecord>> groups;
  std::unordered_map<std::string, std::size_t> index;
  bool header_seen = false;
  std::size_t line_no = 0;

  for (std::string_view rest = text; !rest.empty() || line_no == 0;) {
    const auto nl = rest.find('\n');
    std::string_view line = detail::trim(rest.substr(0, nl));
    rest = nl == std::string_view::npos ? std::string_view{} : rest.substr(nl + 1);
    ++line_no;
    if (line.empty()) {
      if (rest.empty()) break;
      continue;
    }
    if (!header_seen) {
      if (line.substr(0, 3) == "\xEF\xBB\xBF") line.remove_prefix(3);
      if (line != kHeader) {
        throw ParseError("line " + std::to_string(line_no) + ": expected header '" +
                             std::string(kHeader) + "'",
                         line_no);
      }
      header_seen = true;
      continue;
    }

    const auto fields = detail::split(line, ',');
    auto fail = [&](const std::string& why) {
      throw ParseError("line " + std::to_string(line_no) + ": " + why, line_no);
    };
    if (fields.size() != 3) fail("expected 3 fields, got " + std::to_string(fields.size()));
    FeedbackRecord rec;
    rec.seller_id = std::string(detail::trim(fields[0]));
    if (rec.seller_id.empty()) fail("empty seller_id");
    if (!detail::try_parse_int(fields[1], rec.t)) fail("invalid t '" + std::string(fields[1]) + "'");
    if (!detail::try_parse_int(fields[2], rec.rating)) {
      fail("invalid rating '" + std::string(fields[2]) + "'");
    }
    if (rec.rating < 1 || rec.rating > 5) {
      fail("rating " + std::to_string(rec.rating) + " outside 1..5");
    }

    auto [it, inserted] = index.try_emplace(rec.seller_id, groups.size());
    if (inserted) groups.emplace_back();
    auto& group = groups[it->second];
    if (!group.empty() && rec.t <= group.back().t) {
      fail("t = " + std::to_string(rec.t) + " does not increase for seller '" + rec.seller_id + "'");
    }
    group.push_back(std::move(rec));
    if (rest.empty()) break;
  }
  if (!header_seen) throw ParseError("missing header '" + std::string(kHeader) + "'", 1);

  std::vector<FeedbackRecord> out;
  for (auto& g : groups) {
    for (auto& r : g) out.push_back(std::move(r));
  }
  return out;
}

std::vector<FeedbackRecord> load_feedback_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open feedback file '" + path.string() + "'", 0);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_feedback_csv(buf.str());
}

std::string format_feedback_csv(std::span<const FeedbackRecord> records) {
  std::string out(kHeader);
  out += '\n';
  for (const auto& r : records) {
    out += r.seller_id + "," + std::to_string(r.t) + "," + std::to_string(r.rating) + "\n";
  }
  return out;
}

FeedbackPredictor::FeedbackPredictor(const AmazonConfig& config) : config_(config) {
  config_.validate();
}

double FeedbackPredictor::predict() const {
  if (config_.mode == AmazonConfig::Mode::TrustInHistory) {
    return expected_quality(state_.carried);
  }
  if (count_ == 0) throw ArgumentError("cannot average an empty feedback history");
  return weighted_sum_ / weight_total_;
}

void FeedbackPredictor::observe(double v) {
  if (!(v >= 0.0 && v <= 1.0)) {
    throw ArgumentError("normalized feedback must lie in [0, 1], got " + std::to_string(v));
  }
  ++count_;
  switch (config_.mode) {
    case AmazonConfig::Mode::Unweighted:
      weighted_sum_ += v;
      weight_total_ += 1.0;
      break;
    case AmazonConfig::Mode::GeometricWeights:
      // Every older term picks up one more factor of lambda; the newest has weight 1.
      weighted_sum_ = config_.lambda * weighted_sum_ + v;
      weight_total_ = config_.lambda * weight_total_ + 1.0;
      break;
    case AmazonConfig::Mode::TrustInHistory:
      state_ = history_update(state_, value_to_evidence(v)).next;
      break;
  }
}

double predict_feedback(std::span<const double> history, const AmazonConfig& config,
                        const std::optional<HistoryState>& state) {
  if (config.mode != AmazonConfig::Mode::TrustInHistory && history.empty()) {
    throw ArgumentError("cannot average an empty feedback history");
  }
  if (config.mode == AmazonConfig::Mode::TrustInHistory) {
    HistoryState s = state.value_or(HistoryState{});
    for (double v : history) {
      if (!(v >= 0.0 && v <= 1.0)) throw ArgumentError("normalized feedback must lie in [0, 1]");
      s = history_update(s, value_to_evidence(v)).next;
    }
    return expected_quality(s.carried);
  }
  FeedbackPredictor p(config);
  for (double v : history) p.observe(v);
  return p.predict();
}

namespace {

// Sum of absolute errors and count for one seller's ratings under one config.
std::pair<double, std::size_t> score(std::span<const FeedbackRecord> ratings,
                                     const AmazonConfig& config) {
  FeedbackPredictor p(config);
  double sum = 0.0;
  for (std::size_t i = 0; i < ratings.size(); ++i) {
    const double v = normalize_rating(ratings[i].rating);
    if (i > 0) sum += std::fabs(p.predict() - v);
    p.observe(v);
  }
  return {sum, ratings.empty() ? 0 : ratings.size() - 1};
}

// Contiguous runs of records per seller (input is grouped).
std::vector<std::span<const FeedbackRecord>> seller_groups(std::span<const FeedbackRecord> records) {
  std::vector<std::span<const FeedbackRecord>> out;
  std::size_t start = 0;
  for (std::size_t i = 1; i <= records.size(); ++i) {
    if (i == records.size() || records[i].seller_id != records[start].seller_id) {
      if (i > start) out.push_back(records.subspan(start, i - start));
      start = i;
    }
  }
  return out;
}

}  // namespace

AmazonReport run_amazon_experiment(std::span<const FeedbackRecord> records,
                                   std::span<const AmazonConfig> configs) {
  for (const auto& c : configs) c.validate();
  AmazonReport report;
  for (auto group : seller_groups(records)) {
    if (group.size() < 2) {
      report.skipped.push_back(group.front().seller_id);
      continue;
    }
    for (const auto& config : configs) {
      const auto [sum, n] = score(group, config);
      const double err = sum / static_cast<double>(n);
      report.rows.push_back({group.front().seller_id, config, err, 4.0 * err, n});
    }
  }
  return report;
}

std::vector<AmazonResult> pooled_errors(std::span<const FeedbackRecord> records,
                                        std::span<const AmazonConfig> configs) {
  for (const auto& c : configs) c.validate();
  std::vector<AmazonResult> out;
  const auto groups = seller_groups(records);
  for (const auto& config : configs) {
    double sum = 0.0;
    std::size_t n = 0;
    for (auto group : groups) {
      if (group.size() < 2) continue;
      const auto [s, k] = score(group, config);
      sum += s;
      n += k;
    }
    const double err = n > 0 ? sum / static_cast<double>(n) : 0.0;
    out.push_back({"*", config, err, 4.0 * err, n});
  }
  return out;
}

std::vector<FeedbackRecord> generate_feedback(const BehaviorProfile& profile, int sellers,
                                              int ratings_per_seller, std::uint64_t seed) {
  validate(profile);
  if (sellers < 0 || ratings_per_seller < 0) {
    throw ArgumentError("seller and rating counts must be non-negative");
  }
  std::vector<FeedbackRecord> out;
  for (int k = 0; k < sellers; ++k) {
    Rng rng = Rng::stream(seed, 100 + static_cast<std::uint64_t>(k));
    double prev = rng.uniform01();
    double prev2 = prev;
    char id[32];
    std::snprintf(id, sizeof id, "seller%03d", k + 1);
    for (int t = 1; t <= ratings_per_seller; ++t) {
      const double x = behavior_value(profile, t, prev, prev2, rng, ratings_per_seller);
      prev2 = prev;
      prev = x;
      int stars = 1;
      for (int j = 0; j < 4; ++j) stars += rng.bernoulli(x) ? 1 : 0;
      out.push_back({id, t, stars});
    }
  }
  return out;
}

}  // namespace evtrust
