#include "evtrust/simulation.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdio>
#include <cmath>
#include <string>

#include "evtrust/errors.hpp"
#include "evtrust/propagation.hpp"
#include "parallel.hpp"
#include "text_util.hpp"

namespace evtrust {

namespace {

// Stream ids within one run.
constexpr std::uint64_t kProviderStream = 0;
constexpr std::uint64_t kClientStream = 1;
constexpr std::uint64_t kReferrerStream = 2;
constexpr std::uint64_t kSecondReferrerStream = 3;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require_unit(double v, const char* what) {
  if (!(v >= 0.0 && v <= 1.0)) {
    throw ArgumentError(std::string(what) + " must lie in [0, 1], got " + std::to_string(v));
  }
}

std::string format_param(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

// Splits "name:a,b" into name and parameter list.
std::pair<std::string, std::vector<std::string_view>> split_profile_text(std::string_view text) {
  text = detail::trim(text);
  const auto colon = text.find(':');
  std::string name;
  for (char ch : text.substr(0, colon)) {
    if (ch == '-' || ch == '_') continue;
    name.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
  }
  std::vector<std::string_view> params;
  if (colon != std::string_view::npos) params = detail::split(text.substr(colon + 1), ',');
  return {name, params};
}

void require_params(const std::vector<std::string_view>& params, std::size_t max,
                    std::string_view text) {
  if (params.size() > max) {
    throw ArgumentError("too many parameters in profile '" + std::string(text) + "'");
  }
}

int parse_step(std::string_view text) {
  int v = 0;
  if (!detail::try_parse_int(text, v)) {
    throw ArgumentError("invalid step '" + std::string(text) + "'");
  }
  return v;
}

struct BehaviorTrack {
  double prev = 0.0;
  double prev2 = 0.0;
};

// X_0 for the walks; other profiles ignore it.
BehaviorTrack start_behavior(Rng& rng) {
  const double x0 = rng.uniform01();
  return {x0, x0};
}

double advance(const BehaviorProfile& profile, int t, BehaviorTrack& track, Rng& rng, int horizon) {
  const double x = behavior_value(profile, t, track.prev, track.prev2, rng, horizon);
  track.prev2 = track.prev;
  track.prev = x;
  return x;
}

TimestepRecord make_record(int t, const Evidence& predicted, const Evidence& observed) {
  TimestepRecord rec;
  rec.t = t;
  rec.predicted = predicted;
  rec.observed = observed;
  rec.alpha_pred = expected_quality(predicted);
  rec.alpha_obs = expected_quality(observed);
  rec.certainty_pred = certainty(predicted);
  return rec;
}

// Revises trust in a referrer. Without a report there is nothing to assess.
Evidence revise(const ExperimentConfig& config, const Evidence& observed, const Evidence& report,
                const Evidence& trust) {
  if (!(report.total() > 0.0)) return trust;
  return update_referrer(UpdateConfig{config.method, config.beta}, observed, report, trust);
}

int experience_rate(const ReferrerProfile& referrer, const ExperimentConfig& config, int t) {
  if (std::holds_alternative<referrer::Honest>(referrer) && 2 * t <= config.effective_horizon()) {
    return 1;
  }
  return config.tx_per_step;
}

Evidence accumulate(const Evidence& a, const Evidence& b) { return aggregate(a, b); }

}  // namespace

Rng Rng::stream(std::uint64_t seed, std::uint64_t stream_id) {
  return Rng(splitmix64(splitmix64(seed) ^ splitmix64(stream_id + 0x632BE59BD9B4E019ULL)));
}

double Rng::uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

BehaviorProfile parse_behavior_profile(std::string_view text) {
  const auto [name, params] = split_profile_text(text);
  auto param = [&](std::size_t i, double fallback) {
    return i < params.size() ? detail::parse_double(params[i], "profile parameter") : fallback;
  };
  BehaviorProfile out;
  if (name == "probability") {
    require_params(params, 1, text);
    out = profile::Probability{param(0, 0.9)};
  } else if (name == "periodic") {
    require_params(params, 0, text);
    out = profile::Periodic{};
  } else if (name == "damping") {
    require_params(params, 0, text);
    out = profile::Damping{};
  } else if (name == "random") {
    require_params(params, 0, text);
    out = profile::Random{};
  } else if (name == "randomwalk") {
    require_params(params, 1, text);
    out = profile::RandomWalk{param(0, 0.1)};
  } else if (name == "momentum") {
    require_params(params, 2, text);
    out = profile::Momentum{param(0, 0.1), param(1, 0.5)};
  } else {
    throw ArgumentError("unknown behavior profile '" + std::string(text) +
                        "' (expected probability, periodic, damping, random, randomwalk or "
                        "momentum)");
  }
  validate(out);
  return out;
}

std::string to_string(const BehaviorProfile& profile) {
  return std::visit(
      Overloaded{
          [](const profile::Probability& p) { return "probability:" + format_param(p.p); },
          [](const profile::Periodic&) { return std::string("periodic"); },
          [](const profile::Damping&) { return std::string("damping"); },
          [](const profile::Random&) { return std::string("random"); },
          [](const profile::RandomWalk& p) { return "randomwalk:" + format_param(p.gamma); },
          [](const profile::Momentum& p) {
            return "momentum:" + format_param(p.gamma) + "," + format_param(p.psi);
          },
      },
      profile);
}

void validate(const BehaviorProfile& profile) {
  std::visit(Overloaded{
                 [](const profile::Probability& p) { require_unit(p.p, "probability p"); },
                 [](const profile::RandomWalk& p) { require_unit(p.gamma, "gamma"); },
                 [](const profile::Momentum& p) {
                   require_unit(p.gamma, "gamma");
                   require_unit(p.psi, "psi");
                 },
                 [](const auto&) {},
             },
             profile);
}

ReferrerProfile parse_referrer_profile(std::string_view text) {
  const auto [name, params] = split_profile_text(text);
  ReferrerProfile out;
  if (name == "truthful") {
    require_params(params, 0, text);
    out = referrer::Truthful{};
  } else if (name == "honest") {
    require_params(params, 0, text);
    out = referrer::Honest{};
  } else if (name == "rumor") {
    require_params(params, 2, text);
    referrer::Rumor r;
    if (params.size() > 0) r.switch_step = parse_step(params[0]);
    if (params.size() > 1) r.exaggeration = detail::parse_double(params[1], "exaggeration");
    out = r;
  } else if (name == "corrupted" || name == "goodthencorrupted") {
    require_params(params, 1, text);
    referrer::GoodThenCorrupted g;
    if (params.size() > 0) g.switch_step = parse_step(params[0]);
    out = g;
  } else {
    throw ArgumentError("unknown referrer profile '" + std::string(text) +
                        "' (expected truthful, honest, rumor or corrupted)");
  }
  validate(out);
  return out;
}

std::string to_string(const ReferrerProfile& profile) {
  return std::visit(
      Overloaded{
          [](const referrer::Truthful&) { return std::string("truthful"); },
          [](const referrer::Honest&) { return std::string("honest"); },
          [](const referrer::Rumor& r) {
            return "rumor:" + std::to_string(r.switch_step) + "," + format_param(r.exaggeration);
          },
          [](const referrer::GoodThenCorrupted& g) {
            return "corrupted:" + std::to_string(g.switch_step);
          },
      },
      profile);
}

void validate(const ReferrerProfile& profile) {
  std::visit(Overloaded{
                 [](const referrer::Rumor& r) {
                   if (r.switch_step < 0) throw ArgumentError("switch step must be >= 0");
                   if (!(r.exaggeration >= 1.0) || !std::isfinite(r.exaggeration)) {
                     throw ArgumentError("exaggeration must be a finite factor >= 1");
                   }
                 },
                 [](const referrer::GoodThenCorrupted& g) {
                   if (g.switch_step < 0) throw ArgumentError("switch step must be >= 0");
                 },
                 [](const auto&) {},
             },
             profile);
}

void ExperimentConfig::validate() const {
  if (timesteps < 1) throw ArgumentError("timesteps must be at least 1");
  if (tx_per_step < 1) throw ArgumentError("transactions per step must be at least 1");
  if (horizon < 0) throw ArgumentError("horizon must be positive (0 selects timesteps)");
  require_unit(beta, "beta");
}

double behavior_value(const BehaviorProfile& profile, int t, double prev, double prev2, Rng& rng,
                      int horizon) {
  return std::visit(
      Overloaded{
          [&](const profile::Probability& p) { return rng.bernoulli(p.p) ? 1.0 : 0.0; },
          [&](const profile::Periodic&) { return (t / 2) % 2 == 1 ? 1.0 : 0.0; },
          [&](const profile::Damping&) {
            return static_cast<double>(t) <= 0.5 * static_cast<double>(horizon) ? 1.0 : 0.0;
          },
          [&](const profile::Random&) { return rng.uniform01(); },
          [&](const profile::RandomWalk& p) {
            return std::clamp(prev + p.gamma * rng.uniform(-1.0, 1.0), 0.0, 1.0);
          },
          [&](const profile::Momentum& p) {
            if (t <= 1) return std::clamp(prev, 0.0, 1.0);
            const double step = p.gamma * rng.uniform(-1.0, 1.0) + p.psi * (prev - prev2);
            return std::clamp(prev + step, 0.0, 1.0);
          },
      },
      profile);
}

Evidence sample_transactions(double x, int n, Rng& rng) {
  if (n < 0) throw ArgumentError("transaction count must be non-negative");
  int good = 0;
  for (int i = 0; i < n; ++i) good += rng.bernoulli(x) ? 1 : 0;
  return {static_cast<double>(good), static_cast<double>(n - good)};
}

Evidence make_report(const ReferrerProfile& profile, const Evidence& true_experience, int t) {
  return std::visit(
      Overloaded{
          [&](const referrer::Rumor& r) {
            return t > r.switch_step ? true_experience.scaled(r.exaggeration) : true_experience;
          },
          [&](const referrer::GoodThenCorrupted& g) {
            return t > g.switch_step ? Evidence(true_experience.s(), true_experience.r())
                                     : true_experience;
          },
          [&](const auto&) { return true_experience; },
      },
      profile);
}

double prediction_error(std::span<const TimestepRecord> series) {
  if (series.empty()) throw ArgumentError("prediction error needs a non-empty series");
  double sum = 0.0;
  for (const auto& rec : series) sum += std::fabs(rec.alpha_pred - rec.alpha_obs);
  return sum / static_cast<double>(series.size());
}

std::vector<TimestepRecord> run_referrer_experiment(const ExperimentConfig& config,
                                                    const BehaviorProfile& provider,
                                                    const ReferrerProfile& referrer) {
  config.validate();
  validate(provider);
  validate(referrer);
  Rng provider_rng = Rng::stream(config.seed, kProviderStream);
  Rng client_rng = Rng::stream(config.seed, kClientStream);
  Rng referrer_rng = Rng::stream(config.seed, kReferrerStream);
  const int horizon = config.effective_horizon();

  BehaviorTrack track = start_behavior(provider_rng);
  Evidence experience;
  Evidence trust(1.0, 1.0);
  std::vector<TimestepRecord> out;
  out.reserve(static_cast<std::size_t>(config.timesteps));

  for (int t = 1; t <= config.timesteps; ++t) {
    const double x = advance(provider, t, track, provider_rng, horizon);
    const Evidence report = make_report(referrer, experience, t);
    const ReferralPath path{to_belief(trust), report};
    const Evidence predicted = combine_referrals(std::span(&path, 1));
    const Evidence observed = sample_transactions(x, config.tx_per_step, client_rng);

    trust = revise(config, observed, report, trust);
    experience = accumulate(
        experience, sample_transactions(x, experience_rate(referrer, config, t), referrer_rng));

    TimestepRecord rec = make_record(t, predicted, observed);
    rec.trust_state = trust;
    rec.discount = 1.0 - config.beta;
    out.push_back(rec);
  }
  return out;
}

std::vector<TimestepRecord> run_referrer_experiment(const ExperimentConfig& config,
                                                    const BehaviorProfile& provider) {
  return run_referrer_experiment(config, provider, referrer::Truthful{});
}

std::vector<TimestepRecord> run_referrer_experiment(const ExperimentConfig& config,
                                                    const ReferrerProfile& referrer) {
  return run_referrer_experiment(config, profile::Probability{0.9}, referrer);
}

std::vector<TimestepRecord> run_combination_experiment(const ExperimentConfig& config) {
  config.validate();
  constexpr double kGoodRate = 0.9;
  const ReferrerProfile good = referrer::Truthful{};
  const ReferrerProfile bad = referrer::GoodThenCorrupted{50};
  Rng client_rng = Rng::stream(config.seed, kClientStream);
  Rng good_rng = Rng::stream(config.seed, kReferrerStream);
  Rng bad_rng = Rng::stream(config.seed, kSecondReferrerStream);

  Evidence good_experience;
  Evidence bad_experience;
  Evidence good_trust(1.0, 1.0);
  Evidence bad_trust(1.0, 1.0);
  std::vector<TimestepRecord> out;
  out.reserve(static_cast<std::size_t>(config.timesteps));

  for (int t = 1; t <= config.timesteps; ++t) {
    const Evidence good_report = make_report(good, good_experience, t);
    const Evidence bad_report = make_report(bad, bad_experience, t);
    const std::array<ReferralPath, 2> paths = {
        ReferralPath{to_belief(good_trust), good_report},
        ReferralPath{to_belief(bad_trust), bad_report},
    };
    const Evidence predicted = combine_referrals(paths);
    const Evidence observed = sample_transactions(kGoodRate, config.tx_per_step, client_rng);

    good_trust = revise(config, observed, good_report, good_trust);
    bad_trust = revise(config, observed, bad_report, bad_trust);
    good_experience =
        accumulate(good_experience, sample_transactions(kGoodRate, config.tx_per_step, good_rng));
    bad_experience =
        accumulate(bad_experience, sample_transactions(kGoodRate, config.tx_per_step, bad_rng));

    TimestepRecord rec = make_record(t, predicted, observed);
    rec.trust_state = good_trust;
    rec.secondary_trust = bad_trust;
    rec.discount = 1.0 - config.beta;
    out.push_back(rec);
  }
  return out;
}

std::string to_string(const HistoryMode& mode) {
  switch (mode.kind) {
    case HistoryMode::Kind::Amazon: return "Amazon";
    case HistoryMode::Kind::FixedBeta: return "FixedBeta";
    case HistoryMode::Kind::TrustInHistory: return "TrustInHistory";
  }
  return "?";
}

std::vector<TimestepRecord> run_history_experiment(const ExperimentConfig& config,
                                                   const BehaviorProfile& profile,
                                                   const HistoryMode& mode) {
  config.validate();
  validate(profile);
  if (mode.kind == HistoryMode::Kind::FixedBeta) require_unit(mode.beta, "beta");
  Rng provider_rng = Rng::stream(config.seed, kProviderStream);
  Rng client_rng = Rng::stream(config.seed, kClientStream);
  const int horizon = config.effective_horizon();

  BehaviorTrack track = start_behavior(provider_rng);
  HistoryState state;
  std::vector<TimestepRecord> out;
  out.reserve(static_cast<std::size_t>(config.timesteps));

  for (int t = 1; t <= config.timesteps; ++t) {
    const double x = advance(profile, t, track, provider_rng, horizon);
    const Evidence predicted = state.carried;
    const Evidence observed = sample_transactions(x, config.tx_per_step, client_rng);

    double retention = 1.0;
    switch (mode.kind) {
      case HistoryMode::Kind::Amazon:
        state.carried = accumulate(state.carried, observed);
        break;
      case HistoryMode::Kind::FixedBeta:
        retention = 1.0 - mode.beta;
        state.carried = accumulate(state.carried.scaled(retention), observed);
        break;
      case HistoryMode::Kind::TrustInHistory: {
        const HistoryStep step = history_update(state, observed, mode.convention);
        retention = step.discount;
        state = step.next;
        break;
      }
    }

    TimestepRecord rec = make_record(t, predicted, observed);
    rec.trust_state =
        mode.kind == HistoryMode::Kind::TrustInHistory ? state.history_trust : state.carried;
    rec.discount = retention;
    out.push_back(rec);
  }
  return out;
}

std::vector<double> make_grid(double lo, double hi, double step) {
  if (!std::isfinite(lo) || !std::isfinite(hi) || !(step > 0.0) || !std::isfinite(step)) {
    throw ArgumentError("grid needs finite bounds and a positive step");
  }
  if (hi < lo) throw ArgumentError("grid upper bound must not be below the lower bound");
  std::vector<double> out;
  const auto count = static_cast<long long>(std::floor((hi - lo) / step + 1e-9));
  if (count > 1000000) throw ArgumentError("grid has too many points");
  for (long long i = 0; i <= count; ++i) {
    // Snap to a short decimal so 0.1 * 3 prints as 0.3.
    const double v = lo + static_cast<double>(i) * step;
    out.push_back(std::round(v * 1e12) / 1e12);
  }
  return out;
}

std::vector<HistorySweepRow> sweep_history(const ExperimentConfig& base,
                                           std::span<const BehaviorProfile> profiles,
                                           std::span<const double> betas, int seeds,
                                           HistoryConvention convention) {
  base.validate();
  if (seeds < 1) throw ArgumentError("seed count must be at least 1");
  for (double b : betas) require_unit(b, "beta");

  const std::size_t n_profiles = profiles.size();
  const std::size_t n_betas = betas.size();
  const auto n_seeds = static_cast<std::size_t>(seeds);
  // Per (profile, seed): Amazon, TrustInHistory and one FixedBeta error per beta.
  const std::size_t width = n_betas + 2;
  std::vector<double> errors(n_profiles * n_seeds * width, 0.0);

  detail::parallel_for(n_profiles * n_seeds * width, [&](std::size_t idx) {
    const std::size_t column = idx % width;
    const std::size_t run = idx / width;
    const std::size_t p = run / n_seeds;
    ExperimentConfig cfg = base;
    cfg.seed = base.seed + static_cast<std::uint64_t>(run % n_seeds);
    HistoryMode mode = column == 0   ? HistoryMode::amazon()
                       : column == 1 ? HistoryMode::trust_in_history(convention)
                                     : HistoryMode::fixed_beta(betas[column - 2]);
    errors[idx] = prediction_error(run_history_experiment(cfg, profiles[p], mode));
  });

  auto mean_over_seeds = [&](std::size_t p, std::size_t column) {
    double sum = 0.0;
    for (std::size_t s = 0; s < n_seeds; ++s) sum += errors[(p * n_seeds + s) * width + column];
    return sum / static_cast<double>(n_seeds);
  };

  std::vector<HistorySweepRow> rows;
  rows.reserve(n_profiles * n_betas);
  for (std::size_t p = 0; p < n_profiles; ++p) {
    const double amazon = mean_over_seeds(p, 0);
    const double tih = mean_over_seeds(p, 1);
    for (std::size_t b = 0; b < n_betas; ++b) {
      rows.push_back({to_string(profiles[p]), betas[b], mean_over_seeds(p, b + 2), amazon, tih});
    }
  }
  return rows;
}

std::vector<ReferrerSweepRow> sweep_referrer(const ExperimentConfig& base,
                                             std::span<const BehaviorProfile> profiles,
                                             std::span<const double> betas, int seeds) {
  base.validate();
  if (seeds < 1) throw ArgumentError("seed count must be at least 1");
  for (double b : betas) require_unit(b, "beta");

  const std::size_t n_runs = profiles.size() * betas.size() * static_cast<std::size_t>(seeds);
  std::vector<std::pair<double, double>> results(n_runs);
  detail::parallel_for(n_runs, [&](std::size_t idx) {
    const std::size_t seed_offset = idx % static_cast<std::size_t>(seeds);
    const std::size_t cell = idx / static_cast<std::size_t>(seeds);
    ExperimentConfig cfg = base;
    cfg.seed = base.seed + seed_offset;
    cfg.beta = betas[cell % betas.size()];
    const auto series = run_referrer_experiment(cfg, profiles[cell / betas.size()]);
    results[idx] = {prediction_error(series), expected_quality(series.back().trust_state)};
  });

  std::vector<ReferrerSweepRow> rows;
  rows.reserve(profiles.size() * betas.size());
  for (std::size_t cell = 0; cell * static_cast<std::size_t>(seeds) < n_runs; ++cell) {
    double err = 0.0;
    double trust = 0.0;
    for (int s = 0; s < seeds; ++s) {
      const auto& r = results[cell * static_cast<std::size_t>(seeds) + static_cast<std::size_t>(s)];
      err += r.first;
      trust += r.second;
    }
    rows.push_back({to_string(profiles[cell / betas.size()]), std::string(to_string(base.method)),
                    betas[cell % betas.size()], err / seeds, trust / seeds});
  }
  return rows;
}

}  // namespace evtrust
