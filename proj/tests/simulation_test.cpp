#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <vector>

#include "evtrust/errors.hpp"
#include "evtrust/simulation.hpp"

using namespace evtrust;

namespace {

ExperimentConfig config_with_seed(std::uint64_t seed) {
  ExperimentConfig c;
  c.seed = seed;
  return c;
}

// Mean over seeds 1..n of expected_quality(trust_state) at step t.
template <class Run>
double mean_trust_at(int t, int seeds, Run run) {
  double sum = 0.0;
  for (int s = 1; s <= seeds; ++s) {
    const auto series = run(config_with_seed(static_cast<std::uint64_t>(s)));
    sum += expected_quality(series.at(static_cast<std::size_t>(t - 1)).trust_state);
  }
  return sum / seeds;
}

double mean_certainty_tail(const BehaviorProfile& profile, int seeds) {
  double sum = 0.0;
  for (int s = 1; s <= seeds; ++s) {
    const auto series = run_history_experiment(config_with_seed(static_cast<std::uint64_t>(s)),
                                               profile, HistoryMode::trust_in_history());
    for (std::size_t i = series.size() - 50; i < series.size(); ++i) {
      sum += series[i].certainty_pred;
    }
  }
  return sum / (50.0 * seeds);
}

}  // namespace

TEST(Rng, StreamsAreDeterministicAndDistinct) {
  Rng a = Rng::stream(7, 0);
  Rng b = Rng::stream(7, 0);
  Rng c = Rng::stream(7, 1);
  Rng d = Rng::stream(8, 0);
  const auto x = a.next();
  EXPECT_EQ(x, b.next());
  EXPECT_NE(x, c.next());
  EXPECT_NE(x, d.next());
}

TEST(Rng, UniformInRangeWithExpectedMean) {
  Rng rng(3);
  double sum = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.uniform01();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
  }
  EXPECT_NEAR(sum / 100000, 0.5, 0.005);
  const double v = rng.uniform(-2.0, -1.0);
  EXPECT_GE(v, -2.0);
  EXPECT_LT(v, -1.0);
}

TEST(Behavior, PeriodicHasPeriodFour) {
  Rng rng(1);
  const std::vector<double> expected = {0, 1, 1, 0, 0, 1, 1, 0, 0};  // t = 1..9
  for (int t = 1; t <= 9; ++t) {
    EXPECT_EQ(behavior_value(profile::Periodic{}, t, 0.0, 0.0, rng, 100), expected[t - 1]) << t;
  }
  for (int t = 1; t <= 100; ++t) {
    EXPECT_EQ(behavior_value(profile::Periodic{}, t, 0, 0, rng, 100),
              behavior_value(profile::Periodic{}, t + 4, 0, 0, rng, 100));
  }
}

TEST(Behavior, DampingSwitchesOffAtHalfHorizon) {
  Rng rng(1);
  EXPECT_EQ(behavior_value(profile::Damping{}, 50, 0, 0, rng, 100), 1.0);
  EXPECT_EQ(behavior_value(profile::Damping{}, 51, 0, 0, rng, 100), 0.0);
  EXPECT_EQ(behavior_value(profile::Damping{}, 3, 0, 0, rng, 7), 1.0);
  EXPECT_EQ(behavior_value(profile::Damping{}, 4, 0, 0, rng, 7), 0.0);
}

TEST(Behavior, ProbabilityIsAllOrNothingWithGivenRate) {
  Rng rng(5);
  int ones = 0;
  for (int i = 0; i < 20000; ++i) {
    const double x = behavior_value(profile::Probability{0.9}, i + 1, 0, 0, rng, 100);
    ASSERT_TRUE(x == 0.0 || x == 1.0);
    ones += x == 1.0 ? 1 : 0;
  }
  EXPECT_NEAR(ones / 20000.0, 0.9, 0.01);
}

TEST(Behavior, WalksStayInUnitIntervalWithBoundedSteps) {
  Rng rng(6);
  double prev = 0.5;
  double prev2 = 0.5;
  for (int t = 1; t <= 5000; ++t) {
    const double x = behavior_value(profile::RandomWalk{0.1}, t, prev, prev2, rng, 100);
    ASSERT_GE(x, 0.0);
    ASSERT_LE(x, 1.0);
    ASSERT_LE(std::fabs(x - prev), 0.1 + 1e-15);
    prev2 = prev;
    prev = x;
  }
  prev = prev2 = 0.5;
  for (int t = 1; t <= 5000; ++t) {
    const double x = behavior_value(profile::Momentum{0.1, 0.5}, t, prev, prev2, rng, 100);
    ASSERT_GE(x, 0.0);
    ASSERT_LE(x, 1.0);
    prev2 = prev;
    prev = x;
  }
}

TEST(Behavior, MomentumHoldsOnFirstStep) {
  Rng rng(6);
  EXPECT_EQ(behavior_value(profile::Momentum{0.1, 0.5}, 1, 0.37, 0.9, rng, 100), 0.37);
}

TEST(SampleTransactions, CountsAndMean) {
  Rng rng(9);
  double good = 0.0;
  for (int i = 0; i < 200; ++i) {
    const Evidence e = sample_transactions(0.3, 50, rng);
    ASSERT_EQ(e.total(), 50.0);
    ASSERT_EQ(e.r(), std::floor(e.r()));
    good += e.r();
  }
  EXPECT_NEAR(good / (200 * 50), 0.3, 0.01);
  EXPECT_EQ(sample_transactions(1.0, 7, rng), Evidence(7, 0));
  EXPECT_EQ(sample_transactions(0.0, 7, rng), Evidence(0, 7));
  EXPECT_EQ(sample_transactions(0.5, 0, rng), Evidence());
}

TEST(MakeReport, DistortsAfterSwitch) {
  const Evidence e(40, 10);
  EXPECT_EQ(make_report(referrer::Truthful{}, e, 99), e);
  EXPECT_EQ(make_report(referrer::Honest{}, e, 99), e);
  EXPECT_EQ(make_report(referrer::Rumor{50, 10.0}, e, 50), e);
  EXPECT_EQ(make_report(referrer::Rumor{50, 10.0}, e, 51), Evidence(400, 100));
  EXPECT_EQ(make_report(referrer::GoodThenCorrupted{50}, e, 50), e);
  EXPECT_EQ(make_report(referrer::GoodThenCorrupted{50}, e, 51), Evidence(10, 40));
}

TEST(PredictionError, MeanAbsoluteGap) {
  std::vector<TimestepRecord> s(3);
  s[0].alpha_pred = 0.5;
  s[0].alpha_obs = 0.9;
  s[1].alpha_pred = 0.8;
  s[1].alpha_obs = 0.8;
  s[2].alpha_pred = 0.1;
  s[2].alpha_obs = 0.3;
  EXPECT_NEAR(prediction_error(s), 0.2, 1e-15);
  EXPECT_THROW(prediction_error(std::span<const TimestepRecord>{}), ArgumentError);
}

TEST(ProfileText, ParsesAndPrints) {
  EXPECT_EQ(to_string(parse_behavior_profile("probability")), "probability:0.9");
  EXPECT_EQ(to_string(parse_behavior_profile("Probability:0.75")), "probability:0.75");
  EXPECT_EQ(to_string(parse_behavior_profile("random-walk:0.2")), "randomwalk:0.2");
  EXPECT_EQ(to_string(parse_behavior_profile("momentum:0.1,0.5")), "momentum:0.1,0.5");
  EXPECT_EQ(to_string(parse_behavior_profile("periodic")), "periodic");
  for (const char* text : {"probability:0.9", "periodic", "damping", "random", "randomwalk:0.1",
                           "momentum:0.1,0.5"}) {
    EXPECT_EQ(to_string(parse_behavior_profile(to_string(parse_behavior_profile(text)))),
              to_string(parse_behavior_profile(text)));
  }
  EXPECT_THROW(parse_behavior_profile("sinusoid"), ArgumentError);
  EXPECT_THROW(parse_behavior_profile("probability:1.5"), ArgumentError);
  EXPECT_THROW(parse_behavior_profile("probability:abc"), ArgumentError);
  EXPECT_NO_THROW(parse_referrer_profile("rumor:50,10"));
  EXPECT_NO_THROW(parse_referrer_profile("corrupted"));
  EXPECT_THROW(parse_referrer_profile("liar"), ArgumentError);
}

TEST(ExperimentConfig, Validation) {
  ExperimentConfig c;
  EXPECT_NO_THROW(c.validate());
  c.timesteps = 0;
  EXPECT_THROW(c.validate(), ArgumentError);
  c = {};
  c.tx_per_step = 0;
  EXPECT_THROW(c.validate(), ArgumentError);
  c = {};
  c.beta = 1.2;
  EXPECT_ANY_THROW(c.validate());
  c = {};
  EXPECT_EQ(c.effective_horizon(), 100);
  c.horizon = 40;
  EXPECT_EQ(c.effective_horizon(), 40);
}

TEST(MakeGrid, InclusiveAndSnapped) {
  const auto g = make_grid(0.0, 1.0, 0.1);
  ASSERT_EQ(g.size(), 11u);
  EXPECT_EQ(g[3], 0.3);
  EXPECT_EQ(g.back(), 1.0);
  EXPECT_EQ(make_grid(0.01, 1.0, 0.01).size(), 100u);
  EXPECT_EQ(make_grid(0.5, 0.5, 0.1).size(), 1u);
  EXPECT_THROW(make_grid(0.0, 1.0, 0.0), ArgumentError);
  EXPECT_THROW(make_grid(1.0, 0.0, 0.1), ArgumentError);
  EXPECT_THROW(make_grid(0.0, 1.0, 1e-9), ArgumentError);
}

TEST(ReferrerExperiment, DeterministicPerSeed) {
  const auto a = run_referrer_experiment(config_with_seed(4), profile::Random{});
  const auto b = run_referrer_experiment(config_with_seed(4), profile::Random{});
  const auto c = run_referrer_experiment(config_with_seed(5), profile::Random{});
  ASSERT_EQ(a.size(), 100u);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].predicted, b[i].predicted);
    EXPECT_EQ(a[i].observed, b[i].observed);
    EXPECT_EQ(a[i].trust_state, b[i].trust_state);
  }
  EXPECT_NE(prediction_error(a), prediction_error(c));
}

TEST(ReferrerExperiment, RecordsAreConsistent) {
  ExperimentConfig cfg = config_with_seed(2);
  cfg.tx_per_step = 30;
  const auto series = run_referrer_experiment(cfg, profile::RandomWalk{});
  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto& r = series[i];
    EXPECT_EQ(r.t, static_cast<int>(i) + 1);
    EXPECT_EQ(r.observed.total(), 30.0);
    EXPECT_DOUBLE_EQ(r.alpha_obs, expected_quality(r.observed));
    EXPECT_DOUBLE_EQ(r.alpha_pred, expected_quality(r.predicted));
    EXPECT_DOUBLE_EQ(r.certainty_pred, certainty(r.predicted));
    EXPECT_DOUBLE_EQ(r.discount, 0.8);
  }
  // The first report is empty, so the first prediction is vacuous.
  EXPECT_EQ(series.front().predicted, Evidence());
}

TEST(ReferrerExperiment, TruthfulReferrerEarnsTrust) {
  auto run = [](const ExperimentConfig& c) {
    return run_referrer_experiment(c, ReferrerProfile{referrer::Truthful{}});
  };
  EXPECT_GT(mean_trust_at(100, 50, run), 0.8);
}

TEST(ReferrerExperiment, RumorTrustLowerAtEndThanAtSwitch) {
  auto run = [](const ExperimentConfig& c) {
    return run_referrer_experiment(c, ReferrerProfile{referrer::Rumor{}});
  };
  EXPECT_LT(mean_trust_at(100, 50, run), mean_trust_at(50, 50, run));
}

TEST(ReferrerExperiment, HonestReferrerIsNotPunishedForLowEvidence) {
  auto run = [](const ExperimentConfig& c) {
    return run_referrer_experiment(c, ReferrerProfile{referrer::Honest{}});
  };
  EXPECT_GT(mean_trust_at(100, 20, run), 0.7);
}

TEST(CombinationExperiment, TracksBothReferrers) {
  const auto series = run_combination_experiment(config_with_seed(3));
  ASSERT_EQ(series.size(), 100u);
  for (const auto& r : series) ASSERT_TRUE(r.secondary_trust.has_value());
  double window = 0.0;
  for (int t = 20; t <= 50; ++t) window += series[t - 1].alpha_pred;
  EXPECT_GT(window / 31.0, 0.85);
  EXPECT_LT(expected_quality(*series.back().secondary_trust),
            expected_quality(series.back().trust_state));
}

TEST(HistoryExperiment, AmazonEqualsZeroForgetting) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto a = run_history_experiment(config_with_seed(seed), profile::RandomWalk{},
                                          HistoryMode::amazon());
    const auto f = run_history_experiment(config_with_seed(seed), profile::RandomWalk{},
                                          HistoryMode::fixed_beta(0.0));
    ASSERT_EQ(a.size(), f.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      EXPECT_EQ(a[i].predicted, f[i].predicted);
      EXPECT_EQ(a[i].trust_state, f[i].trust_state);
    }
  }
}

TEST(HistoryExperiment, FullForgettingPredictsLastStep) {
  const auto s = run_history_experiment(config_with_seed(1), profile::Random{},
                                        HistoryMode::fixed_beta(1.0));
  for (std::size_t i = 1; i < s.size(); ++i) EXPECT_EQ(s[i].predicted, s[i - 1].observed);
}

TEST(HistoryExperiment, CarriedEvidenceIsConserved) {
  // Amazon keeps every transaction: the last carried total is T * tx.
  const auto s = run_history_experiment(config_with_seed(1), profile::Damping{},
                                        HistoryMode::amazon());
  EXPECT_EQ(s.back().trust_state.total(), 100.0 * 50.0);
}

TEST(HistoryExperiment, DiscountInUnitInterval) {
  for (auto p : {BehaviorProfile{profile::Random{}}, BehaviorProfile{profile::Periodic{}},
                 BehaviorProfile{profile::Momentum{}}}) {
    const auto s = run_history_experiment(config_with_seed(8), p, HistoryMode::trust_in_history());
    for (const auto& r : s) {
      ASSERT_GE(r.discount, 0.0);
      ASSERT_LE(r.discount, 1.0);
    }
  }
}

TEST(HistoryExperiment, CertaintyReflectsDynamism) {
  const double steady = mean_certainty_tail(profile::Probability{0.9}, 10);
  EXPECT_GT(steady, mean_certainty_tail(profile::Random{}, 10));
  EXPECT_GT(steady, mean_certainty_tail(profile::Periodic{}, 10));
}

TEST(Sweep, ParallelMatchesSerialRuns) {
  ExperimentConfig base;
  base.seed = 11;
  base.timesteps = 40;
  const std::vector<BehaviorProfile> profiles = {profile::Random{}, profile::Periodic{}};
  const std::vector<double> betas = {0.0, 0.3, 1.0};
  const auto rows = sweep_history(base, profiles, betas, 3);
  ASSERT_EQ(rows.size(), profiles.size() * betas.size());
  for (std::size_t p = 0; p < profiles.size(); ++p) {
    for (std::size_t b = 0; b < betas.size(); ++b) {
      double fixed = 0.0;
      double amazon = 0.0;
      double tih = 0.0;
      for (int s = 0; s < 3; ++s) {
        ExperimentConfig c = base;
        c.seed = base.seed + static_cast<std::uint64_t>(s);
        fixed += prediction_error(
            run_history_experiment(c, profiles[p], HistoryMode::fixed_beta(betas[b])));
        amazon += prediction_error(run_history_experiment(c, profiles[p], HistoryMode::amazon()));
        tih += prediction_error(
            run_history_experiment(c, profiles[p], HistoryMode::trust_in_history()));
      }
      const auto& row = rows[p * betas.size() + b];
      EXPECT_EQ(row.profile, to_string(profiles[p]));
      EXPECT_EQ(row.beta, betas[b]);
      EXPECT_NEAR(row.fixed_beta_error, fixed / 3, 1e-15);
      EXPECT_NEAR(row.amazon_error, amazon / 3, 1e-15);
      EXPECT_NEAR(row.trust_in_history_error, tih / 3, 1e-15);
    }
  }
  // Repeating the sweep gives identical rows.
  const auto again = sweep_history(base, profiles, betas, 3);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(rows[i].fixed_beta_error, again[i].fixed_beta_error);
  }
}

TEST(Sweep, ReferrerRowsPerGridPoint) {
  ExperimentConfig base;
  base.timesteps = 20;
  const std::vector<BehaviorProfile> profiles = {profile::Random{}};
  const std::vector<double> betas = {0.1, 0.5};
  const auto rows = sweep_referrer(base, profiles, betas, 2);
  ASSERT_EQ(rows.size(), 2u);
  for (const auto& r : rows) {
    EXPECT_GE(r.error, 0.0);
    EXPECT_LE(r.error, 1.0);
    EXPECT_GT(r.final_trust, 0.0);
    EXPECT_LT(r.final_trust, 1.0);
  }
  EXPECT_THROW(sweep_referrer(base, profiles, betas, 0), ArgumentError);
}
