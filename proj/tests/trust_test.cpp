#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include <json.hpp>

#include "evtrust/errors.hpp"
#include "evtrust/series_io.hpp"
#include "evtrust/trust.hpp"
#include "oracles.hpp"

using namespace evtrust;

namespace {

// Closed form for <0, n>: the density (n+1)(1-x)^n exceeds 1 on [0, x1].
double certainty_zero_r(double n) {
  const double x1 = 1.0 - std::pow(n + 1.0, -1.0 / n);
  return 1.0 - std::pow(1.0 - x1, n + 1.0) - x1;
}

}  // namespace

TEST(Evidence, ValidatesComponents) {
  EXPECT_NO_THROW(Evidence(0.0, 0.0));
  EXPECT_NO_THROW(Evidence(0.25, 1e6));
  EXPECT_THROW(Evidence(-1e-12, 1.0), DomainError);
  EXPECT_THROW(Evidence(1.0, -3.0), DomainError);
  EXPECT_THROW(Evidence(std::numeric_limits<double>::infinity(), 1.0), DomainError);
  EXPECT_THROW(Evidence(std::numeric_limits<double>::quiet_NaN(), 1.0), DomainError);
}

TEST(Evidence, ScaledAndTotal) {
  const Evidence e(3.0, 1.5);
  EXPECT_DOUBLE_EQ(e.total(), 4.5);
  EXPECT_EQ(e.scaled(2.0), Evidence(6.0, 3.0));
  EXPECT_EQ(e.scaled(0.0), Evidence());
  EXPECT_THROW(e.scaled(-1.0), DomainError);
}

TEST(Belief, ValidatesComponents) {
  EXPECT_NO_THROW(Belief(0.2, 0.3, 0.5));
  EXPECT_NO_THROW(Belief(1.0, 0.0, 0.0));
  EXPECT_THROW(Belief(0.5, 0.5, 0.5), DomainError);
  EXPECT_THROW(Belief(-0.1, 0.6, 0.5), DomainError);
  EXPECT_THROW(Belief(1.2, -0.1, -0.1), DomainError);
  const Belief vacuous;
  EXPECT_EQ(vacuous.u(), 1.0);
  EXPECT_EQ(vacuous.certainty(), 0.0);
}

TEST(Belief, ClampsRoundingNoise) {
  const Belief t(0.7, 0.3 + 1e-12, -1e-12);
  EXPECT_EQ(t.u(), 0.0);
}

TEST(ExpectedQuality, Examples) {
  EXPECT_EQ(expected_quality(Evidence()), 0.5);
  EXPECT_DOUBLE_EQ(expected_quality(Evidence(8.0, 2.0)), 0.8);
  EXPECT_DOUBLE_EQ(expected_quality(Evidence(0.0, 5.0)), 0.0);
}

TEST(Pcdf, Examples) {
  EXPECT_NEAR(pcdf(Evidence(), 0.3), 1.0, 1e-12);
  EXPECT_NEAR(pcdf(Evidence(1.0, 0.0), 0.3), 0.6, 1e-12);
  EXPECT_NEAR(pcdf(Evidence(2.0, 3.0), 0.4), 60.0 * 0.16 * 0.216, 1e-10);
  EXPECT_THROW(pcdf(Evidence(1.0, 1.0), 0.0), DomainError);
  EXPECT_THROW(pcdf(Evidence(1.0, 1.0), 1.0), DomainError);
  EXPECT_THROW(log_pcdf(Evidence(1.0, 1.0), 1.5), DomainError);
  EXPECT_EQ(log_pcdf(Evidence(1.0, 1.0), 0.0), -std::numeric_limits<double>::infinity());
}

TEST(Pcdf, IntegratesToOne) {
  oracle::Gen gen(21);
  for (int i = 0; i < 60; ++i) {
    const Evidence e = gen.evidence(0.01, 5000.0);
    SCOPED_TRACE(testing::Message() << e.r() << "," << e.s());
    auto f = [&](double x) { return std::exp(log_pcdf(e, x)); };
    EXPECT_NEAR(integrate(f, oracle::bulk_points(e.r(), e.s()), oracle::fine(1e-10)), 1.0, 1e-7);
  }
}

TEST(Certainty, Examples) {
  EXPECT_EQ(certainty(Evidence()), 0.0);
  EXPECT_NEAR(certainty(Evidence(0.0, 1.0)), 0.25, 1e-9);
  EXPECT_NEAR(certainty(Evidence(1.0, 0.0)), 0.25, 1e-9);
  EXPECT_NEAR(certainty(Evidence(1.0, 1.0)), 0.19245, 1e-5);  // 1/(3√3)
  EXPECT_NEAR(certainty(Evidence(1.0, 1.0)), 1.0 / (3.0 * std::sqrt(3.0)), 1e-9);
  EXPECT_NEAR(certainty(Evidence(2.0, 1.0)), 0.27152, 1e-5);
  EXPECT_NEAR(certainty(Evidence(5.0, 5.0)), 0.445188, 1e-6);
  EXPECT_NEAR(certainty(Evidence(19.0, 6.0)), 0.635522, 1e-6);
  EXPECT_NEAR(certainty(Evidence(190.0, 60.0)), 0.855200, 1e-6);
  EXPECT_NEAR(certainty(Evidence(800.0, 200.0)), 0.925051, 1e-6);
  EXPECT_NEAR(certainty(Evidence(1000.0, 1000.0)), 0.932788, 1e-6);
}

TEST(Certainty, OneSidedEvidenceMatchesClosedForm) {
  for (double n : {1.0, 2.0, 10.0, 37.5, 100.0, 1000.0, 1e5}) {
    SCOPED_TRACE(n);
    EXPECT_NEAR(certainty(Evidence(0.0, n)), certainty_zero_r(n), 1e-9);
    EXPECT_NEAR(certainty(Evidence(n, 0.0)), certainty_zero_r(n), 1e-9);
  }
  EXPECT_NEAR(certainty(Evidence(0.0, 10.0)), 0.715267, 1e-6);
  EXPECT_NEAR(certainty(Evidence(0.0, 100.0)), 0.945443, 1e-6);
  EXPECT_NEAR(certainty(Evidence(0.0, 1000.0)), 0.992123, 1e-6);
}

TEST(Certainty, MatchesQuadratureOracle) {
  oracle::Gen gen(22);
  for (int i = 0; i < 300; ++i) {
    const Evidence e = gen.evidence(0.01, 2000.0);
    SCOPED_TRACE(testing::Message() << e.r() << "," << e.s());
    EXPECT_NEAR(certainty(e), oracle::certainty(e), 1e-6);
  }
}

TEST(Certainty, MonotoneInTotalAtFixedRatio) {
  oracle::Gen gen(23);
  for (int i = 0; i < 200; ++i) {
    const double alpha = gen.unit();
    double prev = 0.0;
    for (double n = 0.5; n <= 1e5; n *= 1.5) {
      const double c = certainty(Evidence(alpha * n, (1.0 - alpha) * n));
      ASSERT_GE(c, prev - 1e-12) << "alpha=" << alpha << " n=" << n;
      ASSERT_LE(c, 1.0);
      prev = c;
    }
  }
}

TEST(Certainty, DecreasesWithConflictAtFixedTotal) {
  for (double n : {2.0, 10.0, 50.0, 400.0}) {
    double prev = 1.0;
    for (int k = 0; k <= 50; ++k) {
      // from one-sided towards balanced
      const double r = n * k / 100.0;
      const double c = certainty(Evidence(r, n - r));
      ASSERT_LE(c, prev + 1e-12) << "n=" << n << " r=" << r;
      prev = c;
    }
  }
}

TEST(Certainty, SymmetricInRAndS) {
  oracle::Gen gen(24);
  for (int i = 0; i < 500; ++i) {
    const Evidence e = gen.evidence(0.01, 1e5);
    ASSERT_NEAR(certainty(e), certainty(Evidence(e.s(), e.r())), 1e-10);
  }
}

TEST(ToBelief, Examples) {
  const Belief vacuous = to_belief(Evidence());
  EXPECT_EQ(vacuous.u(), 1.0);
  const Belief t = to_belief(Evidence(8.0, 2.0));
  const double c = certainty(Evidence(8.0, 2.0));
  EXPECT_NEAR(t.b(), 0.8 * c, 1e-12);
  EXPECT_NEAR(t.d(), 0.2 * c, 1e-12);
  EXPECT_NEAR(t.u(), 1.0 - c, 1e-12);
}

TEST(FromBelief, Examples) {
  EXPECT_EQ(from_belief(Belief()), Evidence());
  const Evidence e = from_belief(Belief(0.0, 0.25, 0.75));
  EXPECT_NEAR(e.r(), 0.0, 1e-12);
  EXPECT_NEAR(e.s(), 1.0, 1e-7);
}

TEST(FromBelief, RoundTripsEvidence) {
  oracle::Gen gen(25);
  for (int i = 0; i < 300; ++i) {
    const Evidence e = gen.evidence(0.05, 5e4);
    SCOPED_TRACE(testing::Message() << e.r() << "," << e.s());
    const Evidence back = from_belief(to_belief(e));
    EXPECT_NEAR(back.total() / e.total(), 1.0, 1e-6);
    EXPECT_NEAR(expected_quality(back), expected_quality(e), 1e-12);
  }
}

TEST(FromBelief, RoundTripsBelief) {
  oracle::Gen gen(26);
  for (int i = 0; i < 200; ++i) {
    const double c = gen.uniform(0.0, 0.98);
    const double alpha = gen.unit();
    const Belief t(alpha * c, (1.0 - alpha) * c, 1.0 - c);
    const Belief back = to_belief(from_belief(t));
    EXPECT_NEAR(back.b(), t.b(), 1e-9);
    EXPECT_NEAR(back.d(), t.d(), 1e-9);
    EXPECT_NEAR(back.u(), t.u(), 1e-9);
  }
}

TEST(FromBelief, UnreachableCertaintyIsConvergenceError) {
  try {
    from_belief(Belief(0.999999, 0.0, 0.000001));
    FAIL() << "expected ConvergenceError";
  } catch (const ConvergenceError& e) {
    EXPECT_EQ(e.best_estimate(), kMaxTotal);
  }
}

TEST(TrustJson, RendersFields) {
  const auto ev = nlohmann::json::parse(evidence_json(Evidence(3.5, 1.0)));
  EXPECT_DOUBLE_EQ(ev.at("r").get<double>(), 3.5);
  EXPECT_DOUBLE_EQ(ev.at("s").get<double>(), 1.0);
  const auto bj = nlohmann::json::parse(belief_json(Belief(0.5, 0.25, 0.25)));
  EXPECT_DOUBLE_EQ(bj.at("b").get<double>(), 0.5);
  EXPECT_DOUBLE_EQ(bj.at("d").get<double>(), 0.25);
  EXPECT_DOUBLE_EQ(bj.at("u").get<double>(), 0.25);
}
