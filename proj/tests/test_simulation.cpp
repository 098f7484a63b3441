#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "engset/analytic.hpp"
#include "engset/error.hpp"
#include "engset/simulation.hpp"

using namespace engset;

namespace {

SimSpec spec_for(std::vector<double> loads, int w, SourceMode mode, double horizon = 2e4) {
  SimSpec s{.loads = LoadVector(std::move(loads)), .wavelengths = w, .mode = mode, .horizon = horizon};
  s.replications = 10;
  s.base_seed = 7;
  return s;
}

double hw(const Estimate& e) { return e.half_width.value_or(0.0); }

}  // namespace

TEST(Simulation, DeterministicForFixedSeed) {
  const SimSpec s = spec_for({0.7, 0.1, 0.3}, 1, SourceMode::cleared);
  EXPECT_EQ(simulate(s), simulate(s));
  SimSpec other = s;
  other.base_seed = 8;
  EXPECT_NE(simulate(s).traffic_congestion.mean, simulate(other).traffic_congestion.mean);
}

TEST(Simulation, IndependentOfThreadCount) {
  SimSpec s = spec_for({0.5, 0.2, 0.6, 0.1}, 2, SourceMode::held);
  s.threads = 1;
  const SimResult serial = simulate(s);
  s.threads = 4;
  EXPECT_EQ(simulate(s), serial);
  EXPECT_EQ(simulate_replication(s, 3), serial.replications[3]);
}

TEST(Simulation, LoneActiveSourceIsNeverBlocked) {
  for (SourceMode mode : {SourceMode::cleared, SourceMode::held}) {
    const SimResult r = simulate(spec_for({0.8, 0.0}, 1, mode));
    EXPECT_EQ(r.call_congestion.mean, 0.0);
    EXPECT_EQ(r.traffic_congestion.mean, 0.0);
    EXPECT_EQ(hw(r.traffic_congestion), 0.0);
    // The single wavelength is busy whenever the source is on.
    EXPECT_NEAR(r.time_congestion.mean, 0.8, 0.01);
    for (const ReplicationRecord& rec : r.replications) EXPECT_EQ(rec.sources[1].attempts, 0u);
  }
}

TEST(Simulation, ClearedModeTracksLostCallsCleared) {
  for (const std::vector<double>& a : {std::vector<double>{0.4, 0.4}, std::vector<double>{0.7, 0.1},
                                       std::vector<double>{0.3, 0.5, 0.2, 0.6, 0.1}}) {
    const SimResult r = simulate(spec_for(a, 1, SourceMode::cleared, 5e4));
    const BlockingMetrics e = engset_lcc(LoadVector(a), 1);
    EXPECT_NEAR(r.traffic_congestion.mean, e.traffic_congestion, 3.0 * hw(r.traffic_congestion));
    EXPECT_NEAR(r.call_congestion.mean, e.call_congestion, 3.0 * hw(r.call_congestion));
    EXPECT_NEAR(r.time_congestion.mean, e.time_congestion, 3.0 * hw(r.time_congestion));
    EXPECT_LT(hw(r.traffic_congestion), 0.01);
    for (std::size_t i = 0; i < a.size(); ++i)
      EXPECT_NEAR(r.per_source_call[i].mean, e.per_source_call[i], 0.02);
  }
}

TEST(Simulation, HeldModeTracksOverflow) {
  for (const std::vector<double>& a : {std::vector<double>{0.4, 0.4}, std::vector<double>{0.7, 0.1},
                                       std::vector<double>{0.3, 0.5, 0.2, 0.6, 0.1}}) {
    for (int w : {1, 2}) {
      const SimResult r = simulate(spec_for(a, w, SourceMode::held, 5e4));
      const BlockingMetrics e = engset_ofl(LoadVector(a), w);
      const double tol = std::max(hw(r.traffic_congestion), 0.01);
      EXPECT_NEAR(r.traffic_congestion.mean, e.traffic_congestion, tol);
      EXPECT_NEAR(r.time_congestion.mean, e.time_congestion, std::max(hw(r.time_congestion), 0.01));
      EXPECT_NEAR(r.call_congestion.mean, e.call_congestion, std::max(hw(r.call_congestion), 0.01));
    }
  }
}

TEST(Simulation, HeldModeSourcesKeepTheirOfferedLoad) {
  const std::vector<double> a{0.7, 0.1, 0.45};
  const SimSpec s = spec_for(a, 1, SourceMode::held, 5e4);
  const SimResult r = simulate(s);
  for (const ReplicationRecord& rec : r.replications)
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(rec.sources[i].offered_time / rec.window, a[i], 0.02);
}

TEST(Simulation, WarmupDoesNotShiftTheEstimate) {
  SimSpec s = spec_for({0.6, 0.3, 0.2}, 1, SourceMode::cleared, 5e4);
  s.warmup = 0.0;
  const SimResult cold = simulate(s);
  s.warmup = 1e4;
  const SimResult warm = simulate(s);
  EXPECT_NEAR(cold.traffic_congestion.mean, warm.traffic_congestion.mean,
              hw(cold.traffic_congestion) + hw(warm.traffic_congestion));
}

TEST(Simulation, CountersAreConsistent) {
  for (SourceMode mode : {SourceMode::cleared, SourceMode::held}) {
    const SimResult r = simulate(spec_for({0.9, 0.5, 0.05, 0.3}, 2, mode));
    for (const ReplicationRecord& rec : r.replications) {
      EXPECT_LE(rec.link.blocked, rec.link.attempts);
      EXPECT_LE(rec.link.carried_time, rec.link.offered_time + 1e-9);
      EXPECT_GE(rec.time_congestion(), 0.0);
      EXPECT_LE(rec.time_congestion(), 1.0);
      EXPECT_DOUBLE_EQ(rec.window, 2e4 - 2e3);
      // Never more than W packets in service at once.
      EXPECT_LE(rec.link.carried_time, 2.0 * rec.window + 1e-6);
      SourceTally sum;
      for (const SourceTally& t : rec.sources) sum += t;
      EXPECT_EQ(sum.attempts, rec.link.attempts);
      EXPECT_EQ(sum.blocked, rec.link.blocked);
    }
  }
}

TEST(Simulation, SingleReplicationHasNoInterval) {
  SimSpec s = spec_for({0.4, 0.4}, 1, SourceMode::cleared);
  s.replications = 1;
  const SimResult r = simulate(s);
  EXPECT_FALSE(r.traffic_congestion.half_width.has_value());
  EXPECT_EQ(r.replications.size(), 1u);
}

TEST(Simulation, NoAttemptsAfterWarmupIsAnError) {
  SimSpec s = spec_for({1e-9}, 1, SourceMode::cleared, 10.0);
  s.replications = 2;
  EXPECT_THROW((void)simulate(s), EstimationError);
}

TEST(Simulation, RejectsInvalidSettings) {
  SimSpec s = spec_for({0.4}, 1, SourceMode::cleared);
  s.wavelengths = 0;
  EXPECT_THROW((void)simulate(s), DomainError);
  s.wavelengths = 1;
  s.warmup = s.horizon;
  EXPECT_THROW((void)simulate(s), DomainError);
  s.warmup.reset();
  s.replications = 0;
  EXPECT_THROW((void)simulate(s), DomainError);
  EXPECT_THROW((void)parse_mode("queued"), DomainError);
  EXPECT_EQ(parse_mode("held"), SourceMode::held);
  EXPECT_STREQ(mode_name(SourceMode::cleared), "cleared");
}
