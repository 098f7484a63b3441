#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "engset/traffic_model.hpp"

namespace engset {

/// How a source reacts when it finds all W wavelengths occupied.
///  - cleared: the attempt is lost and the source starts a fresh idle
///    period (the lost-calls-cleared Engset system).
///  - held: the source transmits its packet regardless; at every instant at
///    most W of the N active packets are carried and the excess is lost
///    (the overflow system).
enum class SourceMode { cleared, held };

const char* mode_name(SourceMode mode) noexcept;
SourceMode parse_mode(const std::string& name);

struct SimSpec {
  LoadVector loads;
  int wavelengths = 1;
  SourceMode mode = SourceMode::cleared;
  double horizon = 1e5;           // simulated time, units of 1/mu
  std::optional<double> warmup;   // defaults to 10% of the horizon
  int replications = 10;
  std::uint64_t base_seed = 1;
  /// Worker threads for replications; 0 picks hardware concurrency.
  unsigned threads = 0;

  double effective_warmup() const noexcept { return warmup.value_or(0.1 * horizon); }
  void validate() const;
};

/// Post-warmup counters of one source (or of the whole link).
struct SourceTally {
  std::uint64_t attempts = 0;
  std::uint64_t blocked = 0;
  double offered_time = 0.0;  // offered traffic, Engset convention
  double carried_time = 0.0;
  double blocked_time = 0.0;  // full durations of the blocked packets

  SourceTally& operator+=(const SourceTally& o) noexcept;
  friend bool operator==(const SourceTally&, const SourceTally&) = default;
};

struct ReplicationRecord {
  SourceTally link;
  std::vector<SourceTally> sources;
  double window = 0.0;      // horizon - warmup
  double blocking_time = 0.0;  // time with every wavelength occupied

  double time_congestion() const noexcept;
  double call_congestion() const noexcept;
  double traffic_congestion() const noexcept;

  friend bool operator==(const ReplicationRecord&, const ReplicationRecord&) = default;
};

struct Estimate {
  double mean = 0.0;
  std::optional<double> half_width;  // 95% Student-t, absent for one replication

  friend bool operator==(const Estimate&, const Estimate&) = default;
};

struct SimResult {
  std::vector<ReplicationRecord> replications;
  Estimate time_congestion;
  Estimate call_congestion;
  Estimate traffic_congestion;
  std::vector<Estimate> per_source_call;
  std::vector<Estimate> per_source_traffic;

  friend bool operator==(const SimResult&, const SimResult&) = default;
};

/// Event-driven simulation of M exponential on/off sources contending for W
/// wavelengths, packet lengths Exp(1). Each replication is deterministic in
/// (base_seed, replication index) and uses one random stream per source.
SimResult simulate(const SimSpec& spec);

/// A single replication; exposed for tests and tooling.
ReplicationRecord simulate_replication(const SimSpec& spec, int replication);

}  // namespace engset
