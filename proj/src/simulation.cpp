#include "engset/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <queue>
#include <random>
#include <thread>

#include "engset/error.hpp"
#include "engset/statistics.hpp"

namespace engset {
namespace {

struct Event {
  double time;
  std::uint64_t seq;
  int source;

  bool operator>(const Event& o) const noexcept {
    return time != o.time ? time > o.time : seq > o.seq;
  }
};

// One independent stream per (base seed, replication, source).
std::mt19937_64 make_stream(std::uint64_t base_seed, int replication, int source) {
  std::seed_seq seq{static_cast<std::uint32_t>(base_seed), static_cast<std::uint32_t>(base_seed >> 32),
                    static_cast<std::uint32_t>(replication), static_cast<std::uint32_t>(source),
                    0x656e6773u};
  return std::mt19937_64(seq);
}

double exponential(std::mt19937_64& gen, double rate) {
  const double u = static_cast<double>(gen() >> 11) * 0x1.0p-53;
  return -std::log1p(-u) / rate;
}

double ratio_or_zero(double num, double den) { return den > 0.0 ? num / den : 0.0; }

class ReplicationRun {
 public:
  ReplicationRun(const SimSpec& spec, int replication)
      : spec_(spec),
        m_(static_cast<int>(spec.loads.size())),
        w_(spec.wavelengths),
        warmup_(spec.effective_warmup()),
        horizon_(spec.horizon),
        lambda_(arrival_intensities(spec.loads, 1.0)),
        on_(m_, false),
        on_since_(m_, 0.0),
        phi_at_on_(m_, 0.0) {
    record_.sources.resize(m_);
    record_.window = horizon_ - warmup_;
    streams_.reserve(m_);
    for (int i = 0; i < m_; ++i) {
      streams_.push_back(make_stream(spec.base_seed, replication, i));
      if (lambda_[i] > 0.0) schedule(i, exponential(streams_[i], lambda_[i]));
    }
  }

  ReplicationRecord run() {
    while (!queue_.empty() && queue_.top().time < horizon_) {
      const Event ev = queue_.top();
      queue_.pop();
      advance(ev.time);
      if (on_[ev.source]) {
        depart(ev.source, ev.time);
      } else {
        attempt(ev.source, ev.time);
      }
    }
    advance(horizon_);
    for (int i = 0; i < m_; ++i)
      if (on_[i]) close_interval(i, horizon_);

    for (int i = 0; i < m_; ++i) {
      SourceTally& s = record_.sources[i];
      if (spec_.mode == SourceMode::cleared) {
        // Engset offered traffic A_i exceeds carried traffic by
        // A_i * P(i idle, all busy), which in expectation equals
        // (1 - A_i) times the traffic of its blocked attempts.
        s.offered_time = s.carried_time + (1.0 - spec_.loads[i]) * s.blocked_time;
      }
      record_.link += s;
    }
    if (record_.link.attempts == 0)
      throw EstimationError("no arrival attempts after warmup; use a longer horizon");
    return std::move(record_);
  }

 private:
  double clip(double t) const noexcept { return std::clamp(t, warmup_, horizon_); }

  void schedule(int source, double time) { queue_.push({time, seq_++, source}); }

  // Integrate the carried share and the all-busy indicator up to t.
  void advance(double t) {
    const double a = clip(last_);
    const double b = clip(t);
    if (b > a && active_ > 0) {
      const double dt = b - a;
      const double share = spec_.mode == SourceMode::held && active_ > w_
                               ? static_cast<double>(w_) / active_
                               : 1.0;
      phi_ += dt * share;
      if (active_ >= w_) record_.blocking_time += dt;
    }
    last_ = t;
  }

  void open_interval(int i, double t) {
    on_[i] = true;
    on_since_[i] = t;
    phi_at_on_[i] = phi_;
    ++active_;
  }

  void close_interval(int i, double t) {
    SourceTally& s = record_.sources[i];
    s.carried_time += phi_ - phi_at_on_[i];
    if (spec_.mode == SourceMode::held) s.offered_time += clip(t) - clip(on_since_[i]);
    on_[i] = false;
    --active_;
  }

  void attempt(int i, double t) {
    const bool counted = t >= warmup_;
    SourceTally& s = record_.sources[i];
    const bool blocked = active_ >= w_;
    const double length = exponential(streams_[i], 1.0);
    if (counted) {
      ++s.attempts;
      if (blocked) {
        ++s.blocked;
        s.blocked_time += length;
      }
    }
    if (blocked && spec_.mode == SourceMode::cleared) {
      schedule(i, t + exponential(streams_[i], lambda_[i]));
      return;
    }
    open_interval(i, t);
    schedule(i, t + length);
  }

  void depart(int i, double t) {
    close_interval(i, t);
    schedule(i, t + exponential(streams_[i], lambda_[i]));
  }

  const SimSpec& spec_;
  int m_;
  int w_;
  double warmup_;
  double horizon_;
  std::vector<double> lambda_;
  std::vector<std::mt19937_64> streams_;
  std::vector<bool> on_;
  std::vector<double> on_since_;
  std::vector<double> phi_at_on_;
  std::priority_queue<Event, std::vector<Event>, std::greater<>> queue_;
  std::uint64_t seq_ = 0;
  double last_ = 0.0;
  double phi_ = 0.0;  // integral of the per-packet carried share over the window
  int active_ = 0;    // packets in service (cleared) or sources on (held)
  ReplicationRecord record_;
};

Estimate estimate(const std::vector<double>& samples) {
  if (samples.size() < 2) return {samples.empty() ? 0.0 : samples.front(), std::nullopt};
  const ConfidenceInterval ci = confidence_interval(samples);
  return {ci.mean, ci.half_width};
}

}  // namespace

const char* mode_name(SourceMode mode) noexcept {
  return mode == SourceMode::cleared ? "cleared" : "held";
}

SourceMode parse_mode(const std::string& name) {
  if (name == "cleared") return SourceMode::cleared;
  if (name == "held") return SourceMode::held;
  throw DomainError("unknown source mode '" + name + "' (expected cleared or held)");
}

void SimSpec::validate() const {
  if (loads.size() == 0) throw DomainError("simulation needs at least one source");
  if (wavelengths < 1) throw DomainError("W must be >= 1");
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw DomainError("horizon must be positive");
  const double w = effective_warmup();
  if (!(w >= 0.0) || !(w < horizon)) throw DomainError("warmup must satisfy 0 <= warmup < horizon");
  if (replications < 1) throw DomainError("replications must be >= 1");
}

SourceTally& SourceTally::operator+=(const SourceTally& o) noexcept {
  attempts += o.attempts;
  blocked += o.blocked;
  offered_time += o.offered_time;
  carried_time += o.carried_time;
  blocked_time += o.blocked_time;
  return *this;
}

double ReplicationRecord::time_congestion() const noexcept {
  return std::clamp(ratio_or_zero(blocking_time, window), 0.0, 1.0);
}

double ReplicationRecord::call_congestion() const noexcept {
  return ratio_or_zero(static_cast<double>(link.blocked), static_cast<double>(link.attempts));
}

double ReplicationRecord::traffic_congestion() const noexcept {
  if (!(link.offered_time > 0.0)) return 0.0;
  return std::clamp(1.0 - link.carried_time / link.offered_time, 0.0, 1.0);
}

ReplicationRecord simulate_replication(const SimSpec& spec, int replication) {
  spec.validate();
  return ReplicationRun(spec, replication).run();
}

SimResult simulate(const SimSpec& spec) {
  spec.validate();
  const int reps = spec.replications;
  std::vector<ReplicationRecord> records(reps);
  std::vector<std::exception_ptr> errors(reps);

  unsigned workers = spec.threads != 0 ? spec.threads : std::thread::hardware_concurrency();
  workers = std::clamp(workers, 1u, static_cast<unsigned>(reps));
  std::atomic<int> next{0};
  auto work = [&] {
    for (int r = next++; r < reps; r = next++) {
      try {
        records[r] = ReplicationRun(spec, r).run();
      } catch (...) {
        errors[r] = std::current_exception();
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < workers; ++t) pool.emplace_back(work);
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  SimResult out;
  const std::size_t m = spec.loads.size();
  std::vector<double> time(reps), call(reps), traffic(reps);
  std::vector<std::vector<double>> src_call(m, std::vector<double>(reps));
  std::vector<std::vector<double>> src_traffic(m, std::vector<double>(reps));
  for (int r = 0; r < reps; ++r) {
    const ReplicationRecord& rec = records[r];
    time[r] = rec.time_congestion();
    call[r] = rec.call_congestion();
    traffic[r] = rec.traffic_congestion();
    for (std::size_t i = 0; i < m; ++i) {
      const SourceTally& s = rec.sources[i];
      src_call[i][r] = ratio_or_zero(static_cast<double>(s.blocked), static_cast<double>(s.attempts));
      src_traffic[i][r] =
          s.offered_time > 0.0 ? std::clamp(1.0 - s.carried_time / s.offered_time, 0.0, 1.0) : 0.0;
    }
  }
  out.time_congestion = estimate(time);
  out.call_congestion = estimate(call);
  out.traffic_congestion = estimate(traffic);
  for (std::size_t i = 0; i < m; ++i) {
    out.per_source_call.push_back(estimate(src_call[i]));
    out.per_source_traffic.push_back(estimate(src_traffic[i]));
  }
  out.replications = std::move(records);
  return out;
}

}  // namespace engset
