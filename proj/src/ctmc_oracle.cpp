#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>
#include <unordered_map>

#include "engset/analytic.hpp"
#include "engset/error.hpp"

namespace engset {
namespace {

struct Transition {
  int from;
  int to;
  double rate;
};

// All masks of `channels` bits with popcount k, ascending (Gosper's hack).
void append_combinations(int channels, int k, std::vector<std::uint64_t>& out) {
  if (k == 0) {
    out.push_back(0);
    return;
  }
  const std::uint64_t limit = channels == 64 ? 0 : (std::uint64_t{1} << channels);
  std::uint64_t v = (std::uint64_t{1} << k) - 1;
  while (v < limit) {
    out.push_back(v);
    const std::uint64_t c = v & (~v + 1);
    const std::uint64_t rr = v + c;
    v = (((rr ^ v) >> 2) / c) | rr;
  }
}

}  // namespace

std::uint64_t ctmc_state_count(int channels, int wavelengths) {
  std::uint64_t total = 0;
  std::uint64_t binom = 1;  // C(channels, k)
  const int top = std::min(channels, wavelengths);
  for (int k = 0; k <= top; ++k) {
    if (k > 0) {
      // binom * (n - k + 1) / k stays integral; guard the multiplication.
      const std::uint64_t factor = static_cast<std::uint64_t>(channels - k + 1);
      if (binom > UINT64_MAX / factor) return UINT64_MAX;
      binom = binom * factor / static_cast<std::uint64_t>(k);
    }
    if (total > UINT64_MAX - binom) return UINT64_MAX;
    total += binom;
  }
  return total;
}

std::pair<CtmcSolution, BlockingMetrics> ctmc_oracle(const LoadVector& loads, int wavelengths) {
  if (wavelengths < 1) throw DomainError("W must be >= 1");
  if (!loads.has_traffic()) throw DomainError("zero total load: congestion ratios undefined");
  const int m = static_cast<int>(loads.size());
  const std::uint64_t count = m > 63 ? UINT64_MAX : ctmc_state_count(m, wavelengths);
  if (count > kCtmcStateCap) {
    throw SizeError("CTMC oracle state space exceeds the cap of " + std::to_string(kCtmcStateCap) +
                    " states");
  }

  CtmcSolution sol;
  for (int k = 0; k <= std::min(m, wavelengths); ++k) append_combinations(m, k, sol.states);
  const int n = static_cast<int>(sol.states.size());
  std::unordered_map<std::uint64_t, int> index;
  index.reserve(sol.states.size());
  for (int s = 0; s < n; ++s) index.emplace(sol.states[s], s);

  const std::vector<double> lambda = arrival_intensities(loads, 1.0);
  constexpr double mu = 1.0;
  std::vector<Transition> transitions;
  for (int s = 0; s < n; ++s) {
    const std::uint64_t mask = sol.states[s];
    const bool admits = std::popcount(mask) < wavelengths;
    for (int i = 0; i < m; ++i) {
      const std::uint64_t bit = std::uint64_t{1} << i;
      if (mask & bit) {
        transitions.push_back({s, index.at(mask & ~bit), mu});
      } else if (admits && lambda[i] > 0.0) {
        transitions.push_back({s, index.at(mask | bit), lambda[i]});
      }
    }
  }

  // Q^T pi = 0 with the last balance equation replaced by sum(pi) = 1.
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(2 * transitions.size() + n);
  for (const Transition& t : transitions) {
    if (t.to != n - 1) triplets.emplace_back(t.to, t.from, t.rate);
    if (t.from != n - 1) triplets.emplace_back(t.from, t.from, -t.rate);
  }
  for (int s = 0; s < n; ++s) triplets.emplace_back(n - 1, s, 1.0);
  Eigen::SparseMatrix<double> a(n, n);
  a.setFromTriplets(triplets.begin(), triplets.end());
  a.makeCompressed();

  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> solver;
  solver.analyzePattern(a);
  solver.factorize(a);
  if (solver.info() != Eigen::Success) throw Error("CTMC oracle: balance system is singular");
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  rhs(n - 1) = 1.0;
  const Eigen::VectorXd pi = solver.solve(rhs);
  sol.stationary.assign(pi.data(), pi.data() + n);

  std::vector<double> residual(n, 0.0);
  for (const Transition& t : transitions) {
    residual[t.to] += sol.stationary[t.from] * t.rate;
    residual[t.from] -= sol.stationary[t.from] * t.rate;
  }
  for (double v : residual) sol.balance_residual = std::max(sol.balance_residual, std::abs(v));

  // Metrics by direct summation over states.
  BlockingMetrics metrics;
  std::vector<double> p_off(m, 0.0);
  std::vector<double> p_off_busy(m, 0.0);
  std::vector<double> p_on(m, 0.0);
  for (int s = 0; s < n; ++s) {
    const std::uint64_t mask = sol.states[s];
    const double p = sol.stationary[s];
    const bool full = std::popcount(mask) == wavelengths;
    if (full) metrics.time_congestion += p;
    for (int i = 0; i < m; ++i) {
      if (mask & (std::uint64_t{1} << i)) {
        p_on[i] += p;
      } else {
        p_off[i] += p;
        if (full) p_off_busy[i] += p;
      }
    }
  }

  metrics.per_source_call.resize(m);
  metrics.per_source_traffic.resize(m);
  double blocked_rate = 0.0;
  double attempt_rate = 0.0;
  double carried = 0.0;
  for (int i = 0; i < m; ++i) {
    metrics.per_source_call[i] = p_off[i] > 0.0 ? p_off_busy[i] / p_off[i] : 0.0;
    metrics.per_source_traffic[i] =
        loads[i] > 0.0 ? (loads[i] - p_on[i]) / loads[i] : metrics.per_source_call[i];
    blocked_rate += lambda[i] * p_off_busy[i];
    attempt_rate += lambda[i] * p_off[i];
    carried += p_on[i];
  }
  metrics.call_congestion = attempt_rate > 0.0 ? blocked_rate / attempt_rate : 0.0;
  metrics.traffic_congestion = (loads.total() - carried) / loads.total();
  return {std::move(sol), std::move(metrics)};
}

}  // namespace engset
