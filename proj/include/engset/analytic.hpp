#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "engset/traffic_model.hpp"

namespace engset {

/// probs[k] = P(k sources active), k = 0..K.
struct OccupancyDistribution {
  std::vector<double> probs;

  double mean() const noexcept;
};

/// Stationary law of the explicit lost-calls-cleared chain. Bit i of a state
/// mask is set when source i is transmitting.
struct CtmcSolution {
  std::vector<std::uint64_t> states;
  std::vector<double> stationary;
  double balance_residual = 0.0;  // max-norm of pi * Q
};

/// Largest state count ctmc_oracle() accepts.
inline constexpr std::uint64_t kCtmcStateCap = 200'000;

/// Heterogeneous Engset lost-calls-cleared system: a blocked source goes
/// back to its idle period. The stationary law is the truncated product form
/// pi(S) ~ prod_{i in S} r_i over |S| <= W, evaluated through elementary
/// symmetric polynomials of the r_i with power-of-two renormalisation, so
/// M in the thousands stays finite.
BlockingMetrics engset_lcc(const LoadVector& loads, int wavelengths);

/// P(k busy wavelengths) under the lost-calls-cleared law, k = 0..W.
OccupancyDistribution lcc_occupancy(const LoadVector& loads, int wavelengths);

/// Overflow model: sources are independent on/off processes with P(on) = A_i
/// and whatever exceeds W simultaneous packets is lost. Loss is
/// E[(N - W)+] / E[N] for the Poisson-binomial count N.
BlockingMetrics engset_ofl(const LoadVector& loads, int wavelengths);

/// Poisson-binomial law of the number of active sources, k = 0..M.
OccupancyDistribution ofl_occupancy(const LoadVector& loads);

/// Classical homogeneous Engset system with `sources` identical sources.
BlockingMetrics engset_classical(int sources, double per_source_load, int wavelengths);

/// Brute-force validator for engset_lcc: enumerates every active set of at
/// most W sources, solves global balance directly and sums the metrics
/// state by state. Throws SizeError beyond kCtmcStateCap states.
std::pair<CtmcSolution, BlockingMetrics> ctmc_oracle(const LoadVector& loads, int wavelengths);

/// Number of subsets of at most `wavelengths` out of `channels`, saturating
/// at UINT64_MAX.
std::uint64_t ctmc_state_count(int channels, int wavelengths);

}  // namespace engset
