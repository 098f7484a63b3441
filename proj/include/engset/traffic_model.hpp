#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace engset {

/// Normalized offered load A_i of each input channel feeding the tagged
/// output link. Every entry lies in [0, 1); zero entries are silent sources.
class LoadVector {
 public:
  LoadVector() = default;
  explicit LoadVector(std::vector<double> loads);

  std::span<const double> values() const noexcept { return loads_; }
  std::size_t size() const noexcept { return loads_.size(); }
  double operator[](std::size_t i) const { return loads_[i]; }
  double total() const noexcept;
  bool has_traffic() const noexcept;

  auto begin() const noexcept { return loads_.begin(); }
  auto end() const noexcept { return loads_.end(); }

  friend bool operator==(const LoadVector&, const LoadVector&) = default;

 private:
  std::vector<double> loads_;
};

/// Tagged output link description. Solvers only consume `channels` and
/// `wavelengths`; the fibre count documents where M came from.
struct SystemConfig {
  int channels = 1;                    // M
  int wavelengths = 1;                 // W
  int fibres = 1;                      // F
  bool wavelength_conversion = false;  // M = F*W when set, M = F otherwise
  double mu = 1.0;

  void validate() const;
};

/// Time, call and traffic congestion of one model evaluation. Traffic
/// congestion is the packet loss ratio.
struct BlockingMetrics {
  double time_congestion = 0.0;
  double call_congestion = 0.0;
  double traffic_congestion = 0.0;
  std::vector<double> per_source_call;
  std::vector<double> per_source_traffic;
};

/// Traffic uniformity index (sum A)^2 / (M * sum A^2), in [1/M, 1].
double tui(const LoadVector& loads);

/// One hot-spot load family: `hot_sources` channels share a fraction p of
/// `total_load` equally and the remaining channels split 1 - p equally.
/// p is found by bisection so that tui(result) == target_tui. With the
/// default single hot source the family spans the whole range [1/M, 1].
LoadVector make_load_vector(int channels, double total_load, double target_tui,
                            int hot_sources = 1);

/// Infimum of TUI values reachable by the hot-group family while keeping
/// each hot load below 1. Returns hot_sources/M when the whole range is
/// feasible.
double min_feasible_tui(int channels, double total_load, int hot_sources = 1);

/// Smallest hot-group size for which make_load_vector(channels, total_load,
/// target_tui, group) is feasible. Throws InfeasibleError when none is.
int smallest_feasible_hot_group(int channels, double total_load, double target_tui);

/// lambda_i = A_i * mu / (1 - A_i).
std::vector<double> arrival_intensities(const LoadVector& loads, double mu = 1.0);

/// r_i = A_i / (1 - A_i), the product-form weight of each source.
std::vector<double> offered_ratios(const LoadVector& loads);

}  // namespace engset
