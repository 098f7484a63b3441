#include "engset/traffic_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <string>

#include "engset/error.hpp"

namespace engset {
namespace {

constexpr double kTuiTolerance = 1e-10;
constexpr int kMaxBisection = 200;
constexpr double kRangeSlack = 1e-12;

// TUI of the hot-group family as a function of the hot share p.
double family_tui(int channels, int hot, double p) {
  const double m = channels;
  if (hot == channels) return 1.0;
  const double hot_part = p * p / hot;
  const double cold_part = (1.0 - p) * (1.0 - p) / (channels - hot);
  return 1.0 / (m * (hot_part + cold_part));
}

void check_family_args(int channels, double total_load, int hot_sources) {
  if (channels < 1) throw DomainError("number of input channels must be >= 1");
  if (!(total_load > 0.0) || !std::isfinite(total_load))
    throw DomainError("total load must be positive and finite");
  if (hot_sources < 1 || hot_sources > channels)
    throw DomainError("hot source count must lie in [1, M]");
}

std::string format_double(double v) {
  std::ostringstream os;
  os.precision(9);
  os << v;
  return os.str();
}

}  // namespace

LoadVector::LoadVector(std::vector<double> loads) : loads_(std::move(loads)) {
  if (loads_.empty()) throw DomainError("load vector needs at least one channel");
  for (double a : loads_) {
    if (!std::isfinite(a) || a < 0.0 || a >= 1.0)
      throw DomainError("every channel load must satisfy 0 <= A < 1, got " + format_double(a));
  }
}

double LoadVector::total() const noexcept {
  return std::accumulate(loads_.begin(), loads_.end(), 0.0);
}

bool LoadVector::has_traffic() const noexcept {
  for (double a : loads_)
    if (a > 0.0) return true;
  return false;
}

void SystemConfig::validate() const {
  if (channels < 1) throw DomainError("M must be >= 1");
  if (wavelengths < 1) throw DomainError("W must be >= 1");
  if (fibres < 1) throw DomainError("F must be >= 1");
  if (!(mu > 0.0) || !std::isfinite(mu)) throw DomainError("mu must be positive and finite");
  const long expected = wavelength_conversion ? static_cast<long>(fibres) * wavelengths : fibres;
  if (channels != expected) {
    throw DomainError(wavelength_conversion
                          ? "with wavelength conversion M must equal F*W"
                          : "without wavelength conversion M must equal F");
  }
}

double tui(const LoadVector& loads) {
  double sum = 0.0;
  double sum_sq = 0.0;
  for (double a : loads) {
    sum += a;
    sum_sq += a * a;
  }
  if (!(sum_sq > 0.0)) throw DomainError("TUI undefined for zero traffic");
  const double value = sum * sum / (static_cast<double>(loads.size()) * sum_sq);
  // Rounding can push the ratio a few ulps outside its mathematical range.
  const double floor = 1.0 / static_cast<double>(loads.size());
  return std::clamp(value, floor, 1.0);
}

double min_feasible_tui(int channels, double total_load, int hot_sources) {
  check_family_args(channels, total_load, hot_sources);
  if (total_load / channels >= 1.0) return std::numeric_limits<double>::infinity();
  const double p_max = hot_sources / total_load;
  if (p_max >= 1.0) return static_cast<double>(hot_sources) / channels;
  return family_tui(channels, hot_sources, p_max);
}

LoadVector make_load_vector(int channels, double total_load, double target_tui,
                            int hot_sources) {
  check_family_args(channels, total_load, hot_sources);
  const double lower = static_cast<double>(hot_sources) / channels;
  if (!(target_tui >= lower - kRangeSlack) || !(target_tui <= 1.0 + kRangeSlack)) {
    throw RangeError("target TUI " + format_double(target_tui) + " outside [" +
                     format_double(lower) + ", 1]");
  }
  target_tui = std::clamp(target_tui, lower, 1.0);

  if (total_load / channels >= 1.0) {
    throw InfeasibleError("per-channel load total/M = " + format_double(total_load / channels) +
                              " is not below 1 for any TUI",
                          std::numeric_limits<double>::infinity());
  }

  // Exact endpoints: the uniform vector and the pure hot group.
  if (target_tui == 1.0) {
    return LoadVector(std::vector<double>(channels, total_load / channels));
  }

  double p = 1.0;
  if (target_tui > lower) {
    double lo = lower;  // tui == 1
    double hi = 1.0;    // tui == lower
    for (int it = 0; it < kMaxBisection; ++it) {
      p = 0.5 * (lo + hi);
      const double f = family_tui(channels, hot_sources, p);
      if (std::abs(f - target_tui) <= kTuiTolerance) break;
      if (f > target_tui) {
        lo = p;
      } else {
        hi = p;
      }
    }
  }

  const double hot_load = total_load * p / hot_sources;
  if (hot_load >= 1.0) {
    const double floor = min_feasible_tui(channels, total_load, hot_sources);
    throw InfeasibleError("target TUI " + format_double(target_tui) + " needs a hot load of " +
                              format_double(hot_load) + " >= 1; feasible TUI range is (" +
                              format_double(floor) + ", 1]",
                          floor);
  }

  std::vector<double> loads(channels, hot_load);
  if (hot_sources < channels) {
    const double cold_load = total_load * (1.0 - p) / (channels - hot_sources);
    for (int i = hot_sources; i < channels; ++i) loads[i] = cold_load;
  }
  return LoadVector(std::move(loads));
}

int smallest_feasible_hot_group(int channels, double total_load, double target_tui) {
  check_family_args(channels, total_load, 1);
  double best_floor = std::numeric_limits<double>::infinity();
  for (int group = 1; group <= channels; ++group) {
    if (target_tui < static_cast<double>(group) / channels - kRangeSlack) break;
    try {
      (void)make_load_vector(channels, total_load, target_tui, group);
      return group;
    } catch (const InfeasibleError& e) {
      best_floor = std::min(best_floor, e.min_feasible_tui());
    } catch (const RangeError&) {
      break;
    }
  }
  throw InfeasibleError("no hot-group size realises TUI " + format_double(target_tui) +
                            " with every load below 1",
                        best_floor);
}

std::vector<double> arrival_intensities(const LoadVector& loads, double mu) {
  if (!(mu > 0.0) || !std::isfinite(mu)) throw DomainError("mu must be positive and finite");
  std::vector<double> out;
  out.reserve(loads.size());
  for (double a : loads) {
    if (a >= 1.0) throw DomainError("arrival intensity undefined for A >= 1");
    out.push_back(a * mu / (1.0 - a));
  }
  return out;
}

std::vector<double> offered_ratios(const LoadVector& loads) {
  return arrival_intensities(loads, 1.0);
}

}  // namespace engset
