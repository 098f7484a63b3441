#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "engset/traffic_model.hpp"

namespace engset {

enum class Model { lcc, ofl, classical, sim_cleared, sim_held };
enum class Metric { time, call, traffic };

std::string_view model_name(Model m) noexcept;
std::string_view metric_name(Metric m) noexcept;
Model parse_model(std::string_view name);
Metric parse_metric(std::string_view name);
std::vector<Model> parse_model_list(std::string_view comma_separated);

struct SweepSpec {
  std::string name = "sweep";
  int channels = 2;
  std::vector<int> wavelengths{1};
  /// Load per output wavelength; each grid point offers A * W in total.
  double load_per_wavelength = 0.5;
  /// Explicit TUI values; empty selects 0.05 steps clipped to the family's
  /// range with its lower end included.
  std::vector<double> tui_grid;
  std::vector<Model> models{Model::lcc};
  /// Hot-group size of the load family; 0 picks the smallest feasible one
  /// at each grid point.
  int hot_sources = 1;

  double horizon = 1e5;
  std::optional<double> warmup;
  int replications = 10;
  std::uint64_t base_seed = 1;

  void validate() const;
};

struct SweepRow {
  std::string name;
  int channels = 0;
  int wavelengths = 0;
  double load = 0.0;  // A column: load per wavelength
  double tui = 0.0;
  std::string model;
  std::string metric;
  std::optional<double> value;
  std::optional<double> ci_half_width;
  std::string status = "ok";
  std::string note;

  friend bool operator==(const SweepRow&, const SweepRow&) = default;
};

/// TUI values a sweep visits for one wavelength count.
std::vector<double> tui_grid_for(const SweepSpec& spec);

/// Grid (wavelengths outer, TUI inner) x models x {time, call, traffic}.
/// Points whose load vector is infeasible are emitted with status
/// "infeasible" and the minimum feasible TUI in the note.
std::vector<SweepRow> run_sweep(const SweepSpec& spec);

std::vector<std::string> preset_names();
/// Throws DomainError listing the presets when `name` is unknown.
SweepSpec preset(std::string_view name);

struct ModelError {
  std::string name;
  int channels = 0;
  int wavelengths = 0;
  double load = 0.0;
  double tui = 0.0;
  std::string metric;
  double classical = 0.0;
  double reference = 0.0;
  double absolute_error = 0.0;
  double relative_error = 0.0;
};

/// Pairs each feasible classical row with the reference model's row at the
/// same grid point and metric. Throws PairingError when one is missing.
std::vector<ModelError> traditional_model_error(const std::vector<SweepRow>& rows,
                                                std::string_view reference = "lcc",
                                                std::string_view metric = "traffic");

// CSV contract: header `name,M,W,A,tui,model,metric,value,ci_half_width,status,note`,
// floats with 9 significant digits, empty cells for absent values.
inline constexpr std::string_view kCsvHeader =
    "name,M,W,A,tui,model,metric,value,ci_half_width,status,note";

std::string format_float(double v);
void write_csv(std::ostream& out, const std::vector<SweepRow>& rows);
std::string to_csv(const std::vector<SweepRow>& rows);
std::vector<SweepRow> parse_csv(std::istream& in);

}  // namespace engset
