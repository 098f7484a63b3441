#include "engset/experiments.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <tuple>

#include "engset/analytic.hpp"
#include "engset/error.hpp"
#include "engset/simulation.hpp"

namespace engset {
namespace {

constexpr double kGridStep = 0.05;

struct Value {
  double value;
  std::optional<double> ci;
};

struct Triple {
  Value time, call, traffic;
};

Triple from_metrics(const BlockingMetrics& m) {
  return {{m.time_congestion, {}}, {m.call_congestion, {}}, {m.traffic_congestion, {}}};
}

Triple evaluate(const SweepSpec& spec, Model model, const LoadVector& loads, int w) {
  switch (model) {
    case Model::lcc: return from_metrics(engset_lcc(loads, w));
    case Model::ofl: return from_metrics(engset_ofl(loads, w));
    case Model::classical: {
      // The traditional model sees only the total: M equal sources.
      const int m = static_cast<int>(loads.size());
      return from_metrics(engset_classical(m, loads.total() / m, w));
    }
    case Model::sim_cleared:
    case Model::sim_held: {
      SimSpec sim;
      sim.loads = loads;
      sim.wavelengths = w;
      sim.mode = model == Model::sim_cleared ? SourceMode::cleared : SourceMode::held;
      sim.horizon = spec.horizon;
      sim.warmup = spec.warmup;
      sim.replications = spec.replications;
      sim.base_seed = spec.base_seed;
      const SimResult r = simulate(sim);
      return {{r.time_congestion.mean, r.time_congestion.half_width},
              {r.call_congestion.mean, r.call_congestion.half_width},
              {r.traffic_congestion.mean, r.traffic_congestion.half_width}};
    }
  }
  throw Error("unhandled model");
}

SweepRow base_row(const SweepSpec& spec, int w, double tui_value, Model model, Metric metric) {
  SweepRow row;
  row.name = spec.name;
  row.channels = spec.channels;
  row.wavelengths = w;
  row.load = spec.load_per_wavelength;
  row.tui = tui_value;
  row.model = std::string(model_name(model));
  row.metric = std::string(metric_name(metric));
  return row;
}

constexpr Metric kMetrics[] = {Metric::time, Metric::call, Metric::traffic};

}  // namespace

std::string_view model_name(Model m) noexcept {
  switch (m) {
    case Model::lcc: return "lcc";
    case Model::ofl: return "ofl";
    case Model::classical: return "classical";
    case Model::sim_cleared: return "sim-cleared";
    case Model::sim_held: return "sim-held";
  }
  return "?";
}

std::string_view metric_name(Metric m) noexcept {
  switch (m) {
    case Metric::time: return "time";
    case Metric::call: return "call";
    case Metric::traffic: return "traffic";
  }
  return "?";
}

Model parse_model(std::string_view name) {
  for (Model m : {Model::lcc, Model::ofl, Model::classical, Model::sim_cleared, Model::sim_held})
    if (name == model_name(m)) return m;
  throw DomainError("unknown model '" + std::string(name) +
                    "' (expected lcc, ofl, classical, sim-cleared or sim-held)");
}

Metric parse_metric(std::string_view name) {
  for (Metric m : kMetrics)
    if (name == metric_name(m)) return m;
  throw DomainError("unknown metric '" + std::string(name) + "'");
}

std::vector<Model> parse_model_list(std::string_view list) {
  std::vector<Model> out;
  std::size_t start = 0;
  while (start <= list.size()) {
    const std::size_t comma = list.find(',', start);
    const std::string_view item =
        list.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
    out.push_back(parse_model(item));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

void SweepSpec::validate() const {
  if (channels < 1) throw DomainError("M must be >= 1");
  if (wavelengths.empty()) throw DomainError("sweep needs at least one W");
  for (int w : wavelengths)
    if (w < 1) throw DomainError("W must be >= 1");
  if (!(load_per_wavelength > 0.0) || !std::isfinite(load_per_wavelength))
    throw DomainError("A must be positive");
  if (models.empty()) throw DomainError("sweep needs at least one model");
  if (hot_sources < 0 || hot_sources > channels) throw DomainError("hot sources must lie in [0, M]");
  if (!(horizon > 0.0)) throw DomainError("horizon must be positive");
  if (warmup && !(*warmup >= 0.0 && *warmup < horizon))
    throw DomainError("warmup must satisfy 0 <= warmup < horizon");
  if (replications < 1) throw DomainError("replications must be >= 1");
  for (double t : tui_grid)
    if (!std::isfinite(t)) throw DomainError("TUI grid values must be finite");
}

std::vector<double> tui_grid_for(const SweepSpec& spec) {
  if (!spec.tui_grid.empty()) return spec.tui_grid;
  const double lower = static_cast<double>(std::max(spec.hot_sources, 1)) / spec.channels;
  std::vector<double> grid{lower};
  const int steps = static_cast<int>(std::lround(1.0 / kGridStep));
  for (int k = 1; k <= steps; ++k) {
    const double t = static_cast<double>(k) / steps;
    if (t > lower + 1e-12) grid.push_back(t);
  }
  return grid;
}

std::vector<SweepRow> run_sweep(const SweepSpec& spec) {
  spec.validate();
  std::vector<SweepRow> rows;
  const std::vector<double> grid = tui_grid_for(spec);
  for (int w : spec.wavelengths) {
    const double total = spec.load_per_wavelength * w;
    for (double t : grid) {
      std::optional<LoadVector> loads;
      std::string note;
      int hot = spec.hot_sources;
      try {
        if (hot == 0) hot = smallest_feasible_hot_group(spec.channels, total, t);
        loads = make_load_vector(spec.channels, total, t, hot);
        if (hot != 1) note = "hot_sources=" + std::to_string(hot);
      } catch (const InfeasibleError& e) {
        note = "min_feasible_tui=" + format_float(e.min_feasible_tui());
      } catch (const RangeError& e) {
        note = e.what();
      }
      for (Model model : spec.models) {
        if (!loads) {
          for (Metric metric : kMetrics) {
            SweepRow row = base_row(spec, w, t, model, metric);
            row.status = "infeasible";
            row.note = note;
            rows.push_back(std::move(row));
          }
          continue;
        }
        const Triple v = evaluate(spec, model, *loads, w);
        for (Metric metric : kMetrics) {
          const Value& x = metric == Metric::time ? v.time : metric == Metric::call ? v.call : v.traffic;
          SweepRow row = base_row(spec, w, t, model, metric);
          row.value = x.value;
          row.ci_half_width = x.ci;
          row.note = note;
          rows.push_back(std::move(row));
        }
      }
    }
  }
  return rows;
}

std::vector<std::string> preset_names() { return {"fig3", "fig4", "fig5a", "fig5b", "fig6"}; }

SweepSpec preset(std::string_view name) {
  SweepSpec s;
  s.name = std::string(name);
  if (name == "fig3" || name == "fig4") {
    s.channels = 2;
    s.wavelengths = {1};
    s.load_per_wavelength = 0.8;
    s.models = name == "fig3" ? std::vector<Model>{Model::lcc, Model::sim_cleared}
                              : std::vector<Model>{Model::ofl, Model::sim_held};
  } else if (name == "fig5a" || name == "fig5b") {
    s.channels = name == "fig5a" ? 8 : 16;
    s.wavelengths = {name == "fig5a" ? 1 : 4};
    s.load_per_wavelength = 0.5;
    s.models = {Model::lcc, Model::classical, Model::sim_cleared};
  } else if (name == "fig6") {
    s.channels = 32;
    s.wavelengths = {1, 2, 4, 8, 16};
    s.load_per_wavelength = 0.5;
    s.tui_grid = {0.6, 1.0};
    s.models = {Model::classical, Model::lcc, Model::sim_cleared};
  } else {
    std::string list;
    for (const std::string& p : preset_names()) list += (list.empty() ? "" : ", ") + p;
    throw DomainError("unknown preset '" + std::string(name) + "' (available: " + list + ")");
  }
  return s;
}

std::vector<ModelError> traditional_model_error(const std::vector<SweepRow>& rows,
                                                std::string_view reference, std::string_view metric) {
  using Key = std::tuple<std::string, int, int, double, double, std::string>;
  std::map<Key, const SweepRow*> refs;
  for (const SweepRow& r : rows)
    if (r.model == reference && r.status == "ok" && r.value)
      refs.emplace(Key{r.name, r.channels, r.wavelengths, r.load, r.tui, r.metric}, &r);

  std::vector<ModelError> out;
  for (const SweepRow& r : rows) {
    if (r.model != "classical" || r.metric != metric || r.status != "ok" || !r.value) continue;
    const auto it = refs.find(Key{r.name, r.channels, r.wavelengths, r.load, r.tui, r.metric});
    if (it == refs.end()) {
      throw PairingError("no " + std::string(reference) + " row for " + r.name + " M=" +
                         std::to_string(r.channels) + " W=" + std::to_string(r.wavelengths) +
                         " A=" + format_float(r.load) + " tui=" + format_float(r.tui) + " metric=" +
                         r.metric);
    }
    ModelError e;
    e.name = r.name;
    e.channels = r.channels;
    e.wavelengths = r.wavelengths;
    e.load = r.load;
    e.tui = r.tui;
    e.metric = r.metric;
    e.classical = *r.value;
    e.reference = *it->second->value;
    e.absolute_error = std::abs(e.classical - e.reference);
    e.relative_error = e.reference > 0.0 ? e.absolute_error / e.reference
                       : e.absolute_error == 0.0 ? 0.0
                                                 : std::numeric_limits<double>::infinity();
    out.push_back(std::move(e));
  }
  return out;
}

}  // namespace engset
