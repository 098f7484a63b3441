#include "engset/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>

#include "engset/analytic.hpp"
#include "engset/error.hpp"
#include "engset/experiments.hpp"
#include "engset/simulation.hpp"
#include "engset/traffic_model.hpp"

namespace engset {
namespace {

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitUsage = 2;

const char* const kSubcommands[] = {"tui", "analyze", "simulate", "sweep"};

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(trim(item));
  if (!s.empty() && s.back() == ',') out.emplace_back();
  return out;
}

double parse_real(const std::string& s, const char* what) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size() || !std::isfinite(v))
    throw DomainError(std::string("invalid ") + what + " '" + s + "'");
  return v;
}

std::vector<double> parse_real_list(const std::string& s, const char* what) {
  std::vector<double> out;
  for (const std::string& item : split_commas(s)) out.push_back(parse_real(item, what));
  if (out.empty()) throw DomainError(std::string("empty ") + what + " list");
  return out;
}

std::vector<int> parse_int_list(const std::string& s, const char* what) {
  std::vector<int> out;
  for (double v : parse_real_list(s, what)) {
    if (v != std::floor(v) || v < 1 || v > 1e9) throw DomainError(std::string("invalid ") + what);
    out.push_back(static_cast<int>(v));
  }
  return out;
}

// Seeds and horizons may be written in scientific notation ("1e5").
std::uint64_t parse_seed(const std::string& s) {
  if (!s.empty() && s.find_first_not_of("0123456789") == std::string::npos) {
    errno = 0;
    const unsigned long long v = std::strtoull(s.c_str(), nullptr, 10);
    if (errno == ERANGE) throw DomainError("seed out of range");
    return v;
  }
  const double v = parse_real(s, "seed");
  if (v < 0.0 || v != std::floor(v) || v >= 0x1p64) throw DomainError("seed must be a non-negative integer");
  return static_cast<std::uint64_t>(v);
}

std::uint64_t default_seed() {
  if (const char* env = std::getenv("ENGSET_SEED")) return parse_seed(env);
  return 1;
}

std::string join_loads(const LoadVector& loads) {
  std::string out;
  char buf[64];
  for (std::size_t i = 0; i < loads.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.9g", loads[i]);
    if (i) out += ',';
    out += buf;
  }
  return out;
}

void append_rows(std::vector<SweepRow>& rows, const SweepRow& proto, double time, double call,
                 double traffic) {
  const std::pair<const char*, double> values[] = {{"time", time}, {"call", call}, {"traffic", traffic}};
  for (const auto& [metric, v] : values) {
    SweepRow row = proto;
    row.metric = metric;
    row.value = v;
    rows.push_back(std::move(row));
  }
}

SweepRow proto_row(const char* name, const LoadVector& loads, int w, std::string model) {
  SweepRow row;
  row.name = name;
  row.channels = static_cast<int>(loads.size());
  row.wavelengths = w;
  row.load = loads.total() / w;
  row.tui = tui(loads);
  row.model = std::move(model);
  return row;
}

// `--config FILE` holds `key = value` lines; each becomes `--key value`
// placed right after the subcommand so later command-line flags win.
std::vector<std::string> expand_config(const std::vector<std::string>& args) {
  std::vector<std::string> rest;
  std::string config_path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw DomainError("--config needs a file argument");
      config_path = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      config_path = args[i].substr(9);
    } else {
      rest.push_back(args[i]);
    }
  }
  if (config_path.empty()) return rest;

  std::ifstream in(config_path);
  if (!in) throw DomainError("cannot open config file '" + config_path + "'");
  std::vector<std::string> injected;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string body = trim(line.substr(0, line.find('#')));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos)
      throw DomainError(config_path + ":" + std::to_string(lineno) + ": expected 'key = value'");
    const std::string key = trim(body.substr(0, eq));
    const std::string value = trim(body.substr(eq + 1));
    if (key.empty()) throw DomainError(config_path + ":" + std::to_string(lineno) + ": empty key");
    injected.push_back("--" + key);
    injected.push_back(value);
  }

  auto pos = rest.begin();
  for (; pos != rest.end(); ++pos) {
    if (std::find(std::begin(kSubcommands), std::end(kSubcommands), *pos) != std::end(kSubcommands)) break;
  }
  if (pos == rest.end()) return rest;
  rest.insert(pos + 1, injected.begin(), injected.end());
  return rest;
}

struct TuiArgs {
  std::string loads;
  int channels = 0;
  double total = 0.0;
  double target = 0.0;
  int hot_sources = 1;
};

struct AnalyzeArgs {
  std::string loads;
  int wavelengths = 1;
  std::string model = "lcc";
};

struct SimulateArgs {
  std::string loads;
  int wavelengths = 1;
  std::string mode = "cleared";
  std::string seed;
  int reps = 10;
  std::string horizon = "1e5";
  std::string warmup;
  bool no_ci = false;
};

struct SweepArgs {
  std::string preset;
  std::string name;
  int channels = 0;
  std::string wavelengths;
  std::string load;
  std::string tui;
  std::string models;
  int hot_sources = -1;
  int reps = 0;
  std::string horizon;
  std::string warmup;
  std::string seed;
  std::string output;
};

int cmd_tui(const TuiArgs& a, bool from_loads, std::ostream& out, std::ostream& err) {
  if (from_loads) {
    std::vector<double> values = parse_real_list(a.loads, "load");
    out << format_float(tui(LoadVector(std::move(values)))) << '\n';
    return kExitOk;
  }
  try {
    out << join_loads(make_load_vector(a.channels, a.total, a.target, a.hot_sources)) << '\n';
  } catch (const InfeasibleError& e) {
    err << "error: " << e.what() << "\n";
    err << "feasible TUI range for M=" << a.channels << ", total=" << format_float(a.total)
        << ": (" << format_float(e.min_feasible_tui()) << ", 1]\n";
    return kExitUsage;
  } catch (const RangeError& e) {
    err << "error: " << e.what() << "\n";
    err << "feasible TUI range for M=" << a.channels << ": ["
        << format_float(static_cast<double>(a.hot_sources) / a.channels) << ", 1]\n";
    return kExitUsage;
  }
  return kExitOk;
}

int cmd_analyze(const AnalyzeArgs& a, std::ostream& out) {
  const LoadVector loads(parse_real_list(a.loads, "load"));
  std::vector<SweepRow> rows;
  const SweepRow proto = proto_row("analyze", loads, a.wavelengths, a.model);
  BlockingMetrics m;
  if (a.model == "lcc") {
    m = engset_lcc(loads, a.wavelengths);
  } else if (a.model == "ofl") {
    m = engset_ofl(loads, a.wavelengths);
  } else if (a.model == "classical") {
    const int s = static_cast<int>(loads.size());
    m = engset_classical(s, loads.total() / s, a.wavelengths);
  } else if (a.model == "oracle") {
    m = ctmc_oracle(loads, a.wavelengths).second;
  } else {
    throw DomainError("unknown model '" + a.model + "' (expected lcc, ofl, classical or oracle)");
  }
  append_rows(rows, proto, m.time_congestion, m.call_congestion, m.traffic_congestion);
  write_csv(out, rows);
  return kExitOk;
}

int cmd_simulate(const SimulateArgs& a, std::ostream& out) {
  SimSpec spec;
  spec.loads = LoadVector(parse_real_list(a.loads, "load"));
  spec.wavelengths = a.wavelengths;
  spec.mode = parse_mode(a.mode);
  spec.horizon = parse_real(a.horizon, "horizon");
  if (!a.warmup.empty()) spec.warmup = parse_real(a.warmup, "warmup");
  spec.replications = a.reps;
  spec.base_seed = a.seed.empty() ? default_seed() : parse_seed(a.seed);
  if (!a.no_ci && spec.replications < 2)
    throw DomainError("confidence intervals need --reps >= 2 (pass --no-ci for point estimates)");
  spec.validate();

  const SimResult r = simulate(spec);
  const std::string model = spec.mode == SourceMode::cleared ? "sim-cleared" : "sim-held";
  const SweepRow proto = proto_row("simulate", spec.loads, spec.wavelengths, model);
  std::vector<SweepRow> rows;
  auto push = [&](const char* metric, const Estimate& e, std::string note) {
    SweepRow row = proto;
    row.metric = metric;
    row.value = e.mean;
    if (!a.no_ci) row.ci_half_width = e.half_width;
    row.note = std::move(note);
    rows.push_back(std::move(row));
  };
  push("time", r.time_congestion, "");
  push("call", r.call_congestion, "");
  push("traffic", r.traffic_congestion, "");
  for (std::size_t i = 0; i < spec.loads.size(); ++i) {
    const std::string note = "source=" + std::to_string(i + 1);
    push("call", r.per_source_call[i], note);
    push("traffic", r.per_source_traffic[i], note);
  }
  write_csv(out, rows);
  return kExitOk;
}

int cmd_sweep(const SweepArgs& a, std::ostream& out) {
  SweepSpec spec;
  if (!a.preset.empty()) {
    spec = preset(a.preset);
  } else if (a.channels < 1) {
    throw DomainError("sweep needs --preset or --m");
  }
  if (a.channels > 0) spec.channels = a.channels;
  if (!a.name.empty()) spec.name = a.name;
  if (!a.wavelengths.empty()) spec.wavelengths = parse_int_list(a.wavelengths, "W");
  if (!a.load.empty()) spec.load_per_wavelength = parse_real(a.load, "A");
  if (!a.tui.empty()) spec.tui_grid = a.tui == "auto" ? std::vector<double>{} : parse_real_list(a.tui, "TUI");
  if (!a.models.empty()) spec.models = parse_model_list(a.models);
  if (a.hot_sources >= 0) spec.hot_sources = a.hot_sources;
  if (a.reps > 0) spec.replications = a.reps;
  if (!a.horizon.empty()) spec.horizon = parse_real(a.horizon, "horizon");
  if (!a.warmup.empty()) spec.warmup = parse_real(a.warmup, "warmup");
  spec.base_seed = a.seed.empty() ? default_seed() : parse_seed(a.seed);
  spec.validate();

  const std::vector<SweepRow> rows = run_sweep(spec);
  if (a.output.empty()) {
    write_csv(out, rows);
  } else {
    std::ofstream file(a.output, std::ios::binary);
    if (!file) throw DomainError("cannot write '" + a.output + "'");
    write_csv(file, rows);
  }
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  try {
    const std::vector<std::string> args = expand_config(raw_args);

    CLI::App app{"Engset loss analysis of a tagged output link under asymmetric on/off traffic", "engset"};
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all");
    app.add_option("--config", "File of 'key = value' lines, overridden by flags");

    TuiArgs ta;
    auto* tui_cmd = app.add_subcommand("tui", "Compute a TUI or synthesise loads for a target TUI");
    auto* t_loads = tui_cmd->add_option("--loads", ta.loads, "Comma-separated channel loads");
    auto* t_m = tui_cmd->add_option("--m", ta.channels, "Number of input channels")->check(CLI::PositiveNumber);
    auto* t_total = tui_cmd->add_option("--total", ta.total, "Total offered load");
    auto* t_target = tui_cmd->add_option("--tui", ta.target, "Target TUI");
    tui_cmd->add_option("--hot-sources", ta.hot_sources, "Size of the hot group")->check(CLI::PositiveNumber);
    t_loads->excludes(t_m)->excludes(t_total)->excludes(t_target);
    t_m->needs(t_total)->needs(t_target);

    AnalyzeArgs aa;
    auto* analyze_cmd = app.add_subcommand("analyze", "Evaluate an analytic model");
    analyze_cmd->add_option("--loads", aa.loads, "Comma-separated channel loads")->required();
    analyze_cmd->add_option("--w", aa.wavelengths, "Output wavelengths")->check(CLI::PositiveNumber);
    analyze_cmd->add_option("--model", aa.model, "lcc | ofl | classical | oracle")
        ->check(CLI::IsMember({"lcc", "ofl", "classical", "oracle"}));

    SimulateArgs sa;
    auto* sim_cmd = app.add_subcommand("simulate", "Discrete-event simulation with replications");
    sim_cmd->add_option("--loads", sa.loads, "Comma-separated channel loads")->required();
    sim_cmd->add_option("--w", sa.wavelengths, "Output wavelengths")->check(CLI::PositiveNumber);
    sim_cmd->add_option("--mode", sa.mode, "cleared | held")->check(CLI::IsMember({"cleared", "held"}));
    sim_cmd->add_option("--seed", sa.seed, "Base seed (default $ENGSET_SEED or 1)");
    sim_cmd->add_option("--reps", sa.reps, "Independent replications")->check(CLI::PositiveNumber);
    sim_cmd->add_option("--horizon", sa.horizon, "Simulated time per replication");
    sim_cmd->add_option("--warmup", sa.warmup, "Discarded initial time (default 10% of horizon)");
    sim_cmd->add_flag("--no-ci", sa.no_ci, "Point estimates only");

    SweepArgs wa;
    auto* sweep_cmd = app.add_subcommand("sweep", "Run a TUI/W sweep and print CSV rows");
    sweep_cmd->add_option("--preset", wa.preset, "fig3 | fig4 | fig5a | fig5b | fig6");
    sweep_cmd->add_option("--name", wa.name, "Value of the name column");
    sweep_cmd->add_option("--m", wa.channels, "Number of input channels")->check(CLI::PositiveNumber);
    sweep_cmd->add_option("--w", wa.wavelengths, "Comma-separated wavelength counts");
    sweep_cmd->add_option("--a", wa.load, "Load per wavelength");
    sweep_cmd->add_option("--tui", wa.tui, "Comma-separated TUI grid or 'auto'");
    sweep_cmd->add_option("--models", wa.models, "Comma-separated models");
    sweep_cmd->add_option("--hot-sources", wa.hot_sources, "Hot-group size, 0 = smallest feasible")
        ->check(CLI::NonNegativeNumber);
    sweep_cmd->add_option("--reps", wa.reps, "Simulation replications")->check(CLI::PositiveNumber);
    sweep_cmd->add_option("--horizon", wa.horizon, "Simulated time per replication");
    sweep_cmd->add_option("--warmup", wa.warmup, "Discarded initial time");
    sweep_cmd->add_option("--seed", wa.seed, "Base seed (default $ENGSET_SEED or 1)");
    sweep_cmd->add_option("--output", wa.output, "Write CSV to a file instead of standard output");

    std::vector<const char*> argv{"engset"};
    for (const std::string& s : args) argv.push_back(s.c_str());
    try {
      app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
      const int code = app.exit(e, out, err);
      return code == 0 ? kExitOk : kExitUsage;
    }

    if (*tui_cmd) {
      if (t_loads->count() == 0 && t_m->count() == 0)
        throw DomainError("tui needs --loads or --m/--total/--tui");
      return cmd_tui(ta, t_loads->count() > 0, out, err);
    }
    if (*analyze_cmd) return cmd_analyze(aa, out);
    if (*sim_cmd) return cmd_simulate(sa, out);
    if (*sweep_cmd) return cmd_sweep(wa, out);
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
}

}  // namespace engset
