#include <gtest/gtest.h>

#include <algorithm>
#include <sstream>

#include "engset/analytic.hpp"
#include "engset/error.hpp"
#include "engset/experiments.hpp"

using namespace engset;

namespace {

const SweepRow& find_row(const std::vector<SweepRow>& rows, int w, double tui_value, std::string_view model,
                         std::string_view metric) {
  const auto it = std::find_if(rows.begin(), rows.end(), [&](const SweepRow& r) {
    return r.wavelengths == w && std::abs(r.tui - tui_value) < 1e-12 && r.model == model && r.metric == metric;
  });
  if (it == rows.end()) throw std::runtime_error("row not found");
  return *it;
}

SweepSpec quick(SweepSpec s) {
  s.horizon = 4e3;
  s.replications = 3;
  return s;
}

}  // namespace

TEST(Sweep, TwoSourceCurveEndpoints) {
  SweepSpec s = quick(preset("fig3"));
  s.tui_grid = {0.5, 0.64, 1.0};
  const std::vector<SweepRow> rows = run_sweep(s);
  ASSERT_EQ(rows.size(), 3u * 2u * 3u);
  EXPECT_NEAR(*find_row(rows, 1, 1.0, "lcc", "traffic").value, 2.0 / 7.0, 1e-12);
  EXPECT_NEAR(*find_row(rows, 1, 0.64, "lcc", "traffic").value, 3.5 / 31.0, 1e-9);
  EXPECT_NEAR(*find_row(rows, 1, 0.5, "lcc", "traffic").value, 0.0, 1e-15);
  const SweepRow& sim = find_row(rows, 1, 0.5, "sim-cleared", "traffic");
  EXPECT_EQ(*sim.value, 0.0);
  EXPECT_EQ(*sim.ci_half_width, 0.0);
  EXPECT_TRUE(find_row(rows, 1, 1.0, "sim-cleared", "traffic").ci_half_width.has_value());
  EXPECT_FALSE(find_row(rows, 1, 1.0, "lcc", "traffic").ci_half_width.has_value());
  for (const SweepRow& r : rows) {
    EXPECT_EQ(r.name, "fig3");
    EXPECT_EQ(r.channels, 2);
    EXPECT_DOUBLE_EQ(r.load, 0.8);
    EXPECT_EQ(r.status, "ok");
  }
}

TEST(Sweep, OverflowPreset) {
  SweepSpec s = quick(preset("fig4"));
  s.tui_grid = {1.0};
  const std::vector<SweepRow> rows = run_sweep(s);
  EXPECT_NEAR(*find_row(rows, 1, 1.0, "ofl", "traffic").value, 0.2, 1e-15);
  EXPECT_NEAR(*find_row(rows, 1, 1.0, "sim-held", "traffic").value, 0.2, 0.02);
}

TEST(Sweep, AutomaticGridCoversTheFamily) {
  SweepSpec s = preset("fig5a");
  const std::vector<double> grid = tui_grid_for(s);
  EXPECT_DOUBLE_EQ(grid.front(), 1.0 / 8);
  EXPECT_DOUBLE_EQ(grid.back(), 1.0);
  EXPECT_TRUE(std::is_sorted(grid.begin(), grid.end()));
  EXPECT_EQ(grid.size(), 1u + 18u);  // 1/8, then 0.15 .. 1.0
  s.hot_sources = 3;
  EXPECT_DOUBLE_EQ(tui_grid_for(s).front(), 3.0 / 8);
}

TEST(Sweep, ClassicalEqualsLccAtUniformLoadAndInfeasiblePointsAreFlagged) {
  SweepSpec s = preset("fig6");
  s.models = {Model::classical, Model::lcc};
  const std::vector<SweepRow> rows = run_sweep(s);
  EXPECT_EQ(rows.size(), 5u * 2u * 2u * 3u);
  for (int w : {1, 2, 4, 8, 16}) {
    for (const char* metric : {"time", "call", "traffic"}) {
      EXPECT_NEAR(*find_row(rows, w, 1.0, "classical", metric).value, *find_row(rows, w, 1.0, "lcc", metric).value,
                  1e-12);
    }
  }
  const SweepRow& bad = find_row(rows, 16, 0.6, "lcc", "traffic");
  EXPECT_EQ(bad.status, "infeasible");
  EXPECT_FALSE(bad.value.has_value());
  EXPECT_EQ(bad.note.rfind("min_feasible_tui=", 0), 0u);
  EXPECT_EQ(find_row(rows, 2, 0.6, "lcc", "traffic").status, "ok");

  s.hot_sources = 0;
  const std::vector<SweepRow> adaptive = run_sweep(s);
  const SweepRow& fixed = find_row(adaptive, 16, 0.6, "lcc", "traffic");
  EXPECT_EQ(fixed.status, "ok");
  EXPECT_EQ(fixed.note, "hot_sources=3");
}

TEST(Sweep, SkewLowersLossAndClassicalIgnoresIt) {
  SweepSpec s = preset("fig5b");
  s.models = {Model::lcc, Model::classical};
  const std::vector<SweepRow> rows = run_sweep(s);
  std::vector<double> grid;
  for (double t : tui_grid_for(s))
    if (find_row(rows, 4, t, "lcc", "traffic").status == "ok") grid.push_back(t);
  ASSERT_GE(grid.size(), 10u);
  EXPECT_EQ(find_row(rows, 4, 1.0 / 16, "lcc", "traffic").status, "infeasible");
  for (std::size_t k = 1; k < grid.size(); ++k) {
    EXPECT_LT(*find_row(rows, 4, grid[k - 1], "lcc", "traffic").value,
              *find_row(rows, 4, grid[k], "lcc", "traffic").value + 1e-15);
    // The classical model is blind to the distribution.
    EXPECT_NEAR(*find_row(rows, 4, grid[k - 1], "classical", "traffic").value,
                *find_row(rows, 4, grid[k], "classical", "traffic").value, 1e-15);
  }
}

TEST(Sweep, TimeCongestionFallsAsTuiRisesOnTwoSources) {
  SweepSpec s = preset("fig3");
  s.models = {Model::lcc};
  const std::vector<SweepRow> rows = run_sweep(s);
  const std::vector<double> grid = tui_grid_for(s);
  for (std::size_t k = 1; k < grid.size(); ++k)
    EXPECT_GE(*find_row(rows, 1, grid[k - 1], "lcc", "time").value, *find_row(rows, 1, grid[k], "lcc", "time").value);
  EXPECT_NEAR(*find_row(rows, 1, 0.5, "lcc", "time").value, 0.8, 1e-12);
  EXPECT_NEAR(*find_row(rows, 1, 1.0, "lcc", "time").value, 4.0 / 7.0, 1e-12);
}

TEST(TraditionalModelError, ExamplesAndGrowth) {
  SweepSpec s = preset("fig6");
  s.models = {Model::classical, Model::lcc};
  s.tui_grid = {0.6};
  s.wavelengths = {2, 16};
  s.hot_sources = 0;
  const std::vector<ModelError> errs = traditional_model_error(run_sweep(s));
  ASSERT_EQ(errs.size(), 2u);
  EXPECT_EQ(errs[0].wavelengths, 2);
  EXPECT_EQ(errs[1].wavelengths, 16);
  EXPECT_GT(errs[1].relative_error, errs[0].relative_error);
  // Classical overestimates loss when traffic is concentrated.
  for (const ModelError& e : errs) EXPECT_GT(e.classical, e.reference);

  SweepRow classical;
  classical.name = "x";
  classical.model = "classical";
  classical.metric = "traffic";
  classical.value = 0.3;
  SweepRow ref = classical;
  ref.model = "lcc";
  ref.value = 0.2;
  const auto e = traditional_model_error({classical, ref});
  ASSERT_EQ(e.size(), 1u);
  EXPECT_NEAR(e[0].absolute_error, 0.1, 1e-15);
  EXPECT_NEAR(e[0].relative_error, 0.5, 1e-15);
  EXPECT_THROW((void)traditional_model_error({classical}), PairingError);
  ref.value = 0.0;
  classical.value = 0.0;
  EXPECT_EQ(traditional_model_error({classical, ref})[0].relative_error, 0.0);
}

TEST(Csv, RoundTripIsIdempotent) {
  SweepSpec s = quick(preset("fig6"));
  s.wavelengths = {1, 16};
  const std::vector<SweepRow> rows = run_sweep(s);
  const std::string text = to_csv(rows);
  EXPECT_EQ(text.substr(0, kCsvHeader.size()), kCsvHeader);
  std::istringstream in(text);
  const std::vector<SweepRow> back = parse_csv(in);
  ASSERT_EQ(back.size(), rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(back[i].name, rows[i].name);
    EXPECT_EQ(back[i].model, rows[i].model);
    EXPECT_EQ(back[i].status, rows[i].status);
    EXPECT_EQ(back[i].note, rows[i].note);
    EXPECT_EQ(back[i].value.has_value(), rows[i].value.has_value());
    if (rows[i].value) EXPECT_NEAR(*back[i].value, *rows[i].value, 1e-8 * std::max(1.0, *rows[i].value));
    EXPECT_EQ(back[i].ci_half_width.has_value(), rows[i].ci_half_width.has_value());
  }
  EXPECT_EQ(to_csv(back), text);
}

TEST(Csv, QuotedFieldsAndFormatting) {
  SweepRow r;
  r.name = "a,\"b\"";
  r.channels = 2;
  r.wavelengths = 1;
  r.load = 0.8;
  r.tui = 0.64;
  r.model = "lcc";
  r.metric = "traffic";
  r.value = 2.0 / 7.0;
  r.note = "x, y";
  const std::string text = to_csv({r});
  EXPECT_NE(text.find("\"a,\"\"b\"\"\""), std::string::npos);
  EXPECT_NE(text.find("0.640000000"), std::string::npos);
  std::istringstream in(text);
  const auto back = parse_csv(in);
  ASSERT_EQ(back.size(), 1u);
  EXPECT_EQ(back[0].name, r.name);
  EXPECT_EQ(back[0].note, r.note);
  EXPECT_EQ(format_float(0.64), "0.640000000");
  std::istringstream bad("nope\n");
  EXPECT_THROW((void)parse_csv(bad), DomainError);
}

TEST(Sweep, PresetsAndParsing) {
  for (const std::string& p : preset_names()) EXPECT_NO_THROW((void)preset(p));
  try {
    (void)preset("fig9");
    FAIL();
  } catch (const DomainError& e) {
    EXPECT_NE(std::string(e.what()).find("fig5b"), std::string::npos);
  }
  EXPECT_EQ(parse_model_list("lcc,sim-held"), (std::vector<Model>{Model::lcc, Model::sim_held}));
  EXPECT_THROW((void)parse_model_list("lcc,"), DomainError);
  EXPECT_EQ(parse_metric("call"), Metric::call);
  SweepSpec s;
  s.wavelengths = {};
  EXPECT_THROW((void)run_sweep(s), DomainError);
}
