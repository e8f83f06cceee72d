#include "wavecast/data_io.hpp"
#include "wavecast/report_io.hpp"
#include "wavecast/synth.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace wavecast;
namespace fs = std::filesystem;

namespace {

std::vector<std::string> lines_of(const fs::path& p) {
    std::ifstream in(p);
    std::vector<std::string> out;
    for (std::string line; std::getline(in, line);) out.push_back(line);
    return out;
}

std::size_t fields(const std::string& line) { return split_csv_line(line).size(); }

DatasetSplit small_split() {
    SynthParams p;
    p.days = 45;
    p.seed = 2;
    return split_dataset(synthesize_pv(p)[0], 40);
}

PipelineConfig lr_mc() {
    PipelineConfig c;
    c.train_days = 40;
    c.level = 2;
    return c;
}

fs::path temp(const std::string& name) { return fs::temp_directory_path() / ("wavecast_report_" + name); }

} // namespace

TEST(ReportJson, MetricsDocumentIsDeterministic) {
    const auto s = small_split();
    const auto a = run_pipeline(lr_mc(), s.train, s.test);
    const auto b = run_pipeline(lr_mc(), s.train, s.test);
    EXPECT_EQ(report_metrics_json(a).dump(), report_metrics_json(b).dump());
    const auto j = report_metrics_json(a);
    EXPECT_EQ(j["config"]["label"], "LR_MC");
    EXPECT_EQ(j["config"]["wavelet"], "db4");
    EXPECT_EQ(j["fitted_model_count"], 27);
    EXPECT_FALSE(j.contains("timing"));
    const auto full = report_to_json(a);
    EXPECT_EQ(full["predictions"].size(), 5u);
    EXPECT_EQ(full["predictions"][0].size(), 27u);
    EXPECT_TRUE(full.contains("timing"));
}

TEST(ReportJson, UndefinedMetricsAreNull) {
    MetricsBundle m;
    m.mae = 1.0;
    const auto j = metrics_to_json(m);
    EXPECT_TRUE(j["rae"].is_null());
    EXPECT_EQ(j["mae"], 1.0);
}

TEST(ReportCsv, PredictionsAndMetricsRows) {
    const auto s = small_split();
    const auto r = run_pipeline(lr_mc(), s.train, s.test);
    const auto path = temp("pred.csv");
    write_predictions_csv(path, r);
    const auto lines = lines_of(path);
    fs::remove(path);
    ASSERT_EQ(lines.size(), 1u + 5 * 27);
    EXPECT_EQ(lines[0], "date,step,time,actual,predicted");
    EXPECT_EQ(split_csv_line(lines[27])[2], "19:00");
    EXPECT_EQ(fields(metrics_csv_header()), fields(metrics_csv_row(r)));
}

TEST(ReportCsv, SweepRowsKeepColumnCount) {
    const auto s = small_split();
    SweepGrid g;
    g.orders = {2};
    g.levels = {1, 7};
    g.paddings = {PaddingMethod::repetition};
    const auto cells = sweep_settings(g, lr_mc(), s.train, s.test, 1);
    const auto path = temp("sweep.csv");
    write_sweep_csv(path, cells);
    const auto lines = lines_of(path);
    fs::remove(path);
    ASSERT_EQ(lines.size(), 3u);
    for (const auto& l : lines) EXPECT_EQ(fields(l), fields(lines[0]));
    EXPECT_EQ(split_csv_line(lines[1])[6], "ok");
    EXPECT_EQ(split_csv_line(lines[2])[6], "failed");

    const auto rows = timing_summary(cells);
    ASSERT_EQ(rows.size(), 1u);
    EXPECT_EQ(rows[0].label, "LR_MC");
    EXPECT_EQ(rows[0].cells, 1);
}

TEST(ReportCsv, BreakdownAndSignificance) {
    const auto s = small_split();
    const auto r = run_pipeline(lr_mc(), s.train, s.test);
    const auto slices = breakdown(r.predictions, r.actuals, r.context, BreakdownAxis::month, r.dates);
    const auto path = temp("breakdown.csv");
    write_breakdown_csv(path, slices);
    auto lines = lines_of(path);
    ASSERT_EQ(lines.size(), 13u);
    for (const auto& l : lines) EXPECT_EQ(fields(l), 9u);

    const auto table = significance({{"a", r.predictions}, {"b", r.actuals}, {"c", r.predictions}},
                                    r.actuals, r.context, BreakdownAxis::timestep);
    write_significance_csv(path, table);
    lines = lines_of(path);
    fs::remove(path);
    EXPECT_EQ(lines.size(), 1u + 27 * 3);
    EXPECT_EQ(lines[0], "slice,model_a,model_b,p_value");
}

TEST(ReportCsv, VolatilityLayout) {
    VolatilityTable t{{"a", "agg"}, {0.1, 0.2}, {0.3, 0.4}, {1, 2}, {0, 0}};
    const auto path = temp("vol.csv");
    write_volatility_csv(path, t);
    const auto lines = lines_of(path);
    fs::remove(path);
    ASSERT_EQ(lines.size(), 5u);
    EXPECT_EQ(lines[0], "statistic,a,agg");
    EXPECT_EQ(lines[1], "sigma_1_27,0.10000000000000001,0.20000000000000001");
    EXPECT_EQ(lines[3], "floored_samples,1,2");
}
