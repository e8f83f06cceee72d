#pragma once

// CSV and JSON serialisation of forecast reports, sweeps, breakdowns and
// volatility tables. Undefined metrics are empty CSV cells and JSON nulls.

#include "wavecast/metrics.hpp"
#include "wavecast/pipeline.hpp"
#include "wavecast/volatility.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace wavecast {

nlohmann::json config_to_json(const PipelineConfig& cfg);
nlohmann::json metrics_to_json(const MetricsBundle& m);

/// Configuration, metrics, baseline and model counts. Timing is kept apart so
/// that this document is identical across reruns.
nlohmann::json report_metrics_json(const ForecastReport& r);
nlohmann::json report_timing_json(const ForecastReport& r);
/// Metrics, timing, dates, predictions and actuals.
nlohmann::json report_to_json(const ForecastReport& r);

/// date,step,time,actual,predicted; one row per test day and step.
void write_predictions_csv(const std::filesystem::path& path, const ForecastReport& r);

/// Header for metrics rows, and one row per report.
std::string metrics_csv_header();
std::string metrics_csv_row(const ForecastReport& r);

/// One row per sweep cell: configuration, status, MAE, RMSE, RAE, MRE, RRSE,
/// R2, R2 (standard), counts, wall time, error.
void write_sweep_csv(const std::filesystem::path& path, const std::vector<SweepCell>& cells);

struct TimingRow {
    std::string label;
    int level = 0;
    std::string padding;
    double mean_s = 0.0;
    int cells = 0;
};

/// Mean total wall time per (model label, level, padding) over successful cells.
std::vector<TimingRow> timing_summary(const std::vector<SweepCell>& cells);
void write_timing_csv(const std::filesystem::path& path, const std::vector<TimingRow>& rows);

void write_breakdown_csv(const std::filesystem::path& path, const std::vector<SliceMetrics>& slices);

/// slice,model_a,model_b,p_value for every unordered model pair.
void write_significance_csv(const std::filesystem::path& path, const SignificanceTable& table);

/// statistic,<columns>: sigma_1_27, sigma_27_27, floored_samples, skipped_windows.
void write_volatility_csv(const std::filesystem::path& path, const VolatilityTable& table);

} // namespace wavecast
