#pragma once

// Day-ahead forecasting pipelines.
//
// Every sample pairs a core day d with its successor d + 1. The core day is
// padded on the left with day d - 1 and on the right by repetition or by the
// linear padder (fit on days <= d only), transformed, and the 27 positions of
// the core region form the features. Targets are raw next-day values, except
// under MM where each component model predicts the same component of day d + 1.
//
//   direct  raw day d as a single band
//   mc      all DL + 1 coefficient bands as channels of one model
//   mi      one CNN input branch per band
//   mm      one model per time-domain component, forecasts summed
//
// Band order in features: c = 0 is the approximation cA_DL, c = l is cD_l.

#include "wavecast/cnn.hpp"
#include "wavecast/features.hpp"
#include "wavecast/forest.hpp"
#include "wavecast/metrics.hpp"
#include "wavecast/padding.hpp"
#include "wavecast/regressor.hpp"
#include "wavecast/types.hpp"

#include <atomic>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace wavecast {

enum class Approach {
    direct,
    mm,
    mc,
    mi,
};

std::string to_string(Approach a);
Approach parse_approach(const std::string& s);

struct PipelineConfig {
    Approach approach = Approach::mc;
    ModelKind model = ModelKind::linear;
    int wavelet_order = 4; ///< ignored by direct
    int level = 1;         ///< ignored by direct
    PaddingMethod padding = PaddingMethod::repetition;
    std::uint64_t seed = 0;
    int train_days = 365;
    double validation_fraction = 0.3; ///< CNN only: trailing share of training samples
    int jobs = 1;                     ///< per-step fits within one run
    ForestConfig forest;
    CnnConfig cnn;

    bool uses_wavelet() const { return approach != Approach::direct; }
    /// "LR_MC", "CNN_MI", "RF", "B_pday", ...
    std::string label() const;
};

/// Every violation, joined into one ErrorKind::config message.
void validate(const PipelineConfig& cfg);

/// First day usable as a core day: the linear padder needs kDefaultMinDays
/// days of history. Applied to every configuration so that all of them are
/// trained on the same target days.
inline constexpr Eigen::Index kFirstCoreDay = LinearPadder::kDefaultMinDays - 1;

struct DatasetSplit {
    DailyMatrix train;
    DailyMatrix test;
};

/// Chronological split after `train_days` rows. Throws ErrorKind::data
/// unless 0 < train_days < D.
DatasetSplit split_dataset(const DailyMatrix& m, int train_days = 365);

/// Features for every core day in [kFirstCoreDay, D - 1] (including the last
/// day, whose target is not available).
struct DailyFeatures {
    std::vector<Eigen::Index> core_days;
    FeatureTensor coefficients;           ///< direct, mc, mi
    std::vector<RowMatrixXd> components;  ///< mm: per band, rows = core days, 27 columns
};

DailyFeatures transform_daily(const DailyMatrix& m, const PipelineConfig& cfg);

struct RunTimings {
    double transform_s = 0.0;
    double fit_s = 0.0;
    double predict_s = 0.0;
    double total_s = 0.0;
};

struct ForecastReport {
    PipelineConfig config;
    std::vector<DayNumber> dates; ///< test dates
    RowMatrixXd predictions;      ///< test days x 27 (MW)
    RowMatrixXd actuals;
    MetricsContext context;
    MetricsBundle metrics;
    double persistence_mae = 0.0;
    std::optional<double> improvement; ///< vs persistence, percent
    int fitted_model_count = 0;        ///< per-step convention: 27 per LR/RF model, 1 per CNN
    int component_model_count = 0;     ///< one per independently trained model
    int n_coeff = 1;
    Eigen::Index train_samples = 0;
    Eigen::Index validation_samples = 0;
    RunTimings timings;
    VectorXd day_mae;
    /// One per component under MM, otherwise one (none for persistence).
    std::vector<std::shared_ptr<const ModelBundle>> models;
};

ForecastReport run_direct(const PipelineConfig& cfg, const DailyMatrix& train, const DailyMatrix& test);
ForecastReport run_mc(const PipelineConfig& cfg, const DailyMatrix& train, const DailyMatrix& test);
ForecastReport run_mi(const PipelineConfig& cfg, const DailyMatrix& train, const DailyMatrix& test);
ForecastReport run_mm(const PipelineConfig& cfg, const DailyMatrix& train, const DailyMatrix& test);

/// Dispatches on cfg.approach.
ForecastReport run_pipeline(const PipelineConfig& cfg, const DailyMatrix& train, const DailyMatrix& test);

struct SweepGrid {
    std::vector<int> orders{1, 2, 3, 4, 5, 6, 7};
    std::vector<int> levels{1, 2, 3, 4};
    std::vector<PaddingMethod> paddings{PaddingMethod::repetition, PaddingMethod::linear};
    std::vector<Approach> approaches{Approach::mc};
    std::vector<ModelKind> models{ModelKind::linear};
};

struct SweepCell {
    PipelineConfig config;
    std::optional<ForecastReport> report;
    std::string error; ///< set when the cell failed or was interrupted
};

/// Cartesian product of the grid over `base`. Direct cells ignore the
/// wavelet axes and appear once per model; MI cells only pair with CNN and
/// persistence only with direct.
std::vector<PipelineConfig> expand_grid(const SweepGrid& grid, const PipelineConfig& base);

/// Runs every cell on up to `jobs` workers. A failing cell is recorded and
/// the sweep continues; once `cancel` is set, unstarted cells are recorded
/// as interrupted. Every cell uses base.seed as its root seed.
std::vector<SweepCell> sweep_settings(const SweepGrid& grid, const PipelineConfig& base,
                                      const DailyMatrix& train, const DailyMatrix& test, int jobs,
                                      const std::atomic<bool>* cancel = nullptr);

} // namespace wavecast
