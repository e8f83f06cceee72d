#pragma once

#include "wavecast/types.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace wavecast {

/// Training-set constants used by the relative metrics.
struct MetricsContext {
    double capacity = 0.0; ///< C: maximum training power (MW)
    VectorXd step_mean;    ///< x-bar: training mean per time step of day (MW)
};

/// C = max over the training rows, x-bar = column means.
MetricsContext make_metrics_context(const RowMatrixXd& train);

/// Undefined ratios (zero denominators) are empty rather than NaN.
struct MetricsBundle {
    double mae = 0.0;  ///< MW
    double rmse = 0.0; ///< MW
    double mre = 0.0;  ///< percent of C
    std::optional<double> rae;
    std::optional<double> rrse;
    /// sum (xbar - pred)^2 / sum (xbar - actual)^2, the explained-variance form.
    std::optional<double> r2;
    /// 1 - RSS / TSS with the same x-bar.
    std::optional<double> r2_standard;
    Eigen::Index count = 0;
};

/// pred and actual are D x N (days x steps); ctx.step_mean has N entries.
MetricsBundle compute_metrics(const RowMatrixXd& pred, const RowMatrixXd& actual,
                              const MetricsContext& ctx);

/// (mae_without - mae_with) / mae_without * 100. Empty for a zero baseline.
std::optional<double> improvement(double mae_without, double mae_with);

/// Mean absolute error of each row (day).
VectorXd per_day_mae(const RowMatrixXd& pred, const RowMatrixXd& actual);

enum class BreakdownAxis {
    timestep,
    month,
};

std::string to_string(BreakdownAxis a);
BreakdownAxis parse_breakdown_axis(const std::string& s);

struct SliceMetrics {
    std::string label;
    std::optional<MetricsBundle> metrics; ///< empty when the slice has no data
    VectorXd day_mae;                     ///< per-day MAE within the slice
};

/// Metrics per time step (27 rows, labelled 06:00..19:00) or per calendar
/// month (12 rows, Jan..Dec; months without test days are left empty).
/// `dates` is required for the monthly axis.
std::vector<SliceMetrics> breakdown(const RowMatrixXd& pred, const RowMatrixXd& actual,
                                    const MetricsContext& ctx, BreakdownAxis axis,
                                    const std::vector<DayNumber>& dates = {});

/// p-values of pairwise rank-sum tests on per-day slice MAE, one model x
/// model matrix per slice (diagonal = 1). Empty slices give NaN entries.
struct SignificanceTable {
    std::vector<std::string> models;
    std::vector<std::string> slices;
    std::vector<MatrixXd> p_values;
};

SignificanceTable significance(const std::vector<std::pair<std::string, RowMatrixXd>>& predictions,
                               const RowMatrixXd& actual, const MetricsContext& ctx,
                               BreakdownAxis axis, const std::vector<DayNumber>& dates = {});

/// Label for time step t of a 27-step day ("06:00" .. "19:00").
std::string step_label(int t);

} // namespace wavecast
