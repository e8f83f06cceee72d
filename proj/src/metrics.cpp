#include "wavecast/metrics.hpp"

#include "wavecast/calendar.hpp"
#include "wavecast/error.hpp"
#include "wavecast/wilcoxon.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <limits>

namespace wavecast {

MetricsContext make_metrics_context(const RowMatrixXd& train) {
    if (train.size() == 0) throw data_error("metrics context: empty training data");
    MetricsContext ctx;
    ctx.capacity = train.maxCoeff();
    ctx.step_mean = train.colwise().mean().transpose();
    if (!(ctx.capacity > 0.0)) throw data_error("metrics context: maximum training power must be > 0");
    return ctx;
}

MetricsBundle compute_metrics(const RowMatrixXd& pred, const RowMatrixXd& actual,
                              const MetricsContext& ctx) {
    if (pred.rows() != actual.rows() || pred.cols() != actual.cols()) {
        throw shape_error("metrics: prediction and actual shapes differ");
    }
    if (actual.size() == 0) throw shape_error("metrics: empty input");
    if (ctx.step_mean.size() != actual.cols()) {
        throw shape_error("metrics: context has " + std::to_string(ctx.step_mean.size()) +
                          " step means for " + std::to_string(actual.cols()) + " steps");
    }
    if (!(ctx.capacity > 0.0)) throw config_error("metrics: capacity C must be > 0");

    const auto mean_row = ctx.step_mean.transpose().replicate(actual.rows(), 1).array();
    const auto err = (pred - actual).array();
    const auto base = (mean_row - actual.array());
    const auto expl = (mean_row - pred.array());
    const double n = static_cast<double>(actual.size());

    const double abs_err = err.abs().sum();
    const double sq_err = err.square().sum();
    const double abs_base = base.abs().sum();
    const double sq_base = base.square().sum();
    const double sq_expl = expl.square().sum();

    MetricsBundle m;
    m.count = actual.size();
    m.mae = abs_err / n;
    m.rmse = std::sqrt(sq_err / n);
    m.mre = abs_err / (n * ctx.capacity) * 100.0;
    if (abs_base > 0.0) m.rae = abs_err / abs_base;
    if (sq_base > 0.0) {
        m.rrse = std::sqrt(sq_err / sq_base);
        m.r2 = sq_expl / sq_base;
        m.r2_standard = 1.0 - sq_err / sq_base;
    }
    // mean|e| <= sqrt(mean e^2)
    if (m.mae > m.rmse * (1.0 + 1e-12) + 1e-300) {
        throw domain_error("metrics: mae exceeds rmse, inputs are not finite");
    }
    return m;
}

std::optional<double> improvement(double mae_without, double mae_with) {
    if (!(mae_without > 0.0)) return std::nullopt;
    return (mae_without - mae_with) / mae_without * 100.0;
}

VectorXd per_day_mae(const RowMatrixXd& pred, const RowMatrixXd& actual) {
    if (pred.rows() != actual.rows() || pred.cols() != actual.cols()) {
        throw shape_error("per-day MAE: shapes differ");
    }
    return (pred - actual).cwiseAbs().rowwise().mean();
}

std::string to_string(BreakdownAxis a) { return a == BreakdownAxis::timestep ? "timestep" : "month"; }

BreakdownAxis parse_breakdown_axis(const std::string& s) {
    if (s == "timestep" || s == "hour" || s == "step") return BreakdownAxis::timestep;
    if (s == "month") return BreakdownAxis::month;
    throw config_error("unknown breakdown axis '" + s + "' (expected timestep or month)");
}

std::string step_label(int t) {
    const int minute = 6 * 60 + 30 * t;
    char buf[16];
    std::snprintf(buf, sizeof buf, "%02d:%02d", minute / 60, minute % 60);
    return buf;
}

namespace {

constexpr std::array<const char*, 12> kMonthNames{"Jan", "Feb", "Mar", "Apr", "May", "Jun",
                                                  "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"};

struct Slice {
    std::string label;
    std::vector<Eigen::Index> rows;
    std::vector<Eigen::Index> cols;
};

std::vector<Slice> make_slices(Eigen::Index days, Eigen::Index steps, BreakdownAxis axis,
                               const std::vector<DayNumber>& dates) {
    std::vector<Slice> slices;
    std::vector<Eigen::Index> all_rows(days);
    for (Eigen::Index d = 0; d < days; ++d) all_rows[d] = d;
    if (axis == BreakdownAxis::timestep) {
        for (Eigen::Index t = 0; t < steps; ++t) {
            slices.push_back({step_label(static_cast<int>(t)), all_rows, {t}});
        }
        return slices;
    }
    if (static_cast<Eigen::Index>(dates.size()) != days) {
        throw shape_error("monthly breakdown: need one date per prediction row");
    }
    std::vector<Eigen::Index> all_cols(steps);
    for (Eigen::Index t = 0; t < steps; ++t) all_cols[t] = t;
    for (int m = 0; m < 12; ++m) slices.push_back({kMonthNames[m], {}, all_cols});
    for (Eigen::Index d = 0; d < days; ++d) {
        slices[civil_from_days(dates[d]).month - 1].rows.push_back(d);
    }
    return slices;
}

RowMatrixXd take(const RowMatrixXd& m, const Slice& s) {
    RowMatrixXd out(static_cast<Eigen::Index>(s.rows.size()), static_cast<Eigen::Index>(s.cols.size()));
    for (std::size_t i = 0; i < s.rows.size(); ++i) {
        for (std::size_t j = 0; j < s.cols.size(); ++j) out(i, j) = m(s.rows[i], s.cols[j]);
    }
    return out;
}

} // namespace

std::vector<SliceMetrics> breakdown(const RowMatrixXd& pred, const RowMatrixXd& actual,
                                    const MetricsContext& ctx, BreakdownAxis axis,
                                    const std::vector<DayNumber>& dates) {
    if (pred.rows() != actual.rows() || pred.cols() != actual.cols()) {
        throw shape_error("breakdown: prediction and actual shapes differ");
    }
    std::vector<SliceMetrics> out;
    for (const Slice& s : make_slices(actual.rows(), actual.cols(), axis, dates)) {
        SliceMetrics sm;
        sm.label = s.label;
        if (!s.rows.empty()) {
            MetricsContext sub{ctx.capacity, VectorXd(static_cast<Eigen::Index>(s.cols.size()))};
            for (std::size_t j = 0; j < s.cols.size(); ++j) sub.step_mean[j] = ctx.step_mean[s.cols[j]];
            const RowMatrixXd p = take(pred, s);
            const RowMatrixXd a = take(actual, s);
            sm.metrics = compute_metrics(p, a, sub);
            sm.day_mae = per_day_mae(p, a);
        }
        out.push_back(std::move(sm));
    }
    return out;
}

SignificanceTable significance(const std::vector<std::pair<std::string, RowMatrixXd>>& predictions,
                               const RowMatrixXd& actual, const MetricsContext& ctx,
                               BreakdownAxis axis, const std::vector<DayNumber>& dates) {
    SignificanceTable table;
    std::vector<std::vector<SliceMetrics>> per_model;
    for (const auto& [name, pred] : predictions) {
        table.models.push_back(name);
        per_model.push_back(breakdown(pred, actual, ctx, axis, dates));
    }
    if (per_model.empty()) return table;
    const std::size_t k = per_model.size();
    for (std::size_t s = 0; s < per_model.front().size(); ++s) {
        table.slices.push_back(per_model.front()[s].label);
        MatrixXd p = MatrixXd::Identity(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
        for (std::size_t i = 0; i < k; ++i) {
            for (std::size_t j = i + 1; j < k; ++j) {
                const VectorXd& a = per_model[i][s].day_mae;
                const VectorXd& b = per_model[j][s].day_mae;
                double pv = std::numeric_limits<double>::quiet_NaN();
                if (a.size() > 0 && b.size() > 0) {
                    pv = wilcoxon_rank_sum({a.data(), static_cast<std::size_t>(a.size())},
                                           {b.data(), static_cast<std::size_t>(b.size())})
                             .p_two_sided;
                }
                p(i, j) = p(j, i) = pv;
            }
            if (per_model[i][s].day_mae.size() == 0) p(i, i) = std::numeric_limits<double>::quiet_NaN();
        }
        table.p_values.push_back(std::move(p));
    }
    return table;
}

} // namespace wavecast
