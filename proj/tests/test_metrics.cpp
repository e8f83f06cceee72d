#include "oracles.hpp"

#include "wavecast/error.hpp"
#include "wavecast/calendar.hpp"
#include "wavecast/metrics.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace wavecast;

namespace {

oracle::Mat to_rows(const RowMatrixXd& m) {
    oracle::Mat out(m.rows(), oracle::Vec(m.cols()));
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) out[r][c] = m(r, c);
    }
    return out;
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

} // namespace

TEST(Metrics, HandWorkedExample) {
    RowMatrixXd actual(1, 2), pred(1, 2);
    actual << 1, 3;
    pred << 2, 5;
    MetricsContext ctx{10.0, VectorXd::Constant(2, 2.0)};
    const auto m = compute_metrics(pred, actual, ctx);
    EXPECT_DOUBLE_EQ(m.mae, 1.5);
    EXPECT_DOUBLE_EQ(m.rmse, std::sqrt(2.5));
    EXPECT_DOUBLE_EQ(m.mre, 15.0);
    EXPECT_DOUBLE_EQ(*m.rae, 1.5);
    EXPECT_DOUBLE_EQ(*m.rrse, std::sqrt(2.5));
    EXPECT_DOUBLE_EQ(*m.r2, 4.5);
    EXPECT_DOUBLE_EQ(*m.r2_standard, -1.5);
}

TEST(Metrics, MatchesDoubleLoopOracle) {
    std::mt19937_64 rng(1);
    std::uniform_int_distribution<int> dim(1, 10), days(1, 5);
    std::uniform_real_distribution<double> u(0.0, 100.0);
    for (int trial = 0; trial < 100; ++trial) {
        const int d = days(rng), n = dim(rng);
        RowMatrixXd a(d, n), p(d, n);
        for (auto& v : a.reshaped()) v = u(rng);
        for (auto& v : p.reshaped()) v = u(rng);
        MetricsContext ctx{100.0 + u(rng), VectorXd(n)};
        for (auto& v : ctx.step_mean) v = u(rng);
        const auto m = compute_metrics(p, a, ctx);
        const auto o = oracle::metrics(to_rows(p), to_rows(a), ctx.capacity,
                                       oracle::Vec(ctx.step_mean.data(), ctx.step_mean.data() + n));
        EXPECT_LE(rel(m.mae, o.mae), 1e-12);
        EXPECT_LE(rel(m.rmse, o.rmse), 1e-12);
        EXPECT_LE(rel(m.mre, o.mre), 1e-12);
        EXPECT_LE(rel(*m.rae, o.rae), 1e-12);
        EXPECT_LE(rel(*m.rrse, o.rrse), 1e-12);
        EXPECT_LE(rel(*m.r2, o.r2), 1e-12);
        EXPECT_LE(m.mae, m.rmse);
    }
}

TEST(Metrics, MeanPredictorHasUnitRelativeErrors) {
    RowMatrixXd a = RowMatrixXd::Random(4, 6).array() + 2.0;
    MetricsContext ctx{5.0, VectorXd::Random(6).array() + 2.0};
    const RowMatrixXd p = ctx.step_mean.transpose().replicate(4, 1);
    const auto m = compute_metrics(p, a, ctx);
    EXPECT_NEAR(*m.rae, 1.0, 1e-15);
    EXPECT_NEAR(*m.rrse, 1.0, 1e-15);
    EXPECT_EQ(*m.r2, 0.0);
}

TEST(Metrics, PerfectPrediction) {
    RowMatrixXd a = RowMatrixXd::Random(3, 27).cwiseAbs();
    const auto ctx = make_metrics_context(a);
    const auto m = compute_metrics(a, a, ctx);
    EXPECT_EQ(m.mae, 0.0);
    EXPECT_EQ(m.rmse, 0.0);
    EXPECT_EQ(*m.rae, 0.0);
    EXPECT_EQ(*m.r2_standard, 1.0);
}

TEST(Metrics, UndefinedRatiosAreEmpty) {
    RowMatrixXd a = RowMatrixXd::Constant(2, 3, 4.0);
    RowMatrixXd p = RowMatrixXd::Constant(2, 3, 5.0);
    MetricsContext ctx{10.0, VectorXd::Constant(3, 4.0)};
    const auto m = compute_metrics(p, a, ctx);
    EXPECT_FALSE(m.rae.has_value());
    EXPECT_FALSE(m.rrse.has_value());
    EXPECT_FALSE(m.r2.has_value());
    EXPECT_EQ(m.mae, 1.0);
}

TEST(Metrics, Errors) {
    MetricsContext ctx{1.0, VectorXd::Zero(2)};
    EXPECT_THROW(compute_metrics(RowMatrixXd::Zero(2, 2), RowMatrixXd::Zero(2, 3), ctx), Error);
    EXPECT_THROW(compute_metrics(RowMatrixXd::Zero(2, 3), RowMatrixXd::Zero(2, 3), ctx), Error);
    ctx.capacity = 0.0;
    EXPECT_THROW(compute_metrics(RowMatrixXd::Zero(2, 2), RowMatrixXd::Zero(2, 2), ctx), Error);
    EXPECT_THROW(make_metrics_context(RowMatrixXd::Zero(3, 2)), Error);
}

TEST(Metrics, ContextFromTraining) {
    RowMatrixXd train(2, 2);
    train << 1, 4, 3, 8;
    const auto ctx = make_metrics_context(train);
    EXPECT_EQ(ctx.capacity, 8.0);
    EXPECT_EQ(ctx.step_mean[0], 2.0);
    EXPECT_EQ(ctx.step_mean[1], 6.0);
}

TEST(Improvement, Percent) {
    EXPECT_DOUBLE_EQ(*improvement(10.0, 8.0), 20.0);
    EXPECT_DOUBLE_EQ(*improvement(10.0, 12.0), -20.0);
    EXPECT_FALSE(improvement(0.0, 1.0).has_value());
}

TEST(Breakdown, TimestepRows) {
    RowMatrixXd a = RowMatrixXd::Random(5, 27).cwiseAbs();
    RowMatrixXd p = a;
    p.col(3).array() += 2.0;
    const auto ctx = make_metrics_context(a);
    const auto rows = breakdown(p, a, ctx, BreakdownAxis::timestep);
    ASSERT_EQ(rows.size(), 27u);
    EXPECT_EQ(rows.front().label, "06:00");
    EXPECT_EQ(rows.back().label, "19:00");
    EXPECT_EQ(rows[3].label, "07:30");
    EXPECT_NEAR(rows[3].metrics->mae, 2.0, 1e-12);
    EXPECT_EQ(rows[4].metrics->mae, 0.0);
    EXPECT_EQ(rows[3].day_mae.size(), 5);
}

TEST(Breakdown, MonthRowsIncludeEmptyMonths) {
    const DayNumber start = *parse_date("2020-01-30");
    std::vector<DayNumber> dates{start, start + 1, start + 2, start + 3};
    RowMatrixXd a = RowMatrixXd::Random(4, 27).cwiseAbs();
    RowMatrixXd p = a.array() + 1.0;
    const auto rows = breakdown(p, a, make_metrics_context(a), BreakdownAxis::month, dates);
    ASSERT_EQ(rows.size(), 12u);
    EXPECT_EQ(rows[0].label, "Jan");
    EXPECT_EQ(rows[0].metrics->count, 2 * 27);
    EXPECT_EQ(rows[1].metrics->count, 2 * 27);
    EXPECT_FALSE(rows[2].metrics.has_value());
    EXPECT_THROW(breakdown(p, a, make_metrics_context(a), BreakdownAxis::month), Error);
}

TEST(Breakdown, AxisParsing) {
    EXPECT_EQ(parse_breakdown_axis("month"), BreakdownAxis::month);
    EXPECT_EQ(parse_breakdown_axis("timestep"), BreakdownAxis::timestep);
    EXPECT_THROW(parse_breakdown_axis("week"), Error);
}

TEST(Significance, PairwiseTable) {
    RowMatrixXd a = RowMatrixXd::Random(10, 27).cwiseAbs();
    RowMatrixXd good = a.array() + 0.01;
    RowMatrixXd bad = a.array() + 5.0;
    const auto t = significance({{"good", good}, {"bad", bad}, {"same", good}}, a, make_metrics_context(a),
                                BreakdownAxis::timestep);
    ASSERT_EQ(t.slices.size(), 27u);
    ASSERT_EQ(t.models.size(), 3u);
    EXPECT_LT(t.p_values[0](0, 1), 0.01);
    EXPECT_EQ(t.p_values[0](0, 1), t.p_values[0](1, 0));
    EXPECT_EQ(t.p_values[0](0, 2), 1.0);
    EXPECT_EQ(t.p_values[0](1, 1), 1.0);
}
