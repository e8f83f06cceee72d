// Acceptance harness: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include "oracles.hpp"

#include "wavecast/cnn.hpp"
#include "wavecast/data_io.hpp"
#include "wavecast/metrics.hpp"
#include "wavecast/normalize.hpp"
#include "wavecast/padding.hpp"
#include "wavecast/pipeline.hpp"
#include "wavecast/synth.hpp"
#include "wavecast/volatility.hpp"
#include "wavecast/wavelet.hpp"
#include "wavecast/wilcoxon.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

using namespace wavecast;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
    bool pass = false;
    std::string detail;
};

int failures = 0;

void report(int id, const std::string& name, const std::function<Outcome()>& check) {
    Outcome o;
    try {
        o = check();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::printf("%s %2d %s: %s\n", o.pass ? "PASS" : "FAIL", id, name.c_str(), o.detail.c_str());
    std::fflush(stdout);
}

std::string fmt(const char* f, auto... args) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

VectorXd random_signal(Eigen::Index n, std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    VectorXd x(n);
    for (auto& v : x) v = g(rng);
    return x;
}

Outcome perfect_reconstruction() {
    const auto t0 = Clock::now();
    std::mt19937_64 rng(101);
    double worst = 0.0;
    for (int m = 1; m <= 7; ++m) {
        const auto f = daubechies<double>(m);
        for (int dl = 1; dl <= 4; ++dl) {
            for (const int n : {32, 64, 128}) {
                const VectorXd x = random_signal(n, rng);
                const VectorXd back = iswt(swt<double>(x, f, dl), f);
                worst = std::max(worst, (back - x).cwiseAbs().maxCoeff() / x.cwiseAbs().maxCoeff());
            }
        }
    }
    const double t = seconds_since(t0);
    return {worst <= 1e-9 && t < 5.0, fmt("max relative error %.2e over 84 cases in %.3f s", worst, t)};
}

Outcome component_additivity() {
    std::mt19937_64 rng(102);
    double worst = 0.0;
    for (int m = 1; m <= 7; ++m) {
        const auto f = daubechies<double>(m);
        for (int dl = 1; dl <= 4; ++dl) {
            for (const int n : {32, 64, 128}) {
                const VectorXd x = random_signal(n, rng);
                const auto parts = reconstruct_components(swt<double>(x, f, dl), f);
                worst = std::max(worst, (sum_components(parts) - x).cwiseAbs().maxCoeff() / x.cwiseAbs().maxCoeff());
            }
        }
    }
    return {worst <= 1e-9, fmt("max relative error %.2e", worst)};
}

Outcome filter_invariants() {
    double sum_err = 0.0, ortho_err = 0.0, qmf_err = 0.0, moment_err = 0.0;
    for (int m = 1; m <= 7; ++m) {
        const auto f = daubechies<double>(m);
        const Eigen::Index F = f.length();
        sum_err = std::max(sum_err, std::abs(f.lp.sum() - std::numbers::sqrt2));
        for (Eigen::Index s = 0; s < F / 2; ++s) {
            double dot = 0.0;
            for (Eigen::Index k = 0; k + 2 * s < F; ++k) dot += f.lp[k] * f.lp[k + 2 * s];
            ortho_err = std::max(ortho_err, std::abs(dot - (s == 0 ? 1.0 : 0.0)));
        }
        for (Eigen::Index k = 0; k < F; ++k) {
            qmf_err = std::max(qmf_err, std::abs(f.hp[k] - (k % 2 ? -1.0 : 1.0) * f.lp[F - 1 - k]));
        }
        for (int p = 0; p < m; ++p) {
            double mom = 0.0;
            for (Eigen::Index k = 0; k < F; ++k) mom += std::pow(static_cast<double>(k), p) * f.hp[k];
            moment_err = std::max(moment_err, std::abs(mom));
        }
    }
    const bool ok = sum_err <= 1e-8 && ortho_err <= 1e-8 && qmf_err <= 1e-8 && moment_err <= 1e-8;
    return {ok, fmt("sum %.1e, orthonormality %.1e, QMF %.1e, moments %.1e", sum_err, ortho_err, qmf_err,
                    moment_err)};
}

Outcome padding_arithmetic() {
    const auto plan = padding_plan(27, 27, daubechies<double>(4), 1);
    return {plan.total() == 62 && plan.right_len() == 8,
            fmt("P = %d, right_len = %d", plan.total(), plan.right_len())};
}

oracle::Mat to_rows(const RowMatrixXd& m) {
    oracle::Mat out(m.rows(), oracle::Vec(m.cols()));
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) out[r][c] = m(r, c);
    }
    return out;
}

Outcome metrics_oracle() {
    std::mt19937_64 rng(105);
    std::uniform_int_distribution<int> dd(1, 5), nn(1, 10);
    std::uniform_real_distribution<double> u(0.0, 50.0);
    double worst = 0.0;
    bool ordered = true;
    auto rel = [](double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); };
    for (int trial = 0; trial < 100; ++trial) {
        const int d = dd(rng), n = nn(rng);
        RowMatrixXd a(d, n), p(d, n);
        for (auto& v : a.reshaped()) v = u(rng);
        for (auto& v : p.reshaped()) v = u(rng);
        MetricsContext ctx{60.0, VectorXd(n)};
        for (auto& v : ctx.step_mean) v = u(rng);
        const auto m = compute_metrics(p, a, ctx);
        const auto o = oracle::metrics(to_rows(p), to_rows(a), ctx.capacity,
                                       oracle::Vec(ctx.step_mean.data(), ctx.step_mean.data() + n));
        for (const double e : {rel(m.mae, o.mae), rel(m.rmse, o.rmse), rel(m.mre, o.mre), rel(*m.rae, o.rae),
                               rel(*m.rrse, o.rrse), rel(*m.r2, o.r2)}) {
            worst = std::max(worst, e);
        }
        ordered = ordered && m.mae <= m.rmse;
    }
    RowMatrixXd a = RowMatrixXd::Random(5, 10).array() + 3.0;
    MetricsContext ctx{10.0, VectorXd::Random(10).array() + 3.0};
    const auto mean_pred = compute_metrics(ctx.step_mean.transpose().replicate(5, 1), a, ctx);
    const double unit = std::max(std::abs(*mean_pred.rae - 1.0), std::abs(*mean_pred.rrse - 1.0));
    return {worst <= 1e-12 && ordered && unit <= 1e-12,
            fmt("max relative error %.2e, mae <= rmse %s, mean predictor |rae-1|,|rrse-1| <= %.1e", worst,
                ordered ? "on all" : "VIOLATED", unit)};
}

Outcome wilcoxon() {
    std::mt19937_64 rng(106);
    std::uniform_int_distribution<int> value(0, 12);
    double worst = 0.0;
    for (int n = 1; n <= 7; ++n) {
        for (int m = 1; m <= 7; ++m) {
            oracle::Vec a(n), b(m);
            for (auto& v : a) v = value(rng);
            for (auto& v : b) v = value(rng);
            worst = std::max(worst, std::abs(wilcoxon_rank_sum(a, b).p_two_sided - oracle::rank_sum_exact_p(a, b)));
        }
    }
    std::normal_distribution<double> g(0.0, 1.0);
    double approx = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> a(7), b(7);
        for (auto& v : a) v = g(rng);
        for (auto& v : b) v = g(rng) + 0.7;
        approx = std::max(approx, std::abs(wilcoxon_rank_sum_normal(a, b).p_two_sided -
                                           wilcoxon_rank_sum(a, b).p_two_sided));
    }
    return {worst <= 1e-12 && approx <= 0.02,
            fmt("exact vs enumeration %.1e; normal vs exact at 7/7 max %.4f", worst, approx)};
}

double cnn_gradient_error(CnnTopology topology) {
    CnnConfig cfg;
    cfg.topology = topology;
    cfg.filters = 4;
    cfg.kernel = 3;
    cfg.outputs = 6;
    CnnModel model(cfg, 8, 3, 107);
    std::mt19937_64 rng(108);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    RowMatrixXd xv(2, 8 * 3), y(2, 6);
    for (auto& v : xv.reshaped()) v = u(rng);
    for (auto& v : y.reshaped()) v = u(rng);
    const FeatureTensor x(xv, 8, 3);
    const auto grad = model.gradient(x, y);
    const double h = 1e-6;
    double worst = 0.0;
    for (std::size_t p = 0; p < model.parameters().size(); ++p) {
        MatrixXd& w = model.parameters()[p];
        for (Eigen::Index i = 0; i < w.size(); ++i) {
            const double keep = w.data()[i];
            w.data()[i] = keep + h;
            const double up = model.loss(x, y);
            w.data()[i] = keep - h;
            const double down = model.loss(x, y);
            w.data()[i] = keep;
            const double numeric = (up - down) / (2 * h);
            const double analytic = grad[p].data()[i];
            worst = std::max(worst, std::abs(numeric - analytic) /
                                        std::max({std::abs(numeric), std::abs(analytic), 1e-6}));
        }
    }
    return worst;
}

Outcome cnn_gradients() {
    const double mc = cnn_gradient_error(CnnTopology::multi_channel);
    const double mi = cnn_gradient_error(CnnTopology::multi_input);
    return {mc < 1e-4 && mi < 1e-4, fmt("max relative error MC %.2e, MI %.2e", mc, mi)};
}

DailyMatrix synthetic(int days, std::uint64_t seed) {
    SynthParams p;
    p.days = days;
    p.seed = seed;
    return synthesize_pv(p)[0];
}

Outcome model_counts() {
    const auto s = split_dataset(synthetic(90, 109), 70);
    PipelineConfig c;
    c.train_days = 70;
    c.level = 3;
    c.approach = Approach::mm;
    const int mm = run_pipeline(c, s.train, s.test).fitted_model_count;
    c.approach = Approach::mc;
    const int mc = run_pipeline(c, s.train, s.test).fitted_model_count;
    c.model = ModelKind::cnn;
    c.cnn.max_epochs = 2;
    const int cnn_mc = run_pipeline(c, s.train, s.test).fitted_model_count;
    c.approach = Approach::mi;
    const int cnn_mi = run_pipeline(c, s.train, s.test).fitted_model_count;
    return {mm == 108 && mc == 27 && cnn_mc == 1 && cnn_mi == 1,
            fmt("LR_MM(DL3) %d, LR_MC %d, CNN_MC %d, CNN_MI %d", mm, mc, cnn_mc, cnn_mi)};
}

Outcome causality() {
    const auto m = synthetic(100, 110);
    const auto s = split_dataset(m, 80);
    std::vector<PipelineConfig> configs;
    for (const auto a : {Approach::mc, Approach::mm, Approach::direct}) {
        for (const auto model : {ModelKind::linear, ModelKind::forest}) {
            PipelineConfig c;
            c.approach = a;
            c.model = model;
            c.level = 3;
            c.train_days = 80;
            c.padding = PaddingMethod::repetition;
            c.forest.n_estimators = 3;
            c.forest.max_depth = 6;
            configs.push_back(c);
        }
    }
    PipelineConfig cnn;
    cnn.model = ModelKind::cnn;
    cnn.approach = Approach::mi;
    cnn.level = 2;
    cnn.train_days = 80;
    cnn.cnn.max_epochs = 3;
    configs.push_back(cnn);

    int checked = 0;
    for (const auto& c : configs) {
        const auto full = run_pipeline(c, s.train, s.test);
        for (const Eigen::Index d : {Eigen::Index(0), Eigen::Index(7), s.test.days() - 1}) {
            const auto cut = run_pipeline(c, s.train, slice_days(s.test, 0, d + 1));
            if (cut.predictions.row(d) != full.predictions.row(d)) {
                return {false, c.label() + " forecast for test day " + std::to_string(d) + " changed"};
            }
            ++checked;
        }
    }
    return {true, fmt("%d truncations across %zu configurations bit-identical", checked, configs.size())};
}

Outcome forecasting_property() {
    const auto t0 = Clock::now();
    // Generator defaults: 30% cloud noise, 30% seasonal amplitude.
    const auto s = split_dataset(synthetic(400, 7), 365);
    PipelineConfig c;
    c.seed = 7;
    c.level = 4;
    c.approach = Approach::direct;
    const auto lr = run_pipeline(c, s.train, s.test);
    c.approach = Approach::mc;
    const auto mc = run_pipeline(c, s.train, s.test);
    c.approach = Approach::mm;
    const auto mm = run_pipeline(c, s.train, s.test);
    const double pers = lr.persistence_mae;
    const bool a = lr.metrics.mae < pers && mc.metrics.mae < pers && mm.metrics.mae < pers;
    const bool b = mc.metrics.mae <= 1.10 * mm.metrics.mae;

    double t_mc = 0.0, t_mm = 0.0;
    for (int rep = 0; rep < 5; ++rep) {
        c.approach = Approach::mc;
        t_mc += run_pipeline(c, s.train, s.test).timings.total_s / 5;
        c.approach = Approach::mm;
        t_mm += run_pipeline(c, s.train, s.test).timings.total_s / 5;
    }
    const bool timing = t_mc <= t_mm;
    const double total = seconds_since(t0);
    return {a && b && timing && total < 120.0,
            fmt("MAE persistence %.4f, LR %.4f, LR_MC %.4f, LR_MM %.4f (a %s, b %s); mean time DL4 LR_MC %.4f s "
                "vs LR_MM %.4f s (c %s); %.1f s",
                pers, lr.metrics.mae, mc.metrics.mae, mm.metrics.mae, a ? "ok" : "no", b ? "ok" : "no", t_mc, t_mm,
                timing ? "ok" : "no", total)};
}

std::string nsw_check() {
    const char* path = std::getenv("WAVECAST_NSW_CSV");
    if (!path || !*path) return "real-data check skipped (set WAVECAST_NSW_CSV to a series CSV)";
    const auto loaded = load_csv(path);
    const auto agg = aggregate_sites(loaded.sites);
    const auto t = volatility_table({}, {}, agg, "aggregate");
    const double intra = t.intra_day[0], trans = t.trans_day[0];
    const bool near = std::abs(intra / 9.35 - 1.0) <= 0.1 && std::abs(trans / 7.39 - 1.0) <= 0.1;
    return fmt("real data sigma_1_27 %.3f (ref 9.35), sigma_27_27 %.3f (ref 7.39): %s", intra, trans,
               near ? "within 10%" : "outside 10%, reported only");
}

Outcome volatility() {
    // Ratios 2 and 1/2 keep every term exactly representable.
    std::vector<double> flat(27 * 20, 12.5), up{1e-6}, down{1e12};
    for (int i = 1; i < 27 * 3; ++i) {
        up.push_back(up.back() * 2.0);
        down.push_back(down.back() * 0.5);
    }
    double zeros = 0.0;
    for (const auto* series : {&flat, &up, &down}) {
        for (const int h : {1, 27}) zeros = std::max(zeros, std::abs(historical_volatility(*series, h, 27).overall));
    }
    std::mt19937_64 rng(111);
    std::uniform_real_distribution<double> u(0.2, 80.0);
    double scale = 0.0, oracle_err = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> p(27 * 15), q(p.size());
        for (std::size_t i = 0; i < p.size(); ++i) {
            p[i] = u(rng);
            q[i] = 3.7 * p[i];
        }
        for (const int h : {1, 27}) {
            const auto est = historical_volatility(p, h, 27);
            scale = std::max(scale, std::abs(est.overall - historical_volatility(q, h, 27).overall));
            oracle_err = std::max(oracle_err, std::abs(est.overall - oracle::mean(oracle::window_sigmas(p, h, 27))));
        }
    }
    std::string nsw;
    try {
        nsw = nsw_check();
    } catch (const std::exception& e) {
        nsw = std::string("real-data check failed to run: ") + e.what();
    }
    return {zeros == 0.0 && scale <= 1e-12 && oracle_err <= 1e-12,
            fmt("constant/geometric sigma %.1e, scale drift %.1e, oracle %.1e; ", zeros, scale, oracle_err) + nsw};
}

Outcome normalization() {
    std::mt19937_64 rng(112);
    std::uniform_real_distribution<double> u(-1e3, 1e3);
    RowMatrixXd train(50, 12), other(30, 12);
    for (auto& v : train.reshaped()) v = u(rng);
    for (auto& v : other.reshaped()) v = u(rng);
    const auto p = fit_normalizer(train);
    double round_trip = 0.0;
    for (const auto* m : {&train, &other}) {
        round_trip = std::max(round_trip, (denormalize(normalize(*m, p), p) - *m).cwiseAbs().maxCoeff() /
                                              m->cwiseAbs().maxCoeff());
    }
    const RowMatrixXd z = normalize(train, p);
    bool extremes = true;
    for (Eigen::Index c = 0; c < z.cols(); ++c) {
        extremes = extremes && z.col(c).minCoeff() == 0.0 && z.col(c).maxCoeff() == 1.0;
    }
    return {round_trip <= 1e-12 && extremes,
            fmt("round trip %.1e, training extremes map to {0, 1} %s", round_trip, extremes ? "exactly" : "NOT")};
}

} // namespace

int main() {
    report(1, "perfect reconstruction", perfect_reconstruction);
    report(2, "component additivity", component_additivity);
    report(3, "filter-bank invariants", filter_invariants);
    report(4, "padding length", padding_arithmetic);
    report(5, "metrics oracle", metrics_oracle);
    report(6, "rank-sum test", wilcoxon);
    report(7, "CNN gradient check", cnn_gradients);
    report(8, "model counts", model_counts);
    report(9, "causality", causality);
    report(10, "forecasting property", forecasting_property);
    report(11, "volatility", volatility);
    report(12, "normalization", normalization);
    std::printf("%d of 12 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
