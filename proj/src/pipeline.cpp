#include "wavecast/pipeline.hpp"

#include "wavecast/data_io.hpp"
#include "wavecast/error.hpp"
#include "wavecast/normalize.hpp"
#include "wavecast/parallel.hpp"
#include "wavecast/random.hpp"
#include "wavecast/wavelet.hpp"

#include <chrono>
#include <cmath>

namespace wavecast {

std::string to_string(Approach a) {
    switch (a) {
    case Approach::direct: return "direct";
    case Approach::mm: return "mm";
    case Approach::mc: return "mc";
    case Approach::mi: return "mi";
    }
    return "unknown";
}

Approach parse_approach(const std::string& s) {
    if (s == "direct" || s == "none") return Approach::direct;
    if (s == "mm" || s == "MM") return Approach::mm;
    if (s == "mc" || s == "MC") return Approach::mc;
    if (s == "mi" || s == "MI") return Approach::mi;
    throw config_error("unknown approach '" + s + "' (expected direct, mm, mc or mi)");
}

std::string PipelineConfig::label() const {
    std::string name;
    switch (model) {
    case ModelKind::persistence: return "B_pday";
    case ModelKind::linear: name = "LR"; break;
    case ModelKind::forest: name = "RF"; break;
    case ModelKind::cnn: name = "CNN"; break;
    }
    switch (approach) {
    case Approach::direct: break;
    case Approach::mm: name += "_MM"; break;
    case Approach::mc: name += "_MC"; break;
    case Approach::mi: name += "_MI"; break;
    }
    return name;
}

void validate(const PipelineConfig& cfg) {
    std::vector<std::string> problems;
    if (cfg.uses_wavelet()) {
        if (cfg.wavelet_order < 1 || cfg.wavelet_order > 7) {
            problems.push_back("wavelet order " + std::to_string(cfg.wavelet_order) +
                               " outside [1, 7]");
        }
        if (cfg.level < 1 || cfg.level > 4) {
            problems.push_back("decomposition level " + std::to_string(cfg.level) + " outside [1, 4]");
        }
    }
    if (cfg.approach == Approach::mi && cfg.model != ModelKind::cnn) {
        problems.push_back("approach mi requires model cnn");
    }
    if (cfg.model == ModelKind::persistence && cfg.approach != Approach::direct) {
        problems.push_back("persistence only runs with approach direct");
    }
    if (cfg.train_days < kFirstCoreDay + 4) {
        problems.push_back("train_days must be >= " + std::to_string(kFirstCoreDay + 4));
    }
    if (!(cfg.validation_fraction > 0.0 && cfg.validation_fraction < 1.0)) {
        problems.push_back("validation_fraction must be in (0, 1)");
    }
    if (cfg.jobs < 0) problems.push_back("jobs must be >= 0 (0 = all cores)");
    if (cfg.forest.n_estimators < 1) problems.push_back("forest n_estimators must be >= 1");
    if (cfg.forest.min_samples_split < 2) problems.push_back("forest min_samples_split must be >= 2");
    if (cfg.forest.max_depth < 0) problems.push_back("forest max_depth must be >= 0");
    if (cfg.cnn.filters < 1) problems.push_back("cnn filters must be >= 1");
    if (cfg.cnn.kernel < 1 || cfg.cnn.kernel % 2 == 0) problems.push_back("cnn kernel must be odd and >= 1");
    if (cfg.cnn.max_epochs < 1 || cfg.cnn.patience < 1) {
        problems.push_back("cnn max_epochs and patience must be >= 1");
    }
    if (!(cfg.cnn.learning_rate > 0.0)) problems.push_back("cnn learning_rate must be > 0");
    if (cfg.cnn.batch_size < 0) problems.push_back("cnn batch_size must be >= 0 (0 = full batch)");
    if (problems.empty()) return;
    std::string msg = "invalid pipeline configuration:";
    for (const auto& p : problems) msg += "\n  - " + p;
    throw config_error(msg);
}

DatasetSplit split_dataset(const DailyMatrix& m, int train_days) {
    if (train_days <= 0 || train_days >= m.days()) {
        throw data_error("split: need more than " + std::to_string(train_days) + " days, have " +
                         std::to_string(m.days()));
    }
    return {slice_days(m, 0, train_days), slice_days(m, train_days, m.days() - train_days)};
}

DailyFeatures transform_daily(const DailyMatrix& m, const PipelineConfig& cfg) {
    const Eigen::Index days = m.days();
    const int steps = static_cast<int>(m.steps());
    if (days <= kFirstCoreDay) {
        throw data_error("transform: need more than " + std::to_string(kFirstCoreDay) + " days, have " +
                         std::to_string(days));
    }
    DailyFeatures out;
    const Eigen::Index n = days - kFirstCoreDay;
    for (Eigen::Index d = kFirstCoreDay; d < days; ++d) out.core_days.push_back(d);

    if (!cfg.uses_wavelet()) {
        out.coefficients = FeatureTensor(m.values.bottomRows(n), steps, 1);
        return out;
    }

    const FilterBank<double> f = daubechies<double>(cfg.wavelet_order);
    const PaddingPlan plan = padding_plan(steps, steps, f, cfg.level);
    const int bands = cfg.level + 1;
    const bool components = cfg.approach == Approach::mm;

    RowMatrixXd coeff;
    if (components) {
        out.components.assign(bands, RowMatrixXd(n, steps));
    } else {
        coeff.resize(n, static_cast<Eigen::Index>(steps) * bands);
    }

    std::optional<LinearPadder> padder;
    if (cfg.padding == PaddingMethod::linear) {
        padder.emplace(steps);
        padder->fit(m.values.topRows(kFirstCoreDay + 1));
    }

    for (Eigen::Index i = 0; i < n; ++i) {
        const Eigen::Index d = kFirstCoreDay + i;
        const VectorXd prev = m.values.row(d - 1).transpose();
        const VectorXd core = m.values.row(d).transpose();
        if (padder && i > 0) padder->update(core);
        const PaddedSignal p = padder ? pad_lr(*padder, prev, core, plan) : pad_rep(prev, core, plan);
        const SwtCoefficients<double> c = swt<double>(p.values, f, cfg.level);

        if (components) {
            const ComponentSet<double> comps = reconstruct_components(c, f);
            out.components[0].row(i) = comps.approx.segment(p.core_off, steps).transpose();
            for (int l = 1; l <= cfg.level; ++l) {
                out.components[l].row(i) = comps.details[l - 1].segment(p.core_off, steps).transpose();
            }
        } else {
            for (int t = 0; t < steps; ++t) {
                coeff(i, t * bands) = c.approx[p.core_off + t];
                for (int l = 1; l <= cfg.level; ++l) coeff(i, t * bands + l) = c.details[l - 1][p.core_off + t];
            }
        }
    }
    if (!components) out.coefficients = FeatureTensor(std::move(coeff), steps, bands);
    return out;
}

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

RowMatrixXd take_rows(const RowMatrixXd& m, const std::vector<Eigen::Index>& rows) {
    RowMatrixXd out(static_cast<Eigen::Index>(rows.size()), m.cols());
    for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = m.row(rows[i]);
    return out;
}

/// Sample rows of a DailyFeatures table whose target lands in the training
/// range or the test range.
struct SampleRows {
    std::vector<Eigen::Index> train; ///< feature rows
    std::vector<Eigen::Index> test;
    std::vector<Eigen::Index> train_targets; ///< matrix rows
    std::vector<Eigen::Index> test_targets;
};

SampleRows sample_rows(const DailyFeatures& f, Eigen::Index n_train, Eigen::Index days) {
    SampleRows s;
    for (std::size_t i = 0; i < f.core_days.size(); ++i) {
        const Eigen::Index target = f.core_days[i] + 1;
        if (target >= days) continue;
        if (target < n_train) {
            s.train.push_back(static_cast<Eigen::Index>(i));
            s.train_targets.push_back(target);
        } else {
            s.test.push_back(static_cast<Eigen::Index>(i));
            s.test_targets.push_back(target);
        }
    }
    return s;
}

struct Prepared {
    DailyMatrix full;
    Eigen::Index n_train = 0;
};

Prepared prepare(const PipelineConfig& cfg, const DailyMatrix& train, const DailyMatrix& test) {
    validate(cfg);
    if (train.days() < kFirstCoreDay + 4) {
        throw data_error("pipeline: training part has " + std::to_string(train.days()) +
                         " days, need at least " + std::to_string(kFirstCoreDay + 4));
    }
    if (test.days() < 1) throw data_error("pipeline: empty test part");
    if (train.steps() != test.steps()) throw shape_error("pipeline: train and test step counts differ");
    if (cfg.model == ModelKind::cnn && train.steps() != cfg.cnn.outputs) {
        throw config_error("pipeline: cnn outputs " + std::to_string(cfg.cnn.outputs) +
                           " != steps per day " + std::to_string(train.steps()));
    }
    return {concat_days(train, test), train.days()};
}

struct FittedModel {
    std::shared_ptr<ModelBundle> bundle;
    Eigen::Index validation_samples = 0;
};

FittedModel fit_model(ModelKind kind, const PipelineConfig& cfg, CnnTopology topology,
                      const FeatureTensor& x, const RowMatrixXd& y, std::uint64_t seed, int jobs) {
    RegressorSettings settings;
    settings.forest = cfg.forest;
    settings.cnn = cfg.cnn;
    settings.cnn.topology = topology;
    settings.seed = seed;
    settings.jobs = jobs;

    auto bundle = std::make_shared<ModelBundle>();
    bundle->model = make_regressor(kind, settings);
    bundle->x_norm = fit_normalizer(x.values);
    bundle->y_norm = fit_global_normalizer(y);
    const FeatureTensor xs(normalize(x.values, *bundle->x_norm), x.n_steps, x.n_coeff);
    const RowMatrixXd ys = normalize(y, *bundle->y_norm);

    FittedModel out;
    if (bundle->model->uses_validation()) {
        const Eigen::Index n = xs.samples();
        Eigen::Index n_val = static_cast<Eigen::Index>(std::llround(cfg.validation_fraction * n));
        n_val = std::clamp<Eigen::Index>(n_val, 1, n - 1);
        if (n < 2) throw data_error("pipeline: need at least 2 training samples for validation");
        const Eigen::Index n_fit = n - n_val;
        bundle->model->fit(xs.rows(0, n_fit), ys.topRows(n_fit), xs.rows(n_fit, n_val), ys.bottomRows(n_val));
        out.validation_samples = n_val;
    } else {
        bundle->model->fit(xs, ys, FeatureTensor(), RowMatrixXd());
    }
    out.bundle = std::move(bundle);
    return out;
}

RowMatrixXd predict_model(const ModelBundle& b, const FeatureTensor& x) {
    const FeatureTensor xs(normalize(x.values, *b.x_norm), x.n_steps, x.n_coeff);
    return denormalize(b.model->predict(xs), *b.y_norm);
}

void finish_report(ForecastReport& r, const Prepared& p, const SampleRows& rows) {
    const Eigen::Index steps = p.full.steps();
    r.actuals = take_rows(p.full.values, rows.test_targets);
    r.dates.clear();
    RowMatrixXd previous(static_cast<Eigen::Index>(rows.test_targets.size()), steps);
    for (std::size_t i = 0; i < rows.test_targets.size(); ++i) {
        const Eigen::Index target = rows.test_targets[i];
        if (!p.full.dates.empty()) r.dates.push_back(p.full.dates[target]);
        previous.row(static_cast<Eigen::Index>(i)) = p.full.values.row(target - 1);
    }
    for (Eigen::Index i = 0; i < r.predictions.size(); ++i) {
        if (!std::isfinite(r.predictions.data()[i])) {
            throw Error(ErrorKind::divergence, r.config.label() + ": non-finite prediction");
        }
    }
    r.context = make_metrics_context(p.full.values.topRows(p.n_train));
    r.metrics = compute_metrics(r.predictions, r.actuals, r.context);
    r.persistence_mae = (previous - r.actuals).cwiseAbs().mean();
    r.improvement = improvement(r.persistence_mae, r.metrics.mae);
    r.day_mae = per_day_mae(r.predictions, r.actuals);
    r.train_samples = static_cast<Eigen::Index>(rows.train.size());
}

std::uint64_t model_seed(const PipelineConfig& cfg, ModelKind kind, int component) {
    return derive_seed(cfg.seed, "model." + to_string(kind), static_cast<std::uint64_t>(component));
}

ForecastReport run_single_model(const PipelineConfig& cfg, const DailyMatrix& train,
                                const DailyMatrix& test, CnnTopology topology) {
    const Prepared p = prepare(cfg, train, test);
    ForecastReport r;
    r.config = cfg;

    const auto t0 = Clock::now();
    const DailyFeatures feats = transform_daily(p.full, cfg);
    r.timings.transform_s = since(t0);
    const SampleRows rows = sample_rows(feats, p.n_train, p.full.days());
    r.n_coeff = feats.coefficients.n_coeff;

    const FeatureTensor& all = feats.coefficients;
    const FeatureTensor test_x(take_rows(all.values, rows.test), all.n_steps, all.n_coeff);

    if (cfg.model == ModelKind::persistence) {
        const auto t1 = Clock::now();
        r.predictions = PersistenceRegressor().predict(test_x);
        r.timings.predict_s = since(t1);
    } else {
        const FeatureTensor train_x(take_rows(all.values, rows.train), all.n_steps, all.n_coeff);
        const RowMatrixXd train_y = take_rows(p.full.values, rows.train_targets);
        const auto t1 = Clock::now();
        FittedModel fitted = fit_model(cfg.model, cfg, topology, train_x, train_y,
                                       model_seed(cfg, cfg.model, 0), cfg.jobs);
        r.timings.fit_s = since(t1);
        const auto t2 = Clock::now();
        r.predictions = predict_model(*fitted.bundle, test_x);
        r.timings.predict_s = since(t2);
        r.fitted_model_count = fitted.bundle->model->fitted_model_count();
        r.component_model_count = 1;
        r.validation_samples = fitted.validation_samples;
        r.models.push_back(std::move(fitted.bundle));
    }
    r.timings.total_s = since(t0);
    finish_report(r, p, rows);
    return r;
}

} // namespace

ForecastReport run_direct(const PipelineConfig& cfg, const DailyMatrix& train, const DailyMatrix& test) {
    if (cfg.approach != Approach::direct) throw config_error("run_direct: approach must be direct");
    return run_single_model(cfg, train, test, CnnTopology::multi_channel);
}

ForecastReport run_mc(const PipelineConfig& cfg, const DailyMatrix& train, const DailyMatrix& test) {
    if (cfg.approach != Approach::mc) throw config_error("run_mc: approach must be mc");
    return run_single_model(cfg, train, test, CnnTopology::multi_channel);
}

ForecastReport run_mi(const PipelineConfig& cfg, const DailyMatrix& train, const DailyMatrix& test) {
    if (cfg.approach != Approach::mi) throw config_error("run_mi: approach must be mi");
    return run_single_model(cfg, train, test, CnnTopology::multi_input);
}

ForecastReport run_mm(const PipelineConfig& cfg, const DailyMatrix& train, const DailyMatrix& test) {
    if (cfg.approach != Approach::mm) throw config_error("run_mm: approach must be mm");
    const Prepared p = prepare(cfg, train, test);
    ForecastReport r;
    r.config = cfg;
    r.n_coeff = cfg.level + 1;

    const auto t0 = Clock::now();
    const DailyFeatures feats = transform_daily(p.full, cfg);
    r.timings.transform_s = since(t0);
    const SampleRows rows = sample_rows(feats, p.n_train, p.full.days());
    const int steps = static_cast<int>(p.full.steps());

    // Targets are the same component of the next core day, i.e. the next feature row.
    std::vector<Eigen::Index> train_next(rows.train.size());
    for (std::size_t i = 0; i < rows.train.size(); ++i) train_next[i] = rows.train[i] + 1;

    r.predictions = RowMatrixXd::Zero(static_cast<Eigen::Index>(rows.test.size()), steps);
    for (int c = 0; c < r.n_coeff; ++c) {
        const RowMatrixXd& comp = feats.components[c];
        const ModelKind kind = c == 0 ? cfg.model : ModelKind::linear;
        const FeatureTensor x(take_rows(comp, rows.train), steps, 1);
        const RowMatrixXd y = take_rows(comp, train_next);
        const auto t1 = Clock::now();
        FittedModel fitted = fit_model(kind, cfg, CnnTopology::multi_channel, x, y,
                                       model_seed(cfg, kind, c), cfg.jobs);
        r.timings.fit_s += since(t1);
        const auto t2 = Clock::now();
        r.predictions += predict_model(*fitted.bundle, FeatureTensor(take_rows(comp, rows.test), steps, 1));
        r.timings.predict_s += since(t2);
        r.fitted_model_count += fitted.bundle->model->fitted_model_count();
        r.validation_samples = std::max(r.validation_samples, fitted.validation_samples);
        r.models.push_back(std::move(fitted.bundle));
    }
    r.component_model_count = r.n_coeff;
    r.timings.total_s = since(t0);
    finish_report(r, p, rows);
    return r;
}

ForecastReport run_pipeline(const PipelineConfig& cfg, const DailyMatrix& train, const DailyMatrix& test) {
    switch (cfg.approach) {
    case Approach::direct: return run_direct(cfg, train, test);
    case Approach::mm: return run_mm(cfg, train, test);
    case Approach::mc: return run_mc(cfg, train, test);
    case Approach::mi: return run_mi(cfg, train, test);
    }
    throw config_error("unknown approach");
}

std::vector<PipelineConfig> expand_grid(const SweepGrid& grid, const PipelineConfig& base) {
    std::vector<PipelineConfig> cells;
    for (const Approach a : grid.approaches) {
        for (const ModelKind m : grid.models) {
            if (a == Approach::mi && m != ModelKind::cnn) continue;
            if (m == ModelKind::persistence && a != Approach::direct) continue;
            PipelineConfig cfg = base;
            cfg.approach = a;
            cfg.model = m;
            if (a == Approach::direct) {
                cells.push_back(cfg);
                continue;
            }
            for (const int order : grid.orders) {
                for (const int level : grid.levels) {
                    for (const PaddingMethod pad : grid.paddings) {
                        cfg.wavelet_order = order;
                        cfg.level = level;
                        cfg.padding = pad;
                        cells.push_back(cfg);
                    }
                }
            }
        }
    }
    return cells;
}

std::vector<SweepCell> sweep_settings(const SweepGrid& grid, const PipelineConfig& base,
                                      const DailyMatrix& train, const DailyMatrix& test, int jobs,
                                      const std::atomic<bool>* cancel) {
    const auto configs = expand_grid(grid, base);
    if (configs.empty()) throw config_error("sweep: the grid has no valid cells");
    std::vector<SweepCell> cells(configs.size());
    const int workers = static_cast<int>(resolve_jobs(jobs));
    parallel_for(cells.size(), workers, [&](std::size_t i) {
        SweepCell& cell = cells[i];
        cell.config = configs[i];
        if (workers > 1) cell.config.jobs = 1;
        if (cancel && cancel->load()) {
            cell.error = "interrupted";
            return;
        }
        try {
            cell.report = run_pipeline(cell.config, train, test);
        } catch (const std::exception& e) {
            cell.error = e.what();
        }
    });
    return cells;
}

} // namespace wavecast
