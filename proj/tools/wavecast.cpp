// wavecast: command-line front end.
//
// Exit codes: 0 ok, 2 configuration, 3 data, 4 runtime, 5 sweep finished
// with failed cells.

#include "wavecast/calendar.hpp"
#include "wavecast/data_io.hpp"
#include "wavecast/error.hpp"
#include "wavecast/fetch.hpp"
#include "wavecast/metrics.hpp"
#include "wavecast/pipeline.hpp"
#include "wavecast/report_io.hpp"
#include "wavecast/synth.hpp"
#include "wavecast/volatility.hpp"
#include "wavecast/wavelet.hpp"

#include <CLI11.hpp>

#include <atomic>
#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using namespace wavecast;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitRuntime = 4;
constexpr int kExitPartial = 5;

std::atomic<bool> g_interrupted{false};

extern "C" void on_sigint(int) { g_interrupted = true; }

struct DataOptions {
    std::string input;
    std::string matrix;
    std::vector<std::string> columns;
    std::string site;
    int synth_days = 0;
    int synth_sites = 1;
    double synth_capacity = 100.0;
    double synth_noise = 0.3;
    double synth_amplitude = 0.3;
    std::string synth_start = "2019-01-01";
};

struct CommonOptions {
    std::uint64_t seed = 0;
    std::string out = ".";
    int jobs = 0;
};

void add_common(CLI::App* cmd, CommonOptions& c) {
    cmd->add_option("--seed", c.seed, "Root seed for every random component");
    cmd->add_option("--out", c.out, "Output directory (file for synth/fetch)");
    cmd->add_option("--jobs", c.jobs, "Worker threads, 0 = all cores");
}

void add_data(CLI::App* cmd, DataOptions& d) {
    cmd->add_option("--input", d.input, "Series CSV (timestamp + one MW column per site)");
    cmd->add_option("--matrix", d.matrix, "Matrix CSV (date + 27 step columns)");
    cmd->add_option("--columns", d.columns, "Site columns to read from --input")->delimiter(',');
    cmd->add_option("--site", d.site, "Single site to model instead of the aggregate");
    cmd->add_option("--synth-days", d.synth_days, "Generate this many synthetic days instead of reading a file");
    cmd->add_option("--synth-sites", d.synth_sites, "Synthetic sites");
    cmd->add_option("--synth-capacity", d.synth_capacity, "Synthetic site capacity (MW)");
    cmd->add_option("--synth-noise", d.synth_noise, "Synthetic cloud-noise level in [0, 1]");
    cmd->add_option("--synth-amplitude", d.synth_amplitude, "Synthetic seasonal amplitude in [0, 1)");
    cmd->add_option("--synth-start", d.synth_start, "First synthetic date");
}

DayNumber parse_date_or_throw(const std::string& s, const std::string& what) {
    const auto d = parse_date(s);
    if (!d) throw config_error(what + ": bad date '" + s + "' (expected YYYY-MM-DD)");
    return *d;
}

SynthParams synth_params(const DataOptions& d, std::uint64_t seed) {
    SynthParams p;
    p.days = d.synth_days;
    p.sites = d.synth_sites;
    p.capacity = d.synth_capacity;
    p.cloud_noise = d.synth_noise;
    p.seasonal_amplitude = d.synth_amplitude;
    p.start_date = parse_date_or_throw(d.synth_start, "--synth-start");
    p.seed = seed;
    return p;
}

struct Sites {
    std::vector<std::string> names;
    std::vector<DailyMatrix> matrices;
};

Sites load_sites(const DataOptions& d, std::uint64_t seed) {
    const int sources = (d.input.empty() ? 0 : 1) + (d.matrix.empty() ? 0 : 1) + (d.synth_days > 0 ? 1 : 0);
    if (sources != 1) throw config_error("choose exactly one data source: --input, --matrix or --synth-days");
    Sites s;
    if (!d.matrix.empty()) {
        s.names.push_back(fs::path(d.matrix).stem().string());
        s.matrices.push_back(read_matrix_csv(d.matrix));
    } else if (!d.input.empty()) {
        CsvSchema schema;
        schema.value_columns = d.columns;
        LoadResult r = load_csv(d.input, schema);
        for (const auto& issue : r.issues) {
            std::cerr << "ingest " << to_string(issue.kind);
            if (issue.line) std::cerr << " line " << issue.line;
            std::cerr << ": " << issue.message << '\n';
        }
        if (!r.rejected_days.empty()) std::cerr << "rejected " << r.rejected_days.size() << " day(s)\n";
        s.names = std::move(r.site_names);
        s.matrices = std::move(r.sites);
    } else {
        s.matrices = synthesize_pv(synth_params(d, seed));
        for (std::size_t i = 0; i < s.matrices.size(); ++i) s.names.push_back("site" + std::to_string(i + 1));
    }
    if (s.matrices.empty() || s.matrices.front().days() == 0) throw data_error("no complete days in the input");
    return s;
}

DailyMatrix target_series(const Sites& s, const std::string& site) {
    if (site.empty()) return aggregate_sites(s.matrices);
    for (std::size_t i = 0; i < s.names.size(); ++i) {
        if (s.names[i] == site) return s.matrices[i];
    }
    throw config_error("unknown site '" + site + "'");
}

void write_json(const fs::path& path, const nlohmann::json& j) {
    std::ofstream out(path);
    if (!out) throw data_error("cannot write " + path.string());
    out << j.dump(2) << '\n';
}

// ---------------------------------------------------------------- decompose

struct DecomposeOptions {
    int wavelet = 4;
    int level = 1;
    std::string padding = "rep";
};

int cmd_decompose(const DataOptions& data, const CommonOptions& common, const DecomposeOptions& o) {
    const DailyMatrix m = target_series(load_sites(data, common.seed), data.site);
    PipelineConfig cfg;
    cfg.wavelet_order = o.wavelet;
    cfg.level = o.level;
    cfg.padding = parse_padding_method(o.padding);
    if (o.wavelet < 1 || o.wavelet > 7) throw config_error("--wavelet must be in [1, 7] (db1..db7)");
    if (o.level < 1 || o.level > 4) throw config_error("--level must be in [1, 4]");

    const FilterBank<double> f = daubechies<double>(o.wavelet);
    const PaddingPlan plan = padding_plan(static_cast<int>(m.steps()), static_cast<int>(m.steps()), f, o.level);
    const Eigen::Index first = cfg.padding == PaddingMethod::linear ? kFirstCoreDay : 1;
    if (m.days() <= first) throw data_error("decompose: need more than " + std::to_string(first) + " days");
    const Eigen::Index n = m.days() - first;
    const int steps = static_cast<int>(m.steps());

    std::vector<DailyMatrix> bands(o.level + 1), comps(o.level + 1);
    for (int b = 0; b <= o.level; ++b) {
        bands[b].values.resize(n, steps);
        comps[b].values.resize(n, steps);
        bands[b].dates.assign(m.dates.begin() + first, m.dates.end());
        comps[b].dates = bands[b].dates;
    }

    std::optional<LinearPadder> padder;
    if (cfg.padding == PaddingMethod::linear) {
        padder.emplace(steps);
        padder->fit(m.values.topRows(first + 1));
    }
    double recon_err = 0.0;
    double additivity_err = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const Eigen::Index d = first + i;
        const VectorXd prev = m.values.row(d - 1).transpose();
        const VectorXd core = m.values.row(d).transpose();
        if (padder && i > 0) padder->update(core);
        const PaddedSignal p = padder ? pad_lr(*padder, prev, core, plan) : pad_rep(prev, core, plan);
        const auto c = swt<double>(p.values, f, o.level);
        recon_err = std::max(recon_err, (iswt(c, f) - p.values).cwiseAbs().maxCoeff());
        const auto parts = reconstruct_components(c, f);
        additivity_err = std::max(additivity_err, (sum_components(parts) - p.values).cwiseAbs().maxCoeff());
        bands[0].values.row(i) = c.approx.segment(p.core_off, steps).transpose();
        comps[0].values.row(i) = parts.approx.segment(p.core_off, steps).transpose();
        for (int l = 1; l <= o.level; ++l) {
            bands[l].values.row(i) = c.details[l - 1].segment(p.core_off, steps).transpose();
            comps[l].values.row(i) = parts.details[l - 1].segment(p.core_off, steps).transpose();
        }
    }

    const fs::path out(common.out);
    fs::create_directories(out);
    const std::string L = std::to_string(o.level);
    write_matrix_csv(out / ("cA_" + L + ".csv"), bands[0]);
    write_matrix_csv(out / ("A_" + L + ".csv"), comps[0]);
    for (int l = 1; l <= o.level; ++l) {
        write_matrix_csv(out / ("cD_" + std::to_string(l) + ".csv"), bands[l]);
        write_matrix_csv(out / ("D_" + std::to_string(l) + ".csv"), comps[l]);
    }
    std::cout << wavelet_name(o.wavelet) << " level " << o.level << ", " << n << " days, padded length "
              << align_to_swt(plan) << '\n'
              << "reconstruction max error: " << format_double(recon_err) << '\n'
              << "component additivity max error: " << format_double(additivity_err) << '\n';
    return 0;
}

// ---------------------------------------------------------------- forecast / sweep

struct ModelOptions {
    std::vector<std::string> approaches{"mc"};
    std::vector<std::string> models{"lr"};
    int wavelet = 4;
    int level = 1;
    std::string padding = "rep";
    int train_days = 365;
    double validation_fraction = 0.3;
    int forest_trees = 50;
    int forest_depth = 0;
    int cnn_filters = 32;
    int cnn_kernel = 5;
    int cnn_epochs = 200;
    int cnn_patience = 20;
    int cnn_batch = 32;
    double cnn_lr = 1e-3;
};

void add_model(CLI::App* cmd, ModelOptions& m, bool grid) {
    cmd->add_option("--approach", m.approaches, "direct, mm, mc, mi (comma separated)")->delimiter(',');
    cmd->add_option("--model", m.models, "persistence, lr, rf, cnn (comma separated)")->delimiter(',');
    if (!grid) {
        cmd->add_option("--wavelet", m.wavelet, "Daubechies order 1..7");
        cmd->add_option("--level", m.level, "Decomposition level 1..4");
        cmd->add_option("--padding", m.padding, "rep or lr");
    }
    cmd->add_option("--train-days", m.train_days, "Days in the training part");
    cmd->add_option("--validation-fraction", m.validation_fraction, "CNN validation share of training samples");
    cmd->add_option("--forest-trees", m.forest_trees, "Trees per output step");
    cmd->add_option("--forest-depth", m.forest_depth, "Maximum tree depth, 0 = unlimited");
    cmd->add_option("--cnn-filters", m.cnn_filters, "Filters per convolution");
    cmd->add_option("--cnn-kernel", m.cnn_kernel, "Kernel width");
    cmd->add_option("--cnn-epochs", m.cnn_epochs, "Maximum epochs");
    cmd->add_option("--cnn-patience", m.cnn_patience, "Early-stopping patience");
    cmd->add_option("--cnn-batch", m.cnn_batch, "Mini-batch size, 0 = full batch");
    cmd->add_option("--cnn-lr", m.cnn_lr, "Adam learning rate");
}

PipelineConfig base_config(const ModelOptions& m, const CommonOptions& c) {
    PipelineConfig cfg;
    cfg.wavelet_order = m.wavelet;
    cfg.level = m.level;
    cfg.padding = parse_padding_method(m.padding);
    cfg.seed = c.seed;
    cfg.train_days = m.train_days;
    cfg.validation_fraction = m.validation_fraction;
    cfg.jobs = c.jobs;
    cfg.forest.n_estimators = m.forest_trees;
    cfg.forest.max_depth = m.forest_depth;
    cfg.cnn.filters = m.cnn_filters;
    cfg.cnn.kernel = m.cnn_kernel;
    cfg.cnn.max_epochs = m.cnn_epochs;
    cfg.cnn.patience = m.cnn_patience;
    cfg.cnn.batch_size = m.cnn_batch;
    cfg.cnn.learning_rate = m.cnn_lr;
    return cfg;
}

void write_report(const fs::path& dir, const ForecastReport& r, bool with_model) {
    fs::create_directories(dir);
    write_predictions_csv(dir / "predictions.csv", r);
    write_json(dir / "metrics.json", report_metrics_json(r));
    write_json(dir / "timing.json", report_timing_json(r));
    write_json(dir / "report.json", report_to_json(r));
    {
        std::ofstream out(dir / "metrics.csv");
        out << metrics_csv_header() << '\n' << metrics_csv_row(r) << '\n';
    }
    write_breakdown_csv(dir / "breakdown_timestep.csv",
                        breakdown(r.predictions, r.actuals, r.context, BreakdownAxis::timestep));
    write_breakdown_csv(dir / "breakdown_month.csv",
                        breakdown(r.predictions, r.actuals, r.context, BreakdownAxis::month, r.dates));
    if (with_model) {
        for (std::size_t i = 0; i < r.models.size(); ++i) {
            const std::string name = r.models.size() == 1 ? "model.json" : "model_band" + std::to_string(i) + ".json";
            wavecast::save_model(dir / name, *r.models[i]);
        }
    }
}

void print_report(const ForecastReport& r) {
    std::cout << r.config.label() << ": MAE " << format_double(r.metrics.mae) << " MW, RMSE "
              << format_double(r.metrics.rmse) << " MW, persistence MAE " << format_double(r.persistence_mae)
              << " MW, models " << r.fitted_model_count << ", wall " << r.timings.total_s << " s\n";
}

int cmd_forecast(const DataOptions& data, const CommonOptions& common, const ModelOptions& mo, bool save) {
    const DailyMatrix m = target_series(load_sites(data, common.seed), data.site);
    const PipelineConfig base = base_config(mo, common);
    std::vector<PipelineConfig> configs;
    for (const auto& a : mo.approaches) {
        for (const auto& k : mo.models) {
            PipelineConfig cfg = base;
            cfg.approach = parse_approach(a);
            cfg.model = parse_model_kind(k);
            validate(cfg);
            configs.push_back(cfg);
        }
    }
    const DatasetSplit split = split_dataset(m, base.train_days);
    const fs::path out(common.out);
    fs::create_directories(out);

    std::vector<ForecastReport> reports;
    for (const auto& cfg : configs) {
        reports.push_back(run_pipeline(cfg, split.train, split.test));
        print_report(reports.back());
        write_report(configs.size() == 1 ? out : out / cfg.label(), reports.back(), save);
    }
    if (reports.size() > 1) {
        std::ofstream table(out / "metrics.csv");
        table << metrics_csv_header() << '\n';
        for (const auto& r : reports) table << metrics_csv_row(r) << '\n';
        std::vector<std::pair<std::string, RowMatrixXd>> preds;
        for (const auto& r : reports) preds.emplace_back(r.config.label(), r.predictions);
        const auto& ref = reports.front();
        write_significance_csv(out / "significance_timestep.csv",
                               significance(preds, ref.actuals, ref.context, BreakdownAxis::timestep));
        write_significance_csv(out / "significance_month.csv",
                               significance(preds, ref.actuals, ref.context, BreakdownAxis::month, ref.dates));
    }
    return 0;
}

struct GridOptions {
    std::vector<int> wavelets{1, 2, 3, 4, 5, 6, 7};
    std::vector<int> levels{1, 2, 3, 4};
    std::vector<std::string> paddings{"rep", "lr"};
};

int cmd_sweep(const DataOptions& data, const CommonOptions& common, const ModelOptions& mo, const GridOptions& g) {
    const DailyMatrix m = target_series(load_sites(data, common.seed), data.site);
    SweepGrid grid;
    grid.orders = g.wavelets;
    grid.levels = g.levels;
    grid.paddings.clear();
    for (const auto& p : g.paddings) grid.paddings.push_back(parse_padding_method(p));
    grid.approaches.clear();
    for (const auto& a : mo.approaches) grid.approaches.push_back(parse_approach(a));
    grid.models.clear();
    for (const auto& k : mo.models) grid.models.push_back(parse_model_kind(k));
    for (const int w : grid.orders) {
        if (w < 1 || w > 7) throw config_error("--wavelets entries must be in [1, 7]");
    }
    for (const int l : grid.levels) {
        if (l < 1 || l > 4) throw config_error("--levels entries must be in [1, 4]");
    }

    const PipelineConfig base = base_config(mo, common);
    const DatasetSplit split = split_dataset(m, base.train_days);
    std::signal(SIGINT, on_sigint);
    const auto cells = sweep_settings(grid, base, split.train, split.test, common.jobs, &g_interrupted);

    const fs::path out(common.out);
    fs::create_directories(out);
    write_sweep_csv(out / "sweep.csv", cells);
    write_timing_csv(out / "timing.csv", timing_summary(cells));
    int failed = 0;
    for (const auto& c : cells) {
        if (!c.report) {
            ++failed;
            std::cerr << c.config.label() << " failed: " << c.error << '\n';
        }
    }
    std::cout << cells.size() << " cells, " << failed << " failed\n";
    return failed ? kExitPartial : 0;
}

// ---------------------------------------------------------------- volatility

int cmd_volatility(const DataOptions& data, const CommonOptions& common, const std::string& aggregate_name,
                   const VolatilityOptions& opt) {
    const Sites s = load_sites(data, common.seed);
    const DailyMatrix agg = aggregate_sites(s.matrices);
    const VolatilityTable t = volatility_table(s.matrices, s.names, agg, aggregate_name, opt);
    const fs::path out(common.out);
    fs::create_directories(out);
    write_volatility_csv(out / "volatility.csv", t);
    for (std::size_t i = 0; i < t.columns.size(); ++i) {
        std::cout << t.columns[i] << ": sigma_1_27 " << format_double(t.intra_day[i]) << ", sigma_27_27 "
                  << format_double(t.trans_day[i]) << ", floored " << t.floored[i] << '\n';
    }
    return 0;
}

// ---------------------------------------------------------------- synth / fetch

int cmd_synth(const DataOptions& data, const CommonOptions& common, const std::string& matrix_out) {
    if (data.synth_days <= 0) throw config_error("synth: --synth-days is required");
    const auto sites = synthesize_pv(synth_params(data, common.seed));
    std::vector<std::string> names;
    for (std::size_t i = 0; i < sites.size(); ++i) names.push_back("site" + std::to_string(i + 1));
    const fs::path out = common.out == "." ? fs::path("synth.csv") : fs::path(common.out);
    if (out.has_parent_path()) fs::create_directories(out.parent_path());
    write_series_csv(out, names, sites);
    if (!matrix_out.empty()) write_matrix_csv(matrix_out, aggregate_sites(sites));
    std::cout << "wrote " << sites.front().days() << " days x " << sites.size() << " site(s) to " << out.string()
              << '\n';
    return 0;
}

struct FetchOptions {
    std::string url_template;
    std::string from;
    std::string to;
    std::string cache_dir;
    int retries = 3;
    int in_flight = 4;
    std::vector<std::string> duids;
};

int cmd_fetch(const CommonOptions& common, const FetchOptions& o) {
    FetchSpec spec;
    spec.url_template = o.url_template;
    spec.first = parse_date_or_throw(o.from, "--from");
    spec.last = parse_date_or_throw(o.to.empty() ? o.from : o.to, "--to");
    spec.cache_dir = o.cache_dir;
    if (spec.cache_dir.empty()) {
        const char* env = std::getenv("WAVECAST_CACHE_DIR");
        spec.cache_dir = env && *env ? fs::path(env) : fs::path("wavecast-cache");
    }
    spec.max_retries = o.retries;
    spec.max_in_flight = o.in_flight;
    const FetchResult r = fetch_archive(spec);
    std::size_t cached = 0;
    for (const auto& item : r.items) cached += item.from_cache ? 1 : 0;
    std::cout << r.items.size() << " item(s), " << cached << " from cache, " << r.network_requests
              << " network request(s), cache " << spec.cache_dir.string() << '\n';
    if (o.duids.empty()) return 0;

    LoadResult loaded = load_fetched_scada(r, o.duids);
    for (const auto& issue : loaded.issues) std::cerr << "ingest " << to_string(issue.kind) << ": " << issue.message << '\n';
    const fs::path out = common.out == "." ? fs::path("series.csv") : fs::path(common.out);
    if (out.has_parent_path()) fs::create_directories(out.parent_path());
    write_series_csv(out, loaded.site_names, loaded.sites);
    std::cout << "wrote " << loaded.sites.front().days() << " complete day(s) to " << out.string() << '\n';
    return 0;
}

int exit_code(ErrorKind k) {
    switch (k) {
    case ErrorKind::config: return kExitConfig;
    case ErrorKind::data:
    case ErrorKind::shape:
    case ErrorKind::integrity: return kExitData;
    default: return kExitRuntime;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Wavelet-based day-ahead PV forecasting toolkit"};
    app.set_config("--config", "", "TOML file; [section] names a subcommand, flags override it");
    app.require_subcommand(1);
    app.fallthrough();

    DataOptions data;
    CommonOptions common;

    DecomposeOptions dec;
    auto* decompose = app.add_subcommand("decompose", "Per-day SWT coefficients and components");
    add_data(decompose, data);
    add_common(decompose, common);
    decompose->add_option("--wavelet", dec.wavelet, "Daubechies order 1..7");
    decompose->add_option("--level", dec.level, "Decomposition level 1..4");
    decompose->add_option("--padding", dec.padding, "rep or lr");

    ModelOptions fmo;
    bool save = false;
    auto* forecast = app.add_subcommand("forecast", "Train, forecast the test part and report metrics");
    add_data(forecast, data);
    add_common(forecast, common);
    add_model(forecast, fmo, false);
    forecast->add_flag("--save-model", save, "Write the fitted model(s) as JSON");

    ModelOptions smo;
    GridOptions grid;
    auto* sweep = app.add_subcommand("sweep", "Grid over wavelet order, level and padding");
    add_data(sweep, data);
    add_common(sweep, common);
    add_model(sweep, smo, true);
    sweep->add_option("--wavelets", grid.wavelets, "Daubechies orders")->delimiter(',');
    sweep->add_option("--levels", grid.levels, "Decomposition levels")->delimiter(',');
    sweep->add_option("--paddings", grid.paddings, "Padding methods")->delimiter(',');

    std::string aggregate_name = "aggregate";
    VolatilityOptions vopt;
    auto* vol = app.add_subcommand("volatility", "Intra-day and trans-day volatility per site and aggregate");
    add_data(vol, data);
    add_common(vol, common);
    vol->add_option("--aggregate-name", aggregate_name, "Column name of the aggregate");
    vol->add_option("--floor", vopt.floor, "Values below this (MW) are raised to it");
    vol->add_option("--first-days", vopt.first_days, "Days entering the table");

    std::string matrix_out;
    auto* synth = app.add_subcommand("synth", "Write a synthetic PV series CSV");
    add_data(synth, data);
    add_common(synth, common);
    synth->add_option("--matrix-out", matrix_out, "Also write the aggregate as a matrix CSV");

    FetchOptions fo;
    auto* fetch = app.add_subcommand("fetch", "Download dated archives into the cache");
    add_common(fetch, common);
    fetch->add_option("--url-template", fo.url_template, "URL with {date} (YYYYMMDD) or {yyyy}/{mm}/{dd}")->required();
    fetch->add_option("--from", fo.from, "First date")->required();
    fetch->add_option("--to", fo.to, "Last date (inclusive)");
    fetch->add_option("--cache-dir", fo.cache_dir, "Cache directory (default $WAVECAST_CACHE_DIR)");
    fetch->add_option("--retries", fo.retries, "Retries per item");
    fetch->add_option("--in-flight", fo.in_flight, "Concurrent downloads");
    fetch->add_option("--duids", fo.duids, "Units to extract from UNIT_SCADA records")->delimiter(',');

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitConfig;
    }

    try {
        if (*decompose) return cmd_decompose(data, common, dec);
        if (*forecast) return cmd_forecast(data, common, fmo, save);
        if (*sweep) return cmd_sweep(data, common, smo, grid);
        if (*vol) return cmd_volatility(data, common, aggregate_name, vopt);
        if (*synth) return cmd_synth(data, common, matrix_out);
        if (*fetch) return cmd_fetch(common, fo);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_code(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return 0;
}
