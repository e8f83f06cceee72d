#include "wavecast/report_io.hpp"

#include "wavecast/calendar.hpp"
#include "wavecast/data_io.hpp"
#include "wavecast/error.hpp"
#include "wavecast/wavelet.hpp"

#include <fstream>
#include <map>
#include <sstream>
#include <tuple>

namespace wavecast {

using nlohmann::json;

namespace {

json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::string cell(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw data_error("cannot write " + path.string());
    return out;
}

std::string wavelet_field(const PipelineConfig& c) {
    return c.uses_wavelet() ? wavelet_name(c.wavelet_order) : std::string();
}

std::string level_field(const PipelineConfig& c) {
    return c.uses_wavelet() ? std::to_string(c.level) : std::string();
}

std::string padding_field(const PipelineConfig& c) {
    return c.uses_wavelet() ? to_string(c.padding) : std::string();
}

std::string quote(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (const char ch : s) {
        if (ch == '"') out += "\"\"";
        else if (ch == '\n') out += ' ';
        else out += ch;
    }
    return out + "\"";
}

} // namespace

json config_to_json(const PipelineConfig& c) {
    json j{{"label", c.label()},
           {"approach", to_string(c.approach)},
           {"model", to_string(c.model)},
           {"seed", c.seed},
           {"train_days", c.train_days}};
    if (c.uses_wavelet()) {
        j["wavelet"] = wavelet_name(c.wavelet_order);
        j["level"] = c.level;
        j["padding"] = to_string(c.padding);
    }
    if (c.model == ModelKind::forest) {
        j["forest"] = {{"n_estimators", c.forest.n_estimators},
                       {"bootstrap", c.forest.bootstrap},
                       {"max_depth", c.forest.max_depth},
                       {"min_samples_split", c.forest.min_samples_split}};
    }
    if (c.model == ModelKind::cnn) {
        j["cnn"] = {{"filters", c.cnn.filters},       {"kernel", c.cnn.kernel},
                    {"max_epochs", c.cnn.max_epochs}, {"patience", c.cnn.patience},
                    {"learning_rate", c.cnn.learning_rate}, {"batch_size", c.cnn.batch_size},
                    {"validation_fraction", c.validation_fraction}};
    }
    return j;
}

json metrics_to_json(const MetricsBundle& m) {
    return {{"mae", m.mae},          {"rmse", m.rmse},  {"mre", m.mre},
            {"rae", opt(m.rae)},     {"rrse", opt(m.rrse)}, {"r2", opt(m.r2)},
            {"r2_standard", opt(m.r2_standard)}, {"count", m.count}};
}

json report_metrics_json(const ForecastReport& r) {
    return {{"config", config_to_json(r.config)},
            {"metrics", metrics_to_json(r.metrics)},
            {"persistence_mae", r.persistence_mae},
            {"improvement_pct", opt(r.improvement)},
            {"fitted_model_count", r.fitted_model_count},
            {"component_model_count", r.component_model_count},
            {"n_coeff", r.n_coeff},
            {"train_samples", r.train_samples},
            {"validation_samples", r.validation_samples},
            {"test_days", r.actuals.rows()},
            {"capacity_mw", r.context.capacity}};
}

json report_timing_json(const ForecastReport& r) {
    return {{"transform_s", r.timings.transform_s},
            {"fit_s", r.timings.fit_s},
            {"predict_s", r.timings.predict_s},
            {"wall_time_s", r.timings.total_s}};
}

json report_to_json(const ForecastReport& r) {
    json j = report_metrics_json(r);
    j["timing"] = report_timing_json(r);
    json dates = json::array();
    for (const DayNumber d : r.dates) dates.push_back(format_date(d));
    json pred = json::array();
    json act = json::array();
    for (Eigen::Index d = 0; d < r.predictions.rows(); ++d) {
        pred.push_back(std::vector<double>(r.predictions.row(d).begin(), r.predictions.row(d).end()));
        act.push_back(std::vector<double>(r.actuals.row(d).begin(), r.actuals.row(d).end()));
    }
    j["dates"] = std::move(dates);
    j["predictions"] = std::move(pred);
    j["actuals"] = std::move(act);
    return j;
}

void write_predictions_csv(const std::filesystem::path& path, const ForecastReport& r) {
    auto out = open_out(path);
    out << "date,step,time,actual,predicted\n";
    for (Eigen::Index d = 0; d < r.predictions.rows(); ++d) {
        const std::string date = d < static_cast<Eigen::Index>(r.dates.size()) ? format_date(r.dates[d]) : "";
        for (Eigen::Index t = 0; t < r.predictions.cols(); ++t) {
            out << date << ',' << t << ',' << step_label(static_cast<int>(t)) << ','
                << format_double(r.actuals(d, t)) << ',' << format_double(r.predictions(d, t)) << '\n';
        }
    }
}

std::string metrics_csv_header() {
    return "label,approach,model,wavelet,level,padding,mae,rmse,mre,rae,rrse,r2,r2_standard,"
           "persistence_mae,improvement_pct,fitted_models,component_models,wall_time_s";
}

std::string metrics_csv_row(const ForecastReport& r) {
    const auto& c = r.config;
    const auto& m = r.metrics;
    std::ostringstream s;
    s << c.label() << ',' << to_string(c.approach) << ',' << to_string(c.model) << ','
      << wavelet_field(c) << ',' << level_field(c) << ',' << padding_field(c) << ','
      << format_double(m.mae) << ',' << format_double(m.rmse) << ',' << format_double(m.mre) << ','
      << cell(m.rae) << ',' << cell(m.rrse) << ',' << cell(m.r2) << ',' << cell(m.r2_standard) << ','
      << format_double(r.persistence_mae) << ',' << cell(r.improvement) << ',' << r.fitted_model_count
      << ',' << r.component_model_count << ',' << format_double(r.timings.total_s);
    return s.str();
}

void write_sweep_csv(const std::filesystem::path& path, const std::vector<SweepCell>& cells) {
    auto out = open_out(path);
    out << "label,approach,model,wavelet,level,padding,status,MAE,RMSE,RAE,MRE,RRSE,R2,R2_standard,"
           "fitted_models,wall_time_s,error\n";
    for (const auto& c : cells) {
        const auto& cfg = c.config;
        out << cfg.label() << ',' << to_string(cfg.approach) << ',' << to_string(cfg.model) << ','
            << wavelet_field(cfg) << ',' << level_field(cfg) << ',' << padding_field(cfg) << ',';
        if (c.report) {
            const auto& m = c.report->metrics;
            out << "ok," << format_double(m.mae) << ',' << format_double(m.rmse) << ',' << cell(m.rae)
                << ',' << format_double(m.mre) << ',' << cell(m.rrse) << ',' << cell(m.r2) << ','
                << cell(m.r2_standard) << ',' << c.report->fitted_model_count << ','
                << format_double(c.report->timings.total_s) << ",\n";
        } else {
            out << "failed,,,,,,,,,," << quote(c.error) << '\n';
        }
    }
}

std::vector<TimingRow> timing_summary(const std::vector<SweepCell>& cells) {
    std::map<std::tuple<std::string, int, std::string>, std::pair<double, int>> acc;
    for (const auto& c : cells) {
        if (!c.report) continue;
        const auto& cfg = c.config;
        auto& slot = acc[{cfg.label(), cfg.uses_wavelet() ? cfg.level : 0, padding_field(cfg)}];
        slot.first += c.report->timings.total_s;
        slot.second += 1;
    }
    std::vector<TimingRow> rows;
    for (const auto& [key, v] : acc) {
        rows.push_back({std::get<0>(key), std::get<1>(key), std::get<2>(key), v.first / v.second, v.second});
    }
    return rows;
}

void write_timing_csv(const std::filesystem::path& path, const std::vector<TimingRow>& rows) {
    auto out = open_out(path);
    out << "label,level,padding,mean_wall_time_s,cells\n";
    for (const auto& r : rows) {
        out << r.label << ',' << (r.level ? std::to_string(r.level) : "") << ',' << r.padding << ','
            << format_double(r.mean_s) << ',' << r.cells << '\n';
    }
}

void write_breakdown_csv(const std::filesystem::path& path, const std::vector<SliceMetrics>& slices) {
    auto out = open_out(path);
    out << "slice,count,mae,rmse,mre,rae,rrse,r2,r2_standard\n";
    for (const auto& s : slices) {
        out << s.label << ',';
        if (!s.metrics) {
            out << "0,,,,,,,\n";
            continue;
        }
        const auto& m = *s.metrics;
        out << m.count << ',' << format_double(m.mae) << ',' << format_double(m.rmse) << ','
            << format_double(m.mre) << ',' << cell(m.rae) << ',' << cell(m.rrse) << ',' << cell(m.r2)
            << ',' << cell(m.r2_standard) << '\n';
    }
}

void write_significance_csv(const std::filesystem::path& path, const SignificanceTable& t) {
    auto out = open_out(path);
    out << "slice,model_a,model_b,p_value\n";
    for (std::size_t s = 0; s < t.slices.size(); ++s) {
        for (std::size_t i = 0; i < t.models.size(); ++i) {
            for (std::size_t j = i + 1; j < t.models.size(); ++j) {
                const double p = t.p_values[s](static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
                out << t.slices[s] << ',' << t.models[i] << ',' << t.models[j] << ','
                    << (std::isnan(p) ? std::string() : format_double(p)) << '\n';
            }
        }
    }
}

void write_volatility_csv(const std::filesystem::path& path, const VolatilityTable& t) {
    auto out = open_out(path);
    out << "statistic";
    for (const auto& c : t.columns) out << ',' << quote(c);
    out << "\nsigma_1_27";
    for (const double v : t.intra_day) out << ',' << format_double(v);
    out << "\nsigma_27_27";
    for (const double v : t.trans_day) out << ',' << format_double(v);
    out << "\nfloored_samples";
    for (const int v : t.floored) out << ',' << v;
    out << "\nskipped_windows";
    for (const int v : t.skipped) out << ',' << v;
    out << '\n';
}

} // namespace wavecast
