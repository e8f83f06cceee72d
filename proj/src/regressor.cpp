#include "wavecast/regressor.hpp"

#include "wavecast/error.hpp"

#include <fstream>

namespace wavecast {

using nlohmann::json;

std::string to_string(ModelKind k) {
    switch (k) {
    case ModelKind::persistence: return "persistence";
    case ModelKind::linear: return "lr";
    case ModelKind::forest: return "rf";
    case ModelKind::cnn: return "cnn";
    }
    return "unknown";
}

ModelKind parse_model_kind(const std::string& s) {
    if (s == "persistence" || s == "PERSISTENCE" || s == "pday") return ModelKind::persistence;
    if (s == "lr" || s == "LR" || s == "linear") return ModelKind::linear;
    if (s == "rf" || s == "RF" || s == "forest") return ModelKind::forest;
    if (s == "cnn" || s == "CNN") return ModelKind::cnn;
    throw config_error("unknown model '" + s + "' (expected persistence, lr, rf or cnn)");
}

VectorXd persistence_forecast(const DailyMatrix& matrix, Eigen::Index day) {
    if (day <= 0) throw data_error("persistence: day 0 has no previous day");
    if (day > matrix.days()) {
        throw data_error("persistence: day " + std::to_string(day) + " is beyond the matrix");
    }
    return matrix.values.row(day - 1).transpose();
}

namespace {

json to_json(const MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

json to_json(const VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

MatrixXd matrix_from_json(const json& j) {
    const Eigen::Index rows = static_cast<Eigen::Index>(j.size());
    const Eigen::Index cols = rows ? static_cast<Eigen::Index>(j.at(0).size()) : 0;
    MatrixXd m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        if (static_cast<Eigen::Index>(j.at(r).size()) != cols) {
            throw data_error("model file: ragged matrix");
        }
        for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = j.at(r).at(c).get<double>();
    }
    return m;
}

VectorXd vector_from_json(const json& j) {
    const auto v = j.get<std::vector<double>>();
    return Eigen::Map<const VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

json to_json(const NormalizationParams& p) { return {{"min", to_json(p.min)}, {"max", to_json(p.max)}}; }

NormalizationParams normalization_from_json(const json& j) {
    NormalizationParams p;
    p.min = vector_from_json(j.at("min"));
    p.max = vector_from_json(j.at("max"));
    if (p.min.size() != p.max.size()) throw data_error("model file: min/max length mismatch");
    for (Eigen::Index i = 0; i < p.min.size(); ++i) {
        if (!(p.max[i] > p.min[i])) p.constant_features.push_back(i);
    }
    return p;
}

json forest_config_json(const ForestConfig& c) {
    return {{"n_estimators", c.n_estimators}, {"bootstrap", c.bootstrap},
            {"max_depth", c.max_depth},       {"min_samples_split", c.min_samples_split},
            {"seed", c.seed}};
}

ForestConfig forest_config_from_json(const json& j) {
    ForestConfig c;
    c.n_estimators = j.at("n_estimators").get<int>();
    c.bootstrap = j.at("bootstrap").get<bool>();
    c.max_depth = j.at("max_depth").get<int>();
    c.min_samples_split = j.at("min_samples_split").get<int>();
    c.seed = j.at("seed").get<std::uint64_t>();
    return c;
}

json cnn_config_json(const CnnConfig& c) {
    return {{"topology", to_string(c.topology)},
            {"filters", c.filters},
            {"kernel", c.kernel},
            {"outputs", c.outputs},
            {"max_epochs", c.max_epochs},
            {"patience", c.patience},
            {"learning_rate", c.learning_rate},
            {"beta1", c.beta1},
            {"beta2", c.beta2},
            {"epsilon", c.epsilon},
            {"batch_size", c.batch_size}};
}

CnnConfig cnn_config_from_json(const json& j) {
    CnnConfig c;
    const auto topo = j.at("topology").get<std::string>();
    if (topo != "mc" && topo != "mi") throw data_error("model file: unknown topology " + topo);
    c.topology = topo == "mc" ? CnnTopology::multi_channel : CnnTopology::multi_input;
    c.filters = j.at("filters").get<int>();
    c.kernel = j.at("kernel").get<int>();
    c.outputs = j.at("outputs").get<int>();
    c.max_epochs = j.at("max_epochs").get<int>();
    c.patience = j.at("patience").get<int>();
    c.learning_rate = j.at("learning_rate").get<double>();
    c.beta1 = j.at("beta1").get<double>();
    c.beta2 = j.at("beta2").get<double>();
    c.epsilon = j.at("epsilon").get<double>();
    c.batch_size = j.at("batch_size").get<int>();
    return c;
}

void require_single_band(const FeatureTensor& x) {
    if (x.n_coeff != 1) {
        throw shape_error("persistence: expects raw daily features (1 band), got " +
                          std::to_string(x.n_coeff));
    }
}

} // namespace

RowMatrixXd PersistenceRegressor::predict(const FeatureTensor& x) const {
    require_single_band(x);
    return x.values;
}

json PersistenceRegressor::to_json() const { return json::object(); }

void LinearRegressor::fit(const FeatureTensor& x, const RowMatrixXd& y, const FeatureTensor&,
                          const RowMatrixXd&) {
    model_ = fit_mimo_linear(x.values, y);
}

RowMatrixXd LinearRegressor::predict(const FeatureTensor& x) const {
    if (!model_) throw state_error("linear regressor: predict before fit");
    return model_->predict(x.values);
}

int LinearRegressor::fitted_model_count() const {
    return model_ ? static_cast<int>(model_->output_count()) : 0;
}

json LinearRegressor::to_json() const {
    if (!model_) throw state_error("linear regressor: nothing to serialise");
    return {{"feature_mean", wavecast::to_json(model_->feature_mean)},
            {"intercept", wavecast::to_json(model_->intercept)},
            {"weights", wavecast::to_json(model_->weights)},
            {"ridge_used", model_->ridge_used}};
}

void ForestRegressor::fit(const FeatureTensor& x, const RowMatrixXd& y, const FeatureTensor&,
                          const RowMatrixXd&) {
    forest_ = fit_mimo_forest(x.values, y, cfg_, jobs_);
}

RowMatrixXd ForestRegressor::predict(const FeatureTensor& x) const {
    if (!forest_) throw state_error("forest regressor: predict before fit");
    return forest_->predict(x.values);
}

int ForestRegressor::fitted_model_count() const {
    return forest_ ? static_cast<int>(forest_->steps.size()) : 0;
}

json ForestRegressor::to_json() const {
    if (!forest_) throw state_error("forest regressor: nothing to serialise");
    json steps = json::array();
    for (const auto& step : forest_->steps) {
        json trees = json::array();
        for (const auto& tree : step.trees) {
            // Columnar node arrays: feature, threshold, left, right, value.
            std::vector<int> feature, left, right;
            std::vector<double> threshold, value;
            for (const auto& n : tree.nodes) {
                feature.push_back(n.feature);
                threshold.push_back(n.threshold);
                left.push_back(n.left);
                right.push_back(n.right);
                value.push_back(n.value);
            }
            trees.push_back({{"feature", feature}, {"threshold", threshold}, {"left", left},
                             {"right", right}, {"value", value}});
        }
        steps.push_back({{"feature_count", step.feature_count}, {"trees", std::move(trees)}});
    }
    return {{"config", forest_config_json(cfg_)}, {"steps", std::move(steps)}};
}

void CnnRegressor::fit(const FeatureTensor& x, const RowMatrixXd& y, const FeatureTensor& val_x,
                       const RowMatrixXd& val_y) {
    model_ = fit_cnn(cfg_, x, y, val_x, val_y, seed_, &history_);
}

RowMatrixXd CnnRegressor::predict(const FeatureTensor& x) const {
    if (!model_) throw state_error("cnn regressor: predict before fit");
    return model_->predict(x);
}

json CnnRegressor::to_json() const {
    if (!model_) throw state_error("cnn regressor: nothing to serialise");
    json params = json::object();
    const auto names = model_->parameter_names();
    for (std::size_t i = 0; i < names.size(); ++i) {
        params[names[i]] = wavecast::to_json(model_->parameters()[i]);
    }
    return {{"config", cnn_config_json(cfg_)},
            {"n_steps", model_->n_steps()},
            {"n_coeff", model_->n_coeff()},
            {"parameters", std::move(params)}};
}

std::unique_ptr<Regressor> make_regressor(ModelKind kind, const RegressorSettings& s) {
    switch (kind) {
    case ModelKind::persistence: return std::make_unique<PersistenceRegressor>();
    case ModelKind::linear: return std::make_unique<LinearRegressor>();
    case ModelKind::forest: {
        ForestConfig cfg = s.forest;
        cfg.seed = s.seed;
        return std::make_unique<ForestRegressor>(cfg, s.jobs);
    }
    case ModelKind::cnn: return std::make_unique<CnnRegressor>(s.cnn, s.seed);
    }
    throw config_error("unknown model kind");
}

json model_to_json(const ModelBundle& bundle) {
    if (!bundle.model) throw state_error("model file: empty bundle");
    json j = {{"format", kModelFormat},
              {"version", kModelFormatVersion},
              {"kind", to_string(bundle.model->kind())},
              {"model", bundle.model->to_json()}};
    json norm = json::object();
    if (bundle.x_norm) norm["x"] = to_json(*bundle.x_norm);
    if (bundle.y_norm) norm["y"] = to_json(*bundle.y_norm);
    j["normalization"] = std::move(norm);
    return j;
}

ModelBundle model_from_json(const json& j) {
    if (j.value("format", "") != kModelFormat) throw data_error("model file: unknown format");
    const int version = j.at("version").get<int>();
    if (version != kModelFormatVersion) {
        throw data_error("model file: unsupported version " + std::to_string(version));
    }
    ModelBundle bundle;
    const ModelKind kind = parse_model_kind(j.at("kind").get<std::string>());
    const json& m = j.at("model");
    switch (kind) {
    case ModelKind::persistence: bundle.model = std::make_unique<PersistenceRegressor>(); break;
    case ModelKind::linear: {
        LinearMimoModel lm;
        lm.feature_mean = vector_from_json(m.at("feature_mean"));
        lm.intercept = vector_from_json(m.at("intercept"));
        lm.weights = matrix_from_json(m.at("weights"));
        lm.ridge_used = m.at("ridge_used").get<bool>();
        if (lm.weights.rows() != lm.feature_mean.size() || lm.weights.cols() != lm.intercept.size()) {
            throw data_error("model file: inconsistent linear model shapes");
        }
        bundle.model = std::make_unique<LinearRegressor>(std::move(lm));
        break;
    }
    case ModelKind::forest: {
        MimoForest forest;
        for (const auto& step : m.at("steps")) {
            ForestModel fm;
            fm.feature_count = step.at("feature_count").get<Eigen::Index>();
            for (const auto& t : step.at("trees")) {
                const auto feature = t.at("feature").get<std::vector<int>>();
                const auto threshold = t.at("threshold").get<std::vector<double>>();
                const auto left = t.at("left").get<std::vector<int>>();
                const auto right = t.at("right").get<std::vector<int>>();
                const auto value = t.at("value").get<std::vector<double>>();
                const std::size_t n = feature.size();
                if (threshold.size() != n || left.size() != n || right.size() != n ||
                    value.size() != n || n == 0) {
                    throw data_error("model file: malformed tree");
                }
                RegressionTree tree;
                for (std::size_t i = 0; i < n; ++i) {
                    const bool leaf = feature[i] < 0;
                    const auto in_range = [n](int c) { return c >= 0 && static_cast<std::size_t>(c) < n; };
                    if (!leaf && (!in_range(left[i]) || !in_range(right[i]) ||
                                  feature[i] >= fm.feature_count)) {
                        throw data_error("model file: tree node out of range");
                    }
                    tree.nodes.push_back({feature[i], threshold[i], left[i], right[i], value[i]});
                }
                fm.trees.push_back(std::move(tree));
            }
            forest.steps.push_back(std::move(fm));
        }
        bundle.model = std::make_unique<ForestRegressor>(forest_config_from_json(m.at("config")),
                                                         std::move(forest));
        break;
    }
    case ModelKind::cnn: {
        const CnnConfig cfg = cnn_config_from_json(m.at("config"));
        CnnModel model(cfg, m.at("n_steps").get<int>(), m.at("n_coeff").get<int>(), 0);
        const auto names = model.parameter_names();
        for (std::size_t i = 0; i < names.size(); ++i) {
            MatrixXd p = matrix_from_json(m.at("parameters").at(names[i]));
            auto& dst = model.parameters()[i];
            if (p.rows() != dst.rows() || p.cols() != dst.cols()) {
                throw data_error("model file: parameter " + names[i] + " has the wrong shape");
            }
            dst = std::move(p);
        }
        bundle.model = std::make_unique<CnnRegressor>(std::move(model));
        break;
    }
    }
    const json& norm = j.value("normalization", json::object());
    if (norm.contains("x")) bundle.x_norm = normalization_from_json(norm.at("x"));
    if (norm.contains("y")) bundle.y_norm = normalization_from_json(norm.at("y"));
    return bundle;
}

void save_model(const std::filesystem::path& path, const ModelBundle& bundle) {
    std::ofstream out(path);
    if (!out) throw data_error("cannot write model file " + path.string());
    out << model_to_json(bundle).dump() << '\n';
}

ModelBundle load_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw data_error("cannot read model file " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw data_error("model file " + path.string() + ": " + e.what());
    }
    try {
        return model_from_json(j);
    } catch (const json::exception& e) {
        throw data_error("model file " + path.string() + ": " + e.what());
    }
}

} // namespace wavecast
