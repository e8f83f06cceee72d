#pragma once

// Uniform MIMO prediction interface over the concrete models, plus the
// versioned JSON model container.

#include "wavecast/cnn.hpp"
#include "wavecast/features.hpp"
#include "wavecast/forest.hpp"
#include "wavecast/linear.hpp"
#include "wavecast/normalize.hpp"

#include <json.hpp>

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

namespace wavecast {

enum class ModelKind {
    persistence,
    linear,
    forest,
    cnn,
};

std::string to_string(ModelKind k);
ModelKind parse_model_kind(const std::string& s);

/// Previous day's row verbatim. Throws ErrorKind::data for day 0.
VectorXd persistence_forecast(const DailyMatrix& matrix, Eigen::Index day);

class Regressor {
public:
    virtual ~Regressor() = default;

    virtual ModelKind kind() const = 0;
    /// Whether fit() consumes the validation arguments (early stopping).
    virtual bool uses_validation() const { return false; }
    virtual void fit(const FeatureTensor& x, const RowMatrixXd& y, const FeatureTensor& val_x,
                     const RowMatrixXd& val_y) = 0;
    /// One output row per sample; throws ErrorKind::shape on a feature mismatch.
    virtual RowMatrixXd predict(const FeatureTensor& x) const = 0;
    /// Fitted models under the per-output-step counting convention: 27 for the
    /// tabular MIMO models, 1 for the CNN, 0 for persistence.
    virtual int fitted_model_count() const = 0;
    virtual nlohmann::json to_json() const = 0;
};

/// Returns the single-band feature rows unchanged.
class PersistenceRegressor final : public Regressor {
public:
    ModelKind kind() const override { return ModelKind::persistence; }
    void fit(const FeatureTensor&, const RowMatrixXd&, const FeatureTensor&,
             const RowMatrixXd&) override {}
    RowMatrixXd predict(const FeatureTensor& x) const override;
    int fitted_model_count() const override { return 0; }
    nlohmann::json to_json() const override;
};

class LinearRegressor final : public Regressor {
public:
    LinearRegressor() = default;
    explicit LinearRegressor(LinearMimoModel m) : model_(std::move(m)) {}

    ModelKind kind() const override { return ModelKind::linear; }
    void fit(const FeatureTensor& x, const RowMatrixXd& y, const FeatureTensor&,
             const RowMatrixXd&) override;
    RowMatrixXd predict(const FeatureTensor& x) const override;
    int fitted_model_count() const override;
    nlohmann::json to_json() const override;

    const std::optional<LinearMimoModel>& model() const { return model_; }

private:
    std::optional<LinearMimoModel> model_;
};

class ForestRegressor final : public Regressor {
public:
    explicit ForestRegressor(ForestConfig cfg = {}, int jobs = 1) : cfg_(cfg), jobs_(jobs) {}
    ForestRegressor(ForestConfig cfg, MimoForest forest)
        : cfg_(cfg), forest_(std::move(forest)) {}

    ModelKind kind() const override { return ModelKind::forest; }
    void fit(const FeatureTensor& x, const RowMatrixXd& y, const FeatureTensor&,
             const RowMatrixXd&) override;
    RowMatrixXd predict(const FeatureTensor& x) const override;
    int fitted_model_count() const override;
    nlohmann::json to_json() const override;

private:
    ForestConfig cfg_;
    int jobs_ = 1;
    std::optional<MimoForest> forest_;
};

class CnnRegressor final : public Regressor {
public:
    CnnRegressor(CnnConfig cfg, std::uint64_t seed) : cfg_(cfg), seed_(seed) {}
    explicit CnnRegressor(CnnModel model)
        : cfg_(model.config()), model_(std::move(model)) {}

    ModelKind kind() const override { return ModelKind::cnn; }
    bool uses_validation() const override { return true; }
    void fit(const FeatureTensor& x, const RowMatrixXd& y, const FeatureTensor& val_x,
             const RowMatrixXd& val_y) override;
    RowMatrixXd predict(const FeatureTensor& x) const override;
    int fitted_model_count() const override { return model_ ? 1 : 0; }
    nlohmann::json to_json() const override;

    const std::optional<CnnModel>& model() const { return model_; }
    const TrainingHistory& history() const { return history_; }

private:
    CnnConfig cfg_;
    std::uint64_t seed_ = 0;
    std::optional<CnnModel> model_;
    TrainingHistory history_;
};

struct RegressorSettings {
    ForestConfig forest;
    CnnConfig cnn;
    std::uint64_t seed = 0;
    int jobs = 1;
};

std::unique_ptr<Regressor> make_regressor(ModelKind kind, const RegressorSettings& settings);

/// Versioned container: a fitted model with the normalisation it was trained
/// under. Layout documented in README ("Model files").
struct ModelBundle {
    std::unique_ptr<Regressor> model;
    std::optional<NormalizationParams> x_norm;
    std::optional<NormalizationParams> y_norm;
};

inline constexpr const char* kModelFormat = "wavecast-model";
inline constexpr int kModelFormatVersion = 1;

nlohmann::json model_to_json(const ModelBundle& bundle);
ModelBundle model_from_json(const nlohmann::json& j);
void save_model(const std::filesystem::path& path, const ModelBundle& bundle);
ModelBundle load_model(const std::filesystem::path& path);

} // namespace wavecast
