#pragma once

// Small 1-D convolutional network for 27-step MIMO forecasting.
//
//   MC: input (n_steps, n_coeff) -> conv(f, k) -> ReLU -> conv(f, k) -> ReLU
//       -> flatten -> dense(out, linear)
//   MI: n_coeff inputs (n_steps, 1), each conv(f, k) -> ReLU; concatenate along
//       channels (f * n_coeff) -> conv(f, k) -> ReLU -> flatten -> dense(out)
//
// Convolutions use stride 1 and "same" zero padding. Everything is fp64.

#include "wavecast/features.hpp"
#include "wavecast/types.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace wavecast {

enum class CnnTopology {
    multi_channel, ///< MC
    multi_input,   ///< MI
};

std::string to_string(CnnTopology t);

struct CnnConfig {
    CnnTopology topology = CnnTopology::multi_channel;
    int filters = 32;
    int kernel = 5;
    int outputs = kStepsPerDay;
    int max_epochs = 200;
    int patience = 20;
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    int batch_size = 32; ///< 0 = full batch
};

struct TrainingHistory {
    std::vector<double> train_loss; ///< loss of the batch pass in each epoch, before its update
    std::vector<double> val_loss;   ///< validation loss after each epoch's updates
    int best_epoch = -1;
    int epochs_run = 0;
};

class CnnModel {
public:
    CnnModel() = default;

    /// Glorot-uniform weights, zero biases.
    CnnModel(const CnnConfig& cfg, int n_steps, int n_coeff, std::uint64_t seed);

    const CnnConfig& config() const { return cfg_; }
    int n_steps() const { return n_steps_; }
    int n_coeff() const { return n_coeff_; }

    /// Number of first-layer input branches (1 for MC, n_coeff for MI).
    int input_branches() const;
    /// Channels entering the second convolution (f for MC, f * n_coeff for MI).
    int concat_channels() const;

    std::size_t parameter_count() const;
    std::vector<MatrixXd>& parameters() { return params_; }
    const std::vector<MatrixXd>& parameters() const { return params_; }
    std::vector<std::string> parameter_names() const;

    /// Forward pass; rows of the result are per sample. Each sample is
    /// evaluated on its own, so results do not depend on batch composition.
    RowMatrixXd predict(const FeatureTensor& x) const;

    /// Mean squared error over all samples and outputs.
    double loss(const FeatureTensor& x, const RowMatrixXd& y) const;

    /// Analytic gradient of loss() with respect to every parameter.
    std::vector<MatrixXd> gradient(const FeatureTensor& x, const RowMatrixXd& y,
                                   double* loss_out = nullptr) const;

private:
    struct Cache;
    RowMatrixXd forward(const FeatureTensor& x, Cache* cache) const;
    void check_input(const FeatureTensor& x) const;

    CnnConfig cfg_;
    int n_steps_ = 0;
    int n_coeff_ = 0;
    std::vector<MatrixXd> params_;
};

/// Adam on MSE with early stopping on validation loss; the weights of the
/// best validation epoch are restored. Throws ErrorKind::divergence when a
/// loss turns non-finite.
CnnModel fit_cnn(const CnnConfig& cfg, const FeatureTensor& train_x, const RowMatrixXd& train_y,
                 const FeatureTensor& val_x, const RowMatrixXd& val_y, std::uint64_t seed,
                 TrainingHistory* history = nullptr);

} // namespace wavecast
