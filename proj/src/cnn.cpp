#include "wavecast/cnn.hpp"

#include "wavecast/error.hpp"

#include <cmath>
#include <numeric>
#include <random>

namespace wavecast {

std::string to_string(CnnTopology t) {
    return t == CnnTopology::multi_channel ? "mc" : "mi";
}

namespace {

// rows = sample*steps + t, columns = channels. Output column o*cin + c holds
// input(t + o - pad, c), zero outside [0, steps).
RowMatrixXd im2col(const RowMatrixXd& in, int steps, int kernel) {
    const Eigen::Index rows = in.rows();
    const Eigen::Index cin = in.cols();
    const int pad = (kernel - 1) / 2;
    RowMatrixXd cols = RowMatrixXd::Zero(rows, kernel * cin);
    for (Eigen::Index r = 0; r < rows; ++r) {
        const int t = static_cast<int>(r % steps);
        for (int o = 0; o < kernel; ++o) {
            const int src = t + o - pad;
            if (src < 0 || src >= steps) continue;
            cols.row(r).segment(o * cin, cin) = in.row(r + (src - t));
        }
    }
    return cols;
}

RowMatrixXd col2im(const RowMatrixXd& dcols, Eigen::Index cin, int steps, int kernel) {
    const Eigen::Index rows = dcols.rows();
    const int pad = (kernel - 1) / 2;
    RowMatrixXd din = RowMatrixXd::Zero(rows, cin);
    for (Eigen::Index r = 0; r < rows; ++r) {
        const int t = static_cast<int>(r % steps);
        for (int o = 0; o < kernel; ++o) {
            const int src = t + o - pad;
            if (src < 0 || src >= steps) continue;
            din.row(r + (src - t)) += dcols.row(r).segment(o * cin, cin);
        }
    }
    return din;
}

RowMatrixXd affine(const RowMatrixXd& in, const MatrixXd& w, const MatrixXd& b) {
    RowMatrixXd out = in * w;
    out.rowwise() += b.row(0);
    return out;
}

RowMatrixXd relu(const RowMatrixXd& z) { return z.cwiseMax(0.0); }

RowMatrixXd relu_backward(const RowMatrixXd& grad, const RowMatrixXd& z) {
    return (z.array() > 0.0).select(grad, 0.0);
}

MatrixXd glorot(Eigen::Index rows, Eigen::Index cols, double fan_in, double fan_out,
                std::mt19937_64& rng) {
    const double limit = std::sqrt(6.0 / (fan_in + fan_out));
    std::uniform_real_distribution<double> dist(-limit, limit);
    MatrixXd w(rows, cols);
    // Fill in row-major order so the draw sequence does not depend on storage.
    for (Eigen::Index r = 0; r < rows; ++r) {
        for (Eigen::Index c = 0; c < cols; ++c) w(r, c) = dist(rng);
    }
    return w;
}

} // namespace

struct CnnModel::Cache {
    std::vector<RowMatrixXd> cols1; // one per input branch
    std::vector<RowMatrixXd> z1;
    RowMatrixXd cols2;
    RowMatrixXd z2;
    RowMatrixXd flat;
};

CnnModel::CnnModel(const CnnConfig& cfg, int n_steps, int n_coeff, std::uint64_t seed)
    : cfg_(cfg), n_steps_(n_steps), n_coeff_(n_coeff) {
    if (n_steps <= 0 || n_coeff <= 0) throw shape_error("cnn: empty input shape");
    if (cfg.filters <= 0 || cfg.kernel <= 0 || cfg.kernel % 2 == 0 || cfg.outputs <= 0) {
        throw config_error("cnn: filters and outputs must be positive and the kernel odd");
    }
    std::mt19937_64 rng(seed);
    const int f = cfg.filters;
    const int k = cfg.kernel;
    const int branches = input_branches();
    const int branch_in = cfg.topology == CnnTopology::multi_channel ? n_coeff : 1;
    for (int b = 0; b < branches; ++b) {
        params_.push_back(glorot(k * branch_in, f, k * branch_in, k * f, rng));
        params_.push_back(MatrixXd::Zero(1, f));
    }
    const int cin2 = concat_channels();
    params_.push_back(glorot(k * cin2, f, k * cin2, k * f, rng));
    params_.push_back(MatrixXd::Zero(1, f));
    params_.push_back(glorot(n_steps * f, cfg.outputs, n_steps * f, cfg.outputs, rng));
    params_.push_back(MatrixXd::Zero(1, cfg.outputs));
}

int CnnModel::input_branches() const {
    return cfg_.topology == CnnTopology::multi_channel ? 1 : n_coeff_;
}

int CnnModel::concat_channels() const { return cfg_.filters * input_branches(); }

std::size_t CnnModel::parameter_count() const {
    std::size_t n = 0;
    for (const auto& p : params_) n += static_cast<std::size_t>(p.size());
    return n;
}

std::vector<std::string> CnnModel::parameter_names() const {
    std::vector<std::string> names;
    for (int b = 0; b < input_branches(); ++b) {
        const std::string prefix = "conv1_" + std::to_string(b);
        names.push_back(prefix + ".kernel");
        names.push_back(prefix + ".bias");
    }
    names.insert(names.end(), {"conv2.kernel", "conv2.bias", "dense.kernel", "dense.bias"});
    return names;
}

void CnnModel::check_input(const FeatureTensor& x) const {
    if (x.n_steps != n_steps_ || x.n_coeff != n_coeff_) {
        throw shape_error("cnn: input shape (" + std::to_string(x.n_steps) + ", " +
                          std::to_string(x.n_coeff) + ") does not match model (" +
                          std::to_string(n_steps_) + ", " + std::to_string(n_coeff_) + ")");
    }
}

RowMatrixXd CnnModel::forward(const FeatureTensor& x, Cache* cache) const {
    const Eigen::Index batch = x.samples();
    const Eigen::Index rows = batch * n_steps_;
    const int k = cfg_.kernel;
    const int f = cfg_.filters;
    const int branches = input_branches();
    const Eigen::Map<const RowMatrixXd> input(x.values.data(), rows, n_coeff_);

    RowMatrixXd concat(rows, concat_channels());
    for (int b = 0; b < branches; ++b) {
        RowMatrixXd cols = cfg_.topology == CnnTopology::multi_channel
                               ? im2col(RowMatrixXd(input), n_steps_, k)
                               : im2col(RowMatrixXd(input.col(b)), n_steps_, k);
        RowMatrixXd z = affine(cols, params_[2 * b], params_[2 * b + 1]);
        concat.middleCols(b * f, f) = relu(z);
        if (cache) {
            cache->cols1.push_back(std::move(cols));
            cache->z1.push_back(std::move(z));
        }
    }
    const std::size_t p2 = 2 * static_cast<std::size_t>(branches);
    RowMatrixXd cols2 = im2col(concat, n_steps_, k);
    RowMatrixXd z2 = affine(cols2, params_[p2], params_[p2 + 1]);
    RowMatrixXd a2 = relu(z2);
    const Eigen::Map<const RowMatrixXd> flat(a2.data(), batch, static_cast<Eigen::Index>(n_steps_) * f);
    RowMatrixXd out = affine(RowMatrixXd(flat), params_[p2 + 2], params_[p2 + 3]);
    if (cache) {
        cache->cols2 = std::move(cols2);
        cache->z2 = std::move(z2);
        cache->flat = flat;
    }
    return out;
}

RowMatrixXd CnnModel::predict(const FeatureTensor& x) const {
    check_input(x);
    RowMatrixXd out(x.samples(), cfg_.outputs);
    for (Eigen::Index r = 0; r < x.samples(); ++r) out.row(r) = forward(x.rows(r, 1), nullptr);
    return out;
}

double CnnModel::loss(const FeatureTensor& x, const RowMatrixXd& y) const {
    check_input(x);
    const RowMatrixXd out = forward(x, nullptr);
    return (out - y).squaredNorm() / static_cast<double>(y.size());
}

std::vector<MatrixXd> CnnModel::gradient(const FeatureTensor& x, const RowMatrixXd& y,
                                         double* loss_out) const {
    check_input(x);
    if (y.rows() != x.samples() || y.cols() != cfg_.outputs) {
        throw shape_error("cnn: target shape does not match outputs");
    }
    Cache cache;
    const RowMatrixXd out = forward(x, &cache);
    const RowMatrixXd err = out - y;
    if (loss_out) *loss_out = err.squaredNorm() / static_cast<double>(y.size());

    const Eigen::Index batch = x.samples();
    const Eigen::Index rows = batch * n_steps_;
    const int k = cfg_.kernel;
    const int f = cfg_.filters;
    const int branches = input_branches();
    const std::size_t p2 = 2 * static_cast<std::size_t>(branches);

    std::vector<MatrixXd> grads(params_.size());
    const RowMatrixXd dout = err * (2.0 / static_cast<double>(y.size()));
    grads[p2 + 2] = cache.flat.transpose() * dout;
    grads[p2 + 3] = dout.colwise().sum();

    RowMatrixXd dflat = dout * params_[p2 + 2].transpose();
    const Eigen::Map<RowMatrixXd> da2(dflat.data(), rows, f);
    const RowMatrixXd dz2 = relu_backward(da2, cache.z2);
    grads[p2] = cache.cols2.transpose() * dz2;
    grads[p2 + 1] = dz2.colwise().sum();

    const RowMatrixXd dcols2 = dz2 * params_[p2].transpose();
    const RowMatrixXd dconcat = col2im(dcols2, concat_channels(), n_steps_, k);
    for (int b = 0; b < branches; ++b) {
        const RowMatrixXd dz1 = relu_backward(dconcat.middleCols(b * f, f), cache.z1[b]);
        grads[2 * b] = cache.cols1[b].transpose() * dz1;
        grads[2 * b + 1] = dz1.colwise().sum();
    }
    return grads;
}

CnnModel fit_cnn(const CnnConfig& cfg, const FeatureTensor& train_x, const RowMatrixXd& train_y,
                 const FeatureTensor& val_x, const RowMatrixXd& val_y, std::uint64_t seed,
                 TrainingHistory* history) {
    if (train_x.samples() == 0) throw data_error("cnn: empty training set");
    if (val_x.samples() == 0) throw data_error("cnn: empty validation set");
    if (train_y.rows() != train_x.samples() || val_y.rows() != val_x.samples()) {
        throw shape_error("cnn: feature and target sample counts differ");
    }
    if (cfg.max_epochs < 1 || cfg.patience < 1) {
        throw config_error("cnn: max_epochs and patience must be >= 1");
    }

    CnnModel model(cfg, train_x.n_steps, train_x.n_coeff, seed);
    auto& params = model.parameters();
    std::vector<MatrixXd> m1;
    std::vector<MatrixXd> m2;
    for (const auto& p : params) {
        m1.push_back(MatrixXd::Zero(p.rows(), p.cols()));
        m2.push_back(MatrixXd::Zero(p.rows(), p.cols()));
    }

    TrainingHistory local;
    TrainingHistory& hist = history ? *history : local;
    hist = {};

    const Eigen::Index n = train_x.samples();
    const Eigen::Index batch = cfg.batch_size > 0 ? std::min<Eigen::Index>(cfg.batch_size, n) : n;
    std::vector<Eigen::Index> order(n);
    std::iota(order.begin(), order.end(), Eigen::Index(0));
    std::mt19937_64 shuffle_rng(seed ^ 0x5eedULL);

    std::vector<MatrixXd> best = params;
    double best_val = std::numeric_limits<double>::infinity();
    int since_best = 0;
    long step = 0;

    for (int epoch = 0; epoch < cfg.max_epochs; ++epoch) {
        if (batch < n) std::shuffle(order.begin(), order.end(), shuffle_rng);
        double epoch_loss = 0.0;
        for (Eigen::Index start = 0; start < n; start += batch) {
            const Eigen::Index count = std::min(batch, n - start);
            FeatureTensor bx;
            RowMatrixXd by;
            if (batch == n) {
                bx = train_x;
                by = train_y;
            } else {
                bx = FeatureTensor(RowMatrixXd(count, train_x.width()), train_x.n_steps,
                                   train_x.n_coeff);
                by.resize(count, train_y.cols());
                for (Eigen::Index i = 0; i < count; ++i) {
                    bx.values.row(i) = train_x.values.row(order[start + i]);
                    by.row(i) = train_y.row(order[start + i]);
                }
            }
            double batch_loss = 0.0;
            const auto grads = model.gradient(bx, by, &batch_loss);
            if (!std::isfinite(batch_loss)) {
                throw Error(ErrorKind::divergence,
                            "cnn: non-finite training loss at epoch " + std::to_string(epoch));
            }
            epoch_loss += batch_loss * static_cast<double>(count);

            ++step;
            const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(step));
            const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(step));
            const double lr = cfg.learning_rate * std::sqrt(c2) / c1;
            for (std::size_t i = 0; i < params.size(); ++i) {
                m1[i] = cfg.beta1 * m1[i] + (1.0 - cfg.beta1) * grads[i];
                m2[i] = cfg.beta2 * m2[i] + (1.0 - cfg.beta2) * grads[i].cwiseAbs2();
                params[i].array() -= lr * m1[i].array() / (m2[i].array().sqrt() + cfg.epsilon);
            }
        }
        const double val = model.loss(val_x, val_y);
        if (!std::isfinite(val)) {
            throw Error(ErrorKind::divergence,
                        "cnn: non-finite validation loss at epoch " + std::to_string(epoch));
        }
        hist.train_loss.push_back(epoch_loss / static_cast<double>(n));
        hist.val_loss.push_back(val);
        hist.epochs_run = epoch + 1;
        if (val < best_val) {
            best_val = val;
            best = params;
            hist.best_epoch = epoch;
            since_best = 0;
        } else if (++since_best >= cfg.patience) {
            break;
        }
    }
    params = best;
    return model;
}

} // namespace wavecast
