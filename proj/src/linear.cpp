#include "wavecast/linear.hpp"

#include "wavecast/error.hpp"

#include <cmath>

namespace wavecast {

namespace {

constexpr double kMinReciprocalCondition = 1e-12;
constexpr int kRefinementSteps = 6;

} // namespace

LinearMimoModel fit_mimo_linear(const RowMatrixXd& x, const RowMatrixXd& y) {
    if (x.rows() != y.rows()) {
        throw shape_error("linear fit: " + std::to_string(x.rows()) + " feature rows vs " +
                          std::to_string(y.rows()) + " target rows");
    }
    if (x.rows() == 0) throw shape_error("linear fit: no training samples");

    const Eigen::Index k = x.cols();
    LinearMimoModel model;
    model.feature_mean = x.colwise().mean().transpose();
    const VectorXd target_mean = y.colwise().mean().transpose();

    const MatrixXd xc = x.rowwise() - model.feature_mean.transpose();
    const MatrixXd yc = y.rowwise() - target_mean.transpose();
    const MatrixXd gram = xc.transpose() * xc;
    const MatrixXd rhs = xc.transpose() * yc;

    MatrixXd w = MatrixXd::Zero(k, y.cols());
    const double trace = gram.trace();
    if (k > 0 && trace > 0.0) {
        Eigen::LDLT<MatrixXd> ldlt(gram);
        const VectorXd pivots = ldlt.vectorD();
        const bool well_posed = ldlt.info() == Eigen::Success && ldlt.isPositive() &&
                                ldlt.rcond() > kMinReciprocalCondition &&
                                pivots.minCoeff() > kMinReciprocalCondition * pivots.maxCoeff();
        if (well_posed) {
            w = ldlt.solve(rhs);
        } else {
            // Iterated Tikhonov: each step removes another factor of
            // lambda / (sigma + lambda) of the ridge bias on the range of G,
            // while the null-space component stays at zero.
            const double lambda = kRidgeScale * trace / static_cast<double>(k);
            const MatrixXd reg = gram + lambda * MatrixXd::Identity(k, k);
            Eigen::LLT<MatrixXd> llt(reg);
            w = llt.solve(rhs);
            for (int i = 0; i < kRefinementSteps; ++i) w += llt.solve(rhs - gram * w);
            model.ridge_used = true;
        }
    }
    model.weights = std::move(w);
    model.intercept = target_mean - model.weights.transpose() * model.feature_mean;
    return model;
}

VectorXd LinearMimoModel::predict_row(const Eigen::Ref<const VectorXd>& x) const {
    if (x.size() != feature_count()) {
        throw shape_error("linear predict: expected " + std::to_string(feature_count()) +
                          " features, got " + std::to_string(x.size()));
    }
    VectorXd out = intercept;
    // Fixed summation order so a row's prediction does not depend on batch size.
    for (Eigen::Index j = 0; j < weights.rows(); ++j) {
        const double v = x[j];
        for (Eigen::Index o = 0; o < weights.cols(); ++o) out[o] += weights(j, o) * v;
    }
    return out;
}

RowMatrixXd LinearMimoModel::predict(const RowMatrixXd& x) const {
    if (x.cols() != feature_count()) {
        throw shape_error("linear predict: expected " + std::to_string(feature_count()) +
                          " features, got " + std::to_string(x.cols()));
    }
    RowMatrixXd out(x.rows(), output_count());
    for (Eigen::Index r = 0; r < x.rows(); ++r) out.row(r) = predict_row(x.row(r).transpose());
    return out;
}

} // namespace wavecast
