#include "wavecast/normalize.hpp"

#include "wavecast/error.hpp"

namespace wavecast {

namespace {

void mark_constant(NormalizationParams& p) {
    p.constant_features.clear();
    for (Eigen::Index j = 0; j < p.min.size(); ++j) {
        if (!(p.max[j] > p.min[j])) p.constant_features.push_back(j);
    }
}

void check_width(const RowMatrixXd& x, const NormalizationParams& p) {
    if (x.cols() != p.size()) {
        throw shape_error("normalization: expected " + std::to_string(p.size()) +
                          " columns, got " + std::to_string(x.cols()));
    }
}

} // namespace

NormalizationParams fit_normalizer(const RowMatrixXd& train) {
    if (train.rows() == 0) throw shape_error("normalization: no training rows");
    NormalizationParams p;
    p.min = train.colwise().minCoeff().transpose();
    p.max = train.colwise().maxCoeff().transpose();
    mark_constant(p);
    return p;
}

NormalizationParams fit_global_normalizer(const RowMatrixXd& train) {
    if (train.size() == 0) throw shape_error("normalization: no training rows");
    NormalizationParams p;
    p.min = VectorXd::Constant(train.cols(), train.minCoeff());
    p.max = VectorXd::Constant(train.cols(), train.maxCoeff());
    mark_constant(p);
    return p;
}

RowMatrixXd normalize(const RowMatrixXd& x, const NormalizationParams& p) {
    check_width(x, p);
    RowMatrixXd out(x.rows(), x.cols());
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
        const double range = p.max[j] - p.min[j];
        if (range > 0.0) {
            out.col(j) = (x.col(j).array() - p.min[j]) / range;
        } else {
            out.col(j).setZero();
        }
    }
    return out;
}

RowMatrixXd denormalize(const RowMatrixXd& y, const NormalizationParams& p) {
    check_width(y, p);
    RowMatrixXd out(y.rows(), y.cols());
    for (Eigen::Index j = 0; j < y.cols(); ++j) {
        out.col(j) = y.col(j).array() * (p.max[j] - p.min[j]) + p.min[j];
    }
    return out;
}

} // namespace wavecast
