#pragma once

#include "wavecast/types.hpp"

#include <vector>

namespace wavecast {

/// Min-max scaling parameters, one (min, max) pair per column, taken from
/// training data only.
struct NormalizationParams {
    VectorXd min;
    VectorXd max;
    /// Columns whose training range is zero; they normalise to 0.
    std::vector<Eigen::Index> constant_features;

    Eigen::Index size() const { return min.size(); }
};

/// Column-wise extremes of the training rows.
NormalizationParams fit_normalizer(const RowMatrixXd& train);

/// A single (min, max) over every training value, broadcast to `train.cols()`
/// columns. Used on the target side, where the scale is the overall power range.
NormalizationParams fit_global_normalizer(const RowMatrixXd& train);

/// (x - min) / (max - min) per column. No clipping: values outside the
/// training range map outside [0, 1].
RowMatrixXd normalize(const RowMatrixXd& x, const NormalizationParams& p);

/// y * (max - min) + min per column.
RowMatrixXd denormalize(const RowMatrixXd& y, const NormalizationParams& p);

} // namespace wavecast
