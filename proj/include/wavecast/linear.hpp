#pragma once

#include "wavecast/types.hpp"

namespace wavecast {

/// One least-squares fit with intercept per output column. All outputs share
/// the design matrix, so the per-output fits are solved against a single
/// factorisation; each column is still an independent regression.
struct LinearMimoModel {
    VectorXd feature_mean;
    VectorXd intercept; ///< per output
    MatrixXd weights;   ///< features x outputs
    bool ridge_used = false;

    Eigen::Index feature_count() const { return weights.rows(); }
    Eigen::Index output_count() const { return weights.cols(); }

    /// One output row per input row; rows are evaluated independently.
    RowMatrixXd predict(const RowMatrixXd& x) const;
    VectorXd predict_row(const Eigen::Ref<const VectorXd>& x) const;
};

/// Relative ridge applied when the centred normal equations are singular or
/// ill-conditioned: lambda = kRidgeScale * trace(G) / k.
inline constexpr double kRidgeScale = 1e-8;

/// Ordinary least squares on centred data through the normal equations.
/// Rank-deficient systems fall back to a trace-scaled ridge with iterative
/// refinement, which converges to the minimum-norm (pseudo-inverse) solution.
/// Never throws for finite input of consistent shape.
LinearMimoModel fit_mimo_linear(const RowMatrixXd& x, const RowMatrixXd& y);

} // namespace wavecast
