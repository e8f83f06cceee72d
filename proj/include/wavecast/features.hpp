#pragma once

#include "wavecast/error.hpp"
#include "wavecast/types.hpp"

namespace wavecast {

/// samples x n_steps x n_coeff, stored as one row per sample with element
/// (t, c) at column t * n_coeff + c. Tabular models consume the rows directly;
/// the CNN views each row as an n_steps x n_coeff row-major block.
struct FeatureTensor {
    RowMatrixXd values;
    int n_steps = 0;
    int n_coeff = 1;

    FeatureTensor() = default;
    FeatureTensor(RowMatrixXd v, int steps, int coeff)
        : values(std::move(v)), n_steps(steps), n_coeff(coeff) {
        if (values.cols() != static_cast<Eigen::Index>(n_steps) * n_coeff) {
            throw shape_error("feature tensor: " + std::to_string(values.cols()) +
                              " columns do not match " + std::to_string(n_steps) + " steps x " +
                              std::to_string(n_coeff) + " coefficient bands");
        }
    }

    Eigen::Index samples() const { return values.rows(); }
    Eigen::Index width() const { return values.cols(); }

    FeatureTensor rows(Eigen::Index start, Eigen::Index count) const {
        return {values.middleRows(start, count), n_steps, n_coeff};
    }
};

} // namespace wavecast
