#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

namespace wavecast {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// Row-major dense matrix; used wherever rows are samples/days so that a row
/// can be mapped as a contiguous vector.
template <typename Scalar>
using RowMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using VectorXd = Vector<double>;
using MatrixXd = Matrix<double>;
using RowMatrixXd = RowMatrix<double>;

/// Half-hour daytime steps per day, 06:00 to 19:00 inclusive.
inline constexpr int kStepsPerDay = 27;

/// Days counted from 1970-01-01 (proleptic Gregorian).
using DayNumber = std::int32_t;

/// D x T grid of power values (MW), one row per calendar day.
struct DailyMatrix {
    RowMatrixXd values;
    std::vector<DayNumber> dates;

    Eigen::Index days() const { return values.rows(); }
    Eigen::Index steps() const { return values.cols(); }
};

} // namespace wavecast
