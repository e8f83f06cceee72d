#pragma once

// Boundary extension of a daily signal before the stationary transform.
//
// Layout of a padded signal of aligned length P':
//
//     [ previous day (H) | core day (S) | right pad ............ ]
//     0                  len_H          len_H+len_S              P'
//
// The right pad holds right_len = F + 2^(DL-1) - 1 samples plus the
// P' - P samples needed to make the length a multiple of 2^DL.

#include "wavecast/linear.hpp"
#include "wavecast/types.hpp"
#include "wavecast/wavelet.hpp"

#include <optional>
#include <string>
#include <vector>

namespace wavecast {

enum class PaddingMethod {
    repetition, ///< right side copies the start of the core day
    linear,     ///< right side is a linear-regression next-day forecast
};

std::string to_string(PaddingMethod m);
PaddingMethod parse_padding_method(const std::string& s);

struct PaddingPlan {
    int len_h = 0;
    int len_s = 0;
    int filter_len = 0;
    int level = 0;

    /// len_h + len_s + filter_len + 2^(level-1) - 1
    int total() const { return len_h + len_s + right_len(); }
    int right_len() const { return filter_len + (1 << (level - 1)) - 1; }
};

PaddingPlan padding_plan(int len_h, int len_s, int filter_len, int level);

template <typename Scalar>
PaddingPlan padding_plan(int len_h, int len_s, const FilterBank<Scalar>& f, int level) {
    return padding_plan(len_h, len_s, static_cast<int>(f.length()), level);
}

/// Smallest length >= plan.total() divisible by 2^level.
int align_to_swt(const PaddingPlan& plan);

struct PaddedSignal {
    VectorXd values;
    Eigen::Index left_off = 0;
    Eigen::Index core_off = 0;
    Eigen::Index right_off = 0;
    PaddingMethod method = PaddingMethod::repetition;

    Eigen::Index size() const { return values.size(); }
    Eigen::Index core_len() const { return right_off - core_off; }
    auto core() const { return values.segment(core_off, core_len()); }
};

/// Next-day linear forecaster used for right-side padding: one OLS model per
/// time step, each mapping the whole previous day to that step of the next
/// day. Refit from scratch on every update.
class LinearPadder {
public:
    static constexpr int kDefaultMinDays = 14;

    explicit LinearPadder(int steps = kStepsPerDay, int min_days = kDefaultMinDays);

    /// Replaces the history with `days` (rows, chronological) and fits.
    /// Requires at least min_days() rows.
    void fit(const RowMatrixXd& days);

    /// Appends a new observed day and refits on all consecutive pairs.
    void update(const Eigen::Ref<const VectorXd>& new_day);

    /// Forecast of the day following `day`. Throws ErrorKind::state when unfitted.
    VectorXd predict_next(const Eigen::Ref<const VectorXd>& day) const;

    bool fitted() const { return model_.has_value(); }
    int steps() const { return steps_; }
    int min_days() const { return min_days_; }
    std::size_t history_size() const { return history_.size(); }

private:
    void refit();

    int steps_;
    int min_days_;
    std::vector<VectorXd> history_;
    std::optional<LinearMimoModel> model_;
};

/// Repetition padding: left = prev_day, core = core_day, right = core_day
/// repeated from its start.
PaddedSignal pad_rep(const Eigen::Ref<const VectorXd>& prev_day,
                     const Eigen::Ref<const VectorXd>& core_day, const PaddingPlan& plan);

/// Linear padding: as pad_rep, but the right side is padder's next-day
/// forecast for core_day (repeated if the pad is longer than a day).
PaddedSignal pad_lr(const LinearPadder& padder, const Eigen::Ref<const VectorXd>& prev_day,
                    const Eigen::Ref<const VectorXd>& core_day, const PaddingPlan& plan);

} // namespace wavecast
