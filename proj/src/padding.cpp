#include "wavecast/padding.hpp"

#include "wavecast/error.hpp"

namespace wavecast {

std::string to_string(PaddingMethod m) {
    return m == PaddingMethod::repetition ? "rep" : "lr";
}

PaddingMethod parse_padding_method(const std::string& s) {
    if (s == "rep" || s == "REP" || s == "repetition") return PaddingMethod::repetition;
    if (s == "lr" || s == "LR" || s == "linear") return PaddingMethod::linear;
    throw config_error("unknown padding method '" + s + "' (expected rep or lr)");
}

PaddingPlan padding_plan(int len_h, int len_s, int filter_len, int level) {
    if (len_h <= 0 || len_s <= 0 || filter_len <= 0 || level <= 0) {
        throw config_error("padding plan: all inputs must be positive");
    }
    return {len_h, len_s, filter_len, level};
}

int align_to_swt(const PaddingPlan& plan) {
    const int multiple = 1 << plan.level;
    const int p = plan.total();
    return (p + multiple - 1) / multiple * multiple;
}

namespace {

void check_day_lengths(const Eigen::Ref<const VectorXd>& prev_day,
                       const Eigen::Ref<const VectorXd>& core_day, const PaddingPlan& plan) {
    if (prev_day.size() != plan.len_h || core_day.size() != plan.len_s) {
        throw shape_error("padding: expected previous/core day lengths " +
                          std::to_string(plan.len_h) + "/" + std::to_string(plan.len_s) +
                          ", got " + std::to_string(prev_day.size()) + "/" +
                          std::to_string(core_day.size()));
    }
}

PaddedSignal assemble(const Eigen::Ref<const VectorXd>& prev_day,
                      const Eigen::Ref<const VectorXd>& core_day,
                      const Eigen::Ref<const VectorXd>& right_source, const PaddingPlan& plan,
                      PaddingMethod method) {
    const Eigen::Index length = align_to_swt(plan);
    PaddedSignal out;
    out.method = method;
    out.values.resize(length);
    out.left_off = 0;
    out.core_off = plan.len_h;
    out.right_off = plan.len_h + plan.len_s;
    out.values.head(plan.len_h) = prev_day;
    out.values.segment(out.core_off, plan.len_s) = core_day;
    const Eigen::Index src = right_source.size();
    for (Eigen::Index i = out.right_off; i < length; ++i) {
        out.values[i] = right_source[(i - out.right_off) % src];
    }
    return out;
}

} // namespace

PaddedSignal pad_rep(const Eigen::Ref<const VectorXd>& prev_day,
                     const Eigen::Ref<const VectorXd>& core_day, const PaddingPlan& plan) {
    check_day_lengths(prev_day, core_day, plan);
    return assemble(prev_day, core_day, core_day, plan, PaddingMethod::repetition);
}

PaddedSignal pad_lr(const LinearPadder& padder, const Eigen::Ref<const VectorXd>& prev_day,
                    const Eigen::Ref<const VectorXd>& core_day, const PaddingPlan& plan) {
    check_day_lengths(prev_day, core_day, plan);
    const VectorXd next = padder.predict_next(core_day);
    return assemble(prev_day, core_day, next, plan, PaddingMethod::linear);
}

LinearPadder::LinearPadder(int steps, int min_days) : steps_(steps), min_days_(min_days) {
    if (steps <= 0 || min_days < 2) {
        throw config_error("linear padder: needs positive steps and at least 2 warm-up days");
    }
}

void LinearPadder::fit(const RowMatrixXd& days) {
    if (days.cols() != steps_) {
        throw shape_error("linear padder: expected " + std::to_string(steps_) +
                          " steps per day, got " + std::to_string(days.cols()));
    }
    if (days.rows() < min_days_) {
        throw data_error("linear padder: needs at least " + std::to_string(min_days_) +
                         " days to fit, got " + std::to_string(days.rows()));
    }
    history_.clear();
    history_.reserve(days.rows());
    for (Eigen::Index r = 0; r < days.rows(); ++r) history_.push_back(days.row(r).transpose());
    refit();
}

void LinearPadder::update(const Eigen::Ref<const VectorXd>& new_day) {
    if (!fitted()) throw state_error("linear padder: update called before fit");
    if (new_day.size() != steps_) {
        throw shape_error("linear padder: expected " + std::to_string(steps_) +
                          " steps per day, got " + std::to_string(new_day.size()));
    }
    history_.push_back(new_day);
    refit();
}

VectorXd LinearPadder::predict_next(const Eigen::Ref<const VectorXd>& day) const {
    if (!fitted()) throw state_error("linear padder: not fitted (needs " +
                                     std::to_string(min_days_) + " days)");
    return model_->predict_row(day);
}

void LinearPadder::refit() {
    const Eigen::Index pairs = static_cast<Eigen::Index>(history_.size()) - 1;
    RowMatrixXd x(pairs, steps_);
    RowMatrixXd y(pairs, steps_);
    for (Eigen::Index i = 0; i < pairs; ++i) {
        x.row(i) = history_[i].transpose();
        y.row(i) = history_[i + 1].transpose();
    }
    model_ = fit_mimo_linear(x, y);
}

} // namespace wavecast
