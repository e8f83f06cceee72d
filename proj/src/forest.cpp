#include "wavecast/forest.hpp"

#include "wavecast/error.hpp"
#include "wavecast/parallel.hpp"
#include "wavecast/random.hpp"

#include <algorithm>
#include <numeric>
#include <random>

namespace wavecast {

namespace {

// Running mean: exact when every value is equal.
template <typename Range, typename Get>
double running_mean(const Range& r, Get get) {
    double m = 0.0;
    std::size_t i = 0;
    for (const auto& e : r) {
        ++i;
        m += (get(e) - m) / static_cast<double>(i);
    }
    return m;
}

struct SplitChoice {
    int feature = -1;
    double threshold = 0.0;
    double gain = 0.0;
    std::size_t left_count = 0;
};

class TreeBuilder {
public:
    TreeBuilder(const RowMatrixXd& x, const VectorXd& y, int max_depth, int min_split)
        : x_(x), y_(y), max_depth_(max_depth), min_split_(std::max(2, min_split)) {}

    RegressionTree build(std::vector<Eigen::Index> indices) {
        tree_.nodes.clear();
        grow(indices, 0);
        return std::move(tree_);
    }

private:
    int grow(std::vector<Eigen::Index>& idx, int depth) {
        const int id = static_cast<int>(tree_.nodes.size());
        tree_.nodes.emplace_back();
        tree_.nodes[id].value = running_mean(idx, [this](Eigen::Index i) { return y_[i]; });

        const bool depth_ok = max_depth_ <= 0 || depth < max_depth_;
        if (!depth_ok || static_cast<int>(idx.size()) < min_split_ || is_pure(idx)) return id;

        const SplitChoice split = best_split(idx);
        if (split.feature < 0) return id;

        std::vector<Eigen::Index> left;
        std::vector<Eigen::Index> right;
        left.reserve(split.left_count);
        right.reserve(idx.size() - split.left_count);
        for (const Eigen::Index i : idx) {
            (x_(i, split.feature) <= split.threshold ? left : right).push_back(i);
        }
        idx.clear();
        idx.shrink_to_fit();

        tree_.nodes[id].feature = split.feature;
        tree_.nodes[id].threshold = split.threshold;
        const int l = grow(left, depth + 1);
        const int r = grow(right, depth + 1);
        tree_.nodes[id].left = l;
        tree_.nodes[id].right = r;
        return id;
    }

    bool is_pure(const std::vector<Eigen::Index>& idx) const {
        const double first = y_[idx.front()];
        return std::all_of(idx.begin(), idx.end(), [&](Eigen::Index i) { return y_[i] == first; });
    }

    // Maximises the reduction of the sum of squared errors. Ties keep the
    // lowest feature index and the lowest threshold.
    SplitChoice best_split(const std::vector<Eigen::Index>& idx) {
        const std::size_t n = idx.size();
        double total = 0.0;
        for (const Eigen::Index i : idx) total += y_[i];

        SplitChoice best;
        order_.assign(idx.begin(), idx.end());
        for (Eigen::Index f = 0; f < x_.cols(); ++f) {
            std::stable_sort(order_.begin(), order_.end(), [&](Eigen::Index a, Eigen::Index b) {
                return x_(a, f) < x_(b, f);
            });
            double left_sum = 0.0;
            for (std::size_t k = 0; k + 1 < n; ++k) {
                left_sum += y_[order_[k]];
                const double xv = x_(order_[k], f);
                const double xn = x_(order_[k + 1], f);
                if (!(xn > xv)) continue;
                const double nl = static_cast<double>(k + 1);
                const double nr = static_cast<double>(n - k - 1);
                const double right_sum = total - left_sum;
                // SSE reduction up to the constant sum(y)^2 / n term.
                const double gain = left_sum * left_sum / nl + right_sum * right_sum / nr -
                                    total * total / static_cast<double>(n);
                if (gain > best.gain * (1.0 + 1e-12) + 1e-300) {
                    best.feature = static_cast<int>(f);
                    best.threshold = xv + (xn - xv) / 2.0;
                    if (!(best.threshold < xn)) best.threshold = xv;
                    best.gain = gain;
                    best.left_count = k + 1;
                }
            }
        }
        return best;
    }

    const RowMatrixXd& x_;
    const VectorXd& y_;
    int max_depth_;
    int min_split_;
    RegressionTree tree_;
    std::vector<Eigen::Index> order_;
};

void check_shapes(const RowMatrixXd& x, Eigen::Index targets) {
    if (x.rows() != targets) {
        throw shape_error("forest: " + std::to_string(x.rows()) + " feature rows vs " +
                          std::to_string(targets) + " targets");
    }
    if (x.rows() < 2) throw data_error("forest: needs at least 2 samples");
}

} // namespace

double RegressionTree::predict(const Eigen::Ref<const VectorXd>& x) const {
    int id = 0;
    while (nodes[id].feature >= 0) {
        const Node& n = nodes[id];
        id = x[n.feature] <= n.threshold ? n.left : n.right;
    }
    return nodes[id].value;
}

double ForestModel::predict(const Eigen::Ref<const VectorXd>& x) const {
    if (x.size() != feature_count) {
        throw shape_error("forest predict: expected " + std::to_string(feature_count) +
                          " features, got " + std::to_string(x.size()));
    }
    return running_mean(trees, [&](const RegressionTree& t) { return t.predict(x); });
}

RegressionTree fit_regression_tree(const RowMatrixXd& x, const VectorXd& y,
                                   std::vector<Eigen::Index> indices, int max_depth,
                                   int min_samples_split) {
    check_shapes(x, y.size());
    if (indices.empty()) throw data_error("forest: empty sample set");
    return TreeBuilder(x, y, max_depth, min_samples_split).build(std::move(indices));
}

ForestModel fit_random_forest_step(const RowMatrixXd& x, const VectorXd& y,
                                   const ForestConfig& cfg) {
    check_shapes(x, y.size());
    if (cfg.n_estimators < 1) throw config_error("forest: n_estimators must be >= 1");

    ForestModel model;
    model.feature_count = x.cols();
    model.trees.reserve(cfg.n_estimators);
    const Eigen::Index n = x.rows();
    std::mt19937_64 rng(cfg.seed);
    std::uniform_int_distribution<Eigen::Index> pick(0, n - 1);
    TreeBuilder builder(x, y, cfg.max_depth, cfg.min_samples_split);
    std::vector<Eigen::Index> sample(n);
    for (int t = 0; t < cfg.n_estimators; ++t) {
        if (cfg.bootstrap) {
            for (auto& s : sample) s = pick(rng);
            std::sort(sample.begin(), sample.end());
        } else {
            std::iota(sample.begin(), sample.end(), Eigen::Index(0));
        }
        model.trees.push_back(builder.build(sample));
    }
    return model;
}

MimoForest fit_mimo_forest(const RowMatrixXd& x, const RowMatrixXd& y, const ForestConfig& cfg,
                           int jobs) {
    check_shapes(x, y.rows());
    MimoForest forest;
    forest.steps.resize(y.cols());
    parallel_for(static_cast<std::size_t>(y.cols()), jobs, [&](std::size_t t) {
        ForestConfig step_cfg = cfg;
        step_cfg.seed = derive_seed(cfg.seed, "forest.step", t);
        forest.steps[t] = fit_random_forest_step(x, y.col(static_cast<Eigen::Index>(t)), step_cfg);
    });
    return forest;
}

RowMatrixXd MimoForest::predict(const RowMatrixXd& x) const {
    RowMatrixXd out(x.rows(), static_cast<Eigen::Index>(steps.size()));
    for (Eigen::Index r = 0; r < x.rows(); ++r) {
        const VectorXd row = x.row(r).transpose();
        for (std::size_t t = 0; t < steps.size(); ++t) {
            out(r, static_cast<Eigen::Index>(t)) = steps[t].predict(row);
        }
    }
    return out;
}

} // namespace wavecast
