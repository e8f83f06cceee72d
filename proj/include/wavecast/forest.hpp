#pragma once

#include "wavecast/types.hpp"

#include <cstdint>
#include <vector>

namespace wavecast {

struct ForestConfig {
    int n_estimators = 50;
    bool bootstrap = true;
    int max_depth = 0; ///< 0 = unlimited
    int min_samples_split = 2;
    std::uint64_t seed = 0;
};

/// CART regression tree, split criterion = reduction of squared error.
struct RegressionTree {
    struct Node {
        int feature = -1; ///< -1 marks a leaf
        double threshold = 0.0;
        int left = -1;
        int right = -1;
        double value = 0.0;
    };
    std::vector<Node> nodes;

    double predict(const Eigen::Ref<const VectorXd>& x) const;
};

/// Bagged ensemble of regression trees for one output step.
struct ForestModel {
    std::vector<RegressionTree> trees;
    Eigen::Index feature_count = 0;

    double predict(const Eigen::Ref<const VectorXd>& x) const;
};

/// Grows one tree on the given sample indices (repeats act as weights).
RegressionTree fit_regression_tree(const RowMatrixXd& x, const VectorXd& y,
                                   std::vector<Eigen::Index> indices, int max_depth,
                                   int min_samples_split);

ForestModel fit_random_forest_step(const RowMatrixXd& x, const VectorXd& y,
                                   const ForestConfig& cfg);

/// One forest per output column; step t is seeded from (cfg.seed, t).
struct MimoForest {
    std::vector<ForestModel> steps;

    RowMatrixXd predict(const RowMatrixXd& x) const;
};

MimoForest fit_mimo_forest(const RowMatrixXd& x, const RowMatrixXd& y, const ForestConfig& cfg,
                           int jobs = 1);

} // namespace wavecast
