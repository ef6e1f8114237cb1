// CART construction and the forest wrapper. The same builder serves both
// families: a decision tree is a forest of one tree grown without bootstrap
// on the full candidate set, which keeps the two families exactly equivalent
// under that configuration.
//
// The builder works on a feature-major transpose so per-node candidate scans
// stay cache-resident.
#include "omicsel/error.hpp"
#include "omicsel/models.hpp"
#include "omicsel/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <utility>

namespace omicsel {

namespace {

double gini_from_counts(const std::vector<std::size_t>& counts, std::size_t total) {
    if (total == 0) return 0.0;
    double acc = 0.0;
    for (auto c : counts) {
        const double p = static_cast<double>(c) / static_cast<double>(total);
        acc += p * p;
    }
    return 1.0 - acc;
}

int majority_label(const std::vector<std::size_t>& counts) {
    return static_cast<int>(
        std::max_element(counts.begin(), counts.end()) - counts.begin());
}

struct TreeBuilder {
    const Matrix& xt; // feature-major: xt.at(feature, sample)
    const std::vector<int>& y;
    std::size_t n_classes;
    int max_depth;
    int min_samples_leaf;
    std::size_t max_features;
    Rng* rng; // nullptr when every feature is a candidate
    std::size_t n_root;
    Tree tree;

    std::vector<std::pair<double, int>> scratch; // (value, label) sort buffer

    int build(std::vector<std::size_t>& samples, int depth) {
        const std::size_t n = samples.size();
        std::vector<std::size_t> counts(n_classes, 0);
        for (auto i : samples) counts[static_cast<std::size_t>(y[i])]++;

        const double parent_gini = gini_from_counts(counts, n);
        const bool depth_stop = (max_depth >= 0 && depth >= max_depth);
        if (parent_gini == 0.0 || depth_stop ||
            n < 2 * static_cast<std::size_t>(min_samples_leaf)) {
            return make_leaf(majority_label(counts));
        }

        const std::size_t d = xt.rows();
        std::vector<std::size_t> candidates;
        if (max_features >= d) {
            candidates.resize(d);
            std::iota(candidates.begin(), candidates.end(), 0);
        } else {
            candidates = rng->sample_indices(d, max_features); // sorted
        }

        double best_gain = 0.0;
        int best_feature = -1;
        double best_threshold = 0.0;

        std::vector<std::size_t> left_counts(n_classes);
        scratch.resize(n);
        for (std::size_t j : candidates) {
            const double* column = xt.row(j).data();
            for (std::size_t t = 0; t < n; ++t)
                scratch[t] = {column[samples[t]], y[samples[t]]};
            std::sort(scratch.begin(), scratch.end(),
                      [](const auto& a, const auto& b) { return a.first < b.first; });

            std::fill(left_counts.begin(), left_counts.end(), 0);
            std::size_t n_left = 0;
            for (std::size_t t = 0; t + 1 < n; ++t) {
                left_counts[static_cast<std::size_t>(scratch[t].second)]++;
                ++n_left;
                if (scratch[t].first == scratch[t + 1].first) continue;
                const std::size_t n_right = n - n_left;
                if (n_left < static_cast<std::size_t>(min_samples_leaf) ||
                    n_right < static_cast<std::size_t>(min_samples_leaf))
                    continue;
                double acc_l = 0.0, acc_r = 0.0;
                for (std::size_t cc = 0; cc < n_classes; ++cc) {
                    const double pl = static_cast<double>(left_counts[cc]) /
                                      static_cast<double>(n_left);
                    const double pr =
                        static_cast<double>(counts[cc] - left_counts[cc]) /
                        static_cast<double>(n_right);
                    acc_l += pl * pl;
                    acc_r += pr * pr;
                }
                const double gain =
                    parent_gini -
                    (static_cast<double>(n_left) / static_cast<double>(n)) *
                        (1.0 - acc_l) -
                    (static_cast<double>(n_right) / static_cast<double>(n)) *
                        (1.0 - acc_r);
                // Strict improvement; candidates scan in ascending feature then
                // threshold order, so ties resolve to the lower feature index
                // and lower threshold.
                if (gain > best_gain) {
                    best_gain = gain;
                    best_feature = static_cast<int>(j);
                    best_threshold = 0.5 * (scratch[t].first + scratch[t + 1].first);
                }
            }
        }

        if (best_feature < 0)
            return make_leaf(majority_label(counts));

        std::vector<std::size_t> left, right;
        const double* split_column =
            xt.row(static_cast<std::size_t>(best_feature)).data();
        for (auto i : samples) {
            if (split_column[i] <= best_threshold)
                left.push_back(i);
            else
                right.push_back(i);
        }

        tree.importance_raw[static_cast<std::size_t>(best_feature)] +=
            (static_cast<double>(n) / static_cast<double>(n_root)) * best_gain;

        const int node = static_cast<int>(tree.nodes.size());
        tree.nodes.push_back(TreeNode{best_feature, best_threshold, -1, -1, 0});
        samples.clear();
        samples.shrink_to_fit();
        const int left_id = build(left, depth + 1);
        const int right_id = build(right, depth + 1);
        tree.nodes[static_cast<std::size_t>(node)].left = left_id;
        tree.nodes[static_cast<std::size_t>(node)].right = right_id;
        return node;
    }

    int make_leaf(int label) {
        const int node = static_cast<int>(tree.nodes.size());
        tree.nodes.push_back(TreeNode{-1, 0.0, -1, -1, label});
        return node;
    }
};

Tree grow_tree(const Matrix& xt, const std::vector<int>& y, std::size_t n_classes,
               const ModelSpec& spec, std::size_t max_features,
               std::vector<std::size_t> samples, Rng* rng) {
    TreeBuilder builder{xt,  y,   n_classes, spec.max_depth, spec.min_samples_leaf,
                        max_features, rng, samples.size(), Tree{}, {}};
    builder.tree.importance_raw.assign(xt.rows(), 0.0);
    builder.build(samples, 0); // nodes append pre-order, so the root is node 0
    return builder.tree;
}

int predict_tree(const Tree& tree, std::span<const double> row) {
    int node = 0;
    while (tree.nodes[static_cast<std::size_t>(node)].feature >= 0) {
        const auto& nd = tree.nodes[static_cast<std::size_t>(node)];
        node = (row[static_cast<std::size_t>(nd.feature)] <= nd.threshold) ? nd.left
                                                                           : nd.right;
    }
    return tree.nodes[static_cast<std::size_t>(node)].label;
}

std::size_t resolve_max_features(MaxFeaturesRule rule, std::size_t d) {
    switch (rule) {
    case MaxFeaturesRule::sqrt_rule:
        return static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(d))));
    case MaxFeaturesRule::log2_rule:
        return std::max<std::size_t>(
            1, static_cast<std::size_t>(std::ceil(std::log2(static_cast<double>(d)))));
    case MaxFeaturesRule::all:
        return d;
    }
    return d;
}

Matrix transpose(const Matrix& x) {
    Matrix out(x.cols(), x.rows());
    for (std::size_t i = 0; i < x.rows(); ++i) {
        const auto row = x.row(i);
        for (std::size_t j = 0; j < x.cols(); ++j) out.at(j, i) = row[j];
    }
    return out;
}

} // namespace

TrainedModel train_tree_family(const ModelSpec& spec, const LabeledDataset& ds) {
    const std::size_t n = ds.n_samples();
    const std::size_t d = ds.n_features();
    const Matrix xt = transpose(ds.matrix.values);

    ForestState state;
    if (spec.family == ModelFamily::decision_tree) {
        std::vector<std::size_t> all(n);
        std::iota(all.begin(), all.end(), 0);
        state.trees.push_back(grow_tree(xt, ds.labels, ds.n_classes(), spec, d,
                                        std::move(all), nullptr));
    } else {
        const std::size_t max_features = resolve_max_features(spec.max_features_rule, d);
        state.trees.reserve(static_cast<std::size_t>(spec.n_trees));
        for (int t = 0; t < spec.n_trees; ++t) {
            // Per-tree seed depends only on (spec.seed, t), so results do not
            // depend on scheduling if trees are ever grown concurrently.
            Rng rng(derive_seed(spec.seed, "forest:tree:" + std::to_string(t)));
            std::vector<std::size_t> samples(n);
            if (spec.bootstrap) {
                for (auto& s : samples)
                    s = static_cast<std::size_t>(rng.uniform_below(n));
            } else {
                std::iota(samples.begin(), samples.end(), 0);
            }
            Rng* node_rng = (max_features >= d) ? nullptr : &rng;
            state.trees.push_back(grow_tree(xt, ds.labels, ds.n_classes(), spec,
                                            max_features, std::move(samples),
                                            node_rng));
        }
    }

    TrainedModel model;
    model.spec = spec;
    model.n_classes = ds.n_classes();
    model.n_features = d;
    model.state = std::move(state);
    return model;
}

std::vector<int> predict_forest(const TrainedModel& model, const Matrix& x) {
    const auto& state = std::get<ForestState>(model.state);
    std::vector<int> out(x.rows());
    std::vector<std::size_t> votes(model.n_classes);
    for (std::size_t r = 0; r < x.rows(); ++r) {
        std::fill(votes.begin(), votes.end(), 0);
        for (const auto& tree : state.trees)
            votes[static_cast<std::size_t>(predict_tree(tree, x.row(r)))]++;
        out[r] = static_cast<int>(
            std::max_element(votes.begin(), votes.end()) - votes.begin());
    }
    return out;
}

std::vector<double> impurity_importances(const TrainedModel& model) {
    if (model.spec.family != ModelFamily::random_forest &&
        model.spec.family != ModelFamily::decision_tree)
        throw UsageError("impurity_importances requires a tree-family model");
    const auto& state = std::get<ForestState>(model.state);
    std::vector<double> imp(model.n_features, 0.0);
    for (const auto& tree : state.trees)
        for (std::size_t j = 0; j < imp.size(); ++j)
            imp[j] += tree.importance_raw[j];
    for (auto& v : imp) v /= static_cast<double>(state.trees.size());
    const double total = std::accumulate(imp.begin(), imp.end(), 0.0);
    if (total > 0.0)
        for (auto& v : imp) v /= total;
    return imp;
}

} // namespace omicsel
