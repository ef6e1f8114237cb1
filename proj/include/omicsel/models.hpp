#pragma once

#include "omicsel/matrix.hpp"

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace omicsel {

enum class ModelFamily {
    decision_tree,
    random_forest,
    knn,
    gaussian_nb,
    logistic_regression,
    linear_svc,
};

enum class MaxFeaturesRule { sqrt_rule, log2_rule, all };
enum class Metric { euclidean, correlation };

const char* family_name(ModelFamily f);
ModelFamily family_from_name(const std::string& name); // throws UsageError

struct ModelSpec {
    ModelFamily family = ModelFamily::linear_svc;
    std::uint64_t seed = 0;

    // decision_tree / random_forest
    int max_depth = -1; // -1 = unbounded
    int min_samples_leaf = 1;
    int n_trees = 100;
    MaxFeaturesRule max_features_rule = MaxFeaturesRule::sqrt_rule;
    bool bootstrap = true;

    // knn
    int k = 5;
    Metric metric = Metric::euclidean;

    // linear_svc / logistic_regression
    double c = 1.0;           // hinge penalty weight
    double l2_strength = 1.0; // ridge weight
    int max_iters = 1000;
    double tol = 1e-4;

    static ModelSpec defaults(ModelFamily family, std::uint64_t seed = 0);

    // Grid-search hook: assigns a named hyperparameter, validating it against
    // the family. Throws UsageError for unknown names or out-of-range values.
    void set_param(const std::string& name, double value);
    void validate() const;
};

// CART node; feature < 0 marks a leaf carrying the majority label.
struct TreeNode {
    int feature = -1;
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    int label = 0;
};

struct Tree {
    std::vector<TreeNode> nodes;            // node 0 is the root
    std::vector<double> importance_raw;     // weighted impurity decrease per feature
};

struct ForestState {
    std::vector<Tree> trees;
};

struct KnnState {
    Matrix train_x;
    std::vector<int> train_y;
};

struct GnbState {
    Matrix means; // class x feature
    Matrix vars;  // class x feature, floored
    std::vector<double> log_priors;
};

struct LinearState {
    // Weights live in standardized feature space; standardization statistics
    // are part of the model and applied again at prediction time.
    Matrix weights; // 1 x d for binary problems, n_classes x d otherwise
    std::vector<double> intercepts;
    std::vector<double> feat_mean;
    std::vector<double> feat_scale;
    // Objective value after initialization and after every accepted optimizer
    // step, one trace per binary subproblem (diagnostic, not serialized).
    std::vector<std::vector<double>> objective_traces;
};

struct TrainedModel {
    ModelSpec spec;
    std::size_t n_classes = 0;
    std::size_t n_features = 0;
    bool convergence_warning = false;
    std::variant<ForestState, KnnState, GnbState, LinearState> state;
};

TrainedModel train(const ModelSpec& spec, const LabeledDataset& ds);

// One class index per row of X; ties break toward the lower class index.
std::vector<int> predict(const TrainedModel& model, const Matrix& x);

// Mean over trees of the weighted Gini-impurity decrease per feature,
// normalized to sum to 1 (all zeros when no tree ever split).
std::vector<double> impurity_importances(const TrainedModel& model);

// Fitted weight matrix of a linear-family model (standardized space).
const Matrix& linear_weights(const TrainedModel& model);

// Selector ranking criterion: per-feature sum over classes of squared weights.
std::vector<double> linear_criterion(const TrainedModel& model);

// Versioned JSON round-trip for all six families.
std::string model_to_json(const TrainedModel& model);
TrainedModel model_from_json(const std::string& text);
void save_model(const TrainedModel& model, const std::string& path);
TrainedModel load_model(const std::string& path);

// Objective/gradient pairs for the linear optimizers, exposed so tests can
// check them against finite differences and inspect returned solutions.
namespace linear_detail {

double svc_objective(const Matrix& x, const std::vector<double>& y_pm1,
                     const std::vector<double>& w, double b, double c);

double logreg_binary_objective(const Matrix& x, const std::vector<int>& y01,
                               const std::vector<double>& w, double b, double l2);
void logreg_binary_gradient(const Matrix& x, const std::vector<int>& y01,
                            const std::vector<double>& w, double b, double l2,
                            std::vector<double>& grad_w, double& grad_b);

double logreg_multi_objective(const Matrix& x, const std::vector<int>& y,
                              std::size_t n_classes, const Matrix& w,
                              const std::vector<double>& b, double l2);
void logreg_multi_gradient(const Matrix& x, const std::vector<int>& y,
                           std::size_t n_classes, const Matrix& w,
                           const std::vector<double>& b, double l2,
                           Matrix& grad_w, std::vector<double>& grad_b);

} // namespace linear_detail

} // namespace omicsel
