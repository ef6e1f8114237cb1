#include "omicsel/models.hpp"

#include "omicsel/error.hpp"
#include "omicsel/kernels.hpp"
#include "omicsel/preprocess.hpp" // pearson, for the correlation metric

#include <algorithm>
#include <cmath>
#include <numeric>

namespace omicsel {

const char* family_name(ModelFamily f) {
    switch (f) {
    case ModelFamily::decision_tree:       return "decision_tree";
    case ModelFamily::random_forest:       return "random_forest";
    case ModelFamily::knn:                 return "knn";
    case ModelFamily::gaussian_nb:         return "gaussian_nb";
    case ModelFamily::logistic_regression: return "logistic_regression";
    case ModelFamily::linear_svc:          return "linear_svc";
    }
    return "unknown";
}

ModelFamily family_from_name(const std::string& name) {
    if (name == "decision_tree") return ModelFamily::decision_tree;
    if (name == "random_forest") return ModelFamily::random_forest;
    if (name == "knn") return ModelFamily::knn;
    if (name == "gaussian_nb") return ModelFamily::gaussian_nb;
    if (name == "logistic_regression") return ModelFamily::logistic_regression;
    if (name == "linear_svc") return ModelFamily::linear_svc;
    throw UsageError("unknown model family: " + name);
}

ModelSpec ModelSpec::defaults(ModelFamily family, std::uint64_t seed) {
    ModelSpec spec;
    spec.family = family;
    spec.seed = seed;
    return spec;
}

void ModelSpec::validate() const {
    if (max_depth < -1 || max_depth == 0)
        throw UsageError("max_depth must be -1 (unbounded) or >= 1");
    if (min_samples_leaf < 1) throw UsageError("min_samples_leaf must be >= 1");
    if (n_trees < 1) throw UsageError("n_trees must be >= 1");
    if (k < 1) throw UsageError("k must be >= 1");
    if (!(c > 0.0)) throw UsageError("C must be > 0");
    if (!(l2_strength > 0.0)) throw UsageError("l2_strength must be > 0");
    if (max_iters < 1) throw UsageError("max_iters must be >= 1");
    if (!(tol > 0.0)) throw UsageError("tol must be > 0");
}

void ModelSpec::set_param(const std::string& name, double value) {
    const bool tree_like =
        family == ModelFamily::decision_tree || family == ModelFamily::random_forest;
    const bool linear =
        family == ModelFamily::linear_svc || family == ModelFamily::logistic_regression;

    auto as_int = [&](int lo) {
        if (value != std::floor(value) || value < lo)
            throw UsageError("invalid value for " + name + ": " + std::to_string(value));
        return static_cast<int>(value);
    };

    if (name == "max_depth" && tree_like) {
        if (value == -1) { max_depth = -1; return; }
        max_depth = as_int(1);
    } else if (name == "min_samples_leaf" && tree_like) {
        min_samples_leaf = as_int(1);
    } else if (name == "n_trees" && family == ModelFamily::random_forest) {
        n_trees = as_int(1);
    } else if (name == "k" && family == ModelFamily::knn) {
        k = as_int(1);
    } else if (name == "c" && family == ModelFamily::linear_svc) {
        if (!(value > 0.0)) throw UsageError("C must be > 0");
        c = value;
    } else if (name == "l2_strength" && family == ModelFamily::logistic_regression) {
        if (!(value > 0.0)) throw UsageError("l2_strength must be > 0");
        l2_strength = value;
    } else if (name == "max_iters" && linear) {
        max_iters = as_int(1);
    } else if (name == "tol" && linear) {
        if (!(value > 0.0)) throw UsageError("tol must be > 0");
        tol = value;
    } else {
        throw UsageError("unknown hyperparameter '" + name + "' for family " +
                         family_name(family));
    }
}

namespace {

void check_trainable(const LabeledDataset& ds) {
    if (ds.n_classes() < 2)
        throw DataError("training requires at least 2 classes");
    if (ds.n_features() == 0)
        throw DataError("training requires at least 1 feature");
    if (ds.n_samples() == 0)
        throw DataError("training requires at least 1 sample");
    std::vector<bool> present(ds.n_classes(), false);
    for (int lab : ds.labels) present[static_cast<std::size_t>(lab)] = true;
    for (std::size_t c = 0; c < present.size(); ++c)
        if (!present[c])
            throw DataError("single-class training set: class " + std::to_string(c) +
                            " absent");
}

TrainedModel train_knn(const ModelSpec& spec, const LabeledDataset& ds) {
    TrainedModel model;
    model.spec = spec;
    model.n_classes = ds.n_classes();
    model.n_features = ds.n_features();
    model.state = KnnState{ds.matrix.values, ds.labels};
    return model;
}

TrainedModel train_gnb(const ModelSpec& spec, const LabeledDataset& ds) {
    const std::size_t n = ds.n_samples();
    const std::size_t d = ds.n_features();
    const std::size_t nc = ds.n_classes();

    GnbState state;
    state.means = Matrix(nc, d);
    state.vars = Matrix(nc, d);
    state.log_priors.resize(nc);

    const auto counts = class_counts(ds.labels, nc);
    for (std::size_t i = 0; i < n; ++i)
        kernels::axpy(1.0, ds.matrix.values.row(i).data(),
                      state.means.row(static_cast<std::size_t>(ds.labels[i])).data(), d);
    for (std::size_t c = 0; c < nc; ++c)
        for (auto& v : state.means.row(c)) v /= static_cast<double>(counts[c]);
    for (std::size_t i = 0; i < n; ++i) {
        const auto c = static_cast<std::size_t>(ds.labels[i]);
        const auto row = ds.matrix.values.row(i);
        auto var = state.vars.row(c);
        const auto mean = state.means.row(c);
        for (std::size_t j = 0; j < d; ++j) {
            const double delta = row[j] - mean[j];
            var[j] += delta * delta;
        }
    }
    for (std::size_t c = 0; c < nc; ++c)
        for (auto& v : state.vars.row(c)) v /= static_cast<double>(counts[c]);

    // Variance floor relative to the overall largest feature variance, so a
    // constant feature never produces a degenerate Gaussian.
    double max_var = 0.0;
    {
        std::vector<double> mean(d, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            kernels::axpy(1.0, ds.matrix.values.row(i).data(), mean.data(), d);
        for (auto& v : mean) v /= static_cast<double>(n);
        for (std::size_t j = 0; j < d; ++j) {
            double acc = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const double delta = ds.matrix.values.at(i, j) - mean[j];
                acc += delta * delta;
            }
            max_var = std::max(max_var, acc / static_cast<double>(n));
        }
    }
    const double floor = std::max(1e-9 * max_var, 1e-300);
    for (std::size_t c = 0; c < nc; ++c)
        for (auto& v : state.vars.row(c)) v = std::max(v, floor);

    for (std::size_t c = 0; c < nc; ++c)
        state.log_priors[c] = std::log(static_cast<double>(counts[c]) /
                                       static_cast<double>(n));

    TrainedModel model;
    model.spec = spec;
    model.n_classes = nc;
    model.n_features = d;
    model.state = std::move(state);
    return model;
}

std::vector<int> predict_knn(const TrainedModel& model, const Matrix& x) {
    const auto& state = std::get<KnnState>(model.state);
    const std::size_t n_train = state.train_x.rows();
    const std::size_t d = state.train_x.cols();
    const auto k = std::min<std::size_t>(static_cast<std::size_t>(model.spec.k), n_train);

    std::vector<int> out(x.rows());
    std::vector<std::pair<double, std::size_t>> dist(n_train);
    std::vector<std::size_t> votes(model.n_classes);
    for (std::size_t r = 0; r < x.rows(); ++r) {
        const double* q = x.row(r).data();
        for (std::size_t t = 0; t < n_train; ++t) {
            const double* p = state.train_x.row(t).data();
            const double dd = (model.spec.metric == Metric::euclidean)
                                  ? kernels::squared_distance(q, p, d)
                                  : 1.0 - pearson(q, p, d);
            dist[t] = {dd, t};
        }
        std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k),
                          dist.end());
        std::fill(votes.begin(), votes.end(), 0);
        for (std::size_t i = 0; i < k; ++i)
            votes[static_cast<std::size_t>(state.train_y[dist[i].second])]++;
        out[r] = static_cast<int>(
            std::max_element(votes.begin(), votes.end()) - votes.begin());
    }
    return out;
}

std::vector<int> predict_gnb(const TrainedModel& model, const Matrix& x) {
    const auto& state = std::get<GnbState>(model.state);
    const std::size_t d = model.n_features;
    std::vector<int> out(x.rows());
    for (std::size_t r = 0; r < x.rows(); ++r) {
        const auto row = x.row(r);
        double best = -std::numeric_limits<double>::infinity();
        int best_class = 0;
        for (std::size_t c = 0; c < model.n_classes; ++c) {
            double score = state.log_priors[c];
            const auto mean = state.means.row(c);
            const auto var = state.vars.row(c);
            for (std::size_t j = 0; j < d; ++j) {
                const double delta = row[j] - mean[j];
                score -= 0.5 * (std::log(2.0 * std::numbers::pi * var[j]) +
                                delta * delta / var[j]);
            }
            if (score > best) { // strict: ties keep the lower class index
                best = score;
                best_class = static_cast<int>(c);
            }
        }
        out[r] = best_class;
    }
    return out;
}

} // namespace

// Implemented in models_tree.cpp / models_linear.cpp.
TrainedModel train_tree_family(const ModelSpec& spec, const LabeledDataset& ds);
TrainedModel train_linear_family(const ModelSpec& spec, const LabeledDataset& ds);
std::vector<int> predict_forest(const TrainedModel& model, const Matrix& x);
std::vector<int> predict_linear(const TrainedModel& model, const Matrix& x);

TrainedModel train(const ModelSpec& spec, const LabeledDataset& ds) {
    spec.validate();
    check_trainable(ds);
    switch (spec.family) {
    case ModelFamily::decision_tree:
    case ModelFamily::random_forest:
        return train_tree_family(spec, ds);
    case ModelFamily::knn:
        return train_knn(spec, ds);
    case ModelFamily::gaussian_nb:
        return train_gnb(spec, ds);
    case ModelFamily::logistic_regression:
    case ModelFamily::linear_svc:
        return train_linear_family(spec, ds);
    }
    throw InternalError("unhandled model family");
}

std::vector<int> predict(const TrainedModel& model, const Matrix& x) {
    if (x.cols() != model.n_features)
        throw DataError("prediction input has " + std::to_string(x.cols()) +
                        " features, model expects " + std::to_string(model.n_features));
    switch (model.spec.family) {
    case ModelFamily::decision_tree:
    case ModelFamily::random_forest:
        return predict_forest(model, x);
    case ModelFamily::knn:
        return predict_knn(model, x);
    case ModelFamily::gaussian_nb:
        return predict_gnb(model, x);
    case ModelFamily::logistic_regression:
    case ModelFamily::linear_svc:
        return predict_linear(model, x);
    }
    throw InternalError("unhandled model family");
}

const Matrix& linear_weights(const TrainedModel& model) {
    if (model.spec.family != ModelFamily::linear_svc &&
        model.spec.family != ModelFamily::logistic_regression)
        throw UsageError("linear_weights requires a linear-family model");
    return std::get<LinearState>(model.state).weights;
}

std::vector<double> linear_criterion(const TrainedModel& model) {
    const Matrix& w = linear_weights(model);
    std::vector<double> crit(w.cols(), 0.0);
    for (std::size_t r = 0; r < w.rows(); ++r) {
        const auto row = w.row(r);
        for (std::size_t j = 0; j < w.cols(); ++j) crit[j] += row[j] * row[j];
    }
    return crit;
}

} // namespace omicsel
