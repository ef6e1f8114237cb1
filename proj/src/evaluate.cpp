#include "omicsel/evaluate.hpp"

#include "omicsel/dataset.hpp"
#include "omicsel/error.hpp"
#include "omicsel/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

namespace omicsel {

std::size_t ConfusionMatrix::total() const {
    return std::accumulate(counts.begin(), counts.end(), std::size_t{0});
}

ConfusionMatrix confusion_matrix(const std::vector<int>& y_true,
                                 const std::vector<int>& y_pred,
                                 std::size_t n_classes) {
    if (y_true.size() != y_pred.size())
        throw DataError("confusion_matrix: label vectors differ in length");
    ConfusionMatrix cm;
    cm.n_classes = n_classes;
    cm.counts.assign(n_classes * n_classes, 0);
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        const int t = y_true[i];
        const int p = y_pred[i];
        if (t < 0 || static_cast<std::size_t>(t) >= n_classes ||
            p < 0 || static_cast<std::size_t>(p) >= n_classes)
            throw DataError("confusion_matrix: label out of range at position " +
                            std::to_string(i));
        cm.counts[static_cast<std::size_t>(t) * n_classes +
                  static_cast<std::size_t>(p)]++;
    }
    return cm;
}

EvaluationReport metrics_report(const ConfusionMatrix& cm) {
    const std::size_t total = cm.total();
    if (total == 0)
        throw DataError("metrics_report: empty confusion matrix");
    const std::size_t nc = cm.n_classes;

    EvaluationReport report;
    report.per_class.resize(nc);

    auto safe_ratio = [&report](double num, double den) {
        if (den == 0.0) {
            report.zero_denominator = true;
            return 0.0;
        }
        return num / den;
    };

    std::size_t trace = 0;
    for (std::size_t c = 0; c < nc; ++c) {
        const double tp = static_cast<double>(cm.at(c, c));
        double fp = 0.0, fn = 0.0;
        for (std::size_t o = 0; o < nc; ++o) {
            if (o == c) continue;
            fp += static_cast<double>(cm.at(o, c));
            fn += static_cast<double>(cm.at(c, o));
        }
        const double tn = static_cast<double>(total) - tp - fp - fn;

        auto& m = report.per_class[c];
        m.precision = safe_ratio(tp, tp + fp);
        m.recall = safe_ratio(tp, tp + fn);
        m.specificity = safe_ratio(tn, tn + fp);
        m.f1 = safe_ratio(2.0 * m.precision * m.recall, m.precision + m.recall);

        trace += cm.at(c, c);
        report.macro_precision += m.precision;
        report.macro_recall += m.recall;
        report.macro_specificity += m.specificity;
        report.macro_f1 += m.f1;
    }
    const double k = static_cast<double>(nc);
    report.macro_precision /= k;
    report.macro_recall /= k;
    report.macro_specificity /= k;
    report.macro_f1 /= k;
    report.g_mean = std::sqrt(report.macro_recall * report.macro_specificity);
    report.accuracy = static_cast<double>(trace) / static_cast<double>(total);
    return report;
}

double accuracy_score(const std::vector<int>& y_true, const std::vector<int>& y_pred) {
    if (y_true.size() != y_pred.size())
        throw DataError("accuracy_score: label vectors differ in length");
    if (y_true.empty())
        throw DataError("accuracy_score: empty label vectors");
    std::size_t hits = 0;
    for (std::size_t i = 0; i < y_true.size(); ++i)
        if (y_true[i] == y_pred[i]) ++hits;
    return static_cast<double>(hits) / static_cast<double>(y_true.size());
}

std::string accuracy_percent(double accuracy) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.1f", accuracy * 100.0);
    return buf;
}

GridSearchResult grid_search(
    const LabeledDataset& ds, ModelFamily family,
    const std::vector<std::pair<std::string, std::vector<double>>>& grid,
    std::size_t k, std::uint64_t seed) {
    if (grid.empty())
        throw UsageError("grid_search: empty grid");
    for (const auto& [name, values] : grid)
        if (values.empty())
            throw UsageError("grid_search: no values for parameter " + name);

    const FoldPlan plan =
        stratified_kfold(ds.labels, ds.n_classes(), k, derive_seed(seed, "grid:folds"));

    GridSearchResult result;
    std::vector<std::size_t> cursor(grid.size(), 0);
    bool done = false;
    while (!done) {
        GridPoint point;
        ModelSpec spec = ModelSpec::defaults(family);
        for (std::size_t g = 0; g < grid.size(); ++g) {
            const double value = grid[g].second[cursor[g]];
            spec.set_param(grid[g].first, value);
            point.params.emplace_back(grid[g].first, value);
        }

        for (std::size_t fold = 0; fold < k; ++fold) {
            const auto train_idx = plan.complement_indices(fold);
            const auto val_idx = plan.fold_indices(fold);
            const LabeledDataset train_ds = ds.select_samples(train_idx);
            spec.seed = derive_seed(seed, "grid:fold:" + std::to_string(fold));
            const TrainedModel model = train(spec, train_ds);
            const auto pred =
                predict(model, ds.matrix.values.select_rows(val_idx));
            std::vector<int> truth;
            truth.reserve(val_idx.size());
            for (auto i : val_idx) truth.push_back(ds.labels[i]);
            point.fold_accuracies.push_back(accuracy_score(truth, pred));
        }
        point.mean_accuracy =
            std::accumulate(point.fold_accuracies.begin(), point.fold_accuracies.end(),
                            0.0) /
            static_cast<double>(k);
        result.table.push_back(std::move(point));

        // Odometer increment: last key varies fastest.
        done = true;
        for (std::size_t g = grid.size(); g-- > 0;) {
            if (++cursor[g] < grid[g].second.size()) {
                done = false;
                break;
            }
            cursor[g] = 0;
        }
    }

    // Strict > keeps the first enumerated point on ties.
    result.best_index = 0;
    for (std::size_t i = 1; i < result.table.size(); ++i)
        if (result.table[i].mean_accuracy > result.table[result.best_index].mean_accuracy)
            result.best_index = i;
    result.best_params = result.table[result.best_index].params;
    return result;
}

} // namespace omicsel
