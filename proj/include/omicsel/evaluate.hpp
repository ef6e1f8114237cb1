#pragma once

#include "omicsel/matrix.hpp"
#include "omicsel/models.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace omicsel {

struct ConfusionMatrix {
    std::size_t n_classes = 0;
    std::vector<std::size_t> counts; // row-major, rows = true, cols = predicted

    std::size_t at(std::size_t t, std::size_t p) const { return counts[t * n_classes + p]; }
    std::size_t total() const;
};

struct ClassMetrics {
    double precision = 0.0;
    double recall = 0.0;
    double specificity = 0.0;
    double f1 = 0.0;
};

struct EvaluationReport {
    std::vector<ClassMetrics> per_class;
    double macro_precision = 0.0;
    double macro_recall = 0.0;
    double macro_specificity = 0.0;
    double macro_f1 = 0.0;
    double g_mean = 0.0; // sqrt(macro_recall * macro_specificity)
    double accuracy = 0.0;
    bool zero_denominator = false; // some metric fell back to the 0 convention
};

ConfusionMatrix confusion_matrix(const std::vector<int>& y_true,
                                 const std::vector<int>& y_pred,
                                 std::size_t n_classes);

// One-vs-rest per-class metrics plus unweighted macro averages. Any
// zero-denominator metric is 0 and flips the report flag.
EvaluationReport metrics_report(const ConfusionMatrix& cm);

double accuracy_score(const std::vector<int>& y_true, const std::vector<int>& y_pred);

// Accuracy as a percentage with one decimal (e.g. "97.2").
std::string accuracy_percent(double accuracy);

struct GridPoint {
    std::vector<std::pair<std::string, double>> params; // declared key order
    std::vector<double> fold_accuracies;
    double mean_accuracy = 0.0;
};

struct GridSearchResult {
    std::vector<std::pair<std::string, double>> best_params;
    std::size_t best_index = 0;
    std::vector<GridPoint> table; // grid enumeration order
};

// Exhaustive search over the Cartesian grid with stratified k-fold accuracy.
// `grid` preserves declared key order; ties keep the first enumerated point.
GridSearchResult grid_search(const LabeledDataset& ds, ModelFamily family,
                             const std::vector<std::pair<std::string, std::vector<double>>>& grid,
                             std::size_t k, std::uint64_t seed);

} // namespace omicsel
