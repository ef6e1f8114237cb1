#pragma once

#include "omicsel/matrix.hpp"
#include "omicsel/models.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace omicsel {

enum class ThresholdRule { mean, median, top_fraction };

struct SelectorConfig {
    ModelSpec tree_spec = ModelSpec::defaults(ModelFamily::random_forest);
    ThresholdRule importance_threshold_rule = ThresholdRule::mean;
    double top_fraction = 0.1; // only for ThresholdRule::top_fraction
    ModelSpec estimator_spec = ModelSpec::defaults(ModelFamily::linear_svc);
    // Fraction in (0,1) = eliminate ceil(step * surviving) per round;
    // integer >= 1 = eliminate that many per round.
    double rfe_step = 0.1;
    std::size_t rfecv_k = 2;
    std::size_t rfecv_min_features = 1;
    // 0 means "from_rfecv": the confirming stage-3 run uses the optimum that
    // stage 2 found.
    std::size_t rfe_target = 0;
    bool reuse_rfecv_survivors = false;
    std::uint64_t seed = 0;

    void validate() const;
};

struct SelectionStage {
    std::string name; // tree_based | rfecv | rfe
    std::vector<std::string> input_feature_ids;
    std::vector<std::string> selected_feature_ids;
    // Rank per input feature; 1 = kept longest. Survivors share rank 1, the
    // remainder rank in reverse elimination order (for the tree stage, by
    // descending importance).
    std::vector<int> ranking;
    // (surviving-set size, mean CV accuracy), ascending by size; rfecv only.
    std::optional<std::vector<std::pair<std::size_t, double>>> score_curve;
    double wall_time_seconds = 0.0;
    int estimator_fits = 0;
};

struct SelectionResult {
    std::vector<SelectionStage> stages;
    std::vector<std::string> final_selected;

    void validate() const; // pipeline nesting invariants
};

// Trains the configured forest once, keeps features whose impurity importance
// clears the threshold rule (mean rule: strictly above the mean importance).
// An empty selection falls back to the single top-importance feature.
SelectionResult tree_select(const LabeledDataset& ds, const SelectorConfig& cfg);

// Recursive elimination down to n_target using the linear estimator's
// per-feature criterion (sum over classes of squared weights). Equal criteria
// eliminate the higher feature index first.
SelectionResult rfe(const LabeledDataset& ds, const ModelSpec& estimator_spec,
                    std::size_t n_target, double step);

// Cross-validated elimination: runs the schedule per fold, scores every
// visited size on the held-out part, picks the smallest size with the best
// mean accuracy, then reruns plain RFE at that size on the full dataset.
SelectionResult rfecv(const LabeledDataset& ds, const ModelSpec& estimator_spec,
                      std::size_t k, double step, std::size_t min_features,
                      std::uint64_t seed);

// The sequential cascade: tree_select, then rfecv on its survivors, then a
// confirming rfe at the cross-validated optimum (or cfg.rfe_target).
SelectionResult sequential_select(const LabeledDataset& ds, const SelectorConfig& cfg);

// Surviving-set sizes visited by the elimination schedule, descending from
// n_features to n_target; one estimator fit per entry.
std::vector<std::size_t> rfe_schedule_sizes(std::size_t n_features,
                                            std::size_t n_target, double step);

std::string selection_to_json(const SelectionResult& result, bool include_timing);
void write_selected_csv(const SelectionResult& result, const std::string& path);

} // namespace omicsel
