#pragma once

#include "omicsel/evaluate.hpp"
#include "omicsel/matrix.hpp"
#include "omicsel/preprocess.hpp"
#include "omicsel/select.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace omicsel {

struct RunConfig {
    std::string data_path;
    std::string label_column = "label";
    std::uint64_t seed = 0;
    double test_fraction = 0.25;
    PreprocessConfig preprocess;
    SelectorConfig selector;
    std::string out_dir = ".";
    bool include_timing = true;
};

// Flat key=value configuration with section prefixes (e.g.
// selector.rfe_step=0.1). Precedence: CLI flags > config file > defaults.
std::map<std::string, std::string> parse_config_file(const std::string& path);
void apply_config(RunConfig& cfg, const std::map<std::string, std::string>& kv);

struct BaselineRow {
    ModelFamily family;
    double train_accuracy = 0.0;
    double test_accuracy = 0.0;
    bool convergence_warning = false;
};

struct BaselineResult {
    std::vector<BaselineRow> rows; // all six families, fixed order
    std::vector<TrainedModel> models;
};

// One stratified split, all six families trained on the identical train part
// with family defaults (seed from cfg.seed).
BaselineResult run_baseline(const LabeledDataset& ds, const RunConfig& cfg);

struct BenchRow {
    std::string strategy; // tree_based | rfecv | rfe | combined
    bool ok = false;
    std::size_t n_selected = 0;
    double wall_time_seconds = 0.0;         // selection only
    std::vector<double> stage_wall_times;   // combined: one per stage
    EvaluationReport report;
    std::string error;
};

struct BenchReport {
    std::vector<BenchRow> rows;
    std::vector<std::string> class_names;
    std::size_t train_samples = 0;
    std::size_t test_samples = 0;
    std::size_t n_features = 0;
    std::string host;
    std::string date;
};

// Runs the four strategies on the same train split (selection fitted on train
// only), fits the configured SVC on the selected train features, and scores
// the held-out part. Wall time covers selection only; a failing strategy is
// recorded in its row without aborting the others.
BenchReport run_benchmark(const LabeledDataset& ds, const RunConfig& cfg);

std::string baseline_to_json(const BaselineResult& baseline, const RunConfig& cfg);
std::string baseline_to_csv(const BaselineResult& baseline);
std::string bench_to_json(const BenchReport& bench, const RunConfig& cfg);
std::string bench_to_csv(const BenchReport& bench, bool include_timing);

std::string report_to_json(const EvaluationReport& report,
                           const std::vector<std::string>& class_names);
std::string report_to_csv(const EvaluationReport& report,
                          const std::vector<std::string>& class_names);

// Write-temp-then-rename; every CLI artifact goes through this.
void write_file_atomic(const std::string& path, const std::string& content);

} // namespace omicsel
