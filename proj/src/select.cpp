#include "omicsel/select.hpp"

#include "omicsel/dataset.hpp"
#include "omicsel/error.hpp"
#include "omicsel/evaluate.hpp"
#include "omicsel/preprocess.hpp" // quantile, for the median threshold rule
#include "omicsel/rng.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numeric>
#include <unordered_set>

namespace omicsel {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

void check_step(double step) {
    if (step > 0.0 && step < 1.0) return;
    if (step >= 1.0 && step == std::floor(step)) return;
    throw UsageError("rfe step must be a fraction in (0,1) or a positive integer");
}

std::size_t eliminations_at(std::size_t surviving, std::size_t n_target, double step) {
    if (surviving <= n_target) return 0;
    std::size_t raw;
    if (step < 1.0)
        raw = static_cast<std::size_t>(
            std::ceil(step * static_cast<double>(surviving)));
    else
        raw = static_cast<std::size_t>(step);
    raw = std::max<std::size_t>(raw, 1);
    return std::min(raw, surviving - n_target);
}

void check_estimator(const ModelSpec& spec) {
    if (spec.family != ModelFamily::linear_svc &&
        spec.family != ModelFamily::logistic_regression)
        throw UsageError("RFE estimator must be a linear family (linear_svc or "
                         "logistic_regression)");
}

// Elimination bookkeeping over positions 0..d-1 of the stage input.
struct RfeTrace {
    std::vector<std::size_t> surviving;          // ascending input positions
    std::vector<std::size_t> elimination_order;  // chronological
    int fits = 0;
};

// One elimination round: rank by criterion, drop the weakest. Ties in the
// criterion eliminate the higher input position first.
void eliminate_round(RfeTrace& trace, std::size_t n_elim, const TrainedModel& model) {
    const auto crit = linear_criterion(model);
    std::vector<std::size_t> order(trace.surviving.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (crit[a] != crit[b]) return crit[a] < crit[b];
        return trace.surviving[a] > trace.surviving[b];
    });
    std::unordered_set<std::size_t> dropped;
    for (std::size_t i = 0; i < n_elim; ++i) {
        trace.elimination_order.push_back(trace.surviving[order[i]]);
        dropped.insert(order[i]);
    }
    std::vector<std::size_t> next;
    next.reserve(trace.surviving.size() - n_elim);
    for (std::size_t i = 0; i < trace.surviving.size(); ++i)
        if (!dropped.count(i)) next.push_back(trace.surviving[i]);
    trace.surviving = std::move(next);
}

std::vector<int> build_ranking(std::size_t d,
                               const std::vector<std::size_t>& elimination_order) {
    std::vector<int> ranking(d, 1);
    int rank = 2;
    for (auto it = elimination_order.rbegin(); it != elimination_order.rend(); ++it)
        ranking[*it] = rank++;
    return ranking;
}

RfeTrace run_rfe(const LabeledDataset& ds, const ModelSpec& estimator_spec,
                 std::size_t n_target, double step) {
    const std::size_t d = ds.n_features();
    RfeTrace trace;
    trace.surviving.resize(d);
    std::iota(trace.surviving.begin(), trace.surviving.end(), 0);

    while (trace.surviving.size() > n_target) {
        const LabeledDataset sub = ds.select_features(trace.surviving);
        const TrainedModel model = train(estimator_spec, sub);
        trace.fits++;
        const std::size_t n_elim =
            eliminations_at(trace.surviving.size(), n_target, step);
        eliminate_round(trace, n_elim, model);
    }
    // Final confirming fit on the survivors.
    train(estimator_spec, ds.select_features(trace.surviving));
    trace.fits++;
    return trace;
}

std::vector<std::string> ids_at(const std::vector<std::string>& ids,
                                const std::vector<std::size_t>& positions) {
    std::vector<std::string> out;
    out.reserve(positions.size());
    for (auto p : positions) out.push_back(ids[p]);
    return out;
}

SelectionStage make_rfe_stage(const LabeledDataset& ds, const RfeTrace& trace,
                              const char* name) {
    SelectionStage stage;
    stage.name = name;
    stage.input_feature_ids = ds.matrix.feature_ids;
    stage.selected_feature_ids = ids_at(ds.matrix.feature_ids, trace.surviving);
    stage.ranking = build_ranking(ds.n_features(), trace.elimination_order);
    stage.estimator_fits = trace.fits;
    return stage;
}

} // namespace

void SelectorConfig::validate() const {
    tree_spec.validate();
    if (tree_spec.family != ModelFamily::random_forest &&
        tree_spec.family != ModelFamily::decision_tree)
        throw UsageError("tree stage requires a tree-family spec");
    check_estimator(estimator_spec);
    estimator_spec.validate();
    check_step(rfe_step);
    if (rfecv_k < 2) throw UsageError("rfecv_k must be >= 2");
    if (rfecv_min_features < 1) throw UsageError("rfecv_min_features must be >= 1");
    if (importance_threshold_rule == ThresholdRule::top_fraction &&
        (!(top_fraction > 0.0) || top_fraction > 1.0))
        throw UsageError("top_fraction must lie in (0, 1]");
}

void SelectionResult::validate() const {
    if (stages.empty())
        throw InternalError("selection result has no stages");
    for (std::size_t s = 0; s < stages.size(); ++s) {
        const auto& stage = stages[s];
        std::unordered_set<std::string> input(stage.input_feature_ids.begin(),
                                              stage.input_feature_ids.end());
        for (const auto& id : stage.selected_feature_ids)
            if (!input.count(id))
                throw InternalError("stage " + stage.name +
                                    " selected a feature outside its input: " + id);
        if (stage.ranking.size() != stage.input_feature_ids.size())
            throw InternalError("stage " + stage.name + " ranking length mismatch");
        if (s + 1 < stages.size() &&
            stages[s + 1].input_feature_ids != stage.selected_feature_ids)
            throw InternalError("stage nesting broken between " + stage.name +
                                " and " + stages[s + 1].name);
        if (stage.wall_time_seconds < 0.0)
            throw InternalError("negative wall time");
    }
    if (final_selected != stages.back().selected_feature_ids)
        throw InternalError("final_selected does not match the last stage");
}

std::vector<std::size_t> rfe_schedule_sizes(std::size_t n_features,
                                            std::size_t n_target, double step) {
    check_step(step);
    if (n_target < 1 || n_target > n_features)
        throw UsageError("rfe target out of range: " + std::to_string(n_target) +
                         " of " + std::to_string(n_features));
    std::vector<std::size_t> sizes{n_features};
    std::size_t size = n_features;
    while (size > n_target) {
        size -= eliminations_at(size, n_target, step);
        sizes.push_back(size);
    }
    return sizes;
}

SelectionResult tree_select(const LabeledDataset& ds, const SelectorConfig& cfg) {
    if (ds.n_features() < 2)
        throw DataError("tree_select requires at least 2 features");
    const auto start = Clock::now();

    ModelSpec spec = cfg.tree_spec;
    spec.seed = derive_seed(cfg.seed, "select:tree");
    const TrainedModel forest = train(spec, ds);
    const auto importances = impurity_importances(forest);
    const std::size_t d = importances.size();

    std::vector<std::size_t> selected;
    switch (cfg.importance_threshold_rule) {
    case ThresholdRule::mean: {
        const double thr =
            std::accumulate(importances.begin(), importances.end(), 0.0) /
            static_cast<double>(d);
        for (std::size_t j = 0; j < d; ++j)
            if (importances[j] > thr) selected.push_back(j);
        break;
    }
    case ThresholdRule::median: {
        const double thr = quantile(importances, 0.5);
        for (std::size_t j = 0; j < d; ++j)
            if (importances[j] > thr) selected.push_back(j);
        break;
    }
    case ThresholdRule::top_fraction: {
        const auto keep = static_cast<std::size_t>(
            std::ceil(cfg.top_fraction * static_cast<double>(d)));
        std::vector<std::size_t> order(d);
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return importances[a] > importances[b];
        });
        selected.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(keep));
        std::sort(selected.begin(), selected.end());
        break;
    }
    }
    if (selected.empty()) {
        // Fall back to the single best feature (lowest index on ties).
        std::size_t best = 0;
        for (std::size_t j = 1; j < d; ++j)
            if (importances[j] > importances[best]) best = j;
        selected.push_back(best);
    }

    SelectionStage stage;
    stage.name = "tree_based";
    stage.input_feature_ids = ds.matrix.feature_ids;
    stage.selected_feature_ids = ids_at(ds.matrix.feature_ids, selected);
    stage.estimator_fits = 1;
    // Rank 1 for survivors, the rest by descending importance.
    stage.ranking.assign(d, 1);
    {
        std::unordered_set<std::size_t> keep(selected.begin(), selected.end());
        std::vector<std::size_t> rest;
        for (std::size_t j = 0; j < d; ++j)
            if (!keep.count(j)) rest.push_back(j);
        std::stable_sort(rest.begin(), rest.end(), [&](std::size_t a, std::size_t b) {
            return importances[a] > importances[b];
        });
        int rank = 2;
        for (auto j : rest) stage.ranking[j] = rank++;
    }
    stage.wall_time_seconds = seconds_since(start);

    SelectionResult result;
    result.final_selected = stage.selected_feature_ids;
    result.stages.push_back(std::move(stage));
    result.validate();
    return result;
}

SelectionResult rfe(const LabeledDataset& ds, const ModelSpec& estimator_spec,
                    std::size_t n_target, double step) {
    check_estimator(estimator_spec);
    if (n_target < 1 || n_target > ds.n_features())
        throw UsageError("rfe target out of range: " + std::to_string(n_target) +
                         " of " + std::to_string(ds.n_features()));
    const auto start = Clock::now();
    const RfeTrace trace = run_rfe(ds, estimator_spec, n_target, step);

    SelectionResult result;
    result.stages.push_back(make_rfe_stage(ds, trace, "rfe"));
    result.stages.back().wall_time_seconds = seconds_since(start);
    result.final_selected = result.stages.back().selected_feature_ids;
    result.validate();
    return result;
}

SelectionResult rfecv(const LabeledDataset& ds, const ModelSpec& estimator_spec,
                      std::size_t k, double step, std::size_t min_features,
                      std::uint64_t seed) {
    check_estimator(estimator_spec);
    const std::size_t d = ds.n_features();
    if (min_features < 1 || min_features > d)
        throw UsageError("rfecv min_features out of range");
    const auto start = Clock::now();

    const auto sizes = rfe_schedule_sizes(d, min_features, step);
    const FoldPlan plan = stratified_kfold(ds.labels, ds.n_classes(), k,
                                           derive_seed(seed, "rfecv:folds"));

    std::vector<double> mean_accuracy(sizes.size(), 0.0);
    int fits = 0;
    for (std::size_t fold = 0; fold < k; ++fold) {
        const LabeledDataset train_ds = ds.select_samples(plan.complement_indices(fold));
        const auto val_idx = plan.fold_indices(fold);
        const Matrix val_x = ds.matrix.values.select_rows(val_idx);
        std::vector<int> val_y;
        val_y.reserve(val_idx.size());
        for (auto i : val_idx) val_y.push_back(ds.labels[i]);

        RfeTrace trace;
        trace.surviving.resize(d);
        std::iota(trace.surviving.begin(), trace.surviving.end(), 0);
        for (std::size_t t = 0; t < sizes.size(); ++t) {
            const TrainedModel model =
                train(estimator_spec, train_ds.select_features(trace.surviving));
            ++fits;
            const auto pred = predict(model, val_x.select_cols(trace.surviving));
            mean_accuracy[t] += accuracy_score(val_y, pred);
            if (t + 1 < sizes.size())
                eliminate_round(trace, sizes[t] - sizes[t + 1], model);
        }
    }
    for (auto& acc : mean_accuracy) acc /= static_cast<double>(k);

    // Smallest size achieving the maximum; sizes run descending, so >= moves
    // the winner toward smaller sizes on ties.
    std::size_t best_idx = 0;
    for (std::size_t t = 1; t < sizes.size(); ++t)
        if (mean_accuracy[t] >= mean_accuracy[best_idx]) best_idx = t;
    const std::size_t n_star = sizes[best_idx];

    const RfeTrace final_trace = run_rfe(ds, estimator_spec, n_star, step);
    fits += final_trace.fits;

    SelectionResult result;
    result.stages.push_back(make_rfe_stage(ds, final_trace, "rfecv"));
    auto& stage = result.stages.back();
    stage.estimator_fits = fits;
    std::vector<std::pair<std::size_t, double>> curve;
    for (std::size_t t = sizes.size(); t-- > 0;)
        curve.emplace_back(sizes[t], mean_accuracy[t]);
    stage.score_curve = std::move(curve);
    stage.wall_time_seconds = seconds_since(start);
    result.final_selected = stage.selected_feature_ids;
    result.validate();
    return result;
}

SelectionResult sequential_select(const LabeledDataset& ds, const SelectorConfig& cfg) {
    cfg.validate();
    if (cfg.rfe_target > ds.n_features())
        throw UsageError("rfe_target exceeds available features");

    SelectionResult result;

    SelectionResult stage1 = tree_select(ds, cfg);
    result.stages.push_back(std::move(stage1.stages[0]));

    const LabeledDataset ds2 = [&] {
        std::vector<std::size_t> positions;
        std::unordered_set<std::string> keep(result.stages[0].selected_feature_ids.begin(),
                                             result.stages[0].selected_feature_ids.end());
        for (std::size_t j = 0; j < ds.n_features(); ++j)
            if (keep.count(ds.matrix.feature_ids[j])) positions.push_back(j);
        return ds.select_features(positions);
    }();

    ModelSpec estimator = cfg.estimator_spec;
    estimator.seed = derive_seed(cfg.seed, "select:estimator");
    const std::size_t min_features = std::min(
        std::max<std::size_t>(cfg.rfecv_min_features,
                              cfg.rfe_target == 0 ? 1 : cfg.rfe_target),
        ds2.n_features());
    SelectionResult stage2 = rfecv(ds2, estimator, cfg.rfecv_k, cfg.rfe_step,
                                   min_features, derive_seed(cfg.seed, "select:rfecv"));
    result.stages.push_back(std::move(stage2.stages[0]));

    if (!cfg.reuse_rfecv_survivors) {
        const auto& selected2 = result.stages[1].selected_feature_ids;
        const LabeledDataset ds3 = [&] {
            std::vector<std::size_t> positions;
            std::unordered_set<std::string> keep(selected2.begin(), selected2.end());
            for (std::size_t j = 0; j < ds2.n_features(); ++j)
                if (keep.count(ds2.matrix.feature_ids[j])) positions.push_back(j);
            return ds2.select_features(positions);
        }();
        const std::size_t target =
            cfg.rfe_target == 0 ? selected2.size()
                                : std::min(cfg.rfe_target, ds3.n_features());
        SelectionResult stage3 = rfe(ds3, estimator, target, cfg.rfe_step);
        result.stages.push_back(std::move(stage3.stages[0]));
    }

    result.final_selected = result.stages.back().selected_feature_ids;
    result.validate();
    return result;
}

std::string selection_to_json(const SelectionResult& result, bool include_timing) {
    nlohmann::ordered_json j;
    j["format"] = "omicsel-selection";
    j["format_version"] = 1;
    nlohmann::ordered_json stages = nlohmann::ordered_json::array();
    for (const auto& stage : result.stages) {
        nlohmann::ordered_json s;
        s["name"] = stage.name;
        s["n_input"] = stage.input_feature_ids.size();
        s["n_selected"] = stage.selected_feature_ids.size();
        s["input_feature_ids"] = stage.input_feature_ids;
        s["selected_feature_ids"] = stage.selected_feature_ids;
        s["ranking"] = stage.ranking;
        if (stage.score_curve) {
            nlohmann::ordered_json curve = nlohmann::ordered_json::array();
            for (const auto& [size, acc] : *stage.score_curve)
                curve.push_back({size, acc});
            s["score_curve"] = std::move(curve);
        }
        s["estimator_fits"] = stage.estimator_fits;
        if (include_timing) s["wall_time_seconds"] = stage.wall_time_seconds;
        stages.push_back(std::move(s));
    }
    j["stages"] = std::move(stages);
    j["final_selected"] = result.final_selected;
    return j.dump(2);
}

void write_selected_csv(const SelectionResult& result, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw DataError("cannot write file: " + path);
    out << "feature_id\n";
    for (const auto& id : result.final_selected) out << id << '\n';
    if (!out)
        throw DataError("write failed: " + path);
}

} // namespace omicsel
