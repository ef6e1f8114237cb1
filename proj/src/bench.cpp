#include "omicsel/bench.hpp"

#include "omicsel/dataset.hpp"
#include "omicsel/error.hpp"
#include "omicsel/rng.hpp"

#include <json.hpp>

#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <sstream>

namespace omicsel {

namespace {

using nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

const ModelFamily kBaselineOrder[] = {
    ModelFamily::decision_tree, ModelFamily::random_forest,
    ModelFamily::logistic_regression, ModelFamily::linear_svc,
    ModelFamily::knn, ModelFamily::gaussian_nb,
};

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

double to_double(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw UsageError("config: invalid numeric value for " + key + ": " + value);
    }
}

bool to_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1") return true;
    if (value == "false" || value == "0") return false;
    throw UsageError("config: invalid boolean value for " + key + ": " + value);
}

ordered_json report_json_body(const EvaluationReport& report,
                              const std::vector<std::string>& class_names) {
    ordered_json j;
    j["averaging"] = "macro";
    j["accuracy"] = report.accuracy;
    j["accuracy_percent"] = accuracy_percent(report.accuracy);
    j["macro_precision"] = report.macro_precision;
    j["macro_recall"] = report.macro_recall;
    j["macro_specificity"] = report.macro_specificity;
    j["macro_f1"] = report.macro_f1;
    j["g_mean"] = report.g_mean;
    j["zero_denominator"] = report.zero_denominator;
    ordered_json per_class = ordered_json::array();
    for (std::size_t c = 0; c < report.per_class.size(); ++c) {
        const auto& m = report.per_class[c];
        ordered_json row;
        row["class"] = c < class_names.size() ? class_names[c] : std::to_string(c);
        row["precision"] = m.precision;
        row["recall"] = m.recall;
        row["specificity"] = m.specificity;
        row["f1"] = m.f1;
        per_class.push_back(std::move(row));
    }
    j["per_class"] = std::move(per_class);
    return j;
}

} // namespace

std::map<std::string, std::string> parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw UsageError("cannot open config file: " + path);
    std::map<std::string, std::string> kv;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#') continue;
        const auto eq = stripped.find('=');
        if (eq == std::string::npos)
            throw UsageError("config: missing '=' at line " + std::to_string(lineno));
        const std::string key = trim(stripped.substr(0, eq));
        const std::string value = trim(stripped.substr(eq + 1));
        if (key.empty())
            throw UsageError("config: empty key at line " + std::to_string(lineno));
        kv[key] = value;
    }
    return kv;
}

void apply_config(RunConfig& cfg, const std::map<std::string, std::string>& kv) {
    for (const auto& [key, value] : kv) {
        if (key == "seed") {
            cfg.seed = static_cast<std::uint64_t>(std::stoull(value));
        } else if (key == "test_fraction") {
            cfg.test_fraction = to_double(key, value);
        } else if (key == "label_col") {
            cfg.label_column = value;
        } else if (key == "out") {
            cfg.out_dir = value;
        } else if (key == "preprocess.corr_threshold") {
            cfg.preprocess.corr_threshold = to_double(key, value);
        } else if (key == "preprocess.quantile_cut") {
            cfg.preprocess.quantile_cut = to_double(key, value);
        } else if (key == "preprocess.min_row_sum") {
            cfg.preprocess.min_row_sum = to_double(key, value);
        } else if (key == "preprocess.de_fdr") {
            cfg.preprocess.de_fdr = to_double(key, value);
        } else if (key == "preprocess.de_min_abs_effect") {
            cfg.preprocess.de_min_abs_effect = to_double(key, value);
        } else if (key == "selector.rfe_step") {
            cfg.selector.rfe_step = to_double(key, value);
        } else if (key == "selector.rfecv_k") {
            cfg.selector.rfecv_k = static_cast<std::size_t>(to_double(key, value));
        } else if (key == "selector.rfecv_min_features") {
            cfg.selector.rfecv_min_features =
                static_cast<std::size_t>(to_double(key, value));
        } else if (key == "selector.rfe_target") {
            cfg.selector.rfe_target = static_cast<std::size_t>(to_double(key, value));
        } else if (key == "selector.reuse_rfecv_survivors") {
            cfg.selector.reuse_rfecv_survivors = to_bool(key, value);
        } else if (key == "selector.threshold_rule") {
            if (value == "mean") cfg.selector.importance_threshold_rule = ThresholdRule::mean;
            else if (value == "median") cfg.selector.importance_threshold_rule = ThresholdRule::median;
            else if (value == "top_fraction") cfg.selector.importance_threshold_rule = ThresholdRule::top_fraction;
            else throw UsageError("config: unknown threshold_rule: " + value);
        } else if (key == "selector.top_fraction") {
            cfg.selector.top_fraction = to_double(key, value);
        } else if (key == "selector.tree.n_trees") {
            cfg.selector.tree_spec.set_param("n_trees", to_double(key, value));
        } else if (key == "selector.tree.max_depth") {
            cfg.selector.tree_spec.set_param("max_depth", to_double(key, value));
        } else if (key == "selector.tree.min_samples_leaf") {
            cfg.selector.tree_spec.set_param("min_samples_leaf", to_double(key, value));
        } else if (key == "selector.tree.bootstrap") {
            cfg.selector.tree_spec.bootstrap = to_bool(key, value);
        } else if (key == "selector.estimator.c") {
            cfg.selector.estimator_spec.set_param("c", to_double(key, value));
        } else if (key == "selector.estimator.tol") {
            cfg.selector.estimator_spec.set_param("tol", to_double(key, value));
        } else if (key == "selector.estimator.max_iters") {
            cfg.selector.estimator_spec.set_param("max_iters", to_double(key, value));
        } else {
            throw UsageError("config: unknown key: " + key);
        }
    }
}

BaselineResult run_baseline(const LabeledDataset& ds, const RunConfig& cfg) {
    const auto [train_ds, test_ds] =
        stratified_split(ds, cfg.test_fraction, derive_seed(cfg.seed, "baseline:split"));

    BaselineResult result;
    for (ModelFamily family : kBaselineOrder) {
        ModelSpec spec = ModelSpec::defaults(
            family, derive_seed(cfg.seed, std::string("baseline:") + family_name(family)));
        TrainedModel model = train(spec, train_ds);

        BaselineRow row;
        row.family = family;
        row.convergence_warning = model.convergence_warning;
        row.train_accuracy =
            accuracy_score(train_ds.labels, predict(model, train_ds.matrix.values));
        row.test_accuracy =
            accuracy_score(test_ds.labels, predict(model, test_ds.matrix.values));
        result.rows.push_back(row);
        result.models.push_back(std::move(model));
    }
    return result;
}

namespace {

std::vector<std::size_t> feature_positions(const LabeledDataset& ds,
                                           const std::vector<std::string>& ids) {
    std::vector<std::size_t> positions;
    positions.reserve(ids.size());
    std::map<std::string, std::size_t> index;
    for (std::size_t j = 0; j < ds.n_features(); ++j)
        index[ds.matrix.feature_ids[j]] = j;
    for (const auto& id : ids) positions.push_back(index.at(id));
    std::sort(positions.begin(), positions.end());
    return positions;
}

BenchRow evaluate_strategy(const std::string& name, const LabeledDataset& train_ds,
                           const LabeledDataset& test_ds, const RunConfig& cfg,
                           const SelectionResult& selection, double wall_time) {
    BenchRow row;
    row.strategy = name;
    row.wall_time_seconds = wall_time;
    for (const auto& stage : selection.stages)
        row.stage_wall_times.push_back(stage.wall_time_seconds);
    row.n_selected = selection.final_selected.size();

    const auto positions = feature_positions(train_ds, selection.final_selected);
    const LabeledDataset train_sel = train_ds.select_features(positions);
    const LabeledDataset test_sel = test_ds.select_features(positions);

    ModelSpec final_spec = cfg.selector.estimator_spec;
    final_spec.seed = derive_seed(cfg.seed, "bench:final:" + name);
    const TrainedModel model = train(final_spec, train_sel);
    const auto pred = predict(model, test_sel.matrix.values);
    row.report = metrics_report(
        confusion_matrix(test_sel.labels, pred, test_sel.n_classes()));
    row.ok = true;
    return row;
}

} // namespace

BenchReport run_benchmark(const LabeledDataset& ds, const RunConfig& cfg) {
    cfg.selector.validate();
    const auto [train_ds, test_ds] =
        stratified_split(ds, cfg.test_fraction, derive_seed(cfg.seed, "bench:split"));

    BenchReport bench;
    bench.class_names = ds.class_names;
    bench.train_samples = train_ds.n_samples();
    bench.test_samples = test_ds.n_samples();
    bench.n_features = ds.n_features();
    if (cfg.include_timing) {
        char hostname[256] = {0};
        if (gethostname(hostname, sizeof hostname - 1) == 0) bench.host = hostname;
        const std::time_t now = std::time(nullptr);
        char datebuf[32] = {0};
        std::tm tm_utc{};
        gmtime_r(&now, &tm_utc);
        std::strftime(datebuf, sizeof datebuf, "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
        bench.date = datebuf;
    }

    SelectorConfig selector = cfg.selector;
    selector.seed = derive_seed(cfg.seed, "bench:selector");
    ModelSpec estimator = selector.estimator_spec;
    estimator.seed = derive_seed(cfg.seed, "bench:estimator");

    // Standalone RFE needs a concrete target; fall back to ceil(sqrt(d)) when
    // the config leaves it at from_rfecv.
    const std::size_t rfe_target =
        selector.rfe_target != 0
            ? std::min(selector.rfe_target, train_ds.n_features())
            : static_cast<std::size_t>(
                  std::ceil(std::sqrt(static_cast<double>(train_ds.n_features()))));

    struct Strategy {
        const char* name;
        std::function<SelectionResult()> run;
    };
    const std::vector<Strategy> strategies = {
        {"tree_based", [&] { return tree_select(train_ds, selector); }},
        {"rfecv",
         [&] {
             return rfecv(train_ds, estimator, selector.rfecv_k, selector.rfe_step,
                          selector.rfecv_min_features,
                          derive_seed(cfg.seed, "bench:rfecv"));
         }},
        {"rfe", [&] { return rfe(train_ds, estimator, rfe_target, selector.rfe_step); }},
        {"combined", [&] { return sequential_select(train_ds, selector); }},
    };

    for (const auto& strategy : strategies) {
        try {
            const auto start = Clock::now();
            const SelectionResult selection = strategy.run();
            const double wall =
                std::chrono::duration<double>(Clock::now() - start).count();
            bench.rows.push_back(evaluate_strategy(strategy.name, train_ds, test_ds,
                                                   cfg, selection, wall));
        } catch (const std::exception& e) {
            BenchRow row;
            row.strategy = strategy.name;
            row.ok = false;
            row.error = e.what();
            bench.rows.push_back(std::move(row));
        }
    }
    return bench;
}

std::string baseline_to_json(const BaselineResult& baseline, const RunConfig& cfg) {
    ordered_json j;
    j["format"] = "omicsel-baseline";
    j["format_version"] = 1;
    j["seed"] = cfg.seed;
    j["test_fraction"] = cfg.test_fraction;
    j["hyperparameters"] = "family defaults";
    ordered_json rows = ordered_json::array();
    for (const auto& row : baseline.rows) {
        ordered_json r;
        r["family"] = family_name(row.family);
        r["train_accuracy"] = row.train_accuracy;
        r["test_accuracy"] = row.test_accuracy;
        r["train_accuracy_percent"] = accuracy_percent(row.train_accuracy);
        r["test_accuracy_percent"] = accuracy_percent(row.test_accuracy);
        r["convergence_warning"] = row.convergence_warning;
        rows.push_back(std::move(r));
    }
    j["rows"] = std::move(rows);
    return j.dump(2);
}

std::string baseline_to_csv(const BaselineResult& baseline) {
    std::ostringstream out;
    out << "family,train_accuracy_percent,test_accuracy_percent\n";
    for (const auto& row : baseline.rows)
        out << family_name(row.family) << ',' << accuracy_percent(row.train_accuracy)
            << ',' << accuracy_percent(row.test_accuracy) << '\n';
    return out.str();
}

std::string bench_to_json(const BenchReport& bench, const RunConfig& cfg) {
    ordered_json j;
    j["format"] = "omicsel-bench";
    j["format_version"] = 1;
    j["timing_note"] =
        "selection wall time only: excludes I/O and the final classifier fit";
    j["seed"] = cfg.seed;
    j["train_samples"] = bench.train_samples;
    j["test_samples"] = bench.test_samples;
    j["n_features"] = bench.n_features;
    if (cfg.include_timing) {
        ordered_json env;
        env["host"] = bench.host;
        env["date"] = bench.date;
        j["environment"] = std::move(env);
    }
    ordered_json rows = ordered_json::array();
    for (const auto& row : bench.rows) {
        ordered_json r;
        r["strategy"] = row.strategy;
        r["ok"] = row.ok;
        if (!row.ok) {
            r["error"] = row.error;
            rows.push_back(std::move(r));
            continue;
        }
        r["n_selected"] = row.n_selected;
        if (cfg.include_timing) {
            r["wall_time_seconds"] = row.wall_time_seconds;
            r["stage_wall_times"] = row.stage_wall_times;
        }
        r["metrics"] = report_json_body(row.report, bench.class_names);
        rows.push_back(std::move(r));
    }
    j["rows"] = std::move(rows);
    return j.dump(2);
}

std::string bench_to_csv(const BenchReport& bench, bool include_timing) {
    std::ostringstream out;
    out << "strategy,ok,n_selected";
    if (include_timing) out << ",wall_time_seconds";
    out << ",accuracy_percent,macro_precision,macro_recall,macro_specificity,"
           "macro_f1,g_mean\n";
    char buf[40];
    auto put = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.4f", v);
        out << ',' << buf;
    };
    for (const auto& row : bench.rows) {
        out << row.strategy << ',' << (row.ok ? "true" : "false");
        if (!row.ok) {
            out << ",,";
            if (include_timing) out << ',';
            out << ",,,,,\n";
            continue;
        }
        out << ',' << row.n_selected;
        if (include_timing) {
            std::snprintf(buf, sizeof buf, "%.3f", row.wall_time_seconds);
            out << ',' << buf;
        }
        out << ',' << accuracy_percent(row.report.accuracy);
        put(row.report.macro_precision);
        put(row.report.macro_recall);
        put(row.report.macro_specificity);
        put(row.report.macro_f1);
        put(row.report.g_mean);
        out << '\n';
    }
    return out.str();
}

std::string report_to_json(const EvaluationReport& report,
                           const std::vector<std::string>& class_names) {
    return report_json_body(report, class_names).dump(2);
}

std::string report_to_csv(const EvaluationReport& report,
                          const std::vector<std::string>& class_names) {
    std::ostringstream out;
    char buf[40];
    auto num = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.6f", v);
        return std::string(buf);
    };
    out << "scope,class,precision,recall,specificity,f1,accuracy_percent,g_mean\n";
    out << "macro,," << num(report.macro_precision) << ',' << num(report.macro_recall)
        << ',' << num(report.macro_specificity) << ',' << num(report.macro_f1) << ','
        << accuracy_percent(report.accuracy) << ',' << num(report.g_mean) << '\n';
    for (std::size_t c = 0; c < report.per_class.size(); ++c) {
        const auto& m = report.per_class[c];
        out << "class," << (c < class_names.size() ? class_names[c] : std::to_string(c))
            << ',' << num(m.precision) << ',' << num(m.recall) << ','
            << num(m.specificity) << ',' << num(m.f1) << ",,\n";
    }
    return out.str();
}

void write_file_atomic(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    if (target.has_parent_path())
        fs::create_directories(target.parent_path());
    const fs::path tmp = target.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw DataError("cannot write file: " + tmp.string());
        out << content;
        if (!out)
            throw DataError("write failed: " + tmp.string());
    }
    fs::rename(tmp, target);
}

} // namespace omicsel
