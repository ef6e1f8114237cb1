// omicsel command-line interface. Every subcommand is a thin wrapper over the
// library operations; all artifacts are written atomically into --out.
#include "omicsel/bench.hpp"
#include "omicsel/dataset.hpp"
#include "omicsel/embed.hpp"
#include "omicsel/error.hpp"
#include "omicsel/evaluate.hpp"
#include "omicsel/kernels.hpp"
#include "omicsel/models.hpp"
#include "omicsel/preprocess.hpp"
#include "omicsel/rng.hpp"
#include "omicsel/select.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace {

using namespace omicsel;
using nlohmann::ordered_json;

namespace fs = std::filesystem;

std::string out_path(const RunConfig& cfg, const std::string& name) {
    return (fs::path(cfg.out_dir) / name).string();
}

struct CliOptions {
    RunConfig cfg;
    std::string config_path;

    // synth
    SyntheticSpec synth;
    // preprocess
    bool run_de = false;
    std::string de_positive;
    bool skip_outliers = false;
    bool skip_quantile = false;
    bool skip_lowcount = false;
    // select
    std::string strategy = "combined";
    // eval
    std::string model_path;
    // grid
    std::string grid_family = "linear_svc";
    std::vector<std::string> grid_params;
    std::size_t grid_k = 2;
    // embed
    std::size_t embed_dim = 2;
    std::size_t embed_knn = 5;
    std::string embed_metric = "euclidean";
};

int cmd_synth(const CliOptions& opt) {
    SyntheticSpec spec = opt.synth;
    spec.seed = opt.cfg.seed;
    const auto [ds, mask] = generate_synthetic(spec);

    fs::create_directories(opt.cfg.out_dir);
    const std::string tsv = out_path(opt.cfg, "synthetic.tsv");
    const std::string tmp = tsv + ".tmp";
    write_tsv(ds, tmp, opt.cfg.label_column);
    fs::rename(tmp, tsv);

    std::string mask_csv = "feature_id,informative\n";
    for (std::size_t j = 0; j < mask.size(); ++j)
        mask_csv += ds.matrix.feature_ids[j] + (mask[j] ? ",1\n" : ",0\n");
    write_file_atomic(out_path(opt.cfg, "informative_mask.csv"), mask_csv);

    std::cout << "wrote " << tsv << " (" << ds.n_samples() << " x "
              << ds.n_features() << ", " << ds.n_classes() << " classes)\n";
    return 0;
}

int cmd_preprocess(const CliOptions& opt) {
    LabeledDataset ds = load_tsv(opt.cfg.data_path, opt.cfg.label_column);
    opt.cfg.preprocess.validate();

    ordered_json sidecar;
    sidecar["format"] = "omicsel-preprocess";
    sidecar["format_version"] = 1;
    sidecar["input"] = fs::path(opt.cfg.data_path).filename().string();

    // Outlier samples.
    std::vector<std::string> removed;
    if (!opt.skip_outliers) {
        auto [cleaned, removed_ids] =
            remove_outlier_samples(ds.matrix, opt.cfg.preprocess.corr_threshold);
        removed = removed_ids;
        if (!removed.empty()) {
            std::vector<std::size_t> kept;
            std::unordered_map<std::string, std::size_t> pos;
            for (std::size_t i = 0; i < ds.n_samples(); ++i)
                pos[ds.matrix.sample_ids[i]] = i;
            for (const auto& id : cleaned.sample_ids) kept.push_back(pos.at(id));
            ds = ds.select_samples(kept);
            ds.validate(); // a class may have emptied: that is a data error
        }
    }
    sidecar["removed_samples"] = removed;

    auto drop_report = [&](const char* step, const std::vector<std::string>& before,
                           const std::vector<std::string>& after) {
        std::unordered_set<std::string> keep(after.begin(), after.end());
        ordered_json dropped = ordered_json::array();
        for (const auto& id : before)
            if (!keep.count(id)) dropped.push_back(id);
        sidecar[std::string("dropped_") + step] = std::move(dropped);
    };

    if (!opt.skip_quantile) {
        const auto before = ds.matrix.feature_ids;
        ExpressionMatrix filtered =
            quantile_filter(ds.matrix, opt.cfg.preprocess.quantile_cut);
        drop_report("quantile_filter", before, filtered.feature_ids);
        ds.matrix = std::move(filtered);
    }
    if (!opt.skip_lowcount) {
        const auto before = ds.matrix.feature_ids;
        ExpressionMatrix filtered =
            low_count_filter(ds.matrix, opt.cfg.preprocess.min_row_sum);
        drop_report("low_count_filter", before, filtered.feature_ids);
        ds.matrix = std::move(filtered);
    }
    if (ds.n_features() == 0)
        throw DataError("preprocessing removed every feature");

    const SizeFactors sf = size_factors(ds.matrix);
    sidecar["size_factors"] = sf.factors;
    ds.matrix = vst_transform(ds.matrix, sf);

    if (opt.run_de) {
        std::vector<int> groups(ds.n_samples(), 0);
        if (!opt.de_positive.empty()) {
            int positive = -1;
            for (std::size_t c = 0; c < ds.class_names.size(); ++c)
                if (ds.class_names[c] == opt.de_positive)
                    positive = static_cast<int>(c);
            if (positive < 0)
                throw UsageError("--de-positive class not found: " + opt.de_positive);
            for (std::size_t i = 0; i < ds.labels.size(); ++i)
                groups[i] = ds.labels[i] == positive ? 1 : 0;
        } else if (ds.n_classes() == 2) {
            for (std::size_t i = 0; i < ds.labels.size(); ++i)
                groups[i] = ds.labels[i];
        } else {
            throw UsageError(
                "--de on a multiclass dataset requires --de-positive <class>");
        }
        const DeResult de = differential_expression(ds.matrix, groups, opt.cfg.preprocess);

        std::string table = "feature_id,effect,p_value,q_value,selected\n";
        char buf[128];
        for (const auto& row : de.table) {
            std::snprintf(buf, sizeof buf, "%s,%.6g,%.6g,%.6g,%d\n",
                          ds.matrix.feature_ids[row.feature].c_str(), row.effect,
                          row.p, row.q, de.mask[row.feature] ? 1 : 0);
            table += buf;
        }
        write_file_atomic(out_path(opt.cfg, "de_table.csv"), table);

        const auto before = ds.matrix.feature_ids;
        std::vector<std::size_t> kept;
        for (std::size_t j = 0; j < de.mask.size(); ++j)
            if (de.mask[j]) kept.push_back(j);
        if (kept.empty())
            throw DataError("differential expression selected no features");
        ds = ds.select_features(kept);
        drop_report("differential_expression", before, ds.matrix.feature_ids);
    }

    fs::create_directories(opt.cfg.out_dir);
    const std::string tsv = out_path(opt.cfg, "preprocessed.tsv");
    const std::string tmp = tsv + ".tmp";
    write_tsv(ds, tmp, opt.cfg.label_column);
    fs::rename(tmp, tsv);

    sidecar["n_samples"] = ds.n_samples();
    sidecar["n_features"] = ds.n_features();
    write_file_atomic(out_path(opt.cfg, "preprocess.json"), sidecar.dump(2) + "\n");
    std::cout << "wrote " << tsv << " (" << ds.n_samples() << " x "
              << ds.n_features() << ")\n";
    return 0;
}

int cmd_baseline(const CliOptions& opt) {
    const LabeledDataset ds = load_tsv(opt.cfg.data_path, opt.cfg.label_column);
    const BaselineResult result = run_baseline(ds, opt.cfg);
    write_file_atomic(out_path(opt.cfg, "baseline.json"),
                      baseline_to_json(result, opt.cfg) + "\n");
    write_file_atomic(out_path(opt.cfg, "baseline.csv"), baseline_to_csv(result));
    for (const auto& model : result.models) {
        const std::string name =
            std::string("model_") + family_name(model.spec.family) + ".json";
        write_file_atomic(out_path(opt.cfg, name), model_to_json(model) + "\n");
    }
    std::cout << baseline_to_csv(result);
    return 0;
}

int cmd_select(const CliOptions& opt) {
    const LabeledDataset ds = load_tsv(opt.cfg.data_path, opt.cfg.label_column);
    SelectorConfig selector = opt.cfg.selector;
    selector.seed = derive_seed(opt.cfg.seed, "cli:select");
    ModelSpec estimator = selector.estimator_spec;
    estimator.seed = derive_seed(opt.cfg.seed, "cli:select:estimator");

    SelectionResult result;
    if (opt.strategy == "tree") {
        result = tree_select(ds, selector);
    } else if (opt.strategy == "rfe") {
        const std::size_t target =
            selector.rfe_target != 0
                ? selector.rfe_target
                : static_cast<std::size_t>(
                      std::ceil(std::sqrt(static_cast<double>(ds.n_features()))));
        result = rfe(ds, estimator, target, selector.rfe_step);
    } else if (opt.strategy == "rfecv") {
        result = rfecv(ds, estimator, selector.rfecv_k, selector.rfe_step,
                       selector.rfecv_min_features,
                       derive_seed(opt.cfg.seed, "cli:rfecv"));
    } else if (opt.strategy == "combined") {
        result = sequential_select(ds, selector);
    } else {
        throw UsageError("unknown strategy: " + opt.strategy +
                         " (expected tree|rfe|rfecv|combined)");
    }

    write_file_atomic(out_path(opt.cfg, "selection.json"),
                      selection_to_json(result, opt.cfg.include_timing) + "\n");
    write_selected_csv(result, out_path(opt.cfg, "selected_features.csv"));
    std::cout << "selected " << result.final_selected.size() << " of "
              << ds.n_features() << " features\n";
    return 0;
}

int cmd_eval(const CliOptions& opt) {
    const LabeledDataset ds = load_tsv(opt.cfg.data_path, opt.cfg.label_column);
    const TrainedModel model = load_model(opt.model_path);
    const auto pred = predict(model, ds.matrix.values);
    const EvaluationReport report =
        metrics_report(confusion_matrix(ds.labels, pred, ds.n_classes()));
    write_file_atomic(out_path(opt.cfg, "eval.json"),
                      report_to_json(report, ds.class_names) + "\n");
    write_file_atomic(out_path(opt.cfg, "eval.csv"),
                      report_to_csv(report, ds.class_names));
    std::cout << "accuracy " << accuracy_percent(report.accuracy) << "%\n";
    return 0;
}

int cmd_grid(const CliOptions& opt) {
    const LabeledDataset ds = load_tsv(opt.cfg.data_path, opt.cfg.label_column);
    if (opt.grid_params.empty())
        throw UsageError("grid requires at least one --param name=v1,v2,...");

    std::vector<std::pair<std::string, std::vector<double>>> grid;
    for (const auto& raw : opt.grid_params) {
        const auto eq = raw.find('=');
        if (eq == std::string::npos)
            throw UsageError("--param expects name=v1,v2,...: " + raw);
        const std::string name = raw.substr(0, eq);
        std::vector<double> values;
        std::string rest = raw.substr(eq + 1);
        std::size_t start = 0;
        while (start <= rest.size()) {
            const auto comma = rest.find(',', start);
            const std::string tok = rest.substr(
                start, comma == std::string::npos ? std::string::npos : comma - start);
            if (tok.empty())
                throw UsageError("--param has an empty value: " + raw);
            try {
                values.push_back(std::stod(tok));
            } catch (const std::exception&) {
                throw UsageError("--param has a non-numeric value: " + tok);
            }
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        grid.emplace_back(name, std::move(values));
    }

    const GridSearchResult result = grid_search(
        ds, family_from_name(opt.grid_family), grid, opt.grid_k, opt.cfg.seed);

    ordered_json j;
    j["format"] = "omicsel-grid";
    j["format_version"] = 1;
    j["family"] = opt.grid_family;
    j["cv_folds"] = opt.grid_k;
    ordered_json best;
    for (const auto& [name, value] : result.best_params) best[name] = value;
    j["best_params"] = std::move(best);
    j["best_index"] = result.best_index;
    ordered_json table = ordered_json::array();
    for (const auto& point : result.table) {
        ordered_json row;
        ordered_json params;
        for (const auto& [name, value] : point.params) params[name] = value;
        row["params"] = std::move(params);
        row["fold_accuracies"] = point.fold_accuracies;
        row["mean_accuracy"] = point.mean_accuracy;
        table.push_back(std::move(row));
    }
    j["cv_table"] = std::move(table);
    write_file_atomic(out_path(opt.cfg, "grid.json"), j.dump(2) + "\n");

    std::string csv = "point,params,mean_accuracy\n";
    for (std::size_t i = 0; i < result.table.size(); ++i) {
        std::string params;
        for (const auto& [name, value] : result.table[i].params) {
            if (!params.empty()) params += ' ';
            char buf[64];
            std::snprintf(buf, sizeof buf, "%s=%g", name.c_str(), value);
            params += buf;
        }
        char buf[64];
        std::snprintf(buf, sizeof buf, "%zu,%s,%.6f\n", i, params.c_str(),
                      result.table[i].mean_accuracy);
        csv += buf;
    }
    write_file_atomic(out_path(opt.cfg, "grid.csv"), csv);
    std::cout << "best point " << result.best_index << " (mean accuracy "
              << result.table[result.best_index].mean_accuracy << ")\n";
    return 0;
}

int cmd_embed(const CliOptions& opt) {
    const LabeledDataset ds = load_tsv(opt.cfg.data_path, opt.cfg.label_column);
    Metric metric = Metric::euclidean;
    if (opt.embed_metric == "correlation") metric = Metric::correlation;
    else if (opt.embed_metric != "euclidean")
        throw UsageError("unknown metric: " + opt.embed_metric);

    const Embedding embedding = pca(ds.matrix, opt.embed_dim);
    const WeightedGraph graph = knn_graph(ds.matrix, opt.embed_knn, metric);

    fs::create_directories(opt.cfg.out_dir);
    {
        const std::string path = out_path(opt.cfg, "embedding.csv");
        write_embedding_csv(embedding, ds.matrix.sample_ids, path + ".tmp");
        fs::rename(path + ".tmp", path);
    }
    if (opt.embed_dim >= 2) {
        const std::string path = out_path(opt.cfg, "scatter.svg");
        render_scatter(embedding, ds.labels, ds.class_names, path + ".tmp");
        fs::rename(path + ".tmp", path);
    }
    {
        const std::string path = out_path(opt.cfg, "graph.dot");
        write_graph_dot(graph, path + ".tmp");
        fs::rename(path + ".tmp", path);
    }
    {
        const std::string path = out_path(opt.cfg, "graph_edges.csv");
        write_graph_csv(graph, path + ".tmp");
        fs::rename(path + ".tmp", path);
    }

    const auto strengths = graph.node_strengths();
    double total = 0.0;
    for (double s : strengths) total += s;
    ordered_json j;
    j["format"] = "omicsel-embed";
    j["format_version"] = 1;
    j["explained_variance_ratio"] = embedding.explained_variance_ratio;
    j["knn_k"] = opt.embed_knn;
    j["metric"] = opt.embed_metric;
    j["edge_count"] = graph.edges.size();
    j["mean_node_strength"] = total / static_cast<double>(strengths.size());
    j["node_strengths"] = strengths;
    write_file_atomic(out_path(opt.cfg, "embed.json"), j.dump(2) + "\n");
    std::cout << "embedded " << ds.n_samples() << " samples, " << graph.edges.size()
              << " graph edges\n";
    return 0;
}

int cmd_bench(const CliOptions& opt) {
    const LabeledDataset ds = load_tsv(opt.cfg.data_path, opt.cfg.label_column);
    const BenchReport report = run_benchmark(ds, opt.cfg);
    write_file_atomic(out_path(opt.cfg, "bench.json"),
                      bench_to_json(report, opt.cfg) + "\n");
    write_file_atomic(out_path(opt.cfg, "bench.csv"),
                      bench_to_csv(report, opt.cfg.include_timing));
    std::cout << bench_to_csv(report, opt.cfg.include_timing);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"omicsel: sequential feature-selection toolkit for expression data"};
    app.require_subcommand(1);
    app.fallthrough();

    CliOptions opt;
    opt.synth = SyntheticSpec{120, 500, 20, 4, 3.0, 1.0, 0};

    bool no_timing = false;
    app.add_option("--seed", opt.cfg.seed, "root seed; all stage seeds derive from it");
    app.add_option("--config", opt.config_path, "key=value configuration file");
    app.add_option("--out", opt.cfg.out_dir, "output directory");
    app.add_option("--label-col", opt.cfg.label_column, "label column name");
    app.add_flag("--no-timing", no_timing,
                 "omit wall-clock and environment fields from outputs");

    auto* synth = app.add_subcommand("synth", "generate a synthetic labeled dataset");
    synth->add_option("--samples", opt.synth.n_samples, "sample count");
    synth->add_option("--features", opt.synth.n_features, "feature count");
    synth->add_option("--informative", opt.synth.n_informative, "informative features");
    synth->add_option("--classes", opt.synth.n_classes, "class count");
    synth->add_option("--separation", opt.synth.class_separation, "class separation");
    synth->add_option("--noise", opt.synth.noise_std, "noise standard deviation");

    auto* preprocess = app.add_subcommand("preprocess", "clean and normalize counts");
    preprocess->add_option("--data", opt.cfg.data_path, "input TSV")->required();
    preprocess->add_flag("--de", opt.run_de, "run the differential-expression screen");
    preprocess->add_option("--de-positive", opt.de_positive,
                           "class name forming DE group 1 (one-vs-rest)");
    preprocess->add_flag("--skip-outliers", opt.skip_outliers, "skip outlier removal");
    preprocess->add_flag("--skip-quantile", opt.skip_quantile, "skip the quantile filter");
    preprocess->add_flag("--skip-lowcount", opt.skip_lowcount, "skip the low-count filter");

    auto* baseline = app.add_subcommand("baseline", "six-model baseline accuracies");
    baseline->add_option("--data", opt.cfg.data_path, "input TSV")->required();
    baseline->add_option("--test-fraction", opt.cfg.test_fraction, "held-out fraction");

    auto* select = app.add_subcommand("select", "run a feature-selection strategy");
    select->add_option("--data", opt.cfg.data_path, "input TSV")->required();
    select->add_option("--strategy", opt.strategy, "tree|rfe|rfecv|combined");
    select->add_option("--rfe-target", opt.cfg.selector.rfe_target,
                       "target feature count (0 = from rfecv)");
    select->add_option("--rfe-step", opt.cfg.selector.rfe_step,
                       "elimination step (fraction <1 or integer)");
    select->add_option("--rfecv-k", opt.cfg.selector.rfecv_k, "rfecv fold count");
    select->add_option("--min-features", opt.cfg.selector.rfecv_min_features,
                       "rfecv minimum feature count");

    auto* eval = app.add_subcommand("eval", "evaluate a saved model on a dataset");
    eval->add_option("--model", opt.model_path, "model JSON")->required();
    eval->add_option("--data", opt.cfg.data_path, "input TSV")->required();

    auto* grid = app.add_subcommand("grid", "cross-validated grid search");
    grid->add_option("--data", opt.cfg.data_path, "input TSV")->required();
    grid->add_option("--family", opt.grid_family, "model family");
    grid->add_option("--param", opt.grid_params,
                     "name=v1,v2,... (repeatable; declared order)");
    grid->add_option("--cv-k", opt.grid_k, "fold count");

    auto* embed = app.add_subcommand("embed", "PCA embedding and k-NN graph export");
    embed->add_option("--data", opt.cfg.data_path, "input TSV")->required();
    embed->add_option("--dim", opt.embed_dim, "embedding dimension");
    embed->add_option("--knn", opt.embed_knn, "graph neighbor count");
    embed->add_option("--metric", opt.embed_metric, "euclidean|correlation");

    auto* bench = app.add_subcommand("bench", "four-strategy timing/accuracy benchmark");
    bench->add_option("--data", opt.cfg.data_path, "input TSV")->required();
    bench->add_option("--test-fraction", opt.cfg.test_fraction, "held-out fraction");
    bench->add_option("--rfe-target", opt.cfg.selector.rfe_target,
                      "standalone-RFE target (0 = ceil(sqrt(features)))");

    // Precedence: defaults < config file < explicit CLI flags. The config is
    // applied before parsing, so CLI11 overwrites exactly the flags given.
    try {
        for (int i = 1; i + 1 < argc || i < argc; ++i) {
            const std::string arg = argv[i];
            if (arg == "--config" && i + 1 < argc) {
                apply_config(opt.cfg, parse_config_file(argv[i + 1]));
                break;
            }
            if (arg.rfind("--config=", 0) == 0) {
                apply_config(opt.cfg, parse_config_file(arg.substr(9)));
                break;
            }
        }
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 1;
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1; // usage errors exit 1
    }

    try {
        opt.cfg.include_timing = !no_timing;

        if (app.got_subcommand(synth)) return cmd_synth(opt);
        if (app.got_subcommand(preprocess)) return cmd_preprocess(opt);
        if (app.got_subcommand(baseline)) return cmd_baseline(opt);
        if (app.got_subcommand(select)) return cmd_select(opt);
        if (app.got_subcommand(eval)) return cmd_eval(opt);
        if (app.got_subcommand(grid)) return cmd_grid(opt);
        if (app.got_subcommand(embed)) return cmd_embed(opt);
        if (app.got_subcommand(bench)) return cmd_bench(opt);
        throw UsageError("no subcommand given");
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 1;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 3;
    }
}
