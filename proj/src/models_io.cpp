#include "omicsel/error.hpp"
#include "omicsel/models.hpp"

#include <json.hpp>

#include <fstream>

namespace omicsel {

namespace {

using nlohmann::ordered_json;

ordered_json matrix_to_json(const Matrix& m) {
    ordered_json j;
    j["rows"] = m.rows();
    j["cols"] = m.cols();
    j["data"] = std::vector<double>(m.data(), m.data() + m.rows() * m.cols());
    return j;
}

Matrix matrix_from_json(const nlohmann::json& j) {
    Matrix m(j.at("rows").get<std::size_t>(), j.at("cols").get<std::size_t>());
    const auto data = j.at("data").get<std::vector<double>>();
    if (data.size() != m.rows() * m.cols())
        throw DataError("model file: matrix payload size mismatch");
    std::copy(data.begin(), data.end(), m.data());
    return m;
}

const char* rule_name(MaxFeaturesRule r) {
    switch (r) {
    case MaxFeaturesRule::sqrt_rule: return "sqrt";
    case MaxFeaturesRule::log2_rule: return "log2";
    case MaxFeaturesRule::all:       return "all";
    }
    return "sqrt";
}

MaxFeaturesRule rule_from_name(const std::string& s) {
    if (s == "sqrt") return MaxFeaturesRule::sqrt_rule;
    if (s == "log2") return MaxFeaturesRule::log2_rule;
    if (s == "all") return MaxFeaturesRule::all;
    throw DataError("model file: unknown max_features_rule: " + s);
}

} // namespace

std::string model_to_json(const TrainedModel& model) {
    ordered_json j;
    j["format"] = "omicsel-model";
    j["format_version"] = 1;
    j["family"] = family_name(model.spec.family);

    ordered_json spec;
    spec["seed"] = model.spec.seed;
    spec["max_depth"] = model.spec.max_depth;
    spec["min_samples_leaf"] = model.spec.min_samples_leaf;
    spec["n_trees"] = model.spec.n_trees;
    spec["max_features_rule"] = rule_name(model.spec.max_features_rule);
    spec["bootstrap"] = model.spec.bootstrap;
    spec["k"] = model.spec.k;
    spec["metric"] = model.spec.metric == Metric::euclidean ? "euclidean" : "correlation";
    spec["c"] = model.spec.c;
    spec["l2_strength"] = model.spec.l2_strength;
    spec["max_iters"] = model.spec.max_iters;
    spec["tol"] = model.spec.tol;
    j["spec"] = std::move(spec);

    j["n_classes"] = model.n_classes;
    j["n_features"] = model.n_features;
    j["convergence_warning"] = model.convergence_warning;

    ordered_json state;
    if (const auto* forest = std::get_if<ForestState>(&model.state)) {
        ordered_json trees = ordered_json::array();
        for (const auto& tree : forest->trees) {
            ordered_json t;
            ordered_json nodes = ordered_json::array();
            for (const auto& nd : tree.nodes)
                nodes.push_back({nd.feature, nd.threshold, nd.left, nd.right, nd.label});
            t["nodes"] = std::move(nodes);
            t["importance_raw"] = tree.importance_raw;
            trees.push_back(std::move(t));
        }
        state["trees"] = std::move(trees);
    } else if (const auto* knn = std::get_if<KnnState>(&model.state)) {
        state["train_x"] = matrix_to_json(knn->train_x);
        state["train_y"] = knn->train_y;
    } else if (const auto* gnb = std::get_if<GnbState>(&model.state)) {
        state["means"] = matrix_to_json(gnb->means);
        state["vars"] = matrix_to_json(gnb->vars);
        state["log_priors"] = gnb->log_priors;
    } else if (const auto* lin = std::get_if<LinearState>(&model.state)) {
        state["weights"] = matrix_to_json(lin->weights);
        state["intercepts"] = lin->intercepts;
        state["feat_mean"] = lin->feat_mean;
        state["feat_scale"] = lin->feat_scale;
    }
    j["state"] = std::move(state);
    return j.dump(2);
}

TrainedModel model_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("model file: invalid JSON: ") + e.what());
    }
    try {
        if (j.at("format") != "omicsel-model")
            throw DataError("model file: unexpected format tag");
        if (j.at("format_version").get<int>() != 1)
            throw DataError("model file: unsupported format_version");

        TrainedModel model;
        model.spec.family = family_from_name(j.at("family").get<std::string>());
        const auto& spec = j.at("spec");
        model.spec.seed = spec.at("seed").get<std::uint64_t>();
        model.spec.max_depth = spec.at("max_depth").get<int>();
        model.spec.min_samples_leaf = spec.at("min_samples_leaf").get<int>();
        model.spec.n_trees = spec.at("n_trees").get<int>();
        model.spec.max_features_rule =
            rule_from_name(spec.at("max_features_rule").get<std::string>());
        model.spec.bootstrap = spec.at("bootstrap").get<bool>();
        model.spec.k = spec.at("k").get<int>();
        model.spec.metric = spec.at("metric").get<std::string>() == "correlation"
                                ? Metric::correlation
                                : Metric::euclidean;
        model.spec.c = spec.at("c").get<double>();
        model.spec.l2_strength = spec.at("l2_strength").get<double>();
        model.spec.max_iters = spec.at("max_iters").get<int>();
        model.spec.tol = spec.at("tol").get<double>();

        model.n_classes = j.at("n_classes").get<std::size_t>();
        model.n_features = j.at("n_features").get<std::size_t>();
        model.convergence_warning = j.at("convergence_warning").get<bool>();

        const auto& state = j.at("state");
        switch (model.spec.family) {
        case ModelFamily::decision_tree:
        case ModelFamily::random_forest: {
            ForestState fs;
            for (const auto& t : state.at("trees")) {
                Tree tree;
                for (const auto& nd : t.at("nodes"))
                    tree.nodes.push_back(TreeNode{nd.at(0).get<int>(),
                                                  nd.at(1).get<double>(),
                                                  nd.at(2).get<int>(),
                                                  nd.at(3).get<int>(),
                                                  nd.at(4).get<int>()});
                tree.importance_raw = t.at("importance_raw").get<std::vector<double>>();
                fs.trees.push_back(std::move(tree));
            }
            model.state = std::move(fs);
            break;
        }
        case ModelFamily::knn: {
            KnnState ks;
            ks.train_x = matrix_from_json(state.at("train_x"));
            ks.train_y = state.at("train_y").get<std::vector<int>>();
            model.state = std::move(ks);
            break;
        }
        case ModelFamily::gaussian_nb: {
            GnbState gs;
            gs.means = matrix_from_json(state.at("means"));
            gs.vars = matrix_from_json(state.at("vars"));
            gs.log_priors = state.at("log_priors").get<std::vector<double>>();
            model.state = std::move(gs);
            break;
        }
        case ModelFamily::logistic_regression:
        case ModelFamily::linear_svc: {
            LinearState ls;
            ls.weights = matrix_from_json(state.at("weights"));
            ls.intercepts = state.at("intercepts").get<std::vector<double>>();
            ls.feat_mean = state.at("feat_mean").get<std::vector<double>>();
            ls.feat_scale = state.at("feat_scale").get<std::vector<double>>();
            model.state = std::move(ls);
            break;
        }
        }
        return model;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("model file: missing or malformed field: ") + e.what());
    }
}

void save_model(const TrainedModel& model, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw DataError("cannot write model file: " + path);
    out << model_to_json(model) << '\n';
    if (!out)
        throw DataError("write failed: " + path);
}

TrainedModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw DataError("cannot open model file: " + path);
    std::string text((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
    return model_from_json(text);
}

} // namespace omicsel
