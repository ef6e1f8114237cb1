// Acceptance suite: ten pinned criteria, one PASS/FAIL line each. Every
// tolerance is fixed here in code; the binary exits non-zero if any criterion
// fails but always runs them all.
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

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <set>
#include <string>
#include <vector>

using namespace omicsel;

namespace {

int failures = 0;
std::vector<std::string> notes;

void report(const char* id, bool ok, const std::string& detail) {
    std::printf("%-4s %s  %s\n", id, ok ? "PASS" : "FAIL", detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

void run_criterion(const char* id, const std::function<std::pair<bool, std::string>()>& fn) {
    try {
        const auto [ok, detail] = fn();
        report(id, ok, detail);
    } catch (const std::exception& e) {
        report(id, false, std::string("exception: ") + e.what());
    }
}

// The shared benchmark dataset: 200 samples x 2000 features, 40 informative,
// 4 classes, fixed seed.
const SyntheticSpec kBenchSpec{200, 2000, 40, 4, 3.0, 1.0, 20240915};

struct BenchData {
    LabeledDataset ds;
    std::vector<bool> mask;
};

const BenchData& bench_data() {
    static BenchData data = [] {
        auto [ds, mask] = generate_synthetic(kBenchSpec);
        return BenchData{std::move(ds), std::move(mask)};
    }();
    return data;
}

std::string fmt(const char* pattern, double a, double b) {
    char buf[160];
    std::snprintf(buf, sizeof buf, pattern, a, b);
    return buf;
}

const BenchReport& shared_bench() {
    static BenchReport report = [] {
        RunConfig cfg;
        cfg.seed = 7;
        cfg.include_timing = true;
        return run_benchmark(bench_data().ds, cfg);
    }();
    return report;
}

const BenchRow* bench_row(const std::string& name) {
    for (const auto& row : shared_bench().rows)
        if (row.strategy == name && row.ok) return &row;
    return nullptr;
}

// A1: combined wall time at most half of rfecv's; tree stage fastest.
std::pair<bool, std::string> a1() {
    const auto* tree = bench_row("tree_based");
    const auto* rfecv_row = bench_row("rfecv");
    const auto* rfe_row = bench_row("rfe");
    const auto* combined = bench_row("combined");
    if (!tree || !rfecv_row || !rfe_row || !combined)
        return {false, "a strategy failed"};
    const bool half = combined->wall_time_seconds <= 0.5 * rfecv_row->wall_time_seconds;
    const bool tree_min =
        tree->wall_time_seconds <= rfecv_row->wall_time_seconds &&
        tree->wall_time_seconds <= rfe_row->wall_time_seconds &&
        tree->wall_time_seconds <= combined->wall_time_seconds;
    char buf[200];
    std::snprintf(buf, sizeof buf,
                  "tree=%.2fs rfecv=%.2fs rfe=%.2fs combined=%.2fs "
                  "(combined/rfecv=%.2f)",
                  tree->wall_time_seconds, rfecv_row->wall_time_seconds,
                  rfe_row->wall_time_seconds, combined->wall_time_seconds,
                  combined->wall_time_seconds / rfecv_row->wall_time_seconds);
    return {half && tree_min, buf};
}

// A2: combined test accuracy within 0.03 of rfecv's.
std::pair<bool, std::string> a2() {
    const auto* rfecv_row = bench_row("rfecv");
    const auto* combined = bench_row("combined");
    if (!rfecv_row || !combined) return {false, "a strategy failed"};
    const double delta = combined->report.accuracy - rfecv_row->report.accuracy;
    return {delta >= -0.03,
            fmt("combined=%.4f rfecv=%.4f", combined->report.accuracy,
                rfecv_row->report.accuracy)};
}

// A3: the cascade with rfe_target=40 recovers at least 28 of the 40
// ground-truth informative features.
std::pair<bool, std::string> a3() {
    SelectorConfig cfg;
    cfg.seed = 7;
    cfg.rfe_target = 40;
    const auto result = sequential_select(bench_data().ds, cfg);
    std::size_t recovered = 0;
    const auto& ids = bench_data().ds.matrix.feature_ids;
    std::set<std::string> informative;
    for (std::size_t j = 0; j < ids.size(); ++j)
        if (bench_data().mask[j]) informative.insert(ids[j]);
    for (const auto& id : result.final_selected)
        if (informative.count(id)) ++recovered;
    char buf[120];
    std::snprintf(buf, sizeof buf, "recovered %zu/40 informative (selected %zu)",
                  recovered, result.final_selected.size());
    return {recovered >= 28, buf};
}

// A4: report fields match a brute-force one-vs-rest counter on 1000 random
// label pairs; the binary recall/specificity identity holds exactly.
std::pair<bool, std::string> a4() {
    Rng rng(404);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t nc = 2 + rng.uniform_below(4); // up to 5 classes
        const std::size_t n = 1 + rng.uniform_below(50);
        std::vector<int> y_true(n), y_pred(n);
        for (std::size_t i = 0; i < n; ++i) {
            y_true[i] = static_cast<int>(rng.uniform_below(nc));
            y_pred[i] = static_cast<int>(rng.uniform_below(nc));
        }
        const auto report = metrics_report(confusion_matrix(y_true, y_pred, nc));

        // Brute-force per-class counters, straight from the label vectors.
        double macro_p = 0, macro_r = 0, macro_s = 0, macro_f = 0;
        std::size_t correct = 0;
        for (std::size_t i = 0; i < n; ++i)
            if (y_true[i] == y_pred[i]) ++correct;
        for (std::size_t c = 0; c < nc; ++c) {
            double tp = 0, fp = 0, fn = 0, tn = 0;
            for (std::size_t i = 0; i < n; ++i) {
                const bool is_true = y_true[i] == static_cast<int>(c);
                const bool is_pred = y_pred[i] == static_cast<int>(c);
                if (is_true && is_pred) ++tp;
                else if (!is_true && is_pred) ++fp;
                else if (is_true && !is_pred) ++fn;
                else ++tn;
            }
            const double precision = (tp + fp) > 0 ? tp / (tp + fp) : 0.0;
            const double recall = (tp + fn) > 0 ? tp / (tp + fn) : 0.0;
            const double specificity = (tn + fp) > 0 ? tn / (tn + fp) : 0.0;
            const double f1 = (precision + recall) > 0
                                  ? 2 * precision * recall / (precision + recall)
                                  : 0.0;
            const auto& m = report.per_class[c];
            if (std::abs(m.precision - precision) > 1e-12 ||
                std::abs(m.recall - recall) > 1e-12 ||
                std::abs(m.specificity - specificity) > 1e-12 ||
                std::abs(m.f1 - f1) > 1e-12)
                return {false, "per-class mismatch at trial " + std::to_string(trial)};
            macro_p += precision;
            macro_r += recall;
            macro_s += specificity;
            macro_f += f1;
        }
        const double k = static_cast<double>(nc);
        if (std::abs(report.macro_precision - macro_p / k) > 1e-12 ||
            std::abs(report.macro_recall - macro_r / k) > 1e-12 ||
            std::abs(report.macro_specificity - macro_s / k) > 1e-12 ||
            std::abs(report.macro_f1 - macro_f / k) > 1e-12 ||
            std::abs(report.g_mean - std::sqrt((macro_r / k) * (macro_s / k))) > 1e-12 ||
            std::abs(report.accuracy -
                     static_cast<double>(correct) / static_cast<double>(n)) > 1e-12)
            return {false, "macro mismatch at trial " + std::to_string(trial)};

        if (nc == 2 &&
            report.per_class[1].recall != report.per_class[0].specificity)
            return {false, "binary identity violated at trial " + std::to_string(trial)};
    }
    return {true, "1000 random reports match the brute-force counter"};
}

// A5: rfe picks the exhaustively optimal pair; rfecv's optimum stays small.
std::pair<bool, std::string> a5() {
    // Part 1: 10 features, 2 informative, step 1.
    Rng rng(424242);
    const std::size_t n = 60;
    LabeledDataset ds;
    ds.matrix.values = Matrix(n, 10);
    for (std::size_t i = 0; i < n; ++i) {
        const int c = static_cast<int>(i % 2);
        ds.labels.push_back(c);
        const double sign = c == 0 ? -1.0 : 1.0;
        for (std::size_t j = 0; j < 10; ++j) {
            double v = 0.5 * rng.gaussian();
            if (j == 2 || j == 7) v += sign;
            ds.matrix.values.at(i, j) = v;
        }
        ds.matrix.sample_ids.push_back("s" + std::to_string(i));
    }
    for (std::size_t j = 0; j < 10; ++j)
        ds.matrix.feature_ids.push_back("f" + std::to_string(j));
    ds.class_names = {"a", "b"};

    const ModelSpec estimator = ModelSpec::defaults(ModelFamily::linear_svc);
    const auto rfe_result = rfe(ds, estimator, 2, 1.0);
    const std::set<std::string> selected(rfe_result.final_selected.begin(),
                                         rfe_result.final_selected.end());

    const FoldPlan plan = stratified_kfold(ds.labels, 2, 2, 777);
    double best_acc = -1.0;
    std::set<std::string> best_pair;
    for (std::size_t a = 0; a < 10; ++a) {
        for (std::size_t b = a + 1; b < 10; ++b) {
            double acc = 0.0;
            for (std::size_t fold = 0; fold < 2; ++fold) {
                const auto tr = plan.complement_indices(fold);
                const auto va = plan.fold_indices(fold);
                const auto model =
                    train(estimator, ds.select_samples(tr).select_features({a, b}));
                std::vector<int> truth;
                for (auto i : va) truth.push_back(ds.labels[i]);
                acc += accuracy_score(
                    truth,
                    predict(model,
                            ds.matrix.values.select_rows(va).select_cols({a, b})));
            }
            acc /= 2.0;
            if (acc > best_acc) {
                best_acc = acc;
                best_pair = {ds.matrix.feature_ids[a], ds.matrix.feature_ids[b]};
            }
        }
    }
    const bool pair_ok = selected == best_pair;

    // Part 2: 5 informative among 50, n* must land at or below 15.
    Rng rng2(1618);
    LabeledDataset ds2;
    const std::size_t n2 = 60;
    ds2.matrix.values = Matrix(n2, 50);
    Matrix centers(2, 5);
    for (std::size_t c = 0; c < 2; ++c)
        for (std::size_t j = 0; j < 5; ++j) centers.at(c, j) = 3.0 * rng2.gaussian();
    for (std::size_t i = 0; i < n2; ++i) {
        const std::size_t c = i % 2;
        ds2.labels.push_back(static_cast<int>(c));
        for (std::size_t j = 0; j < 50; ++j) {
            double v = rng2.gaussian();
            if (j < 5) v += centers.at(c, j);
            ds2.matrix.values.at(i, j) = v;
        }
        ds2.matrix.sample_ids.push_back("t" + std::to_string(i));
    }
    for (std::size_t j = 0; j < 50; ++j)
        ds2.matrix.feature_ids.push_back("g" + std::to_string(j));
    ds2.class_names = {"a", "b"};

    const auto cv_result = rfecv(ds2, estimator, 2, 1.0, 1, 55);
    const std::size_t n_star = cv_result.final_selected.size();
    double acc_star = 0, acc_full = 0;
    for (const auto& [size, acc] : *cv_result.stages[0].score_curve) {
        if (size == n_star) acc_star = acc;
        if (size == 50) acc_full = acc;
    }
    const bool cv_ok = n_star <= 15 && acc_star >= acc_full;

    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "rfe pair {%s} oracle acc %.3f; rfecv n*=%zu acc(n*)=%.3f "
                  "acc(50)=%.3f",
                  rfe_result.final_selected.size() == 2
                      ? (rfe_result.final_selected[0] + "," +
                         rfe_result.final_selected[1])
                            .c_str()
                      : "?",
                  best_acc, n_star, acc_star, acc_full);
    return {pair_ok && cv_ok, buf};
}

// A6: linear-model numerics.
std::pair<bool, std::string> a6() {
    Rng rng(606);

    // Gradient vs central finite differences over 20 random instances.
    int fd_checked = 0;
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 6 + rng.uniform_below(10);
        const std::size_t d = 2 + rng.uniform_below(4);
        const std::size_t nc = 2 + rng.uniform_below(3);
        Matrix x(n, d);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < d; ++j) x.at(i, j) = rng.gaussian();
        std::vector<int> y(n);
        for (std::size_t i = 0; i < n; ++i) y[i] = static_cast<int>(i % nc);
        const double l2 = 0.5 + rng.uniform01();
        const double h = 1e-6;

        if (nc == 2) {
            std::vector<double> w(d);
            for (auto& v : w) v = 0.5 * rng.gaussian();
            const double b = 0.2 * rng.gaussian();
            std::vector<double> grad;
            double grad_b = 0;
            linear_detail::logreg_binary_gradient(x, y, w, b, l2, grad, grad_b);
            for (std::size_t j = 0; j < d; ++j) {
                auto wp = w, wm = w;
                wp[j] += h;
                wm[j] -= h;
                const double fd =
                    (linear_detail::logreg_binary_objective(x, y, wp, b, l2) -
                     linear_detail::logreg_binary_objective(x, y, wm, b, l2)) /
                    (2 * h);
                if (std::abs(grad[j] - fd) > 1e-4 * std::max(1.0, std::abs(fd)))
                    return {false, "binary gradient mismatch"};
            }
        } else {
            Matrix w(nc, d);
            for (std::size_t c = 0; c < nc; ++c)
                for (std::size_t j = 0; j < d; ++j) w.at(c, j) = 0.5 * rng.gaussian();
            std::vector<double> b(nc, 0.0);
            Matrix grad_w;
            std::vector<double> grad_b;
            linear_detail::logreg_multi_gradient(x, y, nc, w, b, l2, grad_w, grad_b);
            for (std::size_t c = 0; c < nc; ++c) {
                for (std::size_t j = 0; j < d; ++j) {
                    auto wp = w, wm = w;
                    wp.at(c, j) += h;
                    wm.at(c, j) -= h;
                    const double fd =
                        (linear_detail::logreg_multi_objective(x, y, nc, wp, b, l2) -
                         linear_detail::logreg_multi_objective(x, y, nc, wm, b, l2)) /
                        (2 * h);
                    if (std::abs(grad_w.at(c, j) - fd) >
                        1e-4 * std::max(1.0, std::abs(fd)))
                        return {false, "multinomial gradient mismatch"};
                }
            }
        }
        ++fd_checked;
    }

    // Hinge traces non-increasing on every training run here.
    int traces_checked = 0;
    for (int trial = 0; trial < 6; ++trial) {
        const std::size_t nc = 2 + rng.uniform_below(3);
        const std::size_t per = 10 + rng.uniform_below(10);
        LabeledDataset ds;
        ds.matrix.values = Matrix(per * nc, 6);
        Matrix centers(nc, 6);
        for (std::size_t c = 0; c < nc; ++c)
            for (std::size_t j = 0; j < 6; ++j) centers.at(c, j) = 2.0 * rng.gaussian();
        for (std::size_t i = 0; i < per * nc; ++i) {
            const std::size_t c = i % nc;
            ds.labels.push_back(static_cast<int>(c));
            for (std::size_t j = 0; j < 6; ++j)
                ds.matrix.values.at(i, j) = centers.at(c, j) + rng.gaussian();
            ds.matrix.sample_ids.push_back("s" + std::to_string(i));
        }
        for (std::size_t j = 0; j < 6; ++j)
            ds.matrix.feature_ids.push_back("f" + std::to_string(j));
        for (std::size_t c = 0; c < nc; ++c)
            ds.class_names.push_back("c" + std::to_string(c));

        const auto model = train(ModelSpec::defaults(ModelFamily::linear_svc), ds);
        for (const auto& trace : std::get<LinearState>(model.state).objective_traces) {
            for (std::size_t i = 1; i < trace.size(); ++i)
                if (trace[i] > trace[i - 1])
                    return {false, "hinge objective increased"};
            ++traces_checked;
        }

        // Forest(1 tree, no bootstrap, all features) == decision tree.
        ModelSpec forest_spec = ModelSpec::defaults(ModelFamily::random_forest, 1);
        forest_spec.n_trees = 1;
        forest_spec.bootstrap = false;
        forest_spec.max_features_rule = MaxFeaturesRule::all;
        const auto forest = train(forest_spec, ds);
        const auto tree = train(ModelSpec::defaults(ModelFamily::decision_tree), ds);
        if (predict(forest, ds.matrix.values) != predict(tree, ds.matrix.values))
            return {false, "1-tree forest deviates from the decision tree"};
    }

    char buf[120];
    std::snprintf(buf, sizeof buf,
                  "%d finite-difference instances, %d monotone traces, forest==tree",
                  fd_checked, traces_checked);
    return {true, buf};
}

// A7: preprocessing oracles.
std::pair<bool, std::string> a7() {
    // size_factors on [[1,2],[2,4]].
    ExpressionMatrix m;
    m.values = Matrix(2, 2);
    m.values.at(0, 0) = 1;
    m.values.at(0, 1) = 2;
    m.values.at(1, 0) = 2;
    m.values.at(1, 1) = 4;
    m.sample_ids = {"s1", "s2"};
    m.feature_ids = {"f1", "f2"};
    const auto sf = size_factors(m);
    if (std::abs(sf.factors[0] - 0.7071) > 1e-4 ||
        std::abs(sf.factors[1] - 1.4142) > 1e-4)
        return {false,
                fmt("size factors %.6f, %.6f", sf.factors[0], sf.factors[1])};

    // low_count_filter threshold 10 keeps exactly totals >= 10.
    Rng rng(707);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t rows = 2 + rng.uniform_below(4);
        const std::size_t cols = 1 + rng.uniform_below(12);
        ExpressionMatrix counts;
        counts.values = Matrix(rows, cols);
        for (std::size_t i = 0; i < rows; ++i)
            for (std::size_t j = 0; j < cols; ++j)
                counts.values.at(i, j) = std::floor(8.0 * rng.uniform01());
        for (std::size_t i = 0; i < rows; ++i)
            counts.sample_ids.push_back("s" + std::to_string(i));
        for (std::size_t j = 0; j < cols; ++j)
            counts.feature_ids.push_back("f" + std::to_string(j));
        const auto kept = low_count_filter(counts, 10.0);
        std::set<std::string> expected;
        for (std::size_t j = 0; j < cols; ++j) {
            double total = 0;
            for (std::size_t i = 0; i < rows; ++i) total += counts.values.at(i, j);
            if (total >= 10.0) expected.insert(counts.feature_ids[j]);
        }
        const std::set<std::string> got(kept.feature_ids.begin(),
                                        kept.feature_ids.end());
        if (got != expected) return {false, "low_count_filter set mismatch"};
    }

    // BH equals the brute-force step-up on 100 random p-vectors.
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 1 + rng.uniform_below(60);
        std::vector<double> p(n);
        for (auto& v : p) v = rng.uniform01();
        if (n > 3 && trial % 5 == 0) p[2] = p[0];
        const auto q = benjamini_hochberg(p);

        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return p[a] < p[b]; });
        for (std::size_t k = 0; k < n; ++k) {
            double best = 1.0;
            for (std::size_t j = k; j < n; ++j)
                best = std::min(best, p[order[j]] * static_cast<double>(n) /
                                          static_cast<double>(j + 1));
            if (q[order[k]] != std::min(best, 1.0))
                return {false, "BH mismatch at trial " + std::to_string(trial)};
        }
    }
    return {true, "size factors, low-count set, and BH all match"};
}

// A8: PCA numerics.
std::pair<bool, std::string> a8() {
    // Hand case to 1e-10.
    ExpressionMatrix x;
    x.values = Matrix(3, 2);
    x.values.at(0, 0) = 1.0;
    x.values.at(1, 0) = -1.0;
    x.sample_ids = {"a", "b", "c"};
    x.feature_ids = {"f0", "f1"};
    const auto e = pca(x, 1);
    if (std::abs(e.components.at(0, 0) - 1.0) > 1e-10 ||
        std::abs(e.components.at(0, 1)) > 1e-10 ||
        std::abs(e.coordinates.at(0, 0) - 1.0) > 1e-10 ||
        std::abs(e.coordinates.at(1, 0) + 1.0) > 1e-10 ||
        std::abs(e.coordinates.at(2, 0)) > 1e-10 ||
        std::abs(e.explained_variance_ratio[0] - 1.0) > 1e-10)
        return {false, "hand-derived 3x2 case off"};

    Rng rng(808);
    const std::size_t n = 11, f = 25;
    ExpressionMatrix m;
    m.values = Matrix(n, f);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < f; ++j) m.values.at(i, j) = rng.gaussian();
    for (std::size_t i = 0; i < n; ++i) m.sample_ids.push_back("s" + std::to_string(i));
    for (std::size_t j = 0; j < f; ++j) m.feature_ids.push_back("g" + std::to_string(j));

    const auto full = pca(m, n - 1);
    for (std::size_t a = 0; a < n - 1; ++a)
        for (std::size_t b = a; b < n - 1; ++b) {
            const double dot = kernels::dot(full.components.row(a).data(),
                                            full.components.row(b).data(), f);
            if (std::abs(dot - (a == b ? 1.0 : 0.0)) > 1e-8)
                return {false, "orthonormality beyond 1e-8"};
        }

    Matrix centered(n, f);
    for (std::size_t j = 0; j < f; ++j) {
        double mean = 0.0;
        for (std::size_t i = 0; i < n; ++i) mean += m.values.at(i, j);
        mean /= static_cast<double>(n);
        for (std::size_t i = 0; i < n; ++i)
            centered.at(i, j) = m.values.at(i, j) - mean;
    }
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = a + 1; b < n; ++b) {
            const double orig = std::sqrt(kernels::squared_distance(
                centered.row(a).data(), centered.row(b).data(), f));
            const double proj = std::sqrt(
                kernels::squared_distance(full.coordinates.row(a).data(),
                                          full.coordinates.row(b).data(), n - 1));
            if (std::abs(orig - proj) > 1e-6 * std::max(1.0, orig))
                return {false, "isometry beyond 1e-6"};
        }
    return {true, "hand case 1e-10, orthonormality 1e-8, isometry 1e-6"};
}

// A9: every CLI command run twice produces byte-identical non-timing outputs.
std::pair<bool, std::string> a9() {
    namespace fs = std::filesystem;
    const std::string cli = OMICSEL_CLI_PATH;
    const fs::path root = fs::temp_directory_path() / "omicsel_acceptance_a9";
    fs::remove_all(root);
    fs::create_directories(root);

    auto shell = [&](const std::string& args) {
        const std::string command = cli + " " + args + " >/dev/null 2>&1";
        return WEXITSTATUS(std::system(command.c_str()));
    };
    auto slurp = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        return std::string{std::istreambuf_iterator<char>(in),
                           std::istreambuf_iterator<char>()};
    };

    const std::string data_dir = (root / "data").string();
    if (shell("synth --samples 60 --features 40 --informative 8 --classes 3 "
              "--separation 4.0 --seed 31 --out " + data_dir) != 0)
        return {false, "synth failed"};
    const std::string tsv = data_dir + "/synthetic.tsv";
    const std::string model = (root / "m1/model_linear_svc.json").string();

    struct Cmd {
        std::string name;
        std::string args;
        std::vector<std::string> artifacts;
    };
    const std::vector<Cmd> commands = {
        {"synth",
         "synth --samples 60 --features 40 --informative 8 --classes 3 "
         "--separation 4.0 --seed 31 --out {OUT}",
         {"synthetic.tsv", "informative_mask.csv"}},
        {"preprocess",
         "preprocess --no-timing --data " + tsv +
             " --skip-outliers --seed 3 --out {OUT}",
         {"preprocessed.tsv", "preprocess.json"}},
        {"baseline", "baseline --no-timing --data " + tsv + " --seed 3 --out {OUT}",
         {"baseline.json", "baseline.csv", "model_linear_svc.json",
          "model_random_forest.json"}},
        {"select",
         "select --no-timing --data " + tsv + " --strategy combined --seed 3 "
         "--out {OUT}",
         {"selection.json", "selected_features.csv"}},
        {"eval",
         "eval --no-timing --model " + model + " --data " + tsv + " --out {OUT}",
         {"eval.json", "eval.csv"}},
        {"grid",
         "grid --no-timing --data " + tsv +
             " --family linear_svc --param c=0.01,1 --cv-k 2 --seed 3 --out {OUT}",
         {"grid.json", "grid.csv"}},
        {"embed",
         "embed --no-timing --data " + tsv + " --knn 3 --seed 3 --out {OUT}",
         {"embedding.csv", "scatter.svg", "graph.dot", "graph_edges.csv",
          "embed.json"}},
        {"bench", "bench --no-timing --data " + tsv + " --seed 3 --out {OUT}",
         {"bench.json", "bench.csv"}},
    };

    // The eval command needs a model file first.
    if (shell("baseline --data " + tsv + " --seed 3 --out " + (root / "m1").string()) != 0)
        return {false, "baseline (model prep) failed"};

    for (const auto& cmd : commands) {
        for (int run = 1; run <= 2; ++run) {
            const std::string out = (root / (cmd.name + std::to_string(run))).string();
            std::string args = cmd.args;
            args.replace(args.find("{OUT}"), 5, out);
            if (shell(args) != 0) return {false, cmd.name + " failed"};
        }
        for (const auto& artifact : cmd.artifacts) {
            const auto p1 = root / (cmd.name + "1") / artifact;
            const auto p2 = root / (cmd.name + "2") / artifact;
            if (slurp(p1).empty() || slurp(p1) != slurp(p2))
                return {false, cmd.name + ": " + artifact + " differs"};
        }
    }
    return {true, "8 commands x 2 runs byte-identical"};
}

// A10: pipeline nesting invariant across 100 random cascade runs.
std::pair<bool, std::string> a10() {
    Rng rng(1010);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t nc = 2 + rng.uniform_below(2);
        const std::size_t per = 8 + rng.uniform_below(6);
        const std::size_t f = 15 + rng.uniform_below(25);
        const std::size_t inf = 2 + rng.uniform_below(4);
        LabeledDataset ds;
        ds.matrix.values = Matrix(per * nc, f);
        Matrix centers(nc, inf);
        for (std::size_t c = 0; c < nc; ++c)
            for (std::size_t j = 0; j < inf; ++j)
                centers.at(c, j) = 2.5 * rng.gaussian();
        for (std::size_t i = 0; i < per * nc; ++i) {
            const std::size_t c = i % nc;
            ds.labels.push_back(static_cast<int>(c));
            for (std::size_t j = 0; j < f; ++j) {
                double v = rng.gaussian();
                if (j < inf) v += centers.at(c, j);
                ds.matrix.values.at(i, j) = v;
            }
            ds.matrix.sample_ids.push_back("s" + std::to_string(i));
        }
        for (std::size_t j = 0; j < f; ++j)
            ds.matrix.feature_ids.push_back("f" + std::to_string(j));
        for (std::size_t c = 0; c < nc; ++c)
            ds.class_names.push_back("c" + std::to_string(c));

        SelectorConfig cfg;
        cfg.seed = rng.next_u64();
        cfg.tree_spec.n_trees = 12;
        const auto result = sequential_select(ds, cfg);
        try {
            result.validate();
        } catch (const std::exception& e) {
            return {false, std::string("nesting violated: ") + e.what()};
        }
        // Explicit subset re-check, independent of validate().
        std::set<std::string> previous(ds.matrix.feature_ids.begin(),
                                       ds.matrix.feature_ids.end());
        for (const auto& stage : result.stages) {
            for (const auto& id : stage.selected_feature_ids)
                if (!previous.count(id))
                    return {false, "stage " + stage.name + " escaped its input"};
            previous = std::set<std::string>(stage.selected_feature_ids.begin(),
                                             stage.selected_feature_ids.end());
        }
    }
    return {true, "100 random cascades nest correctly"};
}

} // namespace

int main() {
    using Clock = std::chrono::steady_clock;
    const auto start = Clock::now();

    std::printf("acceptance suite (kernels backend: %s)\n",
                kernels::backend_name(kernels::active_backend()));

    run_criterion("A1", a1);
    run_criterion("A2", a2);
    run_criterion("A3", a3);
    run_criterion("A4", a4);
    run_criterion("A5", a5);
    run_criterion("A6", a6);
    run_criterion("A7", a7);
    run_criterion("A8", a8);
    run_criterion("A9", a9);
    run_criterion("A10", a10);

    const double elapsed = std::chrono::duration<double>(Clock::now() - start).count();
    std::printf("%d criterion(s) failed; total %.1fs\n", failures, elapsed);
    return failures > 0 ? 1 : 0;
}
