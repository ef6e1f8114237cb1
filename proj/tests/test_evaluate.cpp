#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "omicsel/dataset.hpp"
#include "omicsel/error.hpp"
#include "omicsel/evaluate.hpp"
#include "omicsel/rng.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

using namespace omicsel;

TEST_CASE("confusion_matrix counts true/predicted pairs") {
    const auto cm = confusion_matrix({0, 0, 0, 1, 1}, {0, 0, 1, 1, 1}, 2);
    CHECK(cm.at(0, 0) == 2);
    CHECK(cm.at(0, 1) == 1);
    CHECK(cm.at(1, 0) == 0);
    CHECK(cm.at(1, 1) == 2);
    CHECK(cm.total() == 5);

    const auto diag = confusion_matrix({0, 1, 1, 2}, {0, 1, 1, 2}, 3);
    CHECK(diag.at(0, 0) == 1);
    CHECK(diag.at(1, 1) == 2);
    CHECK(diag.at(2, 2) == 1);

    const auto empty = confusion_matrix({}, {}, 3);
    CHECK(empty.total() == 0);

    CHECK_THROWS_AS(confusion_matrix({0}, {0, 1}, 2), DataError);
    CHECK_THROWS_AS(confusion_matrix({0, 2}, {0, 0}, 2), DataError);
}

TEST_CASE("metrics_report hand-checked 2x2 case") {
    const auto cm = confusion_matrix({0, 0, 0, 1, 1}, {0, 0, 1, 1, 1}, 2);
    const auto report = metrics_report(cm);
    CHECK(report.per_class[1].precision == doctest::Approx(2.0 / 3.0));
    CHECK(report.per_class[1].recall == doctest::Approx(1.0));
    CHECK(report.per_class[1].specificity == doctest::Approx(2.0 / 3.0));
    CHECK(report.per_class[0].precision == doctest::Approx(1.0));
    CHECK(report.per_class[0].recall == doctest::Approx(2.0 / 3.0));
    CHECK(report.per_class[0].specificity == doctest::Approx(1.0));
    CHECK(report.macro_precision == doctest::Approx(5.0 / 6.0));
    CHECK(report.macro_recall == doctest::Approx(5.0 / 6.0));
    CHECK(report.accuracy == doctest::Approx(0.8));
    CHECK(report.g_mean ==
          doctest::Approx(std::sqrt(report.macro_recall * report.macro_specificity)));
}

TEST_CASE("a perfect diagonal scores 1.0 everywhere") {
    const auto cm = confusion_matrix({0, 1, 2, 2}, {0, 1, 2, 2}, 3);
    const auto report = metrics_report(cm);
    CHECK(report.accuracy == 1.0);
    CHECK(report.macro_precision == 1.0);
    CHECK(report.macro_recall == 1.0);
    CHECK(report.macro_specificity == 1.0);
    CHECK(report.macro_f1 == 1.0);
    CHECK(report.g_mean == doctest::Approx(1.0));
    CHECK(!report.zero_denominator);
}

TEST_CASE("zero-denominator metrics fall back to 0 with a flag") {
    // Class 2 never occurs and is never predicted.
    const auto cm = confusion_matrix({0, 1}, {0, 1}, 3);
    const auto report = metrics_report(cm);
    CHECK(report.per_class[2].precision == 0.0);
    CHECK(report.per_class[2].recall == 0.0);
    CHECK(report.per_class[2].f1 == 0.0);
    CHECK(report.per_class[2].specificity == 1.0);
    CHECK(report.zero_denominator);
}

TEST_CASE("binary recall of class 1 equals specificity of class 0 exactly") {
    Rng rng(15);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 2 + rng.uniform_below(40);
        std::vector<int> y_true(n), y_pred(n);
        bool has1 = false;
        for (std::size_t i = 0; i < n; ++i) {
            y_true[i] = static_cast<int>(rng.uniform_below(2));
            y_pred[i] = static_cast<int>(rng.uniform_below(2));
            has1 = has1 || y_true[i] == 1;
        }
        if (!has1) y_true[0] = 1;
        const auto report = metrics_report(confusion_matrix(y_true, y_pred, 2));
        CHECK(report.per_class[1].recall == report.per_class[0].specificity);
    }
}

TEST_CASE("accuracy equals support-weighted recall") {
    Rng rng(25);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t nc = 2 + rng.uniform_below(4);
        const std::size_t n = nc + rng.uniform_below(60);
        std::vector<int> y_true(n), y_pred(n);
        for (std::size_t i = 0; i < n; ++i) {
            y_true[i] = static_cast<int>(rng.uniform_below(nc));
            y_pred[i] = static_cast<int>(rng.uniform_below(nc));
        }
        const auto cm = confusion_matrix(y_true, y_pred, nc);
        const auto report = metrics_report(cm);
        double weighted = 0.0;
        for (std::size_t c = 0; c < nc; ++c) {
            double support = 0.0;
            for (std::size_t p = 0; p < nc; ++p)
                support += static_cast<double>(cm.at(c, p));
            weighted += support * report.per_class[c].recall;
        }
        // Zero-support classes contribute recall 0, so the identity holds
        // with the fallback convention too.
        CHECK(report.accuracy ==
              doctest::Approx(weighted / static_cast<double>(n)).epsilon(1e-12));
    }
}

TEST_CASE("consistent class permutation permutes per-class metrics only") {
    Rng rng(35);
    const std::size_t nc = 4, n = 80;
    std::vector<int> y_true(n), y_pred(n);
    for (std::size_t i = 0; i < n; ++i) {
        y_true[i] = static_cast<int>(rng.uniform_below(nc));
        y_pred[i] = static_cast<int>(rng.uniform_below(nc));
    }
    const std::vector<int> perm = {2, 0, 3, 1};
    std::vector<int> p_true(n), p_pred(n);
    for (std::size_t i = 0; i < n; ++i) {
        p_true[i] = perm[static_cast<std::size_t>(y_true[i])];
        p_pred[i] = perm[static_cast<std::size_t>(y_pred[i])];
    }
    const auto a = metrics_report(confusion_matrix(y_true, y_pred, nc));
    const auto b = metrics_report(confusion_matrix(p_true, p_pred, nc));
    for (std::size_t c = 0; c < nc; ++c) {
        const auto pc = static_cast<std::size_t>(perm[c]);
        CHECK(std::abs(a.per_class[c].precision - b.per_class[pc].precision) <= 1e-12);
        CHECK(std::abs(a.per_class[c].recall - b.per_class[pc].recall) <= 1e-12);
        CHECK(std::abs(a.per_class[c].specificity - b.per_class[pc].specificity) <=
              1e-12);
    }
    CHECK(std::abs(a.accuracy - b.accuracy) <= 1e-12);
    CHECK(std::abs(a.macro_precision - b.macro_precision) <= 1e-12);
    CHECK(std::abs(a.macro_recall - b.macro_recall) <= 1e-12);
    CHECK(std::abs(a.macro_specificity - b.macro_specificity) <= 1e-12);
    CHECK(std::abs(a.g_mean - b.g_mean) <= 1e-12);
}

TEST_CASE("report values stay inside [0,1]") {
    Rng rng(45);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t nc = 2 + rng.uniform_below(4);
        const std::size_t n = 1 + rng.uniform_below(30);
        std::vector<int> y_true(n), y_pred(n);
        for (std::size_t i = 0; i < n; ++i) {
            y_true[i] = static_cast<int>(rng.uniform_below(nc));
            y_pred[i] = static_cast<int>(rng.uniform_below(nc));
        }
        const auto report = metrics_report(confusion_matrix(y_true, y_pred, nc));
        auto in01 = [](double v) { return v >= 0.0 && v <= 1.0; };
        CHECK(in01(report.accuracy));
        CHECK(in01(report.macro_precision));
        CHECK(in01(report.macro_recall));
        CHECK(in01(report.macro_specificity));
        CHECK(in01(report.macro_f1));
        CHECK(in01(report.g_mean));
        for (const auto& m : report.per_class) {
            CHECK(in01(m.precision));
            CHECK(in01(m.recall));
            CHECK(in01(m.specificity));
            CHECK(in01(m.f1));
        }
    }
}

TEST_CASE("accuracy_percent formats with one decimal") {
    CHECK(accuracy_percent(0.972) == "97.2");
    CHECK(accuracy_percent(1.0) == "100.0");
    CHECK(accuracy_percent(0.0) == "0.0");
}

namespace {

LabeledDataset blob_ds(Rng& rng, std::size_t per_class, std::size_t n_classes,
                       std::size_t n_features, double separation) {
    const std::size_t n = per_class * n_classes;
    LabeledDataset ds;
    ds.matrix.values = Matrix(n, n_features);
    Matrix centers(n_classes, n_features);
    for (std::size_t c = 0; c < n_classes; ++c)
        for (std::size_t j = 0; j < n_features; ++j)
            centers.at(c, j) = separation * rng.gaussian();
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t c = i % n_classes;
        ds.labels.push_back(static_cast<int>(c));
        for (std::size_t j = 0; j < n_features; ++j)
            ds.matrix.values.at(i, j) = centers.at(c, j) + rng.gaussian();
        ds.matrix.sample_ids.push_back("s" + std::to_string(i));
    }
    for (std::size_t j = 0; j < n_features; ++j)
        ds.matrix.feature_ids.push_back("f" + std::to_string(j));
    for (std::size_t c = 0; c < n_classes; ++c)
        ds.class_names.push_back("c" + std::to_string(c));
    return ds;
}

} // namespace

TEST_CASE("grid_search single point and tie handling") {
    Rng rng(55);
    const auto ds = blob_ds(rng, 12, 2, 4, 3.0);

    std::vector<std::pair<std::string, std::vector<double>>> single = {
        {"c", {1.0}}};
    const auto result = grid_search(ds, ModelFamily::linear_svc, single, 2, 3);
    CHECK(result.table.size() == 1);
    CHECK(result.best_index == 0);
    CHECK(result.best_params[0].second == 1.0);

    // Bitwise-equal points: the first enumerated wins.
    std::vector<std::pair<std::string, std::vector<double>>> tied = {
        {"c", {1.0, 1.0}}};
    const auto tie = grid_search(ds, ModelFamily::linear_svc, tied, 2, 3);
    REQUIRE(tie.table.size() == 2);
    CHECK(tie.table[0].mean_accuracy == tie.table[1].mean_accuracy);
    CHECK(tie.best_index == 0);
}

TEST_CASE("grid_search prefers a workable C on separable blobs") {
    Rng rng(65);
    const auto ds = blob_ds(rng, 20, 3, 6, 4.0);
    std::vector<std::pair<std::string, std::vector<double>>> grid = {
        {"c", {1e-6, 1.0}}};
    const auto result = grid_search(ds, ModelFamily::linear_svc, grid, 2, 11);
    CHECK(result.best_params[0].second == 1.0);

    // Direct CV oracle for both points with the same folds.
    const FoldPlan plan =
        stratified_kfold(ds.labels, 3, 2, derive_seed(11, "grid:folds"));
    for (std::size_t point = 0; point < 2; ++point) {
        double acc = 0.0;
        for (std::size_t fold = 0; fold < 2; ++fold) {
            ModelSpec spec = ModelSpec::defaults(ModelFamily::linear_svc);
            spec.set_param("c", grid[0].second[point]);
            spec.seed = derive_seed(11, "grid:fold:" + std::to_string(fold));
            const auto model = train(spec, ds.select_samples(plan.complement_indices(fold)));
            const auto va = plan.fold_indices(fold);
            std::vector<int> truth;
            for (auto i : va) truth.push_back(ds.labels[i]);
            acc += accuracy_score(truth,
                                  predict(model, ds.matrix.values.select_rows(va)));
        }
        acc /= 2.0;
        CHECK(result.table[point].mean_accuracy == doctest::Approx(acc).epsilon(1e-12));
    }
    CHECK(result.table[1].mean_accuracy > result.table[0].mean_accuracy);
}

TEST_CASE("grid_search enumerates keys in declared order") {
    Rng rng(75);
    const auto ds = blob_ds(rng, 8, 2, 3, 3.0);
    std::vector<std::pair<std::string, std::vector<double>>> grid = {
        {"c", {0.5, 2.0}}, {"tol", {1e-3, 1e-4}}};
    const auto result = grid_search(ds, ModelFamily::linear_svc, grid, 2, 1);
    REQUIRE(result.table.size() == 4);
    // Last key varies fastest.
    CHECK(result.table[0].params[0].second == 0.5);
    CHECK(result.table[0].params[1].second == 1e-3);
    CHECK(result.table[1].params[0].second == 0.5);
    CHECK(result.table[1].params[1].second == 1e-4);
    CHECK(result.table[2].params[0].second == 2.0);

    CHECK_THROWS_AS(grid_search(ds, ModelFamily::linear_svc, {}, 2, 1), UsageError);
    std::vector<std::pair<std::string, std::vector<double>>> bad = {
        {"c", {-5.0}}};
    CHECK_THROWS_AS(grid_search(ds, ModelFamily::linear_svc, bad, 2, 1), UsageError);
}
