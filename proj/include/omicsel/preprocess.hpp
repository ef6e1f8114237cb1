#pragma once

#include "omicsel/matrix.hpp"

#include <utility>
#include <vector>

namespace omicsel {

struct PreprocessConfig {
    double corr_threshold = 0.6;    // mean inter-sample Pearson cutoff
    double quantile_cut = 0.25;     // feature-mean quantile cutoff
    double min_row_sum = 10.0;      // per-feature total cutoff
    double de_fdr = 0.05;           // BH q-value gate
    double de_min_abs_effect = 1.0; // |mean difference| gate, transformed units

    void validate() const; // throws UsageError on out-of-range values
};

struct SizeFactors {
    std::vector<double> factors; // one positive finite value per sample
};

struct DeRow {
    std::size_t feature = 0;
    double effect = 0.0; // mean(group 1) - mean(group 0), transformed units
    double p = 1.0;
    double q = 1.0;
};

struct DeResult {
    std::vector<bool> mask;   // q <= de_fdr and |effect| >= de_min_abs_effect
    std::vector<DeRow> table; // sorted by feature index
};

// Single pass: drops every sample whose mean Pearson correlation with the
// other samples falls strictly below the threshold. A zero-variance sample
// row is a hard error (its correlation is undefined).
std::pair<ExpressionMatrix, std::vector<std::string>>
remove_outlier_samples(const ExpressionMatrix& m, double corr_threshold);

// Keeps features whose mean across samples is strictly greater than the
// quantile_cut-quantile (linear interpolation) of all feature means.
ExpressionMatrix quantile_filter(const ExpressionMatrix& m, double quantile_cut);

// Keeps features whose total across samples is >= min_row_sum.
ExpressionMatrix low_count_filter(const ExpressionMatrix& m, double min_row_sum);

// Median-of-ratios estimator. The reference set is the features with strictly
// positive counts in every sample; empty reference set is an error.
SizeFactors size_factors(const ExpressionMatrix& m);

// log2(count / factor + 1), the variance-stabilizing stand-in.
ExpressionMatrix vst_transform(const ExpressionMatrix& m, const SizeFactors& sf);

// Welch two-sample t-test per feature on transformed values, with
// Benjamini-Hochberg FDR control. group_labels entries are 0 or 1.
DeResult differential_expression(const ExpressionMatrix& transformed,
                                 const std::vector<int>& group_labels,
                                 const PreprocessConfig& cfg);

// Step-up BH adjustment; exposed for direct verification.
std::vector<double> benjamini_hochberg(const std::vector<double>& p_values);

// Linear-interpolation quantile of an unsorted vector, p in [0, 1].
double quantile(std::vector<double> values, double p);

// Pearson correlation of two equal-length vectors.
double pearson(const double* a, const double* b, std::size_t n);

} // namespace omicsel
