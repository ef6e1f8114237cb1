#include "omicsel/preprocess.hpp"

#include "omicsel/error.hpp"
#include "omicsel/kernels.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace omicsel {

void PreprocessConfig::validate() const {
    if (!(corr_threshold > 0.0) || !(corr_threshold < 1.0))
        throw UsageError("corr_threshold must lie in (0, 1)");
    if (!(quantile_cut > 0.0) || !(quantile_cut < 1.0))
        throw UsageError("quantile_cut must lie in (0, 1)");
    if (min_row_sum < 0.0)
        throw UsageError("min_row_sum must be >= 0");
    if (!(de_fdr > 0.0) || !(de_fdr < 1.0))
        throw UsageError("de_fdr must lie in (0, 1)");
    if (de_min_abs_effect < 0.0)
        throw UsageError("de_min_abs_effect must be >= 0");
}

double pearson(const double* a, const double* b, std::size_t n) {
    const double inv_n = 1.0 / static_cast<double>(n);
    const double ma = kernels::sum(a, n) * inv_n;
    const double mb = kernels::sum(b, n) * inv_n;
    const double cov = kernels::dot(a, b, n) - static_cast<double>(n) * ma * mb;
    const double va = kernels::sum_squares(a, n) - static_cast<double>(n) * ma * ma;
    const double vb = kernels::sum_squares(b, n) - static_cast<double>(n) * mb * mb;
    return cov / std::sqrt(va * vb);
}

std::pair<ExpressionMatrix, std::vector<std::string>>
remove_outlier_samples(const ExpressionMatrix& m, double corr_threshold) {
    const std::size_t n = m.n_samples();
    const std::size_t f = m.n_features();
    if (n < 3)
        throw DataError("outlier removal needs at least 3 samples");
    for (std::size_t i = 0; i < n; ++i) {
        const auto row = m.values.row(i);
        const double mean = kernels::sum(row.data(), f) / static_cast<double>(f);
        const double var = kernels::sum_squares(row.data(), f) -
                           static_cast<double>(f) * mean * mean;
        if (!(var > 0.0))
            throw DataError("sample has zero variance, correlation undefined: " +
                            m.sample_ids[i]);
    }

    std::vector<double> mean_corr(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double r = pearson(m.values.row(i).data(), m.values.row(j).data(), f);
            mean_corr[i] += r;
            mean_corr[j] += r;
        }
    }
    std::vector<std::size_t> kept;
    std::vector<std::string> removed;
    for (std::size_t i = 0; i < n; ++i) {
        mean_corr[i] /= static_cast<double>(n - 1);
        if (mean_corr[i] < corr_threshold)
            removed.push_back(m.sample_ids[i]);
        else
            kept.push_back(i);
    }
    return {m.select_samples(kept), removed};
}

double quantile(std::vector<double> values, double p) {
    if (values.empty())
        throw DataError("quantile of empty vector");
    std::sort(values.begin(), values.end());
    p = std::clamp(p, 0.0, 1.0);
    const double pos = p * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return values[lo] + frac * (values[hi] - values[lo]);
}

namespace {

std::vector<double> feature_means(const ExpressionMatrix& m) {
    const std::size_t n = m.n_samples();
    const std::size_t f = m.n_features();
    std::vector<double> means(f, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        kernels::axpy(1.0, m.values.row(i).data(), means.data(), f);
    for (auto& v : means) v /= static_cast<double>(n);
    return means;
}

} // namespace

ExpressionMatrix quantile_filter(const ExpressionMatrix& m, double quantile_cut) {
    if (m.n_samples() == 0 || m.n_features() == 0)
        throw DataError("quantile_filter on empty matrix");
    const auto means = feature_means(m);
    const double cutoff = quantile(means, quantile_cut);
    std::vector<std::size_t> kept;
    for (std::size_t j = 0; j < means.size(); ++j)
        if (means[j] > cutoff) kept.push_back(j);
    return m.select_features(kept);
}

ExpressionMatrix low_count_filter(const ExpressionMatrix& m, double min_row_sum) {
    std::vector<double> totals(m.n_features(), 0.0);
    for (std::size_t i = 0; i < m.n_samples(); ++i)
        kernels::axpy(1.0, m.values.row(i).data(), totals.data(), m.n_features());
    std::vector<std::size_t> kept;
    for (std::size_t j = 0; j < totals.size(); ++j)
        if (totals[j] >= min_row_sum) kept.push_back(j);
    return m.select_features(kept);
}

SizeFactors size_factors(const ExpressionMatrix& m) {
    const std::size_t n = m.n_samples();
    const std::size_t f = m.n_features();
    // Reference features: strictly positive in every sample.
    std::vector<double> log_geo;     // log geometric mean per reference feature
    std::vector<std::size_t> ref;
    for (std::size_t j = 0; j < f; ++j) {
        double log_sum = 0.0;
        bool all_positive = true;
        for (std::size_t i = 0; i < n; ++i) {
            const double v = m.values.at(i, j);
            if (!(v > 0.0)) { all_positive = false; break; }
            log_sum += std::log(v);
        }
        if (all_positive) {
            ref.push_back(j);
            log_geo.push_back(log_sum / static_cast<double>(n));
        }
    }
    if (ref.empty())
        throw DataError("size_factors: no feature is positive in every sample");

    SizeFactors sf;
    sf.factors.resize(n);
    std::vector<double> ratios(ref.size());
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t r = 0; r < ref.size(); ++r)
            ratios[r] = m.values.at(i, ref[r]) / std::exp(log_geo[r]);
        std::sort(ratios.begin(), ratios.end());
        const std::size_t mid = ratios.size() / 2;
        sf.factors[i] = (ratios.size() % 2 == 1)
                            ? ratios[mid]
                            : 0.5 * (ratios[mid - 1] + ratios[mid]);
    }
    return sf;
}

ExpressionMatrix vst_transform(const ExpressionMatrix& m, const SizeFactors& sf) {
    if (sf.factors.size() != m.n_samples())
        throw DataError("size factor count does not match sample count");
    ExpressionMatrix out = m;
    for (std::size_t i = 0; i < m.n_samples(); ++i) {
        const double inv = 1.0 / sf.factors[i];
        for (auto& v : out.values.row(i)) v = std::log2(v * inv + 1.0);
    }
    return out;
}

std::vector<double> benjamini_hochberg(const std::vector<double>& p_values) {
    const std::size_t n = p_values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return p_values[a] < p_values[b]; });
    std::vector<double> q(n, 0.0);
    double running = 1.0;
    for (std::size_t k = n; k-- > 0;) {
        const double adj = p_values[order[k]] * static_cast<double>(n) /
                           static_cast<double>(k + 1);
        running = std::min(running, std::min(adj, 1.0));
        q[order[k]] = running;
    }
    return q;
}

DeResult differential_expression(const ExpressionMatrix& transformed,
                                 const std::vector<int>& group_labels,
                                 const PreprocessConfig& cfg) {
    const std::size_t n = transformed.n_samples();
    const std::size_t f = transformed.n_features();
    if (group_labels.size() != n)
        throw DataError("group label count does not match sample count");
    std::size_t n0 = 0, n1 = 0;
    for (int g : group_labels) {
        if (g == 0) ++n0;
        else if (g == 1) ++n1;
        else throw DataError("group labels must be 0 or 1");
    }
    if (n0 < 2 || n1 < 2)
        throw DataError("differential expression needs >= 2 samples per group");

    DeResult out;
    out.mask.assign(f, false);
    out.table.resize(f);
    std::vector<double> p_values(f);

    for (std::size_t j = 0; j < f; ++j) {
        double s0 = 0, s1 = 0, ss0 = 0, ss1 = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const double v = transformed.values.at(i, j);
            if (group_labels[i] == 0) { s0 += v; ss0 += v * v; }
            else { s1 += v; ss1 += v * v; }
        }
        const double m0 = s0 / static_cast<double>(n0);
        const double m1 = s1 / static_cast<double>(n1);
        // Unbiased variances, clamped at zero against rounding.
        const double v0 = std::max(0.0, (ss0 - static_cast<double>(n0) * m0 * m0) /
                                            static_cast<double>(n0 - 1));
        const double v1 = std::max(0.0, (ss1 - static_cast<double>(n1) * m1 * m1) /
                                            static_cast<double>(n1 - 1));
        const double se2 = v0 / static_cast<double>(n0) + v1 / static_cast<double>(n1);

        double p;
        if (se2 <= 0.0) {
            p = (m0 == m1) ? 1.0 : 0.0;
        } else {
            const double t = (m1 - m0) / std::sqrt(se2);
            const double a = v0 / static_cast<double>(n0);
            const double b = v1 / static_cast<double>(n1);
            const double df = (a + b) * (a + b) /
                              (a * a / static_cast<double>(n0 - 1) +
                               b * b / static_cast<double>(n1 - 1));
            const boost::math::students_t dist(df);
            p = 2.0 * boost::math::cdf(dist, -std::abs(t));
        }
        out.table[j] = DeRow{j, m1 - m0, p, 1.0};
        p_values[j] = p;
    }

    const auto q = benjamini_hochberg(p_values);
    for (std::size_t j = 0; j < f; ++j) {
        out.table[j].q = q[j];
        out.mask[j] = (q[j] <= cfg.de_fdr) &&
                      (std::abs(out.table[j].effect) >= cfg.de_min_abs_effect);
    }
    return out;
}

} // namespace omicsel
