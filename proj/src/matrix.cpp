#include "omicsel/matrix.hpp"

#include "omicsel/error.hpp"

#include <cmath>
#include <unordered_set>

namespace omicsel {

std::vector<double> Matrix::column(std::size_t c) const {
    std::vector<double> out(rows_);
    for (std::size_t r = 0; r < rows_; ++r) out[r] = at(r, c);
    return out;
}

Matrix Matrix::select_rows(const std::vector<std::size_t>& idx) const {
    Matrix out(idx.size(), cols_);
    for (std::size_t r = 0; r < idx.size(); ++r) {
        const auto src = row(idx[r]);
        std::copy(src.begin(), src.end(), out.row(r).begin());
    }
    return out;
}

Matrix Matrix::select_cols(const std::vector<std::size_t>& idx) const {
    Matrix out(rows_, idx.size());
    for (std::size_t r = 0; r < rows_; ++r) {
        const auto src = row(r);
        auto dst = out.row(r);
        for (std::size_t c = 0; c < idx.size(); ++c) dst[c] = src[idx[c]];
    }
    return out;
}

namespace {

void check_unique(const std::vector<std::string>& ids, const char* what) {
    std::unordered_set<std::string_view> seen;
    for (const auto& id : ids) {
        if (!seen.insert(id).second)
            throw DataError(std::string("duplicate ") + what + " id: " + id);
    }
}

} // namespace

void ExpressionMatrix::validate() const {
    if (values.rows() != sample_ids.size())
        throw DataError("row count does not match number of sample ids");
    if (values.cols() != feature_ids.size())
        throw DataError("column count does not match number of feature ids");
    check_unique(sample_ids, "sample");
    check_unique(feature_ids, "feature");
    for (std::size_t r = 0; r < values.rows(); ++r) {
        for (double v : values.row(r)) {
            if (!std::isfinite(v))
                throw DataError("non-finite value in sample " + sample_ids[r]);
            if (v < 0.0)
                throw DataError("negative value in sample " + sample_ids[r]);
        }
    }
}

ExpressionMatrix ExpressionMatrix::select_samples(const std::vector<std::size_t>& idx) const {
    ExpressionMatrix out;
    out.values = values.select_rows(idx);
    out.sample_ids.reserve(idx.size());
    for (auto i : idx) out.sample_ids.push_back(sample_ids[i]);
    out.feature_ids = feature_ids;
    return out;
}

ExpressionMatrix ExpressionMatrix::select_features(const std::vector<std::size_t>& idx) const {
    ExpressionMatrix out;
    out.values = values.select_cols(idx);
    out.sample_ids = sample_ids;
    out.feature_ids.reserve(idx.size());
    for (auto i : idx) out.feature_ids.push_back(feature_ids[i]);
    return out;
}

void LabeledDataset::validate() const {
    matrix.validate();
    if (labels.size() != matrix.n_samples())
        throw DataError("label count does not match sample count");
    std::vector<bool> seen(class_names.size(), false);
    for (int lab : labels) {
        if (lab < 0 || static_cast<std::size_t>(lab) >= class_names.size())
            throw DataError("label index out of range: " + std::to_string(lab));
        seen[static_cast<std::size_t>(lab)] = true;
    }
    for (std::size_t c = 0; c < seen.size(); ++c)
        if (!seen[c])
            throw DataError("class has no samples: " + class_names[c]);
}

LabeledDataset LabeledDataset::select_samples(const std::vector<std::size_t>& idx) const {
    LabeledDataset out;
    out.matrix = matrix.select_samples(idx);
    out.labels.reserve(idx.size());
    for (auto i : idx) out.labels.push_back(labels[i]);
    out.class_names = class_names;
    return out;
}

LabeledDataset LabeledDataset::select_features(const std::vector<std::size_t>& idx) const {
    LabeledDataset out;
    out.matrix = matrix.select_features(idx);
    out.labels = labels;
    out.class_names = class_names;
    return out;
}

std::vector<std::size_t> FoldPlan::fold_indices(std::size_t fold) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < assignments.size(); ++i)
        if (assignments[i] == fold) out.push_back(i);
    return out;
}

std::vector<std::size_t> FoldPlan::complement_indices(std::size_t fold) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < assignments.size(); ++i)
        if (assignments[i] != fold) out.push_back(i);
    return out;
}

void SyntheticSpec::validate() const {
    if (n_informative == 0 || n_informative > n_features)
        throw UsageError("synthetic spec requires 0 < n_informative <= n_features");
    if (n_classes < 2)
        throw UsageError("synthetic spec requires n_classes >= 2");
    if (n_samples < 2 * n_classes)
        throw UsageError("synthetic spec requires n_samples >= 2 * n_classes");
    if (!(class_separation > 0.0) || !(noise_std > 0.0))
        throw UsageError("synthetic spec requires positive class_separation and noise_std");
}

std::vector<std::size_t> class_counts(const std::vector<int>& labels, std::size_t n_classes) {
    std::vector<std::size_t> counts(n_classes, 0);
    for (int lab : labels) counts[static_cast<std::size_t>(lab)]++;
    return counts;
}

} // namespace omicsel
