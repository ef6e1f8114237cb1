#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace omicsel {

// Row-major dense matrix. Rows are samples, columns are features
// throughout the toolkit.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double& at(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double at(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }

    std::vector<double> column(std::size_t c) const;

    Matrix select_rows(const std::vector<std::size_t>& idx) const;
    Matrix select_cols(const std::vector<std::size_t>& idx) const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

// Sample-by-feature matrix of non-negative finite reals with identifiers.
struct ExpressionMatrix {
    Matrix values;
    std::vector<std::string> sample_ids;
    std::vector<std::string> feature_ids;

    std::size_t n_samples() const { return values.rows(); }
    std::size_t n_features() const { return values.cols(); }

    // Throws DataError when an invariant is violated (shape mismatch,
    // duplicate ids, negative or non-finite entry).
    void validate() const;

    ExpressionMatrix select_samples(const std::vector<std::size_t>& idx) const;
    ExpressionMatrix select_features(const std::vector<std::size_t>& idx) const;
};

struct LabeledDataset {
    ExpressionMatrix matrix;
    std::vector<int> labels;             // class index per sample
    std::vector<std::string> class_names;

    std::size_t n_samples() const { return matrix.n_samples(); }
    std::size_t n_features() const { return matrix.n_features(); }
    std::size_t n_classes() const { return class_names.size(); }

    void validate() const;

    LabeledDataset select_samples(const std::vector<std::size_t>& idx) const;
    LabeledDataset select_features(const std::vector<std::size_t>& idx) const;
};

struct FoldPlan {
    std::size_t k = 0;
    std::vector<std::size_t> assignments; // fold index per sample
    std::uint64_t seed = 0;

    std::vector<std::size_t> fold_indices(std::size_t fold) const;
    std::vector<std::size_t> complement_indices(std::size_t fold) const;
};

struct SyntheticSpec {
    std::size_t n_samples = 0;
    std::size_t n_features = 0;
    std::size_t n_informative = 0;
    std::size_t n_classes = 2;
    double class_separation = 1.0;
    double noise_std = 1.0;
    std::uint64_t seed = 0;

    void validate() const; // throws UsageError on invariant violation
};

std::vector<std::size_t> class_counts(const std::vector<int>& labels, std::size_t n_classes);

} // namespace omicsel
