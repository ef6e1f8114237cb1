#pragma once

#include "omicsel/matrix.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace omicsel {

// TSV layout: tab-separated, UTF-8, header row. Column 1 header is literally
// "sample_id", one designated label column, every other column a numeric
// feature. Missing values are a hard error.
LabeledDataset load_tsv(const std::string& path, const std::string& label_column);
void write_tsv(const LabeledDataset& ds, const std::string& path,
               const std::string& label_column);

// Per-class test counts are round(class_count * test_fraction) clamped to
// [1, class_count - 1]; assignment shuffles within class by seed.
std::pair<LabeledDataset, LabeledDataset>
stratified_split(const LabeledDataset& ds, double test_fraction, std::uint64_t seed);

// Index-level variant used where callers need the raw partition.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>>
stratified_split_indices(const std::vector<int>& labels, std::size_t n_classes,
                         double test_fraction, std::uint64_t seed);

FoldPlan stratified_kfold(const std::vector<int>& labels, std::size_t n_classes,
                          std::size_t k, std::uint64_t seed);

// Gaussian class blobs on a random subset of informative columns, remaining
// columns class-independent noise. The whole matrix is shifted by a constant
// so every entry is >= 0.
std::pair<LabeledDataset, std::vector<bool>> generate_synthetic(const SyntheticSpec& spec);

} // namespace omicsel
