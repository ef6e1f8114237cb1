#include "omicsel/dataset.hpp"

#include "omicsel/error.hpp"
#include "omicsel/rng.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_map>

namespace omicsel {

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find('\t', start);
        if (pos == std::string::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return fields;
}

double parse_cell(const std::string& cell, std::size_t row_1based, const std::string& col_name) {
    double v = 0.0;
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    const auto res = std::from_chars(first, last, v, std::chars_format::general);
    if (res.ec != std::errc{} || res.ptr != last)
        throw DataError("non-numeric cell at row " + std::to_string(row_1based) +
                        ", column '" + col_name + "': '" + cell + "'");
    if (!std::isfinite(v))
        throw DataError("non-finite cell at row " + std::to_string(row_1based) +
                        ", column '" + col_name + "'");
    if (v < 0.0)
        throw DataError("negative cell at row " + std::to_string(row_1based) +
                        ", column '" + col_name + "': '" + cell + "'");
    return v;
}

} // namespace

LabeledDataset load_tsv(const std::string& path, const std::string& label_column) {
    std::ifstream in(path);
    if (!in)
        throw DataError("cannot open file: " + path);

    std::string line;
    if (!std::getline(in, line))
        throw DataError("empty file: " + path);
    if (!line.empty() && line.back() == '\r') line.pop_back();

    const auto header = split_tabs(line);
    if (header.empty() || header[0] != "sample_id")
        throw DataError("first header column must be 'sample_id' in " + path);

    std::size_t label_col = header.size();
    std::vector<std::string> feature_ids;
    std::vector<std::size_t> feature_cols;
    {
        std::unordered_map<std::string, std::size_t> seen;
        for (std::size_t c = 0; c < header.size(); ++c) {
            if (seen.count(header[c]))
                throw DataError("duplicate header field '" + header[c] + "' in " + path);
            seen[header[c]] = c;
            if (c == 0) continue;
            if (header[c] == label_column) {
                label_col = c;
            } else {
                feature_ids.push_back(header[c]);
                feature_cols.push_back(c);
            }
        }
    }
    if (label_col == header.size())
        throw DataError("label column '" + label_column + "' not found in " + path);
    if (feature_ids.empty())
        throw DataError("no feature columns in " + path);

    std::vector<std::string> sample_ids;
    std::vector<std::string> class_names;
    std::unordered_map<std::string, int> class_index;
    std::vector<int> labels;
    std::vector<double> cells;

    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto fields = split_tabs(line);
        if (fields.size() != header.size())
            throw DataError("row " + std::to_string(row) + " has " +
                            std::to_string(fields.size()) + " fields, expected " +
                            std::to_string(header.size()) + " in " + path);
        sample_ids.push_back(fields[0]);
        const std::string& label = fields[label_col];
        auto it = class_index.find(label);
        if (it == class_index.end()) {
            // First-appearance encoding.
            it = class_index.emplace(label, static_cast<int>(class_names.size())).first;
            class_names.push_back(label);
        }
        labels.push_back(it->second);
        for (std::size_t c : feature_cols)
            cells.push_back(parse_cell(fields[c], row, header[c]));
    }
    if (sample_ids.empty())
        throw DataError("no data rows in " + path);

    LabeledDataset ds;
    Matrix m(sample_ids.size(), feature_ids.size());
    std::copy(cells.begin(), cells.end(), m.data());
    ds.matrix = ExpressionMatrix{std::move(m), std::move(sample_ids), std::move(feature_ids)};
    ds.labels = std::move(labels);
    ds.class_names = std::move(class_names);
    ds.validate();
    return ds;
}

void write_tsv(const LabeledDataset& ds, const std::string& path,
               const std::string& label_column) {
    std::ofstream out(path);
    if (!out)
        throw DataError("cannot write file: " + path);
    out << "sample_id\t" << label_column;
    for (const auto& f : ds.matrix.feature_ids) out << '\t' << f;
    out << '\n';
    char buf[40];
    for (std::size_t r = 0; r < ds.n_samples(); ++r) {
        out << ds.matrix.sample_ids[r] << '\t'
            << ds.class_names[static_cast<std::size_t>(ds.labels[r])];
        for (double v : ds.matrix.values.row(r)) {
            std::snprintf(buf, sizeof buf, "%.17g", v);
            out << '\t' << buf;
        }
        out << '\n';
    }
    if (!out)
        throw DataError("write failed: " + path);
}

std::pair<std::vector<std::size_t>, std::vector<std::size_t>>
stratified_split_indices(const std::vector<int>& labels, std::size_t n_classes,
                         double test_fraction, std::uint64_t seed) {
    if (!(test_fraction > 0.0) || !(test_fraction < 1.0))
        throw UsageError("test_fraction must lie in (0, 1)");
    const auto counts = class_counts(labels, n_classes);
    for (std::size_t c = 0; c < n_classes; ++c)
        if (counts[c] < 2)
            throw DataError("class " + std::to_string(c) +
                            " has fewer than 2 samples; cannot split");

    std::vector<std::vector<std::size_t>> by_class(n_classes);
    for (std::size_t i = 0; i < labels.size(); ++i)
        by_class[static_cast<std::size_t>(labels[i])].push_back(i);

    std::vector<std::size_t> train_idx, test_idx;
    for (std::size_t c = 0; c < n_classes; ++c) {
        auto& members = by_class[c];
        Rng rng(derive_seed(seed, "split:class:" + std::to_string(c)));
        rng.shuffle(members);
        const auto count = counts[c];
        auto want = static_cast<std::size_t>(
            std::llround(static_cast<double>(count) * test_fraction));
        want = std::clamp<std::size_t>(want, 1, count - 1);
        for (std::size_t i = 0; i < members.size(); ++i)
            (i < want ? test_idx : train_idx).push_back(members[i]);
    }
    std::sort(train_idx.begin(), train_idx.end());
    std::sort(test_idx.begin(), test_idx.end());
    return {train_idx, test_idx};
}

std::pair<LabeledDataset, LabeledDataset>
stratified_split(const LabeledDataset& ds, double test_fraction, std::uint64_t seed) {
    const auto [train_idx, test_idx] =
        stratified_split_indices(ds.labels, ds.n_classes(), test_fraction, seed);
    return {ds.select_samples(train_idx), ds.select_samples(test_idx)};
}

FoldPlan stratified_kfold(const std::vector<int>& labels, std::size_t n_classes,
                          std::size_t k, std::uint64_t seed) {
    if (k < 2)
        throw UsageError("fold count must be >= 2");
    const auto counts = class_counts(labels, n_classes);
    for (std::size_t c = 0; c < n_classes; ++c)
        if (counts[c] < k)
            throw DataError("class " + std::to_string(c) + " has " +
                            std::to_string(counts[c]) + " samples, fewer than k=" +
                            std::to_string(k));

    FoldPlan plan;
    plan.k = k;
    plan.seed = seed;
    plan.assignments.assign(labels.size(), 0);
    for (std::size_t c = 0; c < n_classes; ++c) {
        std::vector<std::size_t> members;
        for (std::size_t i = 0; i < labels.size(); ++i)
            if (labels[i] == static_cast<int>(c)) members.push_back(i);
        Rng rng(derive_seed(seed, "kfold:class:" + std::to_string(c)));
        rng.shuffle(members);
        // Round-robin deal; offset by class so leftover samples spread evenly.
        for (std::size_t i = 0; i < members.size(); ++i)
            plan.assignments[members[i]] = (i + c) % k;
    }
    return plan;
}

std::pair<LabeledDataset, std::vector<bool>> generate_synthetic(const SyntheticSpec& spec) {
    spec.validate();

    Rng rng(derive_seed(spec.seed, "synthetic"));
    const auto informative = rng.sample_indices(spec.n_features, spec.n_informative);
    std::vector<bool> mask(spec.n_features, false);
    for (auto j : informative) mask[j] = true;

    // Class means on the informative columns: independent draws scaled by the
    // requested separation.
    Matrix means(spec.n_classes, spec.n_informative);
    for (std::size_t c = 0; c < spec.n_classes; ++c)
        for (std::size_t j = 0; j < spec.n_informative; ++j)
            means.at(c, j) = spec.class_separation * rng.gaussian();

    // Balanced labels: sample i belongs to class i mod n_classes, then the
    // order is shuffled.
    std::vector<int> labels(spec.n_samples);
    for (std::size_t i = 0; i < spec.n_samples; ++i)
        labels[i] = static_cast<int>(i % spec.n_classes);
    rng.shuffle(labels);

    Matrix values(spec.n_samples, spec.n_features);
    double min_value = 0.0;
    for (std::size_t i = 0; i < spec.n_samples; ++i) {
        const auto c = static_cast<std::size_t>(labels[i]);
        std::size_t inf_pos = 0;
        for (std::size_t j = 0; j < spec.n_features; ++j) {
            double v = spec.noise_std * rng.gaussian();
            if (mask[j]) v += means.at(c, inf_pos++);
            values.at(i, j) = v;
            min_value = std::min(min_value, v);
        }
    }
    // Shift, not clip: preserves class geometry while meeting non-negativity.
    if (min_value < 0.0) {
        const double shift = -min_value;
        for (std::size_t i = 0; i < spec.n_samples; ++i)
            for (auto& v : values.row(i)) v += shift;
    }

    LabeledDataset ds;
    ds.matrix.values = std::move(values);
    ds.matrix.sample_ids.reserve(spec.n_samples);
    for (std::size_t i = 0; i < spec.n_samples; ++i)
        ds.matrix.sample_ids.push_back("S" + std::to_string(i));
    ds.matrix.feature_ids.reserve(spec.n_features);
    for (std::size_t j = 0; j < spec.n_features; ++j)
        ds.matrix.feature_ids.push_back("F" + std::to_string(j));
    ds.labels = std::move(labels);
    ds.class_names.reserve(spec.n_classes);
    for (std::size_t c = 0; c < spec.n_classes; ++c)
        ds.class_names.push_back("C" + std::to_string(c));
    return {std::move(ds), std::move(mask)};
}

} // namespace omicsel
