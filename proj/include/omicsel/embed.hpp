#pragma once

#include "omicsel/matrix.hpp"
#include "omicsel/models.hpp" // Metric

#include <string>
#include <vector>

namespace omicsel {

struct Embedding {
    Matrix coordinates;                 // n_samples x d
    Matrix components;                  // d x n_features, orthonormal rows
    std::vector<double> explained_variance_ratio; // length d, non-increasing
};

struct WeightedEdge {
    std::size_t source = 0;
    std::size_t target = 0;
    double weight = 0.0; // in (0, 1]
};

struct WeightedGraph {
    std::vector<std::string> nodes;
    std::vector<WeightedEdge> edges; // symmetrized, source < target

    // Total symmetrized edge weight incident to each node (the connectivity
    // statistic reported by the embed command).
    std::vector<double> node_strengths() const;
};

// Economy SVD of the column-centered matrix. Sign convention: each
// component's largest-magnitude loading is positive.
Embedding pca(const ExpressionMatrix& m, std::size_t d);

// Directed k-nearest-neighbor edges with locally scaled exponential weights,
// fuzzy-union symmetrized (w + w' - w*w'). Distance ties prefer the lower
// sample index.
WeightedGraph knn_graph(const ExpressionMatrix& m, std::size_t k, Metric metric);

// SVG 1.1 scatter of the first two embedding coordinates, one fill color per
// class. Byte-deterministic for fixed inputs.
void render_scatter(const Embedding& embedding, const std::vector<int>& labels,
                    const std::vector<std::string>& class_names,
                    const std::string& path);

void write_graph_dot(const WeightedGraph& graph, const std::string& path);
void write_graph_csv(const WeightedGraph& graph, const std::string& path);
void write_embedding_csv(const Embedding& embedding,
                         const std::vector<std::string>& sample_ids,
                         const std::string& path);

} // namespace omicsel
