#include "omicsel/embed.hpp"

#include "omicsel/error.hpp"
#include "omicsel/kernels.hpp"
#include "omicsel/preprocess.hpp" // pearson

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

namespace omicsel {

namespace {

std::string fmt(const char* pattern, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, pattern, v);
    return buf;
}

} // namespace

Embedding pca(const ExpressionMatrix& m, std::size_t d) {
    const std::size_t n = m.n_samples();
    const std::size_t f = m.n_features();
    if (n < 2)
        throw DataError("pca requires at least 2 samples");
    const std::size_t d_max = std::min(n - 1, f);
    if (d < 1 || d > d_max)
        throw UsageError("pca dimension out of range: " + std::to_string(d) +
                         " (max " + std::to_string(d_max) + ")");

    Eigen::MatrixXd centered(n, f);
    for (std::size_t j = 0; j < f; ++j) {
        double mean = 0.0;
        for (std::size_t i = 0; i < n; ++i) mean += m.values.at(i, j);
        mean /= static_cast<double>(n);
        for (std::size_t i = 0; i < n; ++i)
            centered(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                m.values.at(i, j) - mean;
    }

    const double total_variance = centered.squaredNorm();
    if (!(total_variance > 0.0))
        throw DataError("pca: matrix has zero total variance");

    Eigen::BDCSVD<Eigen::MatrixXd> svd(centered,
                                       Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();

    Embedding out;
    out.coordinates = Matrix(n, d);
    out.components = Matrix(d, f);
    out.explained_variance_ratio.resize(d);

    for (std::size_t comp = 0; comp < d; ++comp) {
        // Largest-magnitude loading positive.
        Eigen::Index arg = 0;
        svd.matrixV().col(static_cast<Eigen::Index>(comp)).cwiseAbs().maxCoeff(&arg);
        const double sign =
            svd.matrixV()(arg, static_cast<Eigen::Index>(comp)) < 0.0 ? -1.0 : 1.0;
        for (std::size_t j = 0; j < f; ++j)
            out.components.at(comp, j) =
                sign * svd.matrixV()(static_cast<Eigen::Index>(j),
                                     static_cast<Eigen::Index>(comp));
        for (std::size_t i = 0; i < n; ++i)
            out.coordinates.at(i, comp) =
                sign * svd.matrixU()(static_cast<Eigen::Index>(i),
                                     static_cast<Eigen::Index>(comp)) *
                sv(static_cast<Eigen::Index>(comp));
        const double s = sv(static_cast<Eigen::Index>(comp));
        out.explained_variance_ratio[comp] = s * s / total_variance;
    }
    return out;
}

WeightedGraph knn_graph(const ExpressionMatrix& m, std::size_t k, Metric metric) {
    const std::size_t n = m.n_samples();
    const std::size_t f = m.n_features();
    if (k < 1 || k >= n)
        throw UsageError("knn_graph requires 1 <= k < n_samples");

    WeightedGraph graph;
    graph.nodes = m.sample_ids;

    // Directed weights held densely per source; n is sample-scale (small).
    std::vector<std::vector<double>> directed(n, std::vector<double>(n, 0.0));
    std::vector<std::pair<double, std::size_t>> dist;
    dist.reserve(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
        dist.clear();
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            const double dd =
                metric == Metric::euclidean
                    ? std::sqrt(kernels::squared_distance(m.values.row(i).data(),
                                                          m.values.row(j).data(), f))
                    : 1.0 - pearson(m.values.row(i).data(), m.values.row(j).data(), f);
            dist.emplace_back(dd, j);
        }
        std::sort(dist.begin(), dist.end()); // ties by lower sample index
        const double d_min = dist[0].first;
        double scale = 0.0;
        for (std::size_t t = 0; t < k; ++t) scale += dist[t].first - d_min;
        scale = std::max(scale / static_cast<double>(k), 1e-12);
        for (std::size_t t = 0; t < k; ++t)
            directed[i][dist[t].second] = std::exp(-(dist[t].first - d_min) / scale);
    }

    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double a = directed[i][j];
            const double b = directed[j][i];
            const double w = a + b - a * b; // fuzzy union
            if (w > 0.0) graph.edges.push_back(WeightedEdge{i, j, w});
        }
    }
    return graph;
}

std::vector<double> WeightedGraph::node_strengths() const {
    std::vector<double> strengths(nodes.size(), 0.0);
    for (const auto& e : edges) {
        strengths[e.source] += e.weight;
        strengths[e.target] += e.weight;
    }
    return strengths;
}

void render_scatter(const Embedding& embedding, const std::vector<int>& labels,
                    const std::vector<std::string>& class_names,
                    const std::string& path) {
    if (embedding.coordinates.cols() < 2)
        throw UsageError("render_scatter requires an embedding with d >= 2");
    const std::size_t n = embedding.coordinates.rows();
    if (labels.size() != n)
        throw DataError("render_scatter: label count does not match coordinates");

    static const char* palette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                                    "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
                                    "#bcbd22", "#17becf"};
    constexpr std::size_t palette_size = sizeof(palette) / sizeof(palette[0]);

    double min_x = 0, max_x = 0, min_y = 0, max_y = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = embedding.coordinates.at(i, 0);
        const double y = embedding.coordinates.at(i, 1);
        if (i == 0) { min_x = max_x = x; min_y = max_y = y; }
        min_x = std::min(min_x, x); max_x = std::max(max_x, x);
        min_y = std::min(min_y, y); max_y = std::max(max_y, y);
    }
    const double span_x = std::max(max_x - min_x, 1e-9);
    const double span_y = std::max(max_y - min_y, 1e-9);
    constexpr double plot = 520.0, margin = 40.0, legend_w = 150.0;
    const double width = plot + 2 * margin + legend_w;
    const double height = plot + 2 * margin;
    auto sx = [&](double x) { return margin + (x - min_x) / span_x * plot; };
    auto sy = [&](double y) { return margin + (max_y - y) / span_y * plot; };

    std::string svg;
    svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" +
           fmt("%.0f", width) + "\" height=\"" + fmt("%.0f", height) + "\">\n";
    svg += "<rect x=\"0\" y=\"0\" width=\"" + fmt("%.0f", width) + "\" height=\"" +
           fmt("%.0f", height) + "\" fill=\"white\"/>\n";
    for (std::size_t i = 0; i < n; ++i) {
        const char* color =
            palette[static_cast<std::size_t>(labels[i]) % palette_size];
        svg += "<circle cx=\"" + fmt("%.3f", sx(embedding.coordinates.at(i, 0))) +
               "\" cy=\"" + fmt("%.3f", sy(embedding.coordinates.at(i, 1))) +
               "\" r=\"4\" fill=\"" + color + "\" fill-opacity=\"0.8\"/>\n";
    }
    // Legend swatches are rects so point circles stay countable.
    for (std::size_t c = 0; c < class_names.size(); ++c) {
        const double y = margin + 18.0 * static_cast<double>(c);
        svg += "<rect x=\"" + fmt("%.1f", plot + 2 * margin) + "\" y=\"" +
               fmt("%.1f", y) + "\" width=\"12\" height=\"12\" fill=\"" +
               palette[c % palette_size] + "\"/>\n";
        svg += "<text x=\"" + fmt("%.1f", plot + 2 * margin + 16.0) + "\" y=\"" +
               fmt("%.1f", y + 10.0) +
               "\" font-family=\"sans-serif\" font-size=\"12\">" + class_names[c] +
               "</text>\n";
    }
    svg += "</svg>\n";

    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw DataError("cannot write file: " + path);
    out << svg;
    if (!out)
        throw DataError("write failed: " + path);
}

void write_graph_dot(const WeightedGraph& graph, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw DataError("cannot write file: " + path);
    out << "graph knn {\n";
    out << "  node [shape=point];\n";
    for (const auto& id : graph.nodes) out << "  \"" << id << "\";\n";
    for (const auto& e : graph.edges) {
        out << "  \"" << graph.nodes[e.source] << "\" -- \"" << graph.nodes[e.target]
            << "\" [weight=" << fmt("%.6f", e.weight)
            << ", penwidth=" << fmt("%.3f", 0.5 + 3.0 * e.weight) << "];\n";
    }
    out << "}\n";
    if (!out)
        throw DataError("write failed: " + path);
}

void write_graph_csv(const WeightedGraph& graph, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw DataError("cannot write file: " + path);
    out << "source_id,target_id,weight\n";
    for (const auto& e : graph.edges)
        out << graph.nodes[e.source] << ',' << graph.nodes[e.target] << ','
            << fmt("%.6f", e.weight) << '\n';
    if (!out)
        throw DataError("write failed: " + path);
}

void write_embedding_csv(const Embedding& embedding,
                         const std::vector<std::string>& sample_ids,
                         const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw DataError("cannot write file: " + path);
    out << "sample_id";
    for (std::size_t c = 0; c < embedding.coordinates.cols(); ++c)
        out << ",pc" << (c + 1);
    out << '\n';
    char buf[40];
    for (std::size_t i = 0; i < embedding.coordinates.rows(); ++i) {
        out << sample_ids[i];
        for (std::size_t c = 0; c < embedding.coordinates.cols(); ++c) {
            std::snprintf(buf, sizeof buf, "%.17g", embedding.coordinates.at(i, c));
            out << ',' << buf;
        }
        out << '\n';
    }
    if (!out)
        throw DataError("write failed: " + path);
}

} // namespace omicsel
