// Linear-family training: L2-regularized hinge SVC (one-vs-rest beyond two
// classes) and logistic regression (binary sigmoid / multinomial softmax).
// Both optimizers are deterministic full-batch descent with a backtracking
// line search that only ever accepts improving steps, so the recorded
// objective traces are non-increasing.
#include "omicsel/error.hpp"
#include "omicsel/kernels.hpp"
#include "omicsel/models.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace omicsel {

namespace {

constexpr double kArmijo = 1e-4;
constexpr int kMaxHalvings = 60;

struct Standardizer {
    std::vector<double> mean;
    std::vector<double> scale;

    static Standardizer fit(const Matrix& x) {
        const std::size_t n = x.rows();
        const std::size_t d = x.cols();
        Standardizer s;
        s.mean.assign(d, 0.0);
        s.scale.assign(d, 1.0);
        for (std::size_t i = 0; i < n; ++i)
            kernels::axpy(1.0, x.row(i).data(), s.mean.data(), d);
        for (auto& v : s.mean) v /= static_cast<double>(n);
        std::vector<double> var(d, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            const auto row = x.row(i);
            for (std::size_t j = 0; j < d; ++j) {
                const double delta = row[j] - s.mean[j];
                var[j] += delta * delta;
            }
        }
        for (std::size_t j = 0; j < d; ++j) {
            var[j] /= static_cast<double>(n);
            // Constant features standardize to all-zero columns.
            s.scale[j] = var[j] > 0.0 ? std::sqrt(var[j]) : 1.0;
        }
        return s;
    }

    Matrix apply(const Matrix& x) const {
        Matrix out(x.rows(), x.cols());
        for (std::size_t i = 0; i < x.rows(); ++i) {
            const auto src = x.row(i);
            auto dst = out.row(i);
            for (std::size_t j = 0; j < x.cols(); ++j)
                dst[j] = (src[j] - mean[j]) / scale[j];
        }
        return out;
    }
};

double softplus(double s) {
    return std::max(s, 0.0) + std::log1p(std::exp(-std::abs(s)));
}

struct BinaryFit {
    std::vector<double> w;
    double b = 0.0;
    std::vector<double> trace;
    bool converged = false;
};

// Hinge subgradient descent with adaptive backtracking. The candidate
// objective along the ray is evaluated from precomputed directional margins,
// so each backtracking probe costs O(n) rather than O(n*d).
BinaryFit solve_svc(const Matrix& x, const std::vector<double>& y, double c,
                    int max_iters, double tol) {
    const std::size_t n = x.rows();
    const std::size_t d = x.cols();

    BinaryFit fit;
    fit.w.assign(d, 0.0);
    fit.b = 0.0;

    std::vector<double> margins(n), dir_margin(n), grad(d);
    double objective = c * static_cast<double>(n); // w = 0, all margins at 0
    fit.trace.push_back(objective);

    double eta = 1.0;
    int plateau = 0;
    for (int iter = 0; iter < max_iters; ++iter) {
        for (std::size_t i = 0; i < n; ++i)
            margins[i] = y[i] * (kernels::dot(x.row(i).data(), fit.w.data(), d) + fit.b);

        std::copy(fit.w.begin(), fit.w.end(), grad.begin());
        double grad_b = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (margins[i] < 1.0) {
                kernels::axpy(-c * y[i], x.row(i).data(), grad.data(), d);
                grad_b -= c * y[i];
            }
        }
        const double grad_sq = kernels::sum_squares(grad.data(), d) + grad_b * grad_b;
        if (grad_sq <= tol * tol) {
            fit.converged = true;
            break;
        }

        for (std::size_t i = 0; i < n; ++i)
            dir_margin[i] = y[i] * (kernels::dot(x.row(i).data(), grad.data(), d) + grad_b);
        const double ww = kernels::sum_squares(fit.w.data(), d);
        const double wg = kernels::dot(fit.w.data(), grad.data(), d);
        const double gg = grad_sq - grad_b * grad_b;

        auto objective_at = [&](double step) {
            double hinge = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                hinge += std::max(0.0, 1.0 - (margins[i] - step * dir_margin[i]));
            return 0.5 * (ww - 2.0 * step * wg + step * step * gg) + c * hinge;
        };

        bool accepted = false;
        for (int h = 0; h < kMaxHalvings; ++h) {
            const double candidate = objective_at(eta);
            if (candidate <= objective - kArmijo * eta * grad_sq) {
                kernels::axpy(-eta, grad.data(), fit.w.data(), d);
                fit.b -= eta * grad_b;
                const double previous = objective;
                objective = candidate;
                fit.trace.push_back(objective);
                // Converged when relative progress stays below tol.
                plateau = (previous - objective <= tol * (std::abs(objective) + 1e-12))
                              ? plateau + 1
                              : 0;
                accepted = true;
                break;
            }
            eta *= 0.5;
        }
        if (!accepted || plateau >= 3) {
            // A stalled line search means no Armijo-improving step remains at
            // any resolution: the iterate sits at the piecewise-linear
            // minimum. Either way the run counts as converged.
            fit.converged = true;
            break;
        }
        eta = std::min(eta * 2.0, 1e8);
    }
    return fit;
}

BinaryFit solve_logreg_binary(const Matrix& x, const std::vector<int>& y01, double l2,
                              int max_iters, double tol) {
    const std::size_t n = x.rows();
    const std::size_t d = x.cols();

    BinaryFit fit;
    fit.w.assign(d, 0.0);
    fit.b = 0.0;

    std::vector<double> scores(n, 0.0), dir_scores(n), grad(d);
    double objective =
        linear_detail::logreg_binary_objective(x, y01, fit.w, fit.b, l2);
    fit.trace.push_back(objective);

    double eta = 1.0;
    for (int iter = 0; iter < max_iters; ++iter) {
        for (std::size_t i = 0; i < n; ++i)
            scores[i] = kernels::dot(x.row(i).data(), fit.w.data(), d) + fit.b;

        std::fill(grad.begin(), grad.end(), 0.0);
        double grad_b = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double p = 1.0 / (1.0 + std::exp(-scores[i]));
            const double coef = p - static_cast<double>(y01[i]);
            kernels::axpy(coef, x.row(i).data(), grad.data(), d);
            grad_b += coef;
        }
        kernels::axpy(l2, fit.w.data(), grad.data(), d);
        const double grad_sq = kernels::sum_squares(grad.data(), d) + grad_b * grad_b;
        if (std::sqrt(grad_sq) <= tol) {
            fit.converged = true;
            break;
        }

        for (std::size_t i = 0; i < n; ++i)
            dir_scores[i] = kernels::dot(x.row(i).data(), grad.data(), d) + grad_b;
        const double ww = kernels::sum_squares(fit.w.data(), d);
        const double wg = kernels::dot(fit.w.data(), grad.data(), d);
        const double gg = grad_sq - grad_b * grad_b;

        auto objective_at = [&](double step) {
            double loss = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const double s = scores[i] - step * dir_scores[i];
                loss += softplus(s) - static_cast<double>(y01[i]) * s;
            }
            return loss + 0.5 * l2 * (ww - 2.0 * step * wg + step * step * gg);
        };

        bool accepted = false;
        for (int h = 0; h < kMaxHalvings; ++h) {
            const double candidate = objective_at(eta);
            if (candidate <= objective - kArmijo * eta * grad_sq) {
                kernels::axpy(-eta, grad.data(), fit.w.data(), d);
                fit.b -= eta * grad_b;
                objective = candidate;
                fit.trace.push_back(objective);
                accepted = true;
                break;
            }
            eta *= 0.5;
        }
        if (!accepted) break;
        eta = std::min(eta * 1.25, 1e8);
    }
    return fit;
}

struct MultiFit {
    Matrix w;
    std::vector<double> b;
    std::vector<double> trace;
    bool converged = false;
};

MultiFit solve_logreg_multi(const Matrix& x, const std::vector<int>& y,
                            std::size_t n_classes, double l2, int max_iters,
                            double tol) {
    const std::size_t n = x.rows();
    const std::size_t d = x.cols();

    MultiFit fit;
    fit.w = Matrix(n_classes, d);
    fit.b.assign(n_classes, 0.0);

    Matrix grad_w(n_classes, d);
    std::vector<double> grad_b(n_classes);
    Matrix scores(n, n_classes), dir_scores(n, n_classes);
    std::vector<double> probs(n_classes);

    double objective =
        linear_detail::logreg_multi_objective(x, y, n_classes, fit.w, fit.b, l2);
    fit.trace.push_back(objective);

    auto row_logsumexp = [&](std::span<const double> s) {
        const double m = *std::max_element(s.begin(), s.end());
        double acc = 0.0;
        for (double v : s) acc += std::exp(v - m);
        return m + std::log(acc);
    };

    double eta = 1.0;
    for (int iter = 0; iter < max_iters; ++iter) {
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t cc = 0; cc < n_classes; ++cc)
                scores.at(i, cc) =
                    kernels::dot(x.row(i).data(), fit.w.row(cc).data(), d) + fit.b[cc];

        for (std::size_t cc = 0; cc < n_classes; ++cc) {
            auto row = grad_w.row(cc);
            std::copy(fit.w.row(cc).begin(), fit.w.row(cc).end(), row.begin());
            for (auto& v : row) v *= l2;
            grad_b[cc] = 0.0;
        }
        for (std::size_t i = 0; i < n; ++i) {
            const auto s = scores.row(i);
            const double lse = row_logsumexp(s);
            for (std::size_t cc = 0; cc < n_classes; ++cc)
                probs[cc] = std::exp(s[cc] - lse);
            for (std::size_t cc = 0; cc < n_classes; ++cc) {
                const double coef =
                    probs[cc] - (static_cast<std::size_t>(y[i]) == cc ? 1.0 : 0.0);
                kernels::axpy(coef, x.row(i).data(), grad_w.row(cc).data(), d);
                grad_b[cc] += coef;
            }
        }
        double grad_sq = 0.0;
        for (std::size_t cc = 0; cc < n_classes; ++cc)
            grad_sq += kernels::sum_squares(grad_w.row(cc).data(), d) +
                       grad_b[cc] * grad_b[cc];
        if (std::sqrt(grad_sq) <= tol) {
            fit.converged = true;
            break;
        }

        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t cc = 0; cc < n_classes; ++cc)
                dir_scores.at(i, cc) =
                    kernels::dot(x.row(i).data(), grad_w.row(cc).data(), d) + grad_b[cc];
        double ww = 0.0, wg = 0.0, gg = 0.0;
        for (std::size_t cc = 0; cc < n_classes; ++cc) {
            ww += kernels::sum_squares(fit.w.row(cc).data(), d);
            wg += kernels::dot(fit.w.row(cc).data(), grad_w.row(cc).data(), d);
            gg += kernels::sum_squares(grad_w.row(cc).data(), d);
        }

        std::vector<double> cand(n_classes);
        auto objective_at = [&](double step) {
            double loss = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t cc = 0; cc < n_classes; ++cc)
                    cand[cc] = scores.at(i, cc) - step * dir_scores.at(i, cc);
                loss += row_logsumexp(cand) - cand[static_cast<std::size_t>(y[i])];
            }
            return loss + 0.5 * l2 * (ww - 2.0 * step * wg + step * step * gg);
        };

        bool accepted = false;
        for (int h = 0; h < kMaxHalvings; ++h) {
            const double candidate = objective_at(eta);
            if (candidate <= objective - kArmijo * eta * grad_sq) {
                for (std::size_t cc = 0; cc < n_classes; ++cc) {
                    kernels::axpy(-eta, grad_w.row(cc).data(), fit.w.row(cc).data(), d);
                    fit.b[cc] -= eta * grad_b[cc];
                }
                objective = candidate;
                fit.trace.push_back(objective);
                accepted = true;
                break;
            }
            eta *= 0.5;
        }
        if (!accepted) break;
        eta = std::min(eta * 1.25, 1e8);
    }
    return fit;
}

} // namespace

namespace linear_detail {

double svc_objective(const Matrix& x, const std::vector<double>& y_pm1,
                     const std::vector<double>& w, double b, double c) {
    const std::size_t n = x.rows();
    const std::size_t d = x.cols();
    double hinge = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double margin = y_pm1[i] * (kernels::dot(x.row(i).data(), w.data(), d) + b);
        hinge += std::max(0.0, 1.0 - margin);
    }
    return 0.5 * kernels::sum_squares(w.data(), d) + c * hinge;
}

double logreg_binary_objective(const Matrix& x, const std::vector<int>& y01,
                               const std::vector<double>& w, double b, double l2) {
    const std::size_t n = x.rows();
    const std::size_t d = x.cols();
    double loss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double s = kernels::dot(x.row(i).data(), w.data(), d) + b;
        loss += softplus(s) - static_cast<double>(y01[i]) * s;
    }
    return loss + 0.5 * l2 * kernels::sum_squares(w.data(), d);
}

void logreg_binary_gradient(const Matrix& x, const std::vector<int>& y01,
                            const std::vector<double>& w, double b, double l2,
                            std::vector<double>& grad_w, double& grad_b) {
    const std::size_t n = x.rows();
    const std::size_t d = x.cols();
    grad_w.assign(d, 0.0);
    grad_b = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double s = kernels::dot(x.row(i).data(), w.data(), d) + b;
        const double coef = 1.0 / (1.0 + std::exp(-s)) - static_cast<double>(y01[i]);
        kernels::axpy(coef, x.row(i).data(), grad_w.data(), d);
        grad_b += coef;
    }
    kernels::axpy(l2, w.data(), grad_w.data(), d);
}

double logreg_multi_objective(const Matrix& x, const std::vector<int>& y,
                              std::size_t n_classes, const Matrix& w,
                              const std::vector<double>& b, double l2) {
    const std::size_t n = x.rows();
    const std::size_t d = x.cols();
    double loss = 0.0;
    std::vector<double> s(n_classes);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t cc = 0; cc < n_classes; ++cc)
            s[cc] = kernels::dot(x.row(i).data(), w.row(cc).data(), d) + b[cc];
        const double m = *std::max_element(s.begin(), s.end());
        double acc = 0.0;
        for (double v : s) acc += std::exp(v - m);
        loss += m + std::log(acc) - s[static_cast<std::size_t>(y[i])];
    }
    double reg = 0.0;
    for (std::size_t cc = 0; cc < n_classes; ++cc)
        reg += kernels::sum_squares(w.row(cc).data(), d);
    return loss + 0.5 * l2 * reg;
}

void logreg_multi_gradient(const Matrix& x, const std::vector<int>& y,
                           std::size_t n_classes, const Matrix& w,
                           const std::vector<double>& b, double l2, Matrix& grad_w,
                           std::vector<double>& grad_b) {
    const std::size_t n = x.rows();
    const std::size_t d = x.cols();
    grad_w = Matrix(n_classes, d);
    grad_b.assign(n_classes, 0.0);
    std::vector<double> s(n_classes);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t cc = 0; cc < n_classes; ++cc)
            s[cc] = kernels::dot(x.row(i).data(), w.row(cc).data(), d) + b[cc];
        const double m = *std::max_element(s.begin(), s.end());
        double acc = 0.0;
        for (double v : s) acc += std::exp(v - m);
        const double lse = m + std::log(acc);
        for (std::size_t cc = 0; cc < n_classes; ++cc) {
            const double coef = std::exp(s[cc] - lse) -
                                (static_cast<std::size_t>(y[i]) == cc ? 1.0 : 0.0);
            kernels::axpy(coef, x.row(i).data(), grad_w.row(cc).data(), d);
            grad_b[cc] += coef;
        }
    }
    for (std::size_t cc = 0; cc < n_classes; ++cc)
        kernels::axpy(l2, w.row(cc).data(), grad_w.row(cc).data(), d);
}

} // namespace linear_detail

TrainedModel train_linear_family(const ModelSpec& spec, const LabeledDataset& ds) {
    const std::size_t d = ds.n_features();
    const std::size_t nc = ds.n_classes();
    const std::size_t n = ds.n_samples();

    LinearState state;
    const Standardizer std_stats = Standardizer::fit(ds.matrix.values);
    const Matrix xs = std_stats.apply(ds.matrix.values);
    state.feat_mean = std_stats.mean;
    state.feat_scale = std_stats.scale;

    bool warning = false;
    if (nc == 2) {
        state.weights = Matrix(1, d);
        state.intercepts.resize(1);
        if (spec.family == ModelFamily::linear_svc) {
            std::vector<double> y(n);
            for (std::size_t i = 0; i < n; ++i) y[i] = ds.labels[i] == 1 ? 1.0 : -1.0;
            BinaryFit fit = solve_svc(xs, y, spec.c, spec.max_iters, spec.tol);
            std::copy(fit.w.begin(), fit.w.end(), state.weights.row(0).begin());
            state.intercepts[0] = fit.b;
            state.objective_traces.push_back(std::move(fit.trace));
            warning = !fit.converged;
        } else {
            BinaryFit fit = solve_logreg_binary(xs, ds.labels, spec.l2_strength,
                                                spec.max_iters, spec.tol);
            std::copy(fit.w.begin(), fit.w.end(), state.weights.row(0).begin());
            state.intercepts[0] = fit.b;
            state.objective_traces.push_back(std::move(fit.trace));
            warning = !fit.converged;
        }
    } else if (spec.family == ModelFamily::linear_svc) {
        // One-vs-rest: row c scores class c against the rest.
        state.weights = Matrix(nc, d);
        state.intercepts.resize(nc);
        std::vector<double> y(n);
        for (std::size_t cc = 0; cc < nc; ++cc) {
            for (std::size_t i = 0; i < n; ++i)
                y[i] = static_cast<std::size_t>(ds.labels[i]) == cc ? 1.0 : -1.0;
            BinaryFit fit = solve_svc(xs, y, spec.c, spec.max_iters, spec.tol);
            std::copy(fit.w.begin(), fit.w.end(), state.weights.row(cc).begin());
            state.intercepts[cc] = fit.b;
            state.objective_traces.push_back(std::move(fit.trace));
            warning = warning || !fit.converged;
        }
    } else {
        MultiFit fit = solve_logreg_multi(xs, ds.labels, nc, spec.l2_strength,
                                          spec.max_iters, spec.tol);
        state.weights = std::move(fit.w);
        state.intercepts = std::move(fit.b);
        state.objective_traces.push_back(std::move(fit.trace));
        warning = !fit.converged;
    }

    TrainedModel model;
    model.spec = spec;
    model.n_classes = nc;
    model.n_features = d;
    model.convergence_warning = warning;
    model.state = std::move(state);
    return model;
}

std::vector<int> predict_linear(const TrainedModel& model, const Matrix& x) {
    const auto& state = std::get<LinearState>(model.state);
    const std::size_t d = model.n_features;
    std::vector<int> out(x.rows());
    std::vector<double> xs(d);
    for (std::size_t r = 0; r < x.rows(); ++r) {
        const auto row = x.row(r);
        for (std::size_t j = 0; j < d; ++j)
            xs[j] = (row[j] - state.feat_mean[j]) / state.feat_scale[j];
        if (state.weights.rows() == 1) {
            const double score =
                kernels::dot(xs.data(), state.weights.row(0).data(), d) +
                state.intercepts[0];
            out[r] = score > 0.0 ? 1 : 0;
        } else {
            double best = -std::numeric_limits<double>::infinity();
            int best_class = 0;
            for (std::size_t cc = 0; cc < state.weights.rows(); ++cc) {
                const double score =
                    kernels::dot(xs.data(), state.weights.row(cc).data(), d) +
                    state.intercepts[cc];
                if (score > best) {
                    best = score;
                    best_class = static_cast<int>(cc);
                }
            }
            out[r] = best_class;
        }
    }
    return out;
}

} // namespace omicsel
