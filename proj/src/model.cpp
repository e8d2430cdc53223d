#include "mcgp/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "internal.hpp"
#include "mcgp/error.hpp"

namespace mcgp {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;

struct Point {
    std::size_t cell;
    double cycle;
};

std::vector<Point> stacked_points(const TrainingSet& train) {
    std::vector<Point> pts;
    pts.reserve(train.total());
    for (std::size_t i = 0; i < train.cell_count(); ++i) {
        for (double t : train.cycles[i]) pts.push_back({i, t});
    }
    return pts;
}

void require_compatible(const McgpHyperParams& hyper, const TrainingSet& train) {
    if (hyper.cells() != train.cell_count()) {
        throw Error(ErrorCode::DimensionMismatch, "hyperparameters cover " + std::to_string(hyper.cells()) +
                                                      " cells, training set has " +
                                                      std::to_string(train.cell_count()));
    }
}

struct Evaluation {
    double deviance = 0.0;
    CholFactor factor;
    Vector alpha;
};

Evaluation evaluate(const McgpHyperParams& hyper, const TrainingSet& train) {
    Evaluation e;
    e.factor = cholesky(assemble_gram(hyper, train));
    const Vector y = train.stacked();
    e.alpha = solve(e.factor, y);
    e.deviance = y.dot(e.alpha) + e.factor.logdet + static_cast<double>(y.size()) * kLog2Pi;
    return e;
}

Vector gradient_from(const McgpHyperParams& hyper, const TrainingSet& train, const Evaluation& e) {
    const std::vector<Point> pts = stacked_points(train);
    // dD/dtheta = sum_ab (K^-1 - alpha alpha')_ab dK_ab/dtheta
    const Matrix w = inverse(e.factor) - e.alpha * e.alpha.transpose();
    Vector g = Vector::Zero(static_cast<Eigen::Index>(hyper.vector_size()));
    const auto n = static_cast<Eigen::Index>(pts.size());
    for (Eigen::Index a = 0; a < n; ++a) {
        detail::accumulate_cross_cov_grad(hyper, pts[a].cell, pts[a].cycle, pts[a].cell, pts[a].cycle, true,
                                          w(a, a), g.data());
        for (Eigen::Index b = 0; b < a; ++b) {
            detail::accumulate_cross_cov_grad(hyper, pts[a].cell, pts[a].cycle, pts[b].cell, pts[b].cycle, false,
                                              2.0 * w(a, b), g.data());
        }
    }
    return g;
}

double stddev_about(const Vector& y, double center) {
    return std::sqrt((y.array() - center).square().sum() / static_cast<double>(y.size()));
}

}  // namespace

std::size_t TrainingSet::total() const {
    std::size_t n = 0;
    for (const auto& c : cycles) n += c.size();
    return n;
}

std::size_t TrainingSet::index_of(const std::string& cell) const {
    const auto it = std::find(cells.begin(), cells.end(), cell);
    if (it == cells.end()) throw Error(ErrorCode::UnknownCell, "cell '" + cell + "' is not in the training set");
    return static_cast<std::size_t>(it - cells.begin());
}

Vector TrainingSet::stacked() const {
    Vector y(static_cast<Eigen::Index>(total()));
    Eigen::Index k = 0;
    for (const auto& caps : capacities) {
        for (double c : caps) y[k++] = c;
    }
    return y;
}

void TrainingSet::add_cell(std::string id, std::vector<double> c, std::vector<double> caps) {
    cells.push_back(std::move(id));
    cycles.push_back(std::move(c));
    capacities.push_back(std::move(caps));
}

void TrainingSet::validate() const {
    if (cells.empty()) throw Error(ErrorCode::InvalidArgument, "training set has no cells");
    if (cycles.size() != cells.size() || capacities.size() != cells.size()) {
        throw Error(ErrorCode::DimensionMismatch, "training set columns differ in length");
    }
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (std::count(cells.begin(), cells.end(), cells[i]) != 1) {
            throw Error(ErrorCode::InvalidArgument, "cell '" + cells[i] + "' listed twice");
        }
        if (cycles[i].size() != capacities[i].size()) {
            throw Error(ErrorCode::DimensionMismatch, "cell '" + cells[i] + "' has mismatched columns");
        }
        if (cycles[i].empty()) {
            throw Error(ErrorCode::TooFewPoints, "cell '" + cells[i] + "' has no observations");
        }
        for (std::size_t k = 0; k < cycles[i].size(); ++k) {
            if (!std::isfinite(cycles[i][k]) || !std::isfinite(capacities[i][k])) {
                throw Error(ErrorCode::InvalidArgument, "cell '" + cells[i] + "' has non-finite values");
            }
            if (k > 0 && !(cycles[i][k] > cycles[i][k - 1])) {
                throw Error(ErrorCode::DuplicateCycle,
                            "cycles of cell '" + cells[i] + "' are not strictly increasing");
            }
        }
    }
}

SymMatrix assemble_gram(const McgpHyperParams& hyper, const TrainingSet& train) {
    require_compatible(hyper, train);
    const std::vector<Point> pts = stacked_points(train);
    const auto n = static_cast<Eigen::Index>(pts.size());
    if (n == 0) throw Error(ErrorCode::EmptyInput, "training set has no observations");
    SymMatrix k(n);
    for (Eigen::Index a = 0; a < n; ++a) {
        for (Eigen::Index b = 0; b <= a; ++b) {
            k.set(a, b, mcgp_cross_cov(hyper, pts[a].cell, pts[a].cycle, pts[b].cell, pts[b].cycle, a == b));
        }
    }
    return k;
}

Matrix cross_covariance(const McgpHyperParams& hyper, const TrainingSet& train, std::size_t cell,
                        const std::vector<double>& query_cycles) {
    require_compatible(hyper, train);
    const std::vector<Point> pts = stacked_points(train);
    Matrix out(static_cast<Eigen::Index>(query_cycles.size()), static_cast<Eigen::Index>(pts.size()));
    for (Eigen::Index q = 0; q < out.rows(); ++q) {
        for (Eigen::Index b = 0; b < out.cols(); ++b) {
            out(q, b) = mcgp_cross_cov(hyper, cell, query_cycles[q], pts[b].cell, pts[b].cycle, false);
        }
    }
    return out;
}

double deviance(const McgpHyperParams& hyper, const TrainingSet& train) {
    return evaluate(hyper, train).deviance;
}

Vector deviance_grad(const McgpHyperParams& hyper, const TrainingSet& train) {
    return gradient_from(hyper, train, evaluate(hyper, train));
}

McgpModel mcgp_condition(const McgpHyperParams& hyper, const TrainingSet& train) {
    train.validate();
    Evaluation e = evaluate(hyper, train);
    McgpModel m;
    m.hyper = hyper;
    m.train = train;
    m.factor = std::move(e.factor);
    m.alpha = std::move(e.alpha);
    m.fit_report.final_deviance = e.deviance;
    m.fit_report.final_loglik = -0.5 * e.deviance;
    m.fit_report.jitter_used = m.factor.jitter_used;
    return m;
}

ResolvedInit resolve_init(const TrainingSet& train, const InitRanges& init) {
    const Vector y = train.stacked();
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (const auto& c : train.cycles) {
        if (c.empty()) continue;
        lo = std::min(lo, c.front());
        hi = std::max(hi, c.back());
    }
    const double span = std::max(hi - lo, 1.0);
    // The prior is zero-mean, so amplitudes scale with the spread about zero.
    double level = stddev_about(y, 0.0);
    if (!(level > 0.0)) level = 1.0;
    double spread = stddev_about(y, y.mean());
    if (!(spread > 0.0)) spread = 1e-3 * level;

    ResolvedInit r;
    r.amplitude_bound = init.amplitude_bound.value_or(2.0 * level * std::sqrt(span));
    r.log_width = init.log_width.value_or(std::pair{std::log(span / 100.0), std::log(span)});
    r.log_noise = init.log_noise.value_or(std::pair{std::log(0.001 * spread), std::log(0.5 * spread)});
    return r;
}

McgpModel mcgp_fit(const TrainingSet& train, const McgpFitOptions& options) {
    train.validate();
    if (options.latents < 1) throw Error(ErrorCode::InvalidArgument, "need at least one latent function");
    options.optimizer.validate();

    const std::size_t m = train.cell_count();
    const std::size_t r = options.latents;
    const ResolvedInit init = resolve_init(train, options.init);

    auto objective = [&](const Vector& x) {
        try {
            return evaluate(McgpHyperParams::from_vector(m, r, x), train).deviance;
        } catch (const Error&) {
            return std::numeric_limits<double>::infinity();
        }
    };
    auto gradient = [&](const Vector& x) {
        try {
            const McgpHyperParams h = McgpHyperParams::from_vector(m, r, x);
            return gradient_from(h, train, evaluate(h, train));
        } catch (const Error&) {
            return Vector(Vector::Constant(x.size(), std::numeric_limits<double>::quiet_NaN()));
        }
    };
    auto sampler = [&](std::size_t, std::mt19937_64& rng) {
        McgpHyperParams h(m, r);
        Vector x(static_cast<Eigen::Index>(h.vector_size()));
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t k = 0; k < r; ++k) {
                x[static_cast<Eigen::Index>(h.amplitude_index(i, k))] =
                    uniform(rng, -init.amplitude_bound, init.amplitude_bound);
            }
        }
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t k = 0; k < r; ++k) {
                x[static_cast<Eigen::Index>(h.smoother_index(i, k))] =
                    uniform(rng, init.log_width.first, init.log_width.second);
            }
        }
        for (std::size_t k = 0; k < r; ++k) {
            x[static_cast<Eigen::Index>(h.latent_index(k))] = uniform(rng, init.log_width.first, init.log_width.second);
        }
        x[static_cast<Eigen::Index>(h.noise_index())] = uniform(rng, init.log_noise.first, init.log_noise.second);
        return x;
    };

    const MultiStartResult best = multi_start(objective, gradient, sampler, options.optimizer);
    McgpModel model = mcgp_condition(McgpHyperParams::from_vector(m, r, best.x), train);
    model.fit_report.iterations = best.trace.iterations;
    model.fit_report.restarts_used = best.restarts_run;
    model.fit_report.restarts_converged = best.converged;
    model.fit_report.termination = best.trace.reason;
    return model;
}

McgpModel mcgp_fit(const TrainingSet& train, std::size_t latents, int restarts, std::uint64_t seed) {
    McgpFitOptions options;
    options.latents = latents;
    options.optimizer.restarts = restarts;
    options.optimizer.seed = seed;
    return mcgp_fit(train, options);
}

PredictiveDistribution mcgp_predict(const McgpModel& model, const std::string& cell,
                                    const std::vector<double>& query_cycles, bool include_noise) {
    const std::size_t idx = model.train.index_of(cell);
    if (query_cycles.empty()) throw Error(ErrorCode::EmptyInput, "no query cycles");
    const auto q = static_cast<Eigen::Index>(query_cycles.size());

    const Matrix cross = cross_covariance(model.hyper, model.train, idx, query_cycles);
    Matrix prior(q, q);
    for (Eigen::Index a = 0; a < q; ++a) {
        for (Eigen::Index b = 0; b <= a; ++b) {
            const double v = mcgp_cross_cov(model.hyper, idx, query_cycles[a], idx, query_cycles[b],
                                            include_noise && a == b);
            prior(a, b) = v;
            prior(b, a) = v;
        }
    }

    PredictiveDistribution pd;
    pd.cell = cell;
    pd.cycles = query_cycles;
    pd.mean = cross * model.alpha;
    const Matrix v = solve_lower(model.factor, cross.transpose().eval());
    finalize_predictive(pd, prior - v.transpose() * v);
    return pd;
}

}  // namespace mcgp
