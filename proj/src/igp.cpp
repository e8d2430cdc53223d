#include "mcgp/igp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>

#include "mcgp/error.hpp"

namespace mcgp {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;  // log(2 pi)

SymMatrix igp_gram(const IgpKernelParams& p, const std::vector<double>& cycles) {
    const auto n = static_cast<Eigen::Index>(cycles.size());
    SymMatrix k(n);
    for (Eigen::Index a = 0; a < n; ++a) {
        for (Eigen::Index b = 0; b <= a; ++b) {
            k.set(a, b, igp_kernel(p, cycles[a], cycles[b], a == b));
        }
    }
    return k;
}

IgpKernelParams params_from_log(const Vector& x) {
    IgpKernelParams p;
    p.signal = std::exp(x[0]);
    p.length = std::exp(x[1]);
    p.noise = std::exp(x[2]);
    return p;
}

bool params_usable(const IgpKernelParams& p) {
    return std::isfinite(p.signal) && std::isfinite(p.length) && std::isfinite(p.noise) && p.signal > 0.0 &&
           p.length > 0.0 && p.noise > 0.0;
}

// Deviance (-2 log likelihood) of the residuals and optionally its gradient
// over (log signal, log length, log noise).
double igp_deviance(const Vector& x, const std::vector<double>& cycles, const Vector& resid, Vector* grad) {
    const IgpKernelParams p = params_from_log(x);
    if (!params_usable(p)) return std::numeric_limits<double>::infinity();
    CholFactor f;
    try {
        f = cholesky(igp_gram(p, cycles));
    } catch (const Error&) {
        return std::numeric_limits<double>::infinity();
    }
    const Vector alpha = solve(f, resid);
    const auto n = static_cast<double>(resid.size());
    const double dev = resid.dot(alpha) + f.logdet + n * kLog2Pi;
    if (grad) {
        const Matrix w = inverse(f) - alpha * alpha.transpose();
        Vector g = Vector::Zero(3);
        const double l2 = p.length * p.length;
        const double f2 = p.signal * p.signal;
        for (Eigen::Index a = 0; a < resid.size(); ++a) {
            for (Eigen::Index b = 0; b < resid.size(); ++b) {
                const double d = cycles[a] - cycles[b];
                const double se = f2 * std::exp(-0.5 * d * d / l2);
                g[0] += w(a, b) * 2.0 * se;
                g[1] += w(a, b) * se * d * d / l2;
            }
            g[2] += w(a, a) * 2.0 * p.noise * p.noise;
        }
        *grad = g;
    }
    return dev;
}

void sort_training(std::vector<double>& cycles, std::vector<double>& caps) {
    if (cycles.size() != caps.size()) {
        throw Error(ErrorCode::DimensionMismatch, "cycles and capacities differ in length");
    }
    std::vector<std::size_t> order(cycles.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return cycles[a] < cycles[b]; });
    std::vector<double> c(cycles.size());
    std::vector<double> y(caps.size());
    for (std::size_t k = 0; k < order.size(); ++k) {
        c[k] = cycles[order[k]];
        y[k] = caps[order[k]];
        if (k > 0 && c[k] == c[k - 1]) {
            throw Error(ErrorCode::DuplicateCycle, "duplicate training cycle " + std::to_string(c[k]));
        }
    }
    cycles = std::move(c);
    caps = std::move(y);
}

Vector residual_vector(const Basis& basis, const std::vector<double>& cycles, const std::vector<double>& caps) {
    Vector r(static_cast<Eigen::Index>(caps.size()));
    for (std::size_t k = 0; k < caps.size(); ++k) r[static_cast<Eigen::Index>(k)] = caps[k] - basis(cycles[k]);
    return r;
}

}  // namespace

Basis fit_basis(BasisKind kind, const std::vector<double>& cycles, const std::vector<double>& caps) {
    Basis b;
    b.kind = kind;
    if (kind == BasisKind::Zero) return b;
    if (cycles.size() != caps.size() || cycles.empty()) {
        throw Error(ErrorCode::DimensionMismatch, "basis fit needs equal, non-empty inputs");
    }
    const double n = static_cast<double>(cycles.size());
    const double mt = std::accumulate(cycles.begin(), cycles.end(), 0.0) / n;
    const double my = std::accumulate(caps.begin(), caps.end(), 0.0) / n;
    double stt = 0.0;
    double sty = 0.0;
    for (std::size_t k = 0; k < cycles.size(); ++k) {
        stt += (cycles[k] - mt) * (cycles[k] - mt);
        sty += (cycles[k] - mt) * (caps[k] - my);
    }
    b.slope = stt > 0.0 ? sty / stt : 0.0;
    b.intercept = my - b.slope * mt;
    return b;
}

IgpModel igp_condition(const IgpKernelParams& params, const Basis& basis, std::vector<double> cycles,
                       std::vector<double> caps) {
    params.validate();
    if (!params.covariate_lengths.empty()) {
        throw Error(ErrorCode::InvalidArgument, "covariate-driven IGP conditioning is not supported");
    }
    if (cycles.empty()) throw Error(ErrorCode::TooFewPoints, "no training observations");
    sort_training(cycles, caps);

    IgpModel m;
    m.params = params;
    m.basis = basis;
    m.factor = cholesky(igp_gram(params, cycles));
    const Vector resid = residual_vector(basis, cycles, caps);
    m.residuals_solved = solve(m.factor, resid);
    m.log_likelihood =
        -0.5 * (resid.dot(m.residuals_solved) + m.factor.logdet + static_cast<double>(resid.size()) * kLog2Pi);
    m.train_cycles = std::move(cycles);
    m.train_caps = std::move(caps);
    return m;
}

double igp_log_likelihood(const IgpKernelParams& params, const std::vector<double>& cycles,
                          const std::vector<double>& residuals) {
    params.validate();
    if (cycles.size() != residuals.size()) {
        throw Error(ErrorCode::DimensionMismatch, "cycles and residuals differ in length");
    }
    const CholFactor f = cholesky(igp_gram(params, cycles));
    const Vector r = Eigen::Map<const Vector>(residuals.data(), static_cast<Eigen::Index>(residuals.size()));
    return -0.5 * (r.dot(solve(f, r)) + f.logdet + static_cast<double>(r.size()) * kLog2Pi);
}

IgpModel igp_fit(const std::vector<double>& cycles_in, const std::vector<double>& caps_in, BasisKind basis_kind,
                 const OptimizerConfig& cfg) {
    std::vector<double> cycles = cycles_in;
    std::vector<double> caps = caps_in;
    if (cycles.size() != caps.size()) {
        throw Error(ErrorCode::DimensionMismatch, "cycles and capacities differ in length");
    }
    if (cycles.size() < 3) {
        throw Error(ErrorCode::TooFewPoints, "IGP fit needs at least 3 observations, got " +
                                                 std::to_string(cycles.size()));
    }
    sort_training(cycles, caps);

    const Basis basis = fit_basis(basis_kind, cycles, caps);
    const Vector resid = residual_vector(basis, cycles, caps);

    const double n = static_cast<double>(resid.size());
    const double mean = resid.mean();
    const double spread = std::max(std::sqrt((resid.array() - mean).square().sum() / n), 1e-6);
    const double span = std::max(cycles.back() - cycles.front(), 1.0);

    auto objective = [&](const Vector& x) { return igp_deviance(x, cycles, resid, nullptr); };
    auto gradient = [&](const Vector& x) {
        Vector g;
        if (!std::isfinite(igp_deviance(x, cycles, resid, &g))) {
            return Vector(Vector::Constant(3, std::numeric_limits<double>::quiet_NaN()));
        }
        return g;
    };
    auto sampler = [&](std::size_t, std::mt19937_64& rng) {
        Vector x(3);
        x[0] = uniform(rng, std::log(0.1 * spread), std::log(10.0 * spread));
        x[1] = uniform(rng, std::log(span / 100.0), std::log(span));
        x[2] = uniform(rng, std::log(0.001 * spread), std::log(0.5 * spread));
        return x;
    };

    const MultiStartResult best = multi_start(objective, gradient, sampler, cfg);
    IgpModel m = igp_condition(params_from_log(best.x), basis, cycles, caps);
    m.restarts_used = static_cast<int>(best.restarts_run);
    return m;
}

IgpModel igp_fit(const std::vector<double>& cycles, const std::vector<double>& caps, BasisKind basis_kind,
                 int restarts, std::uint64_t seed) {
    OptimizerConfig cfg;
    cfg.restarts = restarts;
    cfg.seed = seed;
    return igp_fit(cycles, caps, basis_kind, cfg);
}

PredictiveDistribution igp_predict(const IgpModel& model, const std::vector<double>& query_cycles,
                                   bool include_noise) {
    if (query_cycles.empty()) throw Error(ErrorCode::EmptyInput, "no query cycles");
    const auto q = static_cast<Eigen::Index>(query_cycles.size());
    const auto n = static_cast<Eigen::Index>(model.train_cycles.size());

    Matrix cross(n, q);
    for (Eigen::Index a = 0; a < n; ++a) {
        for (Eigen::Index b = 0; b < q; ++b) {
            cross(a, b) = igp_kernel(model.params, model.train_cycles[a], query_cycles[b], false);
        }
    }
    Matrix prior(q, q);
    for (Eigen::Index a = 0; a < q; ++a) {
        for (Eigen::Index b = 0; b <= a; ++b) {
            const double v = igp_kernel(model.params, query_cycles[a], query_cycles[b], include_noise && a == b);
            prior(a, b) = v;
            prior(b, a) = v;
        }
    }

    PredictiveDistribution pd;
    pd.cycles = query_cycles;
    pd.mean = cross.transpose() * model.residuals_solved;
    for (Eigen::Index b = 0; b < q; ++b) pd.mean[b] += model.basis(query_cycles[b]);
    const Matrix v = solve_lower(model.factor, cross);
    finalize_predictive(pd, prior - v.transpose() * v);
    return pd;
}

}  // namespace mcgp
