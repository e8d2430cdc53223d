#include "mcgp/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <thread>

#include "mcgp/error.hpp"

namespace mcgp {

void OptimizerConfig::validate() const {
    if (max_iterations < 0) throw Error(ErrorCode::InvalidArgument, "max_iterations must be >= 0");
    if (!(gradient_tolerance > 0.0) || !(step_tolerance > 0.0) || !(function_tolerance > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "optimizer tolerances must be > 0");
    }
    if (restarts < 1) throw Error(ErrorCode::InvalidArgument, "restarts must be >= 1");
    if (memory < 1) throw Error(ErrorCode::InvalidArgument, "memory must be >= 1");
    if (!(armijo > 0.0 && armijo < 1.0)) throw Error(ErrorCode::InvalidArgument, "armijo constant must lie in (0,1)");
    if (!(backtrack_factor > 0.0 && backtrack_factor < 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "backtrack factor must lie in (0,1)");
    }
}

std::string_view to_string(Termination t) {
    switch (t) {
        case Termination::GradientSmall: return "GradientSmall";
        case Termination::StepSmall: return "StepSmall";
        case Termination::MaxIterations: return "MaxIterations";
        case Termination::ObjectiveFailure: return "ObjectiveFailure";
    }
    return "Unknown";
}

namespace {

struct Pair {
    Vector s;
    Vector y;
    double rho;
};

// Two-loop recursion: returns -H g.
Vector lbfgs_direction(const std::deque<Pair>& history, const Vector& g) {
    Vector q = g;
    std::vector<double> alpha(history.size());
    for (std::size_t k = history.size(); k-- > 0;) {
        alpha[k] = history[k].rho * history[k].s.dot(q);
        q -= alpha[k] * history[k].y;
    }
    const Pair& last = history.back();
    const double gamma = last.s.dot(last.y) / last.y.squaredNorm();
    q *= gamma;
    for (std::size_t k = 0; k < history.size(); ++k) {
        const double beta = history[k].rho * history[k].y.dot(q);
        q += (alpha[k] - beta) * history[k].s;
    }
    return -q;
}

double safe_eval(const ObjectiveFn& f, const Vector& x) {
    const double v = f(x);
    return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
}

}  // namespace

MinimizeResult minimize(const ObjectiveFn& objective, const GradientFn& gradient, const Vector& x0,
                        const OptimizerConfig& cfg) {
    cfg.validate();
    MinimizeResult res;
    res.x = x0;
    FitTrace& trace = res.trace;

    double f = safe_eval(objective, x0);
    trace.evaluations = 1;
    res.value = f;
    if (!std::isfinite(f)) {
        trace.reason = Termination::ObjectiveFailure;
        return res;
    }
    Vector g = gradient(x0);
    if (!g.allFinite()) {
        trace.reason = Termination::ObjectiveFailure;
        return res;
    }
    trace.values.push_back(f);

    Vector x = x0;
    std::deque<Pair> history;
    trace.reason = Termination::MaxIterations;

    for (int iter = 0; iter < cfg.max_iterations; ++iter) {
        if (g.lpNorm<Eigen::Infinity>() < cfg.gradient_tolerance) {
            trace.reason = Termination::GradientSmall;
            break;
        }

        bool accepted = false;
        Vector x_new;
        Vector g_new;
        double f_new = 0.0;
        // Second pass (if needed) drops curvature history and uses steepest descent.
        for (int pass = 0; pass < 2 && !accepted; ++pass) {
            if (pass == 1) {
                if (history.empty()) break;
                history.clear();
            }
            Vector d = history.empty() ? Vector(-g) : lbfgs_direction(history, g);
            double slope = g.dot(d);
            if (!(slope < 0.0) || !d.allFinite()) {
                history.clear();
                d = -g;
                slope = g.dot(d);
            }
            double step = history.empty() ? std::min(1.0, 1.0 / g.lpNorm<Eigen::Infinity>()) : 1.0;
            for (int bt = 0; bt <= cfg.max_backtracks; ++bt) {
                x_new = x + step * d;
                f_new = safe_eval(objective, x_new);
                ++trace.evaluations;
                if (f_new <= f + cfg.armijo * step * slope) {
                    g_new = gradient(x_new);
                    if (g_new.allFinite()) {
                        accepted = true;
                        break;
                    }
                }
                step *= cfg.backtrack_factor;
            }
        }

        if (!accepted) {
            trace.reason = iter == 0 ? Termination::ObjectiveFailure : Termination::StepSmall;
            break;
        }

        Vector s = x_new - x;
        Vector y = g_new - g;
        const double sy = s.dot(y);
        const double previous = f;
        x = std::move(x_new);
        g = std::move(g_new);
        f = f_new;
        trace.values.push_back(f);
        trace.iterations = iter + 1;

        if (sy > 1e-12 * s.norm() * y.norm()) {
            history.push_back({s, y, 1.0 / sy});
            if (static_cast<int>(history.size()) > cfg.memory) history.pop_front();
        }
        if (s.lpNorm<Eigen::Infinity>() < cfg.step_tolerance) {
            trace.reason = Termination::StepSmall;
            break;
        }
        if (std::abs(previous - f) <= cfg.function_tolerance * std::max(1.0, std::abs(f))) {
            trace.reason = g.lpNorm<Eigen::Infinity>() < cfg.gradient_tolerance ? Termination::GradientSmall
                                                                                : Termination::StepSmall;
            break;
        }
    }
    if (trace.reason == Termination::MaxIterations && g.lpNorm<Eigen::Infinity>() < cfg.gradient_tolerance) {
        trace.reason = Termination::GradientSmall;
    }

    res.x = std::move(x);
    res.value = f;
    return res;
}

std::mt19937_64 restart_generator(std::uint64_t seed, std::size_t index) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(index & 0xffffffffu),
                      static_cast<std::uint32_t>(static_cast<std::uint64_t>(index) >> 32)};
    return std::mt19937_64(seq);
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * u;
}

MultiStartResult multi_start(const ObjectiveFn& objective, const GradientFn& gradient,
                             const InitSampler& sampler, const OptimizerConfig& cfg) {
    cfg.validate();
    const auto n = static_cast<std::size_t>(cfg.restarts);
    std::vector<MinimizeResult> results(n);
    std::vector<double> initial(n, std::numeric_limits<double>::infinity());

    auto run_one = [&](std::size_t k) {
        auto rng = restart_generator(cfg.seed, k);
        const Vector x0 = sampler(k, rng);
        results[k] = minimize(objective, gradient, x0, cfg);
        initial[k] = results[k].trace.values.empty() ? std::numeric_limits<double>::infinity()
                                                     : results[k].trace.values.front();
    };

    const auto workers = static_cast<std::size_t>(std::max(1, cfg.threads));
    if (workers == 1 || n == 1) {
        for (std::size_t k = 0; k < n; ++k) run_one(k);
    } else {
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < std::min(workers, n); ++w) {
            pool.emplace_back([&, w] {
                for (std::size_t k = w; k < n; k += workers) run_one(k);
            });
        }
        for (auto& t : pool) t.join();
    }

    MultiStartResult out;
    out.restarts_run = n;
    out.initial_values = initial;
    bool found = false;
    for (std::size_t k = 0; k < n; ++k) {
        const MinimizeResult& r = results[k];
        out.final_values.push_back(r.value);
        if (!std::isfinite(r.value)) continue;
        if (r.trace.reason == Termination::GradientSmall || r.trace.reason == Termination::StepSmall) {
            ++out.converged;
        }
        if (!found || r.value < out.value) {
            found = true;
            out.value = r.value;
            out.x = r.x;
            out.trace = r.trace;
            out.best_restart = k;
        }
    }
    if (!found) throw Error(ErrorCode::OptimizerFailed, "no restart reached a finite objective");
    return out;
}

}  // namespace mcgp
