#pragma once

// Unconstrained limited-memory quasi-Newton minimizer with Armijo
// backtracking, plus a deterministic multi-start driver.
//
// Objectives signal failure (e.g. a covariance that will not factorize) by
// returning +inf or NaN; such trial points are rejected by the line search.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <string_view>
#include <vector>

#include "mcgp/numerics.hpp"

namespace mcgp {

using ObjectiveFn = std::function<double(const Vector&)>;
using GradientFn = std::function<Vector(const Vector&)>;
/// Draws the initial point for restart `index` from a generator seeded per restart.
using InitSampler = std::function<Vector(std::size_t index, std::mt19937_64& rng)>;

struct OptimizerConfig {
    int max_iterations = 500;
    double gradient_tolerance = 1e-6;  // infinity norm
    double step_tolerance = 1e-10;     // infinity norm of the accepted step
    /// Relative objective change below which progress is considered stalled.
    double function_tolerance = 1e-12;
    int restarts = 10;
    std::uint64_t seed = 0;
    int memory = 10;
    int max_backtracks = 60;
    double armijo = 1e-4;
    double backtrack_factor = 0.5;
    /// Worker threads for multi_start; objectives must be thread-safe when > 1.
    int threads = 1;

    /// Throws InvalidArgument on non-positive tolerances or restarts < 1.
    void validate() const;
};

enum class Termination { GradientSmall, StepSmall, MaxIterations, ObjectiveFailure };

std::string_view to_string(Termination t);

struct FitTrace {
    /// Objective at x0 followed by the value after every accepted step.
    std::vector<double> values;
    Termination reason = Termination::ObjectiveFailure;
    int iterations = 0;
    int evaluations = 0;
};

struct MinimizeResult {
    Vector x;
    double value = 0.0;
    FitTrace trace;
};

MinimizeResult minimize(const ObjectiveFn& objective, const GradientFn& gradient, const Vector& x0,
                        const OptimizerConfig& cfg);

struct MultiStartResult {
    Vector x;
    double value = 0.0;
    FitTrace trace;
    std::size_t best_restart = 0;
    std::size_t restarts_run = 0;
    /// Restarts that ended with GradientSmall or StepSmall at a finite value.
    std::size_t converged = 0;
    std::vector<double> initial_values;
    std::vector<double> final_values;
};

/// Runs minimize() from cfg.restarts sampled points and keeps the lowest final
/// objective (ties resolved by restart index). Throws OptimizerFailed if no
/// restart reaches a finite objective.
MultiStartResult multi_start(const ObjectiveFn& objective, const GradientFn& gradient,
                             const InitSampler& sampler, const OptimizerConfig& cfg);

/// Generator for restart `index`; stable across platforms for a given seed.
std::mt19937_64 restart_generator(std::uint64_t seed, std::size_t index);

/// Uniform draw on [lo, hi) that does not depend on the standard library's
/// distribution implementation.
double uniform(std::mt19937_64& rng, double lo, double hi);

}  // namespace mcgp
