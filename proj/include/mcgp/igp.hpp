#pragma once

// Independent Gaussian process for a single cell: a basis function in cycle
// number plus a squared-exponential residual process with white noise.

#include <cstdint>
#include <vector>

#include "mcgp/kernels.hpp"
#include "mcgp/numerics.hpp"
#include "mcgp/optimizer.hpp"
#include "mcgp/predictive.hpp"

namespace mcgp {

enum class BasisKind { Zero, Linear };

struct Basis {
    BasisKind kind = BasisKind::Zero;
    double intercept = 0.0;  // Ah
    double slope = 0.0;      // Ah / cycle

    [[nodiscard]] double operator()(double cycle) const {
        return kind == BasisKind::Zero ? 0.0 : intercept + slope * cycle;
    }
};

/// Ordinary least-squares line through (cycle, capacity). Zero kind yields the zero basis.
Basis fit_basis(BasisKind kind, const std::vector<double>& cycles, const std::vector<double>& caps);

struct IgpModel {
    IgpKernelParams params;
    Basis basis;
    std::vector<double> train_cycles;
    std::vector<double> train_caps;
    CholFactor factor;
    Vector residuals_solved;  // K^{-1} (y - b)
    double log_likelihood = 0.0;
    int restarts_used = 0;
};

/// Builds a model at fixed kernel parameters. Training points are sorted by
/// cycle; duplicate cycles are rejected.
IgpModel igp_condition(const IgpKernelParams& params, const Basis& basis, std::vector<double> cycles,
                       std::vector<double> caps);

/// Log marginal likelihood of residuals under a time-only kernel.
double igp_log_likelihood(const IgpKernelParams& params, const std::vector<double>& cycles,
                          const std::vector<double>& residuals);

/// Basis by least squares, then kernel parameters by multi-start maximum
/// likelihood. Uses cfg.restarts and cfg.seed. Throws TooFewPoints (< 3
/// observations) or OptimizerFailed.
IgpModel igp_fit(const std::vector<double>& cycles, const std::vector<double>& caps, BasisKind basis_kind,
                 const OptimizerConfig& cfg);

IgpModel igp_fit(const std::vector<double>& cycles, const std::vector<double>& caps, BasisKind basis_kind,
                 int restarts, std::uint64_t seed);

/// Posterior of the noise-free process (plus basis); include_noise adds
/// theta_eps^2 to the diagonal for observation-level intervals.
PredictiveDistribution igp_predict(const IgpModel& model, const std::vector<double>& query_cycles,
                                   bool include_noise = false);

}  // namespace mcgp
