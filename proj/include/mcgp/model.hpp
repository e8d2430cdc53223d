#pragma once

// Multi-output convolved Gaussian process over several cells.
//
// The observations of all cells are stacked cell by cell (cycles ascending
// within a cell) into one vector Y with a zero-mean joint Gaussian prior whose
// covariance is assembled from mcgp_cross_cov. Hyperparameters minimize the
// deviance D = Y' K^-1 Y + log det K + T log(2 pi) = -2 log p(Y).

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mcgp/kernels.hpp"
#include "mcgp/numerics.hpp"
#include "mcgp/optimizer.hpp"
#include "mcgp/predictive.hpp"

namespace mcgp {

struct TrainingSet {
    std::vector<std::string> cells;
    std::vector<std::vector<double>> cycles;      // per cell, strictly increasing
    std::vector<std::vector<double>> capacities;  // per cell, Ah

    [[nodiscard]] std::size_t cell_count() const noexcept { return cells.size(); }
    [[nodiscard]] std::size_t total() const;
    /// Throws UnknownCell.
    [[nodiscard]] std::size_t index_of(const std::string& cell) const;
    /// Stacked observation vector Y.
    [[nodiscard]] Vector stacked() const;

    void add_cell(std::string id, std::vector<double> cycles, std::vector<double> caps);

    /// Throws InvalidArgument / DimensionMismatch / DuplicateCycle on violations.
    void validate() const;
};

struct FitReport {
    double final_deviance = 0.0;
    double final_loglik = 0.0;
    int iterations = 0;
    std::size_t restarts_used = 0;
    std::size_t restarts_converged = 0;
    double jitter_used = 0.0;
    Termination termination = Termination::GradientSmall;
};

struct McgpModel {
    McgpHyperParams hyper;
    TrainingSet train;
    CholFactor factor;
    Vector alpha;  // K^-1 Y
    FitReport fit_report;
    /// Free-form provenance line carried through persistence (tool, flags).
    std::string provenance;
};

SymMatrix assemble_gram(const McgpHyperParams& hyper, const TrainingSet& train);

/// Covariance between (cell, query cycle) pairs and every training point, noise free.
Matrix cross_covariance(const McgpHyperParams& hyper, const TrainingSet& train, std::size_t cell,
                        const std::vector<double>& query_cycles);

double deviance(const McgpHyperParams& hyper, const TrainingSet& train);
Vector deviance_grad(const McgpHyperParams& hyper, const TrainingSet& train);

/// Builds the fitted-model state (factor, alpha, deviance) at fixed hyperparameters.
McgpModel mcgp_condition(const McgpHyperParams& hyper, const TrainingSet& train);

/// Ranges restart points are sampled from. Unset entries are derived from the data.
struct InitRanges {
    std::optional<double> amplitude_bound;                  // amplitudes ~ U(-a, a)
    std::optional<std::pair<double, double>> log_width;     // smoother and latent widths
    std::optional<std::pair<double, double>> log_noise;
};

struct McgpFitOptions {
    std::size_t latents = 2;
    OptimizerConfig optimizer;
    InitRanges init;
};

/// Resolved sampling ranges for a training set.
struct ResolvedInit {
    double amplitude_bound;
    std::pair<double, double> log_width;
    std::pair<double, double> log_noise;
};
ResolvedInit resolve_init(const TrainingSet& train, const InitRanges& init);

/// Multi-start deviance minimization. Throws OptimizerFailed when every restart fails.
McgpModel mcgp_fit(const TrainingSet& train, const McgpFitOptions& options);
McgpModel mcgp_fit(const TrainingSet& train, std::size_t latents, int restarts, std::uint64_t seed);

/// Posterior of the noise-free capacity of `cell` at the query cycles; with
/// include_noise the observation noise variance is added to the diagonal.
/// Throws UnknownCell.
PredictiveDistribution mcgp_predict(const McgpModel& model, const std::string& cell,
                                    const std::vector<double>& query_cycles, bool include_noise = false);

}  // namespace mcgp
