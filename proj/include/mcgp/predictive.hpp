#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "mcgp/numerics.hpp"

namespace mcgp {

/// Gaussian posterior over a set of query cycles of one cell.
struct PredictiveDistribution {
    std::string cell;
    std::vector<double> cycles;
    Vector mean;                   // Ah
    SymMatrix covariance{1};       // Ah^2, diagonal clamped at 0
    Vector stddev;                 // sqrt(diag(covariance))
    std::size_t clamped = 0;       // diagonal entries that went negative before clamping
};

/// Clamps the diagonal at zero, fills stddev and the clamp count. Emits a
/// warning through the log sink when anything was clamped.
void finalize_predictive(PredictiveDistribution& pd, Matrix covariance);

}  // namespace mcgp
