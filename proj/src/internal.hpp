#pragma once

// Shared helpers that are not part of the public surface.

#include <cstddef>

#include "mcgp/kernels.hpp"

namespace mcgp::detail {

/// out[k] += weight * d cov(i,t; j,t2) / d theta_k for the flat hyperparameter layout.
void accumulate_cross_cov_grad(const McgpHyperParams& p, std::size_t i, double t, std::size_t j, double t2,
                               bool same_observation, double weight, double* out);

}  // namespace mcgp::detail
