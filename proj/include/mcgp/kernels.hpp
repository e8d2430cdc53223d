#pragma once

// Covariance functions.
//
// The independent-GP kernel is a scaled squared exponential in cycle number
// (plus optional covariates) with a white-noise term. The multi-output kernel
// is the covariance between two cells implied by convolving R independent
// latent Gaussian processes with per-(cell, latent) Gaussian smoothers:
//
//   cov[y_i(t), y_j(t')] = eps^2 [same observation]
//       + sum_r S_ir S_jr N(t - t'; 0, w_ir^2 + w_jr^2 + l_r^2)
//
// where S are smoother amplitudes, w smoother widths, l latent widths and
// N(.; 0, v) the zero-mean normal density with variance v.

#include <cstddef>
#include <vector>

#include "mcgp/numerics.hpp"

namespace mcgp {

struct IgpKernelParams {
    double signal = 1.0;             // theta_F, Ah
    double length = 1.0;             // theta_L, cycles
    std::vector<double> covariate_lengths;  // theta_x, may be empty
    double noise = 0.0;              // theta_eps, Ah

    /// Throws InvalidArgument unless every scale is strictly positive
    /// (noise may be zero for noise-free conditioning).
    void validate() const;
};

double igp_kernel(const IgpKernelParams& p, double t, const std::vector<double>& x_t, double t2,
                  const std::vector<double>& x_t2, bool same_observation);

/// Time-only convenience overload.
double igp_kernel(const IgpKernelParams& p, double t, double t2, bool same_observation);

/// Hyperparameters of the convolved multi-output kernel.
///
/// Vector layout (optimizer and persistence):
///   [amplitude m x R row-major | log smoother_width m x R row-major |
///    log latent_width R | log noise]
class McgpHyperParams {
public:
    McgpHyperParams() = default;
    McgpHyperParams(std::size_t cells, std::size_t latents);

    [[nodiscard]] std::size_t cells() const noexcept { return cells_; }
    [[nodiscard]] std::size_t latents() const noexcept { return latents_; }
    [[nodiscard]] std::size_t vector_size() const noexcept { return 2 * cells_ * latents_ + latents_ + 1; }

    [[nodiscard]] double amplitude(std::size_t i, std::size_t r) const { return amplitude_[i * latents_ + r]; }
    [[nodiscard]] double smoother_width(std::size_t i, std::size_t r) const {
        return smoother_width_[i * latents_ + r];
    }
    [[nodiscard]] double latent_width(std::size_t r) const { return latent_width_[r]; }
    [[nodiscard]] double noise() const noexcept { return noise_; }

    void set_amplitude(std::size_t i, std::size_t r, double v);
    /// Widths and noise must be strictly positive; throws InvalidArgument otherwise.
    void set_smoother_width(std::size_t i, std::size_t r, double v);
    void set_latent_width(std::size_t r, double v);
    void set_noise(double v);

    // Indices into the flat vector.
    [[nodiscard]] std::size_t amplitude_index(std::size_t i, std::size_t r) const { return i * latents_ + r; }
    [[nodiscard]] std::size_t smoother_index(std::size_t i, std::size_t r) const {
        return cells_ * latents_ + i * latents_ + r;
    }
    [[nodiscard]] std::size_t latent_index(std::size_t r) const { return 2 * cells_ * latents_ + r; }
    [[nodiscard]] std::size_t noise_index() const { return 2 * cells_ * latents_ + latents_; }

    [[nodiscard]] Vector to_vector() const;
    /// Throws DimensionMismatch on wrong length and InvalidArgument on non-finite entries.
    static McgpHyperParams from_vector(std::size_t cells, std::size_t latents, const Vector& v);

private:
    std::size_t cells_ = 0;
    std::size_t latents_ = 0;
    std::vector<double> amplitude_;
    std::vector<double> smoother_width_;
    std::vector<double> latent_width_;
    double noise_ = 1.0;
    // Flat (log-space) copy kept verbatim so to_vector(from_vector(v)) == v bit for bit.
    Vector flat_;
};

/// Gaussian smoothing kernel linking a latent function to a cell.
double smoother(double amplitude, double width, double lag);

/// Normalized Gaussian covariance of one latent function.
double latent_kernel(double width, double lag);

double mcgp_cross_cov(const McgpHyperParams& p, std::size_t i, double t, std::size_t j, double t2,
                      bool same_observation);

/// Gradient of mcgp_cross_cov over the flat hyperparameter vector
/// (raw amplitudes, log widths, log noise). Only entries touching cells i and
/// j, the latent widths and the noise can be nonzero.
Vector mcgp_cross_cov_grad(const McgpHyperParams& p, std::size_t i, double t, std::size_t j, double t2,
                           bool same_observation);

}  // namespace mcgp
