#include "mcgp/kernels.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "mcgp/error.hpp"
#include "internal.hpp"

namespace mcgp {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void require_positive(double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v)) {
        throw Error(ErrorCode::InvalidArgument, std::string(what) + " must be finite and > 0");
    }
}

void require_cell(const McgpHyperParams& p, std::size_t i) {
    if (i >= p.cells()) {
        throw Error(ErrorCode::IndexOutOfRange,
                    "cell index " + std::to_string(i) + " >= " + std::to_string(p.cells()));
    }
}

}  // namespace

void IgpKernelParams::validate() const {
    require_positive(signal, "signal amplitude");
    require_positive(length, "length scale");
    for (double l : covariate_lengths) require_positive(l, "covariate length scale");
    if (!(noise >= 0.0) || !std::isfinite(noise)) {
        throw Error(ErrorCode::InvalidArgument, "noise must be finite and >= 0");
    }
}

double igp_kernel(const IgpKernelParams& p, double t, const std::vector<double>& x_t, double t2,
                  const std::vector<double>& x_t2, bool same_observation) {
    if (x_t.size() != p.covariate_lengths.size() || x_t2.size() != p.covariate_lengths.size()) {
        throw Error(ErrorCode::DimensionMismatch,
                    "covariate vectors must have " + std::to_string(p.covariate_lengths.size()) + " entries");
    }
    const double u = (t - t2) / p.length;
    double exponent = -0.5 * u * u;
    for (std::size_t k = 0; k < x_t.size(); ++k) {
        const double z = (x_t[k] - x_t2[k]) / p.covariate_lengths[k];
        exponent -= 0.5 * z * z;
    }
    double value = p.signal * p.signal * std::exp(exponent);
    if (same_observation) value += p.noise * p.noise;
    return value;
}

double igp_kernel(const IgpKernelParams& p, double t, double t2, bool same_observation) {
    static const std::vector<double> none;
    return igp_kernel(p, t, none, t2, none, same_observation);
}

McgpHyperParams::McgpHyperParams(std::size_t cells, std::size_t latents)
    : cells_(cells),
      latents_(latents),
      amplitude_(cells * latents, 1.0),
      smoother_width_(cells * latents, 1.0),
      latent_width_(latents, 1.0) {
    if (cells == 0 || latents == 0) {
        throw Error(ErrorCode::InvalidArgument, "need at least one cell and one latent function");
    }
    flat_ = Vector::Zero(static_cast<Eigen::Index>(vector_size()));
    for (std::size_t k = 0; k < cells * latents; ++k) flat_[static_cast<Eigen::Index>(k)] = 1.0;
}

void McgpHyperParams::set_amplitude(std::size_t i, std::size_t r, double v) {
    if (!std::isfinite(v)) throw Error(ErrorCode::InvalidArgument, "amplitude must be finite");
    amplitude_[i * latents_ + r] = v;
    flat_[static_cast<Eigen::Index>(amplitude_index(i, r))] = v;
}

void McgpHyperParams::set_smoother_width(std::size_t i, std::size_t r, double v) {
    require_positive(v, "smoother width");
    smoother_width_[i * latents_ + r] = v;
    flat_[static_cast<Eigen::Index>(smoother_index(i, r))] = std::log(v);
}

void McgpHyperParams::set_latent_width(std::size_t r, double v) {
    require_positive(v, "latent width");
    latent_width_[r] = v;
    flat_[static_cast<Eigen::Index>(latent_index(r))] = std::log(v);
}

void McgpHyperParams::set_noise(double v) {
    require_positive(v, "noise");
    noise_ = v;
    flat_[static_cast<Eigen::Index>(noise_index())] = std::log(v);
}

Vector McgpHyperParams::to_vector() const { return flat_; }

McgpHyperParams McgpHyperParams::from_vector(std::size_t cells, std::size_t latents, const Vector& v) {
    McgpHyperParams p(cells, latents);
    if (static_cast<std::size_t>(v.size()) != p.vector_size()) {
        throw Error(ErrorCode::DimensionMismatch, "hyperparameter vector has " + std::to_string(v.size()) +
                                                      " entries, expected " + std::to_string(p.vector_size()));
    }
    if (!v.allFinite()) throw Error(ErrorCode::InvalidArgument, "hyperparameter vector has non-finite entries");
    const std::size_t mr = cells * latents;
    for (std::size_t k = 0; k < mr; ++k) {
        p.amplitude_[k] = v[static_cast<Eigen::Index>(k)];
        p.smoother_width_[k] = std::exp(v[static_cast<Eigen::Index>(mr + k)]);
        require_positive(p.smoother_width_[k], "smoother width");
    }
    for (std::size_t r = 0; r < latents; ++r) {
        p.latent_width_[r] = std::exp(v[static_cast<Eigen::Index>(2 * mr + r)]);
        require_positive(p.latent_width_[r], "latent width");
    }
    p.noise_ = std::exp(v[static_cast<Eigen::Index>(2 * mr + latents)]);
    require_positive(p.noise_, "noise");
    p.flat_ = v;
    return p;
}

double smoother(double amplitude, double width, double lag) {
    const double u = lag / width;
    return amplitude / std::sqrt(kTwoPi * width * width) * std::exp(-0.5 * u * u);
}

double latent_kernel(double width, double lag) {
    return smoother(1.0, width, lag);
}

double mcgp_cross_cov(const McgpHyperParams& p, std::size_t i, double t, std::size_t j, double t2,
                      bool same_observation) {
    require_cell(p, i);
    require_cell(p, j);
    const double d = t - t2;
    const double d2 = d * d;
    double value = 0.0;
    for (std::size_t r = 0; r < p.latents(); ++r) {
        const double wi = p.smoother_width(i, r);
        const double wj = p.smoother_width(j, r);
        const double lr = p.latent_width(r);
        const double v = (wi * wi + wj * wj) + lr * lr;
        value += p.amplitude(i, r) * p.amplitude(j, r) / std::sqrt(kTwoPi * v) * std::exp(-0.5 * d2 / v);
    }
    if (same_observation) value += p.noise() * p.noise();
    return value;
}

namespace detail {

void accumulate_cross_cov_grad(const McgpHyperParams& p, std::size_t i, double t, std::size_t j, double t2,
                               bool same_observation, double weight, double* out) {
    const double d = t - t2;
    const double d2 = d * d;
    for (std::size_t r = 0; r < p.latents(); ++r) {
        const double si = p.amplitude(i, r);
        const double sj = p.amplitude(j, r);
        const double wi = p.smoother_width(i, r);
        const double wj = p.smoother_width(j, r);
        const double lr = p.latent_width(r);
        const double v = (wi * wi + wj * wj) + lr * lr;
        const double g = std::exp(-0.5 * d2 / v) / std::sqrt(kTwoPi * v);
        // d g / d v
        const double dg_dv = g * (0.5 * d2 / (v * v) - 0.5 / v);
        const double ss = si * sj;

        out[p.amplitude_index(i, r)] += weight * sj * g;
        out[p.amplitude_index(j, r)] += weight * si * g;
        out[p.smoother_index(i, r)] += weight * ss * dg_dv * 2.0 * wi * wi;
        out[p.smoother_index(j, r)] += weight * ss * dg_dv * 2.0 * wj * wj;
        out[p.latent_index(r)] += weight * ss * dg_dv * 2.0 * lr * lr;
    }
    if (same_observation) out[p.noise_index()] += weight * 2.0 * p.noise() * p.noise();
}

}  // namespace detail

Vector mcgp_cross_cov_grad(const McgpHyperParams& p, std::size_t i, double t, std::size_t j, double t2,
                           bool same_observation) {
    require_cell(p, i);
    require_cell(p, j);
    Vector g = Vector::Zero(static_cast<Eigen::Index>(p.vector_size()));
    detail::accumulate_cross_cov_grad(p, i, t, j, t2, same_observation, 1.0, g.data());
    return g;
}

}  // namespace mcgp
