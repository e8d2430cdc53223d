#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "mcgp/error.hpp"
#include "mcgp/kernels.hpp"
#include "mcgp/model.hpp"
#include "oracles.hpp"

using namespace mcgp;

namespace {

double rel_err(double a, double b) {
    const double scale = std::max(std::abs(a), std::abs(b));
    return scale < 1e-300 ? 0.0 : std::abs(a - b) / scale;
}

McgpHyperParams unit_params(std::size_t cells, std::size_t latents) {
    McgpHyperParams p(cells, latents);
    for (std::size_t i = 0; i < cells; ++i) {
        for (std::size_t r = 0; r < latents; ++r) {
            p.set_amplitude(i, r, 1.0);
            p.set_smoother_width(i, r, 1.0);
        }
    }
    for (std::size_t r = 0; r < latents; ++r) p.set_latent_width(r, 1.0);
    p.set_noise(0.1);
    return p;
}

}  // namespace

TEST(IgpKernel, ZeroDistance) {
    IgpKernelParams p{1.0, 1.0, {}, 0.0};
    EXPECT_DOUBLE_EQ(igp_kernel(p, 5.0, 5.0, false), 1.0);
}

TEST(IgpKernel, NoiseOnSameObservation) {
    IgpKernelParams p{1.0, 1.0, {}, 0.5};
    EXPECT_DOUBLE_EQ(igp_kernel(p, 5.0, 5.0, true), 1.25);
    EXPECT_DOUBLE_EQ(igp_kernel(p, 5.0, 5.0, false), 1.0);
}

TEST(IgpKernel, ScaledDistance) {
    IgpKernelParams p{2.0, 10.0, {}, 0.0};
    EXPECT_NEAR(igp_kernel(p, 0.0, 10.0, false), 4.0 * std::exp(-0.5), 1e-14);
    EXPECT_NEAR(igp_kernel(p, 0.0, 10.0, false), 2.42612, 1e-5);
}

TEST(IgpKernel, Covariates) {
    IgpKernelParams p{1.0, 1.0, {2.0}, 0.0};
    EXPECT_NEAR(igp_kernel(p, 0.0, {0.0}, 0.0, {2.0}, false), std::exp(-0.5), 1e-15);
    try {
        (void)igp_kernel(p, 0.0, {}, 0.0, {1.0}, false);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::DimensionMismatch);
    }
}

TEST(IgpKernel, DiagonalDominates) {
    IgpKernelParams p{1.7, 4.0, {}, 0.0};
    const double diag = igp_kernel(p, 3.0, 3.0, false);
    EXPECT_DOUBLE_EQ(diag, 1.7 * 1.7);
    for (double d = 0.5; d < 50.0; d += 0.5) EXPECT_LT(igp_kernel(p, 3.0, 3.0 + d, false), diag);
}

TEST(IgpKernel, RejectsNonPositiveScales) {
    EXPECT_THROW((IgpKernelParams{0.0, 1.0, {}, 0.1}.validate()), Error);
    EXPECT_THROW((IgpKernelParams{1.0, -1.0, {}, 0.1}.validate()), Error);
    EXPECT_NO_THROW((IgpKernelParams{1.0, 1.0, {}, 0.0}.validate()));
}

TEST(Smoother, Examples) {
    EXPECT_NEAR(smoother(1.0, 1.0, 0.0), 1.0 / std::sqrt(2.0 * std::numbers::pi), 1e-15);
    EXPECT_NEAR(smoother(1.0, 1.0, 0.0), 0.398942, 1e-6);
    EXPECT_EQ(smoother(0.0, 2.0, 1.5), 0.0);
    EXPECT_NEAR(smoother(2.0, 3.0, 3.0), 2.0 / std::sqrt(18.0 * std::numbers::pi) * std::exp(-0.5), 1e-15);
}

TEST(CrossCov, UnitParamsZeroLag) {
    McgpHyperParams p = unit_params(1, 1);
    const double v = mcgp_cross_cov(p, 0, 7.0, 0, 7.0, false);
    EXPECT_NEAR(v, 1.0 / std::sqrt(6.0 * std::numbers::pi), 1e-15);
    EXPECT_NEAR(v, 0.230329, 1e-6);
    EXPECT_NEAR(v, oracle::cross_cov_by_quadrature(p, 0, 7.0, 0, 7.0, false), 1e-10);
}

TEST(CrossCov, ZeroAmplitudesGiveZero) {
    std::mt19937_64 rng(5);
    McgpHyperParams p = oracle::random_hyper(3, 2, rng, 0.5, 20.0, 10.0, 0.3);
    for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t r = 0; r < 2; ++r) p.set_amplitude(i, r, 0.0);
    }
    EXPECT_EQ(mcgp_cross_cov(p, 0, 1.0, 2, 4.0, false), 0.0);
    EXPECT_EQ(mcgp_cross_cov(p, 1, 1.0, 1, 1.0, false), 0.0);
}

TEST(CrossCov, SameObservationAddsNoise) {
    std::mt19937_64 rng(6);
    const McgpHyperParams p = oracle::random_hyper(2, 2, rng, 0.5, 20.0, 5.0, 0.3);
    const double base = mcgp_cross_cov(p, 1, 3.0, 1, 3.0, false);
    EXPECT_NEAR(mcgp_cross_cov(p, 1, 3.0, 1, 3.0, true), base + 0.09, 1e-14);
}

TEST(CrossCov, IndexOutOfRange) {
    const McgpHyperParams p = unit_params(2, 1);
    try {
        (void)mcgp_cross_cov(p, 2, 0.0, 0, 0.0, false);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::IndexOutOfRange);
    }
}

TEST(CrossCov, SymmetricOverRandomDraws) {
    std::mt19937_64 rng(2024);
    for (int k = 0; k < 1000; ++k) {
        const McgpHyperParams p = oracle::random_hyper(3, 2, rng, 0.5, 50.0, 100.0, 0.05);
        const auto i = static_cast<std::size_t>(uniform(rng, 0.0, 3.0));
        const auto j = static_cast<std::size_t>(uniform(rng, 0.0, 3.0));
        const double t = uniform(rng, 0.0, 200.0);
        const double t2 = uniform(rng, 0.0, 200.0);
        EXPECT_EQ(mcgp_cross_cov(p, i, t, j, t2, false), mcgp_cross_cov(p, j, t2, i, t, false));
    }
}

TEST(CrossCov, MatchesQuadratureOverRandomDraws) {
    std::mt19937_64 rng(77);
    for (int k = 0; k < 50; ++k) {
        const McgpHyperParams p = oracle::random_hyper(2, 2, rng, 0.5, 50.0, 100.0, 0.05);
        const double t = uniform(rng, 0.0, 100.0);
        const double t2 = t + uniform(rng, -100.0, 100.0);
        const auto i = static_cast<std::size_t>(k % 2);
        const auto j = static_cast<std::size_t>((k / 2) % 2);
        const double closed = mcgp_cross_cov(p, i, t, j, t2, false);
        for (std::size_t r = 0; r < 2; ++r) {
            // per-latent comparison avoids cancellation between terms of opposite sign
            const double vr = p.smoother_width(i, r) * p.smoother_width(i, r) +
                              p.smoother_width(j, r) * p.smoother_width(j, r) + p.latent_width(r) * p.latent_width(r);
            const double term = p.amplitude(i, r) * p.amplitude(j, r) * oracle::normal_density(t - t2, std::sqrt(vr));
            const double quad = oracle::latent_term_by_quadrature(p, i, t, j, t2, r, 256);
            EXPECT_LE(rel_err(term, quad), 1e-6) << "draw " << k << " latent " << r;
        }
        const double quad_total = oracle::cross_cov_by_quadrature(p, i, t, j, t2, false);
        EXPECT_LE(std::abs(closed - quad_total), 1e-6 * std::max(std::abs(closed), 1e-12) + 1e-12) << "draw " << k;
    }
}

TEST(CrossCov, SignFlipInvariance) {
    std::mt19937_64 rng(8);
    const McgpHyperParams p = oracle::random_hyper(3, 2, rng, 0.5, 30.0, 50.0, 0.1);
    McgpHyperParams q = p;
    for (std::size_t i = 0; i < 3; ++i) q.set_amplitude(i, 1, -p.amplitude(i, 1));
    for (int k = 0; k < 200; ++k) {
        const auto i = static_cast<std::size_t>(k % 3);
        const auto j = static_cast<std::size_t>((k / 3) % 3);
        const double t = uniform(rng, 0.0, 150.0);
        const double t2 = uniform(rng, 0.0, 150.0);
        EXPECT_EQ(mcgp_cross_cov(p, i, t, j, t2, false), mcgp_cross_cov(q, i, t, j, t2, false));
    }
}

TEST(CrossCov, LatentPermutationInvariance) {
    std::mt19937_64 rng(9);
    const McgpHyperParams p = oracle::random_hyper(3, 3, rng, 0.5, 30.0, 50.0, 0.1);
    const std::size_t perm[3] = {2, 0, 1};
    McgpHyperParams q(3, 3);
    for (std::size_t r = 0; r < 3; ++r) {
        for (std::size_t i = 0; i < 3; ++i) {
            q.set_amplitude(i, perm[r], p.amplitude(i, r));
            q.set_smoother_width(i, perm[r], p.smoother_width(i, r));
        }
        q.set_latent_width(perm[r], p.latent_width(r));
    }
    q.set_noise(p.noise());
    for (int k = 0; k < 200; ++k) {
        const auto i = static_cast<std::size_t>(k % 3);
        const auto j = static_cast<std::size_t>((k / 3) % 3);
        const double t = uniform(rng, 0.0, 150.0);
        const double t2 = uniform(rng, 0.0, 150.0);
        const double a = mcgp_cross_cov(p, i, t, j, t2, false);
        const double b = mcgp_cross_cov(q, i, t, j, t2, false);
        // summation order changes, so allow rounding
        EXPECT_NEAR(a, b, 1e-12 * std::max(1.0, std::abs(a)));
    }
}

TEST(CrossCov, GramIsPsdWithBoundedJitter) {
    std::mt19937_64 rng(10);
    for (int draw = 0; draw < 20; ++draw) {
        const McgpHyperParams p = oracle::random_hyper(3, 2, rng, 0.5, 50.0, 10.0, 1e-3);
        TrainingSet train;
        for (std::size_t i = 0; i < 3; ++i) {
            std::vector<double> cycles;
            std::vector<double> caps;
            for (int c = 1; c <= 66; ++c) {
                cycles.push_back(static_cast<double>(c) * 2.0 + static_cast<double>(i));
                caps.push_back(1.0);
            }
            train.add_cell("c" + std::to_string(i), cycles, caps);
        }
        const SymMatrix k = assemble_gram(p, train);
        const CholFactor f = cholesky(k);
        EXPECT_LE(f.jitter_used, 1e-6 * k.mean_diagonal()) << "draw " << draw;
    }
}

TEST(CrossCovGrad, ZeroPartnerAmplitude) {
    std::mt19937_64 rng(11);
    McgpHyperParams p = oracle::random_hyper(2, 2, rng, 0.5, 20.0, 5.0, 0.1);
    p.set_amplitude(0, 0, 0.0);
    p.set_amplitude(0, 1, 0.0);
    const Vector g = mcgp_cross_cov_grad(p, 0, 2.0, 1, 5.0, false);
    for (std::size_t r = 0; r < 2; ++r) EXPECT_EQ(g[static_cast<Eigen::Index>(p.amplitude_index(1, r))], 0.0);
}

TEST(CrossCovGrad, NoiseDerivative) {
    McgpHyperParams p = unit_params(1, 1);
    p.set_noise(0.3);
    const Vector g = mcgp_cross_cov_grad(p, 0, 2.0, 0, 2.0, true);
    // log-space entry divided by theta_eps gives the raw-space derivative
    EXPECT_NEAR(g[static_cast<Eigen::Index>(p.noise_index())] / p.noise(), 2.0 * p.noise(), 1e-14);
    EXPECT_EQ(mcgp_cross_cov_grad(p, 0, 2.0, 0, 2.0, false)[static_cast<Eigen::Index>(p.noise_index())], 0.0);
}

TEST(CrossCovGrad, MatchesFiniteDifferences) {
    std::mt19937_64 rng(12);
    for (int draw = 0; draw < 30; ++draw) {
        const McgpHyperParams p = oracle::random_hyper(3, 2, rng, 0.5, 30.0, 10.0, 0.2);
        const auto i = static_cast<std::size_t>(draw % 3);
        const auto j = static_cast<std::size_t>((draw / 3) % 3);
        const double t = uniform(rng, 0.0, 60.0);
        const double t2 = i == j && draw % 2 == 0 ? t : uniform(rng, 0.0, 60.0);
        const bool same = i == j && t == t2;
        auto f = [&](const Eigen::VectorXd& v) {
            return mcgp_cross_cov(McgpHyperParams::from_vector(3, 2, v), i, t, j, t2, same);
        };
        const Vector x = p.to_vector();
        const Vector fd = oracle::central_difference(f, x, 1e-6);
        const Vector an = mcgp_cross_cov_grad(p, i, t, j, t2, same);
        const double scale = std::max(an.cwiseAbs().maxCoeff(), 1e-12);
        for (Eigen::Index k = 0; k < x.size(); ++k) {
            EXPECT_LE(std::abs(an[k] - fd[k]), 1e-5 * scale) << "draw " << draw << " entry " << k;
        }
    }
}

TEST(HyperParams, VectorRoundTripIsExact) {
    std::mt19937_64 rng(13);
    const McgpHyperParams p = oracle::random_hyper(3, 2, rng, 0.5, 30.0, 10.0, 0.2);
    const Vector v = p.to_vector();
    ASSERT_EQ(static_cast<std::size_t>(v.size()), p.vector_size());
    const McgpHyperParams q = McgpHyperParams::from_vector(3, 2, v);
    EXPECT_EQ(q.to_vector(), v);
    EXPECT_NEAR(q.smoother_width(2, 1), p.smoother_width(2, 1), 1e-12 * p.smoother_width(2, 1));
    EXPECT_EQ(q.amplitude(1, 0), p.amplitude(1, 0));
}

TEST(HyperParams, Validation) {
    McgpHyperParams p(2, 1);
    EXPECT_THROW(p.set_smoother_width(0, 0, 0.0), Error);
    EXPECT_THROW(p.set_latent_width(0, -1.0), Error);
    EXPECT_THROW(p.set_noise(0.0), Error);
    EXPECT_NO_THROW(p.set_amplitude(0, 0, -3.0));
    try {
        (void)McgpHyperParams::from_vector(2, 1, Vector::Zero(3));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::DimensionMismatch);
    }
    Vector bad = Vector::Zero(static_cast<Eigen::Index>(p.vector_size()));
    bad[0] = std::nan("");
    EXPECT_THROW((void)McgpHyperParams::from_vector(2, 1, bad), Error);
}
