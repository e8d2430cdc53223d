#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "mcgp/error.hpp"
#include "mcgp/igp.hpp"
#include "mcgp/log.hpp"
#include "oracles.hpp"

using namespace mcgp;

namespace {

std::vector<double> iota_cycles(int n, double start = 1.0, double step = 1.0) {
    std::vector<double> c(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) c[static_cast<std::size_t>(k)] = start + step * k;
    return c;
}

Matrix gram(const IgpKernelParams& p, const std::vector<double>& cycles) {
    const auto n = static_cast<Eigen::Index>(cycles.size());
    Matrix k(n, n);
    for (Eigen::Index a = 0; a < n; ++a) {
        for (Eigen::Index b = 0; b < n; ++b) {
            k(a, b) = igp_kernel(p, cycles[static_cast<std::size_t>(a)], cycles[static_cast<std::size_t>(b)], a == b);
        }
    }
    return k;
}

}  // namespace

TEST(FitBasis, LeastSquaresLine) {
    const auto c = iota_cycles(10);
    std::vector<double> y;
    for (double t : c) y.push_back(2.0 - 0.01 * t);
    const Basis b = fit_basis(BasisKind::Linear, c, y);
    EXPECT_NEAR(b.intercept, 2.0, 1e-12);
    EXPECT_NEAR(b.slope, -0.01, 1e-14);
    EXPECT_EQ(fit_basis(BasisKind::Zero, c, y)(5.0), 0.0);
}

TEST(IgpFit, ConstantData) {
    const auto c = iota_cycles(30);
    const std::vector<double> y(30, 1.8);
    const IgpModel m = igp_fit(c, y, BasisKind::Linear, 3, 1);
    EXPECT_NEAR(m.basis.slope, 0.0, 1e-12);
    EXPECT_NEAR(m.basis.intercept, 1.8, 1e-12);
    const PredictiveDistribution pd = igp_predict(m, {5.0, 50.0});
    EXPECT_NEAR(pd.mean[0], 1.8, 1e-6);
    EXPECT_NEAR(pd.mean[1], 1.8, 1e-6);
}

TEST(IgpFit, ExactlyLinearData) {
    const auto c = iota_cycles(40);
    std::vector<double> y;
    for (double t : c) y.push_back(1.9 - 0.004 * t);
    const IgpModel m = igp_fit(c, y, BasisKind::Linear, 3, 2);
    const PredictiveDistribution pd = igp_predict(m, {10.0, 60.0, 200.0});
    EXPECT_NEAR(pd.mean[0], 1.9 - 0.04, 1e-6);
    EXPECT_NEAR(pd.mean[1], 1.9 - 0.24, 1e-6);
    EXPECT_NEAR(pd.mean[2], 1.9 - 0.8, 1e-6);
}

TEST(IgpFit, TooFewPoints) {
    try {
        (void)igp_fit({1.0, 2.0}, {1.0, 1.1}, BasisKind::Zero, 2, 0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::TooFewPoints);
    }
}

TEST(IgpFit, DuplicateCyclesRejected) {
    EXPECT_THROW((void)igp_fit({1.0, 2.0, 2.0, 3.0}, {1.0, 1.1, 1.2, 1.3}, BasisKind::Zero, 2, 0), Error);
}

TEST(IgpFit, RecoversLengthScaleFromPriorDraws) {
    const IgpKernelParams truth{0.05, 20.0, {}, 0.005};
    const auto c = iota_cycles(100);
    const Matrix k = gram(truth, c);
    std::vector<double> ratios;
    for (std::uint64_t trial = 0; trial < 20; ++trial) {
        std::mt19937_64 rng(1000 + trial);
        const Eigen::VectorXd y = oracle::sample_gaussian(k, rng);
        const IgpModel m = igp_fit(c, std::vector<double>(y.data(), y.data() + y.size()), BasisKind::Zero, 5, trial);
        ratios.push_back(m.params.length / truth.length);
    }
    std::nth_element(ratios.begin(), ratios.begin() + 10, ratios.end());
    const double median = ratios[10];
    EXPECT_GE(median, 0.5);
    EXPECT_LE(median, 2.0);
}

TEST(IgpFit, LikelihoodBeatsEveryStart) {
    const IgpKernelParams truth{0.05, 15.0, {}, 0.01};
    const auto c = iota_cycles(60, 1.0, 2.0);
    std::mt19937_64 rng(5);
    const Eigen::VectorXd y = oracle::sample_gaussian(gram(truth, c), rng);
    const std::vector<double> caps(y.data(), y.data() + y.size());
    const IgpModel m = igp_fit(c, caps, BasisKind::Zero, 6, 9);
    // the fitted likelihood should beat the generating parameters too
    EXPECT_GE(m.log_likelihood, igp_log_likelihood(truth, c, caps) - 1e-6);
    const double dense = oracle::mvn_logpdf(y, gram(m.params, c));
    EXPECT_NEAR(m.log_likelihood, dense, 1e-8 * std::abs(dense));
}

TEST(IgpPredict, InterpolatesNoiseFree) {
    IgpKernelParams p{0.5, 5.0, {}, 0.0};
    const auto c = iota_cycles(8, 0.0, 3.0);
    std::vector<double> y;
    for (double t : c) y.push_back(std::sin(t / 5.0));
    const IgpModel m = igp_condition(p, Basis{}, c, y);
    const PredictiveDistribution pd = igp_predict(m, c);
    for (std::size_t k = 0; k < c.size(); ++k) {
        EXPECT_NEAR(pd.mean[static_cast<Eigen::Index>(k)], y[k], 1e-6);
        EXPECT_LE(pd.covariance.dense()(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k)), 1e-8);
    }
}

TEST(IgpPredict, RevertsToPriorFarAway) {
    IgpKernelParams p{0.3, 5.0, {}, 0.01};
    const auto c = iota_cycles(10);
    std::vector<double> y(10, 0.7);
    const IgpModel zero = igp_condition(p, Basis{}, c, y);
    const PredictiveDistribution pd = igp_predict(zero, {1000.0});
    EXPECT_NEAR(pd.mean[0], 0.0, 1e-12);
    EXPECT_NEAR(pd.covariance.dense()(0, 0), 0.09, 1e-12);

    const Basis line{BasisKind::Linear, 2.0, -0.001};
    std::vector<double> y2;
    for (double t : c) y2.push_back(line(t) + 0.05);
    const IgpModel lin = igp_condition(p, line, c, y2);
    EXPECT_NEAR(igp_predict(lin, {1000.0}).mean[0], line(1000.0), 1e-12);
}

TEST(IgpPredict, VarianceBoundedByPrior) {
    IgpKernelParams p{0.2, 8.0, {}, 0.03};
    const auto c = iota_cycles(25, 0.0, 2.0);
    std::mt19937_64 rng(4);
    std::vector<double> y;
    for (std::size_t k = 0; k < c.size(); ++k) y.push_back(oracle::std_normal(rng) * 0.1);
    const IgpModel m = igp_condition(p, Basis{}, c, y);
    std::vector<double> q;
    for (double t = -20.0; t < 80.0; t += 0.7) q.push_back(t);
    const PredictiveDistribution pd = igp_predict(m, q, true);
    for (Eigen::Index k = 0; k < pd.stddev.size(); ++k) {
        EXPECT_LE(pd.stddev[k] * pd.stddev[k], 0.04 + 0.0009 + 1e-9);
        EXPECT_GE(pd.stddev[k], 0.0);
    }
}

TEST(IgpPredict, TrainingOrderDoesNotMatter) {
    IgpKernelParams p{0.2, 8.0, {}, 0.03};
    std::vector<double> c = iota_cycles(20, 0.0, 1.5);
    std::vector<double> y;
    for (double t : c) y.push_back(std::cos(t / 7.0));
    const IgpModel a = igp_condition(p, Basis{BasisKind::Linear, 1.0, 0.01}, c, y);
    std::vector<std::size_t> idx(c.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::mt19937_64 rng(3);
    std::shuffle(idx.begin(), idx.end(), rng);
    std::vector<double> c2;
    std::vector<double> y2;
    for (std::size_t k : idx) {
        c2.push_back(c[k]);
        y2.push_back(y[k]);
    }
    const IgpModel b = igp_condition(p, Basis{BasisKind::Linear, 1.0, 0.01}, c2, y2);
    const std::vector<double> q{-3.0, 4.2, 11.0, 40.0};
    const auto pa = igp_predict(a, q);
    const auto pb = igp_predict(b, q);
    for (Eigen::Index k = 0; k < 4; ++k) {
        EXPECT_NEAR(pa.mean[k], pb.mean[k], 1e-10);
        EXPECT_NEAR(pa.stddev[k], pb.stddev[k], 1e-10);
    }
}

TEST(IgpPredict, NegativeVarianceClampedAndLogged) {
    PredictiveDistribution pd;
    pd.cycles = {1.0, 2.0};
    pd.mean = Vector::Zero(2);
    Matrix cov(2, 2);
    cov << -1e-14, 0.0, 0.0, 0.25;
    int warnings = 0;
    set_log_sink([&](std::string_view) { ++warnings; });
    finalize_predictive(pd, cov);
    set_log_sink(nullptr);
    EXPECT_EQ(pd.stddev[0], 0.0);
    EXPECT_DOUBLE_EQ(pd.stddev[1], 0.5);
    EXPECT_EQ(pd.clamped, 1u);
    EXPECT_EQ(warnings, 1);
}
