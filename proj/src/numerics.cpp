#include "mcgp/numerics.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "mcgp/error.hpp"

namespace mcgp {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
        case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::TooFewPoints: return "TooFewPoints";
        case ErrorCode::OptimizerFailed: return "OptimizerFailed";
        case ErrorCode::UnknownCell: return "UnknownCell";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::DuplicateCycle: return "DuplicateCycle";
        case ErrorCode::NonPositiveCapacity: return "NonPositiveCapacity";
        case ErrorCode::TrainCountExceedsData: return "TrainCountExceedsData";
        case ErrorCode::EmptyInput: return "EmptyInput";
        case ErrorCode::FormatError: return "FormatError";
        case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

SymMatrix::SymMatrix(Eigen::Index n) : m_(Matrix::Zero(n, n)) {
    if (n < 1) throw Error(ErrorCode::DimensionMismatch, "SymMatrix dimension must be >= 1");
}

SymMatrix SymMatrix::from_dense(Matrix m) {
    if (m.rows() != m.cols() || m.rows() < 1) {
        throw Error(ErrorCode::DimensionMismatch, "SymMatrix requires a non-empty square matrix");
    }
    for (Eigen::Index a = 0; a < m.rows(); ++a) {
        for (Eigen::Index b = a + 1; b < m.cols(); ++b) {
            if (m(a, b) != m(b, a)) {
                throw Error(ErrorCode::DimensionMismatch,
                            "matrix not symmetric at (" + std::to_string(a) + "," + std::to_string(b) + ")");
            }
        }
    }
    SymMatrix out(m.rows());
    out.m_ = std::move(m);
    return out;
}

namespace {

bool try_factor(const Matrix& a, double jitter, CholFactor& out) {
    Matrix shifted = a;
    if (jitter > 0.0) shifted.diagonal().array() += jitter;
    Eigen::LLT<Matrix> llt(shifted);
    if (llt.info() != Eigen::Success) return false;
    Matrix lower = llt.matrixL();
    double logdet = 0.0;
    for (Eigen::Index k = 0; k < lower.rows(); ++k) {
        const double d = lower(k, k);
        if (!(d > 0.0) || !std::isfinite(d)) return false;
        logdet += 2.0 * std::log(d);
    }
    out.lower = std::move(lower);
    out.logdet = logdet;
    out.jitter_used = jitter;
    return true;
}

void require_size(const CholFactor& f, Eigen::Index rows) {
    if (rows != f.size()) {
        throw Error(ErrorCode::DimensionMismatch, "rhs has " + std::to_string(rows) + " rows, factor is " +
                                                      std::to_string(f.size()));
    }
}

}  // namespace

CholFactor cholesky(const SymMatrix& m) {
    const Matrix& a = m.dense();
    if (!a.allFinite()) throw Error(ErrorCode::InvalidArgument, "matrix has non-finite entries");

    CholFactor f;
    if (try_factor(a, 0.0, f)) return f;

    const double scale = m.mean_diagonal();
    if (scale > 0.0) {
        for (double rung : kJitterLadder) {
            if (try_factor(a, rung * scale, f)) return f;
        }
    }
    throw Error(ErrorCode::NotPositiveDefinite,
                "factorization failed at every jitter level (n=" + std::to_string(a.rows()) + ")");
}

Vector solve(const CholFactor& f, const Vector& rhs) {
    require_size(f, rhs.size());
    const auto lower = f.lower.triangularView<Eigen::Lower>();
    Vector x = lower.solve(rhs);
    lower.transpose().solveInPlace(x);
    return x;
}

Matrix solve(const CholFactor& f, const Matrix& rhs) {
    require_size(f, rhs.rows());
    const auto lower = f.lower.triangularView<Eigen::Lower>();
    Matrix x = lower.solve(rhs);
    lower.transpose().solveInPlace(x);
    return x;
}

Matrix solve_lower(const CholFactor& f, const Matrix& rhs) {
    require_size(f, rhs.rows());
    return f.lower.triangularView<Eigen::Lower>().solve(rhs);
}

Matrix inverse(const CholFactor& f) {
    Matrix inv = solve(f, Matrix::Identity(f.size(), f.size()).eval());
    return 0.5 * (inv + inv.transpose());
}

QuadratureRule gauss_legendre(int n) {
    if (n < 1) throw Error(ErrorCode::InvalidArgument, "Gauss-Legendre needs at least one node");
    QuadratureRule rule;
    rule.nodes.assign(n, 0.0);
    rule.weights.assign(n, 0.0);
    const int half = (n + 1) / 2;
    for (int i = 0; i < half; ++i) {
        // Chebyshev-like initial guess, then Newton on P_n.
        double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p1 = 1.0;
            double p2 = 0.0;
            for (int k = 1; k <= n; ++k) {
                const double p3 = p2;
                p2 = p1;
                p1 = ((2.0 * k - 1.0) * z * p2 - (k - 1.0) * p3) / k;
            }
            dp = n * (z * p1 - p2) / (z * z - 1.0);
            const double dz = p1 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-15) break;
        }
        // recompute derivative at the converged root
        double p1 = 1.0;
        double p2 = 0.0;
        for (int k = 1; k <= n; ++k) {
            const double p3 = p2;
            p2 = p1;
            p1 = ((2.0 * k - 1.0) * z * p2 - (k - 1.0) * p3) / k;
        }
        dp = n * (z * p1 - p2) / (z * z - 1.0);
        const double w = 2.0 / ((1.0 - z * z) * dp * dp);
        rule.nodes[i] = -z;
        rule.nodes[n - 1 - i] = z;
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    return rule;
}

double quad_double_integral(const Bivariate& f, std::pair<double, double> center, double half_width,
                            int n_nodes) {
    if (n_nodes < 64) throw Error(ErrorCode::InvalidArgument, "quadrature needs >= 64 nodes per axis");
    if (!(half_width > 0.0)) throw Error(ErrorCode::InvalidArgument, "half_width must be positive");
    const QuadratureRule rule = gauss_legendre(n_nodes);
    double total = 0.0;
    for (int a = 0; a < n_nodes; ++a) {
        const double x = center.first + half_width * rule.nodes[a];
        double row = 0.0;
        for (int b = 0; b < n_nodes; ++b) {
            const double y = center.second + half_width * rule.nodes[b];
            row += rule.weights[b] * f(x, y);
        }
        total += rule.weights[a] * row;
    }
    return total * half_width * half_width;
}

}  // namespace mcgp
