#pragma once

// Dense linear algebra and quadrature used by every model in the library.
//
// All covariance arithmetic is double precision. Factorization failures are
// handled here once: cholesky() escalates a diagonal jitter relative to the
// mean diagonal before giving up, and records how much it needed.

#include <array>
#include <functional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace mcgp {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Dense symmetric matrix. Entry (a,b) and (b,a) are always stored identically.
class SymMatrix {
public:
    explicit SymMatrix(Eigen::Index n);

    /// Throws DimensionMismatch if `m` is not square or not exactly symmetric.
    static SymMatrix from_dense(Matrix m);

    [[nodiscard]] Eigen::Index size() const noexcept { return m_.rows(); }
    [[nodiscard]] double operator()(Eigen::Index a, Eigen::Index b) const { return m_(a, b); }
    void set(Eigen::Index a, Eigen::Index b, double value) {
        m_(a, b) = value;
        m_(b, a) = value;
    }
    [[nodiscard]] const Matrix& dense() const noexcept { return m_; }
    [[nodiscard]] double mean_diagonal() const { return m_.diagonal().mean(); }

private:
    Matrix m_;
};

struct CholFactor {
    Matrix lower;
    double logdet = 0.0;
    double jitter_used = 0.0;

    [[nodiscard]] Eigen::Index size() const noexcept { return lower.rows(); }
};

/// Jitter multipliers (of the mean diagonal) tried after a plain factorization fails.
inline constexpr std::array<double, 4> kJitterLadder{1e-10, 1e-8, 1e-6, 1e-4};

/// Throws NotPositiveDefinite when every rung of kJitterLadder fails.
CholFactor cholesky(const SymMatrix& m);

/// Solves (M + jitter I) x = rhs.
Vector solve(const CholFactor& f, const Vector& rhs);
/// Column-wise solve for a block of right-hand sides.
Matrix solve(const CholFactor& f, const Matrix& rhs);
/// Solves L x = rhs with the lower factor only.
Matrix solve_lower(const CholFactor& f, const Matrix& rhs);
/// (M + jitter I)^{-1}, symmetrized.
Matrix inverse(const CholFactor& f);

struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// n-point Gauss-Legendre rule on [-1, 1].
QuadratureRule gauss_legendre(int n);

using Bivariate = std::function<double(double, double)>;

/// Tensor-product Gauss-Legendre estimate of the integral of f over the square
/// [cx - h, cx + h] x [cy - h, cy + h]. n_nodes is per axis and must be >= 64.
double quad_double_integral(const Bivariate& f, std::pair<double, double> center, double half_width,
                            int n_nodes);

}  // namespace mcgp
