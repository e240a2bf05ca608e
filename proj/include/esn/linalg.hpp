#pragma once

#include <cstddef>
#include <vector>

namespace esn {

// Dense row-major matrix of finite reals. Reservoirs are stored dense even
// when sparse in content; zeros are explicit.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols);  // zero-filled
    Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);

    static Matrix identity(std::size_t n);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool empty() const { return data_.empty(); }

    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }

    const std::vector<double>& data() const { return data_; }
    std::vector<double>& data() { return data_; }

    // Throws UsageError on any non-finite entry.
    void validate() const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

std::vector<double> matvec(const Matrix& a, const std::vector<double>& v);
Matrix matmul(const Matrix& a, const Matrix& b);
Matrix scaled(const Matrix& a, double factor);

// Ridge-regularized least squares for the readout.
//
// S is (regressor dim d) x (samples T), Y is (outputs L) x T. Returns the
// L x d minimizer of ||W S - Y||^2 + beta ||W||^2 via the normal equations
//   W = Y S^T (S S^T + beta I)^{-1}
// solved with a symmetric positive-definite (Cholesky) factorization.
// With beta = 0 a singular Gram matrix raises SingularError naming the
// first failing pivot.
Matrix ridge_solve(const Matrix& s, const Matrix& y, double beta);

struct SpectralEstimate {
    double radius = 0.0;
    bool converged = false;
    std::size_t iterations = 0;
};

// Power-iteration estimate of the spectral radius |lambda_max|.
//
// Starts from a fixed seeded random vector. Complex dominant pairs make the
// per-step norm growth oscillate, so the running estimate is the geometric
// mean of paired growth factors; convergence means that estimate moved less
// than tol (relatively) over ten consecutive iterations. When max_iter is
// exhausted the returned radius is the geometric mean of the growth factors
// over the last half of the run (stable for tightly clustered spectra, and
// exactly degree-1 homogeneous in W, which is what rescaling needs) with
// converged = false.
SpectralEstimate spectral_radius(const Matrix& w, double tol = 1e-6,
                                 std::size_t max_iter = 10000);

// W * (rho / spectral_radius(W)). Throws ScaleError when the measured
// radius is zero. tol/max_iter are forwarded to the estimator; re-measuring
// with the same parameters reproduces rho to rounding error.
Matrix scale_to_spectral_radius(const Matrix& w, double rho, double tol = 1e-6,
                                std::size_t max_iter = 10000);

}  // namespace esn
