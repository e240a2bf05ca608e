#include "esn/linalg.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <cmath>
#include <string>

#include "esn/errors.hpp"
#include "esn/rng.hpp"

namespace esn {

namespace {

using EigenRowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstMap = Eigen::Map<const EigenRowMat>;
using MutMap = Eigen::Map<EigenRowMat>;
using ConstVecMap = Eigen::Map<const Eigen::VectorXd>;

ConstMap map_of(const Matrix& m) {
    return ConstMap(m.data().data(), static_cast<Eigen::Index>(m.rows()),
                    static_cast<Eigen::Index>(m.cols()));
}

// Fixed seed for the power-iteration start vector; estimates must not
// depend on any experiment seed.
constexpr std::uint64_t kPowerIterationSeed = 0x5DEECE66Dull;

}  // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_) {
        throw UsageError("matrix: data length " + std::to_string(data_.size()) +
                         " does not match " + std::to_string(rows_) + "x" + std::to_string(cols_));
    }
    validate();
}

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

void Matrix::validate() const {
    for (std::size_t i = 0; i < data_.size(); ++i) {
        if (!std::isfinite(data_[i])) {
            throw UsageError("matrix: non-finite entry at flat index " + std::to_string(i));
        }
    }
}

std::vector<double> matvec(const Matrix& a, const std::vector<double>& v) {
    if (a.cols() != v.size()) {
        throw UsageError("matvec: dimensions " + std::to_string(a.rows()) + "x" +
                         std::to_string(a.cols()) + " vs vector " + std::to_string(v.size()));
    }
    std::vector<double> out(a.rows());
    Eigen::Map<Eigen::VectorXd>(out.data(), static_cast<Eigen::Index>(out.size())).noalias() =
        map_of(a) * ConstVecMap(v.data(), static_cast<Eigen::Index>(v.size()));
    return out;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) {
        throw UsageError("matmul: inner dimensions differ (" + std::to_string(a.cols()) + " vs " +
                         std::to_string(b.rows()) + ")");
    }
    Matrix out(a.rows(), b.cols());
    MutMap(out.data().data(), static_cast<Eigen::Index>(out.rows()),
           static_cast<Eigen::Index>(out.cols()))
        .noalias() = map_of(a) * map_of(b);
    return out;
}

Matrix scaled(const Matrix& a, double factor) {
    Matrix out = a;
    for (auto& x : out.data()) x *= factor;
    return out;
}

Matrix ridge_solve(const Matrix& s, const Matrix& y, double beta) {
    if (s.cols() == 0 || s.cols() != y.cols()) {
        throw UsageError("ridge_solve: S and Y must share a positive sample count");
    }
    if (!(beta >= 0.0) || !std::isfinite(beta)) {
        throw UsageError("ridge_solve: beta must be finite and >= 0");
    }
    const auto d = static_cast<Eigen::Index>(s.rows());
    auto sm = map_of(s);
    auto ym = map_of(y);

    Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(d, d);
    gram.selfadjointView<Eigen::Lower>().rankUpdate(sm);
    gram.diagonal().array() += beta;

    Eigen::LLT<Eigen::MatrixXd> llt(gram.selfadjointView<Eigen::Lower>());
    if (llt.info() != Eigen::Success) {
        // Re-run a plain Cholesky scan to name the first failing pivot.
        Eigen::MatrixXd g = gram.selfadjointView<Eigen::Lower>();
        std::size_t pivot = 0;
        for (Eigen::Index k = 0; k < d; ++k) {
            double diag = g(k, k);
            for (Eigen::Index j = 0; j < k; ++j) diag -= g(k, j) * g(k, j);
            if (!(diag > 0.0)) {
                pivot = static_cast<std::size_t>(k);
                break;
            }
            g(k, k) = std::sqrt(diag);
            for (Eigen::Index i = k + 1; i < d; ++i) {
                double v = g(i, k);
                for (Eigen::Index j = 0; j < k; ++j) v -= g(i, j) * g(k, j);
                g(i, k) = v / g(k, k);
            }
        }
        throw SingularError(beta == 0.0
                                ? "ridge_solve: Gram matrix singular with beta = 0"
                                : "ridge_solve: Cholesky failed; increase beta",
                            pivot);
    }

    // W = Y S^T G^{-1}  via  G X = S Y^T, W = X^T.
    Eigen::MatrixXd rhs = sm * ym.transpose();
    Eigen::MatrixXd x = llt.solve(rhs);

    Matrix out(y.rows(), s.rows());
    MutMap(out.data().data(), static_cast<Eigen::Index>(out.rows()),
           static_cast<Eigen::Index>(out.cols()))
        .noalias() = x.transpose();
    return out;
}

SpectralEstimate spectral_radius(const Matrix& w, double tol, std::size_t max_iter) {
    if (w.rows() != w.cols()) throw UsageError("spectral_radius: matrix must be square");
    if (!(tol > 0.0)) throw UsageError("spectral_radius: tol must be positive");
    if (w.rows() == 0) return {0.0, true, 0};
    if (max_iter < 2) throw UsageError("spectral_radius: max_iter must be at least 2");

    const auto n = static_cast<Eigen::Index>(w.rows());
    auto wm = map_of(w);

    RngStream rng(kPowerIterationSeed, 0);
    Eigen::VectorXd x(n);
    for (Eigen::Index i = 0; i < n; ++i) x[i] = rng.uniform(-1.0, 1.0);
    x /= x.norm();

    Eigen::VectorXd y(n);
    std::vector<double> log_growth;
    log_growth.reserve(max_iter);
    double prev_growth = 0.0;
    double prev_estimate = 0.0;
    std::size_t stable = 0;

    for (std::size_t k = 1; k <= max_iter; ++k) {
        y.noalias() = wm * x;
        double growth = y.norm();
        if (growth == 0.0) return {0.0, true, k};  // start vector annihilated
        if (!std::isfinite(growth)) {
            throw UsageError("spectral_radius: iteration produced non-finite values");
        }
        x = y / growth;
        log_growth.push_back(std::log(growth));
        if (k >= 2) {
            double estimate = std::sqrt(growth * prev_growth);
            if (prev_estimate > 0.0 && std::abs(estimate - prev_estimate) <= tol * estimate) {
                if (++stable >= 10) return {estimate, true, k};
            } else {
                stable = 0;
            }
            prev_estimate = estimate;
        }
        prev_growth = growth;
    }

    // Tail geometric mean of the growth factors.
    std::size_t half = log_growth.size() / 2;
    double sum = 0.0;
    for (std::size_t i = half; i < log_growth.size(); ++i) sum += log_growth[i];
    double radius = std::exp(sum / static_cast<double>(log_growth.size() - half));
    return {radius, false, max_iter};
}

Matrix scale_to_spectral_radius(const Matrix& w, double rho, double tol, std::size_t max_iter) {
    if (!(rho > 0.0) || !std::isfinite(rho)) {
        throw UsageError("scale_to_spectral_radius: rho must be positive and finite");
    }
    SpectralEstimate est = spectral_radius(w, tol, max_iter);
    if (est.radius == 0.0) {
        throw ScaleError("scale_to_spectral_radius: measured radius is zero; cannot scale");
    }
    return scaled(w, rho / est.radius);
}

}  // namespace esn
