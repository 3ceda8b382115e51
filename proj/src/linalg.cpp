#include "nslb/linalg.hpp"

#include <cmath>

namespace nslb {

SpdMatrix::SpdMatrix(Matrix m) : m_(std::move(m)) {
    if (m_.rows() != m_.cols()) {
        throw DimensionMismatch("SpdMatrix: matrix is not square");
    }
    for (Eigen::Index i = 0; i < m_.rows(); ++i) {
        for (Eigen::Index j = i + 1; j < m_.cols(); ++j) {
            const double tol = 1e-12 * std::max(1.0, std::abs(m_(i, j)));
            if (std::abs(m_(i, j) - m_(j, i)) > tol) {
                throw DimensionMismatch("SpdMatrix: matrix is not symmetric");
            }
        }
    }
    m_ = ((m_ + m_.transpose()) * 0.5).eval();
}

SpdMatrix SpdMatrix::identity(Eigen::Index d) {
    return SpdMatrix(Matrix::Identity(d, d));
}

SpdMatrix SpdMatrix::scaled_identity(Eigen::Index d, double alpha) {
    return SpdMatrix(Matrix::Identity(d, d) * alpha);
}

Cholesky::Cholesky(const SpdMatrix& m) {
    llt_.compute(m.matrix());
    if (llt_.info() != Eigen::Success) {
        // Retry once with a trace-scaled diagonal shift before giving up.
        const double jitter = 1e-10 * m.matrix().trace() / static_cast<double>(m.dim());
        Matrix shifted = m.matrix();
        shifted.diagonal().array() += jitter;
        llt_.compute(shifted);
        if (llt_.info() != Eigen::Success) {
            throw NotPositiveDefinite("Cholesky factorization failed");
        }
    }
}

Vector Cholesky::solve(const Vector& v) const {
    return llt_.solve(v);
}

double Cholesky::log_det() const {
    return 2.0 * llt_.matrixL().toDenseMatrix().diagonal().array().log().sum();
}

Vector solve(const SpdMatrix& m, const Vector& v) {
    if (v.size() != m.dim()) {
        throw DimensionMismatch("solve: vector length does not match matrix dimension");
    }
    return Cholesky(m).solve(v);
}

double quad_form_inv(const SpdMatrix& m, const Vector& a) {
    if (a.size() != m.dim()) {
        throw DimensionMismatch("quad_form_inv: vector length does not match matrix dimension");
    }
    const double q = a.dot(Cholesky(m).solve(a));
    return std::max(q, 0.0);
}

double log_det(const SpdMatrix& m) {
    return Cholesky(m).log_det();
}

bool psd_dominates(const SpdMatrix& a, const SpdMatrix& b, double tol) {
    if (a.dim() != b.dim()) {
        throw DimensionMismatch("psd_dominates: dimension mismatch");
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(a.matrix() - b.matrix(), Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff() >= -tol;
}

double psd_default_tol(const SpdMatrix& a) {
    return 1e-9 * (1.0 + a.matrix().norm());
}

}  // namespace nslb
