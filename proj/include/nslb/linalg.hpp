#ifndef NSLB_LINALG_HPP
#define NSLB_LINALG_HPP

#include <Eigen/Dense>

#include "nslb/errors.hpp"

namespace nslb {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Dense symmetric positive-(semi)definite matrix.
///
/// Construction enforces symmetry up to round-off and stores the
/// symmetrized part. Positive definiteness is checked lazily, at the
/// point where a factorization is requested.
class SpdMatrix {
  public:
    explicit SpdMatrix(Matrix m);

    static SpdMatrix identity(Eigen::Index d);
    static SpdMatrix scaled_identity(Eigen::Index d, double alpha);

    Eigen::Index dim() const { return m_.rows(); }
    const Matrix& matrix() const { return m_; }

    double operator()(Eigen::Index i, Eigen::Index j) const { return m_(i, j); }

    // In-place rank-related updates used by the recursive estimators.
    // The result stays symmetric by construction.
    void scale(double alpha) { m_ *= alpha; }
    void add_outer(const Vector& a) { m_.noalias() += a * a.transpose(); }
    void subtract_outer(const Vector& a) { m_.noalias() -= a * a.transpose(); }
    void add_diagonal(double alpha) { m_.diagonal().array() += alpha; }

  private:
    Matrix m_;
};

/// One-shot Cholesky factorization of an SpdMatrix, with a single jitter
/// retry on failure. Factor once, then solve against many right-hand
/// sides. Not meant to be cached across estimator updates.
class Cholesky {
  public:
    explicit Cholesky(const SpdMatrix& m);

    Vector solve(const Vector& v) const;
    double log_det() const;

  private:
    Eigen::LLT<Matrix> llt_;
};

/// Solves M x = v. Factorization is recomputed on every call.
Vector solve(const SpdMatrix& m, const Vector& v);

/// Quadratic form a' M^{-1} a, i.e. the squared M^{-1}-norm of a.
double quad_form_inv(const SpdMatrix& m, const Vector& a);

/// ln det(M) via the Cholesky diagonal.
double log_det(const SpdMatrix& m);

/// True iff A - B is positive semi-definite up to tol, i.e. the minimum
/// eigenvalue of A - B is >= -tol.
bool psd_dominates(const SpdMatrix& a, const SpdMatrix& b, double tol);

/// Default tolerance for psd_dominates: 1e-9 * (1 + ||A||_F).
double psd_default_tol(const SpdMatrix& a);

}  // namespace nslb

#endif
