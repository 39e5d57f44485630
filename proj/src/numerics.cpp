#include "rebal/numerics.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace rebal {

namespace {

Eigen::LLT<Matrix> factorize(const Matrix& m) {
  Eigen::LLT<Matrix> llt(m);
  if (llt.info() != Eigen::Success) {
    throw std::runtime_error("SpdMatrix: Cholesky factorization failed");
  }
  return llt;
}

bool all_finite(const Vector& x) { return x.allFinite(); }

}  // namespace

SpdMatrix SpdMatrix::scaled_identity(int dim, double lambda) {
  if (dim < 1) throw std::invalid_argument("SpdMatrix: dim must be >= 1");
  if (!(lambda > 0.0)) throw std::invalid_argument("SpdMatrix: lambda must be > 0");
  return SpdMatrix(lambda * Matrix::Identity(dim, dim));
}

void SpdMatrix::add_outer(const Vector& x) {
  if (x.size() != m_.rows()) throw std::invalid_argument("SpdMatrix: dimension mismatch");
  m_.noalias() += x * x.transpose();
}

double SpdMatrix::log_det() const {
  auto llt = factorize(m_);
  return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
}

Matrix SpdMatrix::inverse() const {
  auto llt = factorize(m_);
  Matrix inv = llt.solve(Matrix::Identity(m_.rows(), m_.cols()));
  // Keep the stored inverse exactly symmetric.
  return 0.5 * (inv + inv.transpose());
}

RidgeState::RidgeState(int dim, double lambda)
    : dim_(dim),
      lambda_(lambda),
      cov_(SpdMatrix::scaled_identity(dim, lambda)),
      cov_inv_(Matrix::Identity(dim, dim) / lambda),
      logdet_(dim * std::log(lambda)),
      bvec_(Vector::Zero(dim)),
      theta_hat_(Vector::Zero(dim)) {}

void RidgeState::update(const Vector& x, double y) {
  if (x.size() != dim_) throw std::invalid_argument("ridge_update: dimension mismatch");
  if (!all_finite(x) || !std::isfinite(y)) {
    throw std::invalid_argument("ridge_update: non-finite observation");
  }
  const Vector u = cov_inv_ * x;
  const double denom = 1.0 + x.dot(u);
  if (!(denom > 1e-12)) {
    throw std::runtime_error("ridge_update: degenerate rank-one update (corrupted state)");
  }
  cov_.add_outer(x);
  cov_inv_.noalias() -= (u * u.transpose()) / denom;
  logdet_ += std::log(denom);
  bvec_ += y * x;
  ++t_;
  if (t_ % kRefreshInterval == 0) {
    refresh();
  } else {
    theta_hat_.noalias() = cov_inv_ * bvec_;
  }
}

void RidgeState::refresh() {
  cov_inv_ = cov_.inverse();
  logdet_ = cov_.log_det();
  theta_hat_.noalias() = cov_inv_ * bvec_;
}

double RidgeState::weighted_norm(const Vector& x) const {
  if (x.size() != dim_) throw std::invalid_argument("weighted_norm: dimension mismatch");
  const double q = x.dot(cov_inv_ * x);
  return std::sqrt(std::max(q, 0.0));
}

double RidgeState::beta_radius(double delta, double sigma, double s_bound) const {
  if (!(delta > 0.0 && delta < 1.0)) {
    throw std::invalid_argument("beta_radius: delta must lie in (0, 1), got " +
                                std::to_string(delta));
  }
  const double log_term =
      0.5 * logdet_ - 0.5 * dim_ * std::log(lambda_) + std::log(1.0 / delta);
  return sigma * std::sqrt(std::max(log_term, 0.0)) + std::sqrt(lambda_) * s_bound;
}

}  // namespace rebal
