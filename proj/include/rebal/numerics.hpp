#pragma once

#include <Eigen/Dense>

namespace rebal {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Symmetric positive-definite matrix built as lambda*I plus outer products.
class SpdMatrix {
 public:
  static SpdMatrix scaled_identity(int dim, double lambda);

  void add_outer(const Vector& x);

  int dim() const { return static_cast<int>(m_.rows()); }
  const Matrix& dense() const { return m_; }

  // Both go through a Cholesky factorization and throw if it fails.
  double log_det() const;
  Matrix inverse() const;

 private:
  explicit SpdMatrix(Matrix m) : m_(std::move(m)) {}
  Matrix m_;
};

// Online regularized least squares:
//   V_t = lambda*I + sum x_k x_k^T,  theta_hat = V_t^{-1} sum x_k y_k.
// The inverse and log-determinant are maintained by rank-one updates and
// refreshed from a Cholesky factorization every kRefreshInterval updates.
class RidgeState {
 public:
  static constexpr long kRefreshInterval = 1024;

  RidgeState(int dim, double lambda);

  void update(const Vector& x, double y);

  // sqrt(x^T V^{-1} x)
  double weighted_norm(const Vector& x) const;

  // Self-normalized confidence radius
  //   sigma * sqrt(log(det(V)^{1/2} det(lambda I)^{-1/2} / delta)) + sqrt(lambda) * s_bound.
  double beta_radius(double delta, double sigma, double s_bound) const;

  int dim() const { return dim_; }
  double lambda() const { return lambda_; }
  const SpdMatrix& cov() const { return cov_; }
  const Matrix& cov_inv() const { return cov_inv_; }
  double logdet() const { return logdet_; }
  const Vector& bvec() const { return bvec_; }
  const Vector& theta_hat() const { return theta_hat_; }
  long count() const { return t_; }

  // Recompute cov_inv and logdet from scratch.
  void refresh();

 private:
  int dim_;
  double lambda_;
  SpdMatrix cov_;
  Matrix cov_inv_;
  double logdet_;
  Vector bvec_;
  Vector theta_hat_;
  long t_ = 0;
};

}  // namespace rebal
