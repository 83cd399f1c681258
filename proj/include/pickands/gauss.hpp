#pragma once

#include <Eigen/Dense>

#include "pickands/rng.hpp"
#include "pickands/types.hpp"

namespace pickands {

// Standard normal density phi(u).
double normal_pdf(double u);

// Psi(u) = P(Z > u). Complementary error function for u <= 6, Laplace
// continued fraction for the Mills ratio in the deep tail. Good to 12+
// significant digits over |u| <= 37 (Psi(37) ~ 5.7e-300 is still normal).
double std_normal_tail(double u);

// Phi(u) = 1 - Psi(u).
double std_normal_cdf(double u);

// Two-sided tail bracket for u > 0:
//   (1/u - 1/u^3) phi(u) < Psi(u) < phi(u)/u.
struct TailBracket {
  double lower;
  double upper;
};
TailBracket psi_sandwich(double u);

// First-order tail asymptotic phi(u)/u, u > 0. Relative error is O(u^-2).
double mills_asymptotic(double u);

// Gamma function for x > 0. Lanczos approximation (g = 7, 9 coefficients),
// reflection below 1/2; accurate to ~13 significant digits on (0, 30).
double gamma_fn(double x);

// Law of X2 given X1 = x for a bivariate Gaussian with means (m1, m2),
// variances (s1_sq, s2_sq) and covariance rho:
//   X2 | X1=x  ~  N(slope*x + residual_mean, residual_variance),
// and the residual is independent of X1.
struct ConditionalGaussian {
  double slope;
  double residual_mean;
  double residual_variance;
};
ConditionalGaussian conditional_gaussian(double m1, double m2, double s1_sq,
                                         double s2_sq, double rho);

// B with B*B^T == cov for a symmetric positive semidefinite matrix, via the
// symmetric eigendecomposition (robust on near-singular analytic kernels).
// Eigenvalues in [-1e-10*trace, 0) are clipped to zero; anything more
// negative throws numerical_error.
Eigen::MatrixXd semidefinite_factor(const Eigen::MatrixXd& cov);

// Reusable N(mean, cov) sampler: factor once, draw many.
class MvnSampler {
 public:
  MvnSampler(Eigen::VectorXd mean, const Eigen::MatrixXd& cov);

  Eigen::VectorXd sample(RngStream& rng) const;
  void sample(RngStream& rng, Eigen::VectorXd& out) const;
  Eigen::Index dim() const { return mean_.size(); }

 private:
  Eigen::VectorXd mean_;
  Eigen::MatrixXd factor_;
};

// One-shot draw from N(mean, cov).
Eigen::VectorXd cholesky_sample(const Eigen::VectorXd& mean,
                                const Eigen::MatrixXd& cov, RngStream& rng);

}  // namespace pickands
