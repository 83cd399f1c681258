#include "pickands/gauss.hpp"

#include <cmath>
#include <stdexcept>

namespace pickands {

namespace {
constexpr double kInvSqrt2Pi = 0.398942280401432677939946059934;
constexpr double kInvSqrt2 = 0.707106781186547524400844362105;
}  // namespace

double normal_pdf(double u) { return kInvSqrt2Pi * std::exp(-0.5 * u * u); }

double std_normal_tail(double u) {
  if (std::isnan(u)) throw std::invalid_argument("std_normal_tail: NaN level");
  if (u > 6.0) {
    // Psi(u) = phi(u) / (u + 1/(u + 2/(u + 3/(...)))), evaluated bottom-up.
    double f = 0.0;
    for (int k = 60; k >= 1; --k) f = k / (u + f);
    return normal_pdf(u) / (u + f);
  }
  return 0.5 * std::erfc(u * kInvSqrt2);
}

double std_normal_cdf(double u) { return std_normal_tail(-u); }

TailBracket psi_sandwich(double u) {
  if (!(u > 0.0)) throw std::invalid_argument("psi_sandwich: require u > 0");
  const double phi = normal_pdf(u);
  return {(1.0 / u - 1.0 / (u * u * u)) * phi, phi / u};
}

double mills_asymptotic(double u) {
  if (!(u > 0.0)) throw std::invalid_argument("mills_asymptotic: require u > 0");
  return normal_pdf(u) / u;
}

double gamma_fn(double x) {
  if (!(x > 0.0)) throw std::invalid_argument("gamma_fn: require x > 0");
  if (x < 0.5)  // reflection keeps the Lanczos sum on x >= 0.5
    return M_PI / (std::sin(M_PI * x) * gamma_fn(1.0 - x));
  static const double c[9] = {
      0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
      771.32342877765313,      -176.61502916214059,   12.507343278686905,
      -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};
  const double z = x - 1.0;
  double a = c[0];
  for (int i = 1; i < 9; ++i) a += c[i] / (z + i);
  const double t = z + 7.5;
  return std::sqrt(2.0 * M_PI) * std::pow(t, z + 0.5) * std::exp(-t) * a;
}

ConditionalGaussian conditional_gaussian(double m1, double m2, double s1_sq,
                                         double s2_sq, double rho) {
  if (!(s1_sq > 0.0) || !(s2_sq > 0.0))
    throw std::invalid_argument("conditional_gaussian: variances must be positive");
  if (rho * rho > s1_sq * s2_sq * (1.0 + 1e-12))
    throw std::invalid_argument(
        "conditional_gaussian: |rho| exceeds sqrt(s1_sq*s2_sq)");
  const double slope = rho / s1_sq;
  const double resid = s2_sq - rho * rho / s1_sq;
  return {slope, m2 - slope * m1, resid < 0.0 ? 0.0 : resid};
}

Eigen::MatrixXd semidefinite_factor(const Eigen::MatrixXd& cov) {
  if (cov.rows() != cov.cols())
    throw std::invalid_argument("semidefinite_factor: matrix must be square");
  if (cov.rows() == 0)
    throw std::invalid_argument("semidefinite_factor: empty matrix");
  const double scale = cov.cwiseAbs().maxCoeff();
  if ((cov - cov.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (scale + 1.0))
    throw std::invalid_argument("semidefinite_factor: matrix must be symmetric");

  // Symmetric eigendecomposition rather than pivoted LDLT: on analytic
  // kernels whose spectrum decays below machine precision (e.g. exp(-dt^2)
  // on a fine grid) LDLT Schur-complement roundoff drives pivots orders of
  // magnitude below zero, while computed eigenvalues of a PSD matrix stay
  // within ~n*eps*lambda_max of it. Same contract either way: clip curvature
  // inside the tolerance, reject anything genuinely indefinite.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
  if (es.info() != Eigen::Success)
    throw numerical_error("semidefinite_factor: eigendecomposition failed");
  Eigen::VectorXd d = es.eigenvalues();
  const double tol = 1e-10 * std::max(cov.trace(), 0.0);
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    if (d[i] < -tol)
      throw numerical_error(
          "semidefinite_factor: eigenvalue below PSD tolerance");
    if (d[i] < 0.0) d[i] = 0.0;
  }
  return es.eigenvectors() * d.cwiseSqrt().asDiagonal();
}

MvnSampler::MvnSampler(Eigen::VectorXd mean, const Eigen::MatrixXd& cov)
    : mean_(std::move(mean)), factor_(semidefinite_factor(cov)) {
  if (mean_.size() != factor_.rows())
    throw std::invalid_argument("MvnSampler: mean/covariance dimension mismatch");
}

Eigen::VectorXd MvnSampler::sample(RngStream& rng) const {
  Eigen::VectorXd out(mean_.size());
  sample(rng, out);
  return out;
}

void MvnSampler::sample(RngStream& rng, Eigen::VectorXd& out) const {
  Eigen::VectorXd z(factor_.cols());
  for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = rng.normal();
  out.noalias() = factor_ * z;
  out += mean_;
}

Eigen::VectorXd cholesky_sample(const Eigen::VectorXd& mean,
                                const Eigen::MatrixXd& cov, RngStream& rng) {
  return MvnSampler(mean, cov).sample(rng);
}

}  // namespace pickands
