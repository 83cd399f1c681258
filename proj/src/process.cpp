#include "pickands/process.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <mutex>
#include <numbers>
#include <stdexcept>

#include <Eigen/Dense>

namespace pickands {

namespace {

// FFTW plan creation/destruction is not thread-safe; execution on distinct
// buffers is. All plan lifecycle calls go through this mutex.
std::mutex& fftw_plan_mutex() {
  static std::mutex m;
  return m;
}

std::size_t next_pow2(std::size_t n) {
  std::size_t m = 1;
  while (m < n) m <<= 1;
  return m;
}

double pow_abs(double t, double alpha) { return std::pow(std::abs(t), alpha); }

// Eigenvalues of the circulant embedding of the symmetric sequence
// c_0..c_{M/2}: lambda = Re(FFT(c_0, .., c_{M/2}, c_{M/2-1}, .., c_1)).
std::vector<double> circulant_eigenvalues(const std::vector<double>& head,
                                          std::size_t embed_size) {
  std::vector<std::complex<double>> buf(embed_size);
  for (std::size_t j = 0; j < head.size(); ++j) buf[j] = head[j];
  for (std::size_t j = 1; j + 1 < head.size(); ++j)
    buf[embed_size - j] = head[j];

  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(fftw_plan_mutex());
    plan = fftw_plan_dft_1d(static_cast<int>(embed_size),
                            reinterpret_cast<fftw_complex*>(buf.data()),
                            reinterpret_cast<fftw_complex*>(buf.data()),
                            FFTW_FORWARD, FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard<std::mutex> lock(fftw_plan_mutex());
    fftw_destroy_plan(plan);
  }

  std::vector<double> eig(embed_size);
  for (std::size_t j = 0; j < embed_size; ++j) eig[j] = buf[j].real();
  return eig;
}

// Checks eigenvalues against the clip tolerance. Returns true when the
// embedding is usable, filling sqrt_factors[j] = sqrt(max(lambda_j,0) * scale_j)
// where scale_j is 1/M on the two real lanes and 1/(2M) elsewhere.
bool embedding_factors(const std::vector<double>& eig,
                       std::vector<double>& sqrt_factors, double* floor_ratio) {
  const std::size_t m = eig.size();
  double max_eig = 0.0, min_eig = 0.0;
  for (double v : eig) {
    max_eig = std::max(max_eig, v);
    min_eig = std::min(min_eig, v);
  }
  if (floor_ratio) *floor_ratio = max_eig > 0 ? min_eig / max_eig : 0.0;
  if (min_eig < -1e-8 * max_eig) return false;

  const double inv_m = 1.0 / static_cast<double>(m);
  sqrt_factors.assign(m, 0.0);
  for (std::size_t j = 0; j < m; ++j) {
    const double lam = std::max(eig[j], 0.0);
    const double scale = (j == 0 || j == m / 2) ? inv_m : 0.5 * inv_m;
    sqrt_factors[j] = std::sqrt(lam * scale);
  }
  return true;
}

}  // namespace

Grid Grid::over(double horizon, double step) {
  if (!(horizon >= 0.0)) throw std::invalid_argument("Grid::over: horizon must be >= 0");
  if (!(step > 0.0)) throw std::invalid_argument("Grid::over: step must be > 0");
  Grid g;
  g.start = 0.0;
  if (horizon == 0.0) {
    g.step = step;
    g.count = 1;
    return g;
  }
  const auto intervals =
      std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(horizon / step)));
  g.step = horizon / static_cast<double>(intervals);
  g.count = intervals + 1;
  return g;
}

double CovarianceModel::operator()(double t) const {
  return std::exp(-pow_abs(t, alpha));
}

CovarianceModel CovarianceModel::exp_alpha(double alpha) {
  if (!(alpha > 0.0) || !(alpha <= 2.0))
    throw std::invalid_argument("CovarianceModel: alpha must lie in (0, 2]");
  return CovarianceModel{alpha};
}

// Per-sampler complex-to-complex FFT executor: one buffer + plan per
// instance, so concurrent samplers never touch each other's state.
struct detail::FftPlan {
  std::size_t size;
  std::vector<std::complex<double>> buf;
  fftw_plan plan;

  explicit FftPlan(std::size_t n) : size(n), buf(n) {
    std::lock_guard<std::mutex> lock(fftw_plan_mutex());
    plan = fftw_plan_dft_1d(static_cast<int>(n),
                            reinterpret_cast<fftw_complex*>(buf.data()),
                            reinterpret_cast<fftw_complex*>(buf.data()),
                            FFTW_FORWARD, FFTW_ESTIMATE);
  }
  FftPlan(const FftPlan& other) : FftPlan(other.size) {}
  FftPlan& operator=(const FftPlan&) = delete;
  ~FftPlan() {
    std::lock_guard<std::mutex> lock(fftw_plan_mutex());
    fftw_destroy_plan(plan);
  }
};

namespace {

// Draws the Hermitian-symmetric spectral vector and returns the real part of
// its DFT in `out` (first `take` entries). Normal consumption order is fixed:
// lane 0 real, lane M/2 real, then (re, im) pairs for j = 1..M/2-1.
void spectral_sample(const std::vector<double>& sqrt_factors,
                     detail::FftPlan& fft, RngStream& rng,
                     std::size_t take, double* out) {
  const std::size_t m = sqrt_factors.size();
  auto& buf = fft.buf;
  buf[0] = sqrt_factors[0] * rng.normal();
  buf[m / 2] = sqrt_factors[m / 2] * rng.normal();
  for (std::size_t j = 1; j < m / 2; ++j) {
    const double re = rng.normal();
    const double im = rng.normal();
    buf[j] = std::complex<double>(sqrt_factors[j] * re, sqrt_factors[j] * im);
    buf[m - j] = std::conj(buf[j]);
  }
  fftw_execute(fft.plan);
  for (std::size_t j = 0; j < take; ++j) out[j] = buf[j].real();
}

}  // namespace

FbmSampler::FbmSampler(double alpha, Grid grid, SampleMethod method)
    : alpha_(alpha), grid_(grid) {
  if (!(alpha > 0.0) || !(alpha <= 2.0))
    throw std::invalid_argument("FbmSampler: alpha must lie in (0, 2]");
  if (grid_.count == 0) throw std::invalid_argument("FbmSampler: empty grid");
  if (grid_.start != 0.0)
    throw std::invalid_argument("FbmSampler: grid must start at 0");
  prepare(method);
}

FbmSampler::FbmSampler(const FbmSampler& other)
    : alpha_(other.alpha_),
      grid_(other.grid_),
      sqrt_eig_(other.sqrt_eig_),
      embed_size_(other.embed_size_),
      embedding_floor_(other.embedding_floor_),
      fallback_(other.fallback_),
      scratch_(other.scratch_) {
  if (other.fft_) fft_ = std::make_unique<detail::FftPlan>(*other.fft_);
}

FbmSampler::~FbmSampler() = default;

void FbmSampler::prepare(SampleMethod method) {
  if (method != SampleMethod::dense &&
      (alpha_ == 2.0 || alpha_ == 1.0 || grid_.count <= 2))
    return;  // closed form / independent increments / tiny grid

  if (method != SampleMethod::dense) {
    // Standard-scale increments of the H = alpha/2 motion on step h:
    // gamma(k) = h^alpha ((k+1)^alpha - 2 k^alpha + |k-1|^alpha) / 2.
    // The head must continue gamma all the way to lag M/2 (truncating to the
    // grid length injects a covariance jump that breaks definiteness).
    const std::size_t n_inc = grid_.count - 1;
    const double h_alpha = std::pow(grid_.step, alpha_);
    embed_size_ = next_pow2(2 * n_inc);
    std::vector<double> head(embed_size_ / 2 + 1);
    for (std::size_t k = 0; k < head.size(); ++k) {
      const double kd = static_cast<double>(k);
      head[k] = 0.5 * h_alpha *
                (std::pow(kd + 1.0, alpha_) - 2.0 * std::pow(kd, alpha_) +
                 pow_abs(kd - 1.0, alpha_));
    }
    const auto eig = circulant_eigenvalues(head, embed_size_);
    if (embedding_factors(eig, sqrt_eig_, &embedding_floor_)) {
      fft_ = std::make_unique<detail::FftPlan>(embed_size_);
      scratch_.resize(n_inc);
      return;
    }
    if (method == SampleMethod::embedding)
      throw numerical_error(
          "FbmSampler: circulant embedding indefinite beyond tolerance");
  }

  if (grid_.count == 1) return;  // only the pinned origin: nothing to draw

  // Dense route: standard-scale covariance of B on the nonzero grid points
  // (the sqrt(2) rescale is applied at sampling time, as on the fGn route).
  Eigen::MatrixXd cov(grid_.count - 1, grid_.count - 1);
  for (std::size_t i = 1; i < grid_.count; ++i)
    for (std::size_t j = 1; j < grid_.count; ++j) {
      const double ti = grid_.point(i), tj = grid_.point(j);
      cov(static_cast<Eigen::Index>(i - 1), static_cast<Eigen::Index>(j - 1)) =
          0.5 * (std::pow(ti, alpha_) + std::pow(tj, alpha_) -
                 pow_abs(ti - tj, alpha_));
    }
  fallback_ = std::make_shared<const MvnSampler>(
      Eigen::VectorXd::Zero(cov.rows()), cov);
  sqrt_eig_.clear();
  embed_size_ = 0;
}

void FbmSampler::sample(RngStream& rng, std::vector<double>& out) const {
  out.assign(grid_.count, 0.0);
  if (grid_.count == 1) return;

  if (fallback_) {
    Eigen::VectorXd x(static_cast<Eigen::Index>(grid_.count - 1));
    fallback_->sample(rng, x);
    for (std::size_t i = 1; i < grid_.count; ++i)
      out[i] = std::numbers::sqrt2 * x(static_cast<Eigen::Index>(i - 1));
    return;
  }

  if (alpha_ == 2.0) {
    // B(t) = sqrt(2) t Z exactly (covariance 2 t s).
    const double z = rng.normal();
    for (std::size_t i = 1; i < grid_.count; ++i)
      out[i] = std::numbers::sqrt2 * grid_.point(i) * z;
    return;
  }
  if (alpha_ == 1.0) {
    // Brownian motion with E B(t)^2 = 2t: independent N(0, 2h) increments.
    const double sd = std::sqrt(2.0 * grid_.step);
    double acc = 0.0;
    for (std::size_t i = 1; i < grid_.count; ++i) {
      acc += sd * rng.normal();
      out[i] = acc;
    }
    return;
  }
  if (grid_.count == 2) {
    out[1] = std::sqrt(2.0 * std::pow(grid_.point(1), alpha_)) * rng.normal();
    return;
  }

  // Increment route: fGn via embedding, cumulative sum, sqrt(2) rescale.
  const std::size_t n_inc = grid_.count - 1;
  spectral_sample(sqrt_eig_, *fft_, rng, n_inc, scratch_.data());
  double acc = 0.0;
  for (std::size_t i = 0; i < n_inc; ++i) {
    acc += scratch_[i];
    out[i + 1] = std::numbers::sqrt2 * acc;
  }
}

StationarySampler::StationarySampler(CovarianceModel model, Grid grid,
                                     SampleMethod method)
    : model_(model), grid_(grid) {
  if (!(model_.alpha > 0.0) || !(model_.alpha <= 2.0))
    throw std::invalid_argument("StationarySampler: alpha must lie in (0, 2]");
  if (grid_.count == 0)
    throw std::invalid_argument("StationarySampler: empty grid");
  prepare(method);
}

StationarySampler::StationarySampler(const StationarySampler& other)
    : model_(other.model_),
      grid_(other.grid_),
      ar1_(other.ar1_),
      ar1_rho_(other.ar1_rho_),
      ar1_sd_(other.ar1_sd_),
      sqrt_eig_(other.sqrt_eig_),
      embed_size_(other.embed_size_),
      fallback_(other.fallback_) {
  if (other.fft_) fft_ = std::make_unique<detail::FftPlan>(other.fft_->size);
}

StationarySampler::~StationarySampler() = default;

void StationarySampler::prepare(SampleMethod method) {
  if (model_.alpha == 1.0 && method == SampleMethod::automatic) {
    // exp(-|t|) is Markov: exact AR(1) with rho = exp(-h).
    ar1_ = true;
    ar1_rho_ = std::exp(-grid_.step);
    ar1_sd_ = std::sqrt(std::max(0.0, 1.0 - ar1_rho_ * ar1_rho_));
    return;
  }
  if (grid_.count == 1) return;  // single standard normal

  if (method != SampleMethod::dense) {
    embed_size_ = next_pow2(2 * (grid_.count - 1));
    std::vector<double> head(embed_size_ / 2 + 1);
    for (std::size_t k = 0; k < head.size(); ++k)
      head[k] = model_(grid_.step * static_cast<double>(k));
    const auto eig = circulant_eigenvalues(head, embed_size_);
    if (embedding_factors(eig, sqrt_eig_, nullptr)) {
      fft_ = std::make_unique<detail::FftPlan>(embed_size_);
      return;
    }
    if (method == SampleMethod::embedding)
      throw numerical_error(
          "StationarySampler: circulant embedding is indefinite for this grid");
    sqrt_eig_.clear();
    embed_size_ = 0;
  }

  Eigen::MatrixXd cov(grid_.count, grid_.count);
  for (std::size_t i = 0; i < grid_.count; ++i)
    for (std::size_t j = 0; j < grid_.count; ++j)
      cov(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          model_(grid_.point(i) - grid_.point(j));
  fallback_ =
      std::make_shared<const MvnSampler>(Eigen::VectorXd::Zero(cov.rows()), cov);
}

void StationarySampler::sample(RngStream& rng, std::vector<double>& out) const {
  out.resize(grid_.count);
  if (ar1_) {
    double x = rng.normal();
    out[0] = x;
    for (std::size_t i = 1; i < grid_.count; ++i) {
      x = ar1_rho_ * x + ar1_sd_ * rng.normal();
      out[i] = x;
    }
    return;
  }
  if (grid_.count == 1) {
    out[0] = rng.normal();
    return;
  }
  if (fallback_) {
    Eigen::VectorXd x(static_cast<Eigen::Index>(grid_.count));
    fallback_->sample(rng, x);
    for (std::size_t i = 0; i < grid_.count; ++i)
      out[i] = x(static_cast<Eigen::Index>(i));
    return;
  }
  spectral_sample(sqrt_eig_, *fft_, rng, grid_.count, out.data());
}

Path fbm_sample(double alpha, const Grid& grid, RngStream& rng) {
  FbmSampler sampler(alpha, grid);
  Path p;
  p.grid = grid;
  sampler.sample(rng, p.values);
  return p;
}

Path pickands_process_sample(double alpha, const Grid& grid, RngStream& rng) {
  Path p = fbm_sample(alpha, grid, rng);
  for (std::size_t i = 0; i < p.grid.count; ++i)
    p.values[i] -= std::pow(p.grid.point(i), alpha);
  return p;
}

Path stationary_sample(const CovarianceModel& model, const Grid& grid,
                       RngStream& rng) {
  StationarySampler sampler(model, grid);
  Path p;
  p.grid = grid;
  sampler.sample(rng, p.values);
  return p;
}

Field2D pickands_field_2d_sample(double alpha, const Grid& g1, const Grid& g2,
                                 RngStream& rng) {
  FbmSampler s1(alpha, g1), s2(alpha, g2);
  std::vector<double> b1, b2;
  s1.sample(rng, b1);
  s2.sample(rng, b2);
  Field2D f;
  f.g1 = g1;
  f.g2 = g2;
  f.values.resize(g1.count * g2.count);
  for (std::size_t i = 0; i < g1.count; ++i) {
    const double a1 = b1[i] - std::pow(g1.point(i), alpha);
    for (std::size_t j = 0; j < g2.count; ++j)
      f.values[i * g2.count + j] = a1 + b2[j] - std::pow(g2.point(j), alpha);
  }
  return f;
}

}  // namespace pickands
