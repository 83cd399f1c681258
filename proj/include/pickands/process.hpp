#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "pickands/gauss.hpp"
#include "pickands/rng.hpp"
#include "pickands/types.hpp"

namespace pickands {

// Uniform grid t_i = start + i*step, i = 0..count-1. Grids built with over()
// always start at 0 and contain the right endpoint exactly (the step is
// adjusted to divide the horizon).
struct Grid {
  double start = 0.0;
  double step = 0.0;
  std::size_t count = 0;

  double point(std::size_t i) const { return start + step * static_cast<double>(i); }
  double end() const { return count == 0 ? start : point(count - 1); }

  static Grid over(double horizon, double step);
};

struct Path {
  Grid grid;
  std::vector<double> values;
};

// Row-major field on g1 x g2: value(i, j) = values[i*g2.count + j].
struct Field2D {
  Grid g1, g2;
  std::vector<double> values;

  double value(std::size_t i, std::size_t j) const { return values[i * g2.count + j]; }
};

// Stationary covariance r(t) = exp(-|t|^alpha), alpha in (0, 2]. r(0) = 1.
struct CovarianceModel {
  double alpha = 1.0;

  double operator()(double t) const;
  static CovarianceModel exp_alpha(double alpha);
};

namespace detail {
struct FftPlan;  // per-sampler FFT executor (plan + buffer), defined privately
}

// Route selection for the grid samplers. `automatic` picks the cheapest exact
// route (closed form, AR(1) recursion, or circulant embedding) and falls back
// to dense factorization when the embedding is indefinite; the other two force
// a route, with `embedding` throwing numerical_error when it does not apply.
enum class SampleMethod { automatic, embedding, dense };

// Fractional Brownian motion on a fixed grid, Hurst H = alpha/2, normalized so
// E B(t)^2 = 2 t^alpha, i.e. E B(t)B(s) = t^alpha + s^alpha - |t-s|^alpha.
//
// Sampling: circulant (Davies-Harte) embedding of the increment sequence,
// cumulative sum, sqrt(2) rescale. The embedding size is the next power of two
// >= 2*(count-1); eigenvalues in [-1e-8*max, 0) are clipped, more negative
// ones trigger a dense pivoted-Cholesky fallback on the full grid covariance.
// alpha = 2 (B(t) = sqrt(2) t Z) and alpha = 1 (independent increments) are
// sampled in closed form without any FFT.
class FbmSampler {
 public:
  FbmSampler(double alpha, Grid grid,
             SampleMethod method = SampleMethod::automatic);
  FbmSampler(const FbmSampler&);
  FbmSampler& operator=(const FbmSampler&) = delete;
  ~FbmSampler();

  void sample(RngStream& rng, std::vector<double>& out) const;
  const Grid& grid() const { return grid_; }
  bool used_fallback() const { return fallback_ != nullptr; }
  // Smallest embedding eigenvalue over the largest one (diagnostic; 0 for the
  // closed forms and for fallback-only samplers).
  double embedding_floor() const { return embedding_floor_; }

 private:
  void prepare(SampleMethod method);

  double alpha_;
  Grid grid_;
  std::vector<double> sqrt_eig_;  // sqrt(lambda_j * scale_j) premultiplied
  std::size_t embed_size_ = 0;
  double embedding_floor_ = 0.0;
  std::shared_ptr<const MvnSampler> fallback_;
  std::unique_ptr<detail::FftPlan> fft_;
  mutable std::vector<double> scratch_;
};

// Stationary Gaussian process with ExpAlpha covariance on a fixed grid.
// alpha = 1 uses the exact AR(1) recursion (Ornstein-Uhlenbeck); other alpha
// use circulant embedding of r with the same clip tolerance, falling back to
// dense pivoted Cholesky when the embedding is indefinite beyond tolerance.
class StationarySampler {
 public:
  StationarySampler(CovarianceModel model, Grid grid,
                    SampleMethod method = SampleMethod::automatic);
  StationarySampler(const StationarySampler&);
  StationarySampler& operator=(const StationarySampler&) = delete;
  ~StationarySampler();

  void sample(RngStream& rng, std::vector<double>& out) const;
  const Grid& grid() const { return grid_; }
  bool used_fallback() const { return fallback_ != nullptr; }
  bool used_ar1() const { return ar1_; }

 private:
  void prepare(SampleMethod method);

  CovarianceModel model_;
  Grid grid_;
  bool ar1_ = false;
  double ar1_rho_ = 0.0, ar1_sd_ = 0.0;
  std::vector<double> sqrt_eig_;
  std::size_t embed_size_ = 0;
  std::shared_ptr<const MvnSampler> fallback_;
  std::unique_ptr<detail::FftPlan> fft_;
};

// One path of B on the grid (B(0) = 0).
Path fbm_sample(double alpha, const Grid& grid, RngStream& rng);

// One path of chi(t) = B(t) - t^alpha. E chi = -t^alpha, Var chi = 2 t^alpha.
Path pickands_process_sample(double alpha, const Grid& grid, RngStream& rng);

// One path of the stationary model.
Path stationary_sample(const CovarianceModel& model, const Grid& grid,
                       RngStream& rng);

// Additive two-parameter field chi(t1,t2) = B1(t1) + B2(t2) - t1^alpha - t2^alpha
// with independent copies B1, B2.
Field2D pickands_field_2d_sample(double alpha, const Grid& g1, const Grid& g2,
                                 RngStream& rng);

}  // namespace pickands
