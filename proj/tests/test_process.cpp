#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <vector>

#include "doctest.h"
#include "pickands/process.hpp"
#include "pickands/rng.hpp"
#include "pickands/types.hpp"

using namespace pickands;

namespace {

double pow_abs(double t, double a) { return std::pow(std::abs(t), a); }

double fbm_cov(double t, double s, double a) {
  return pow_abs(t, a) + pow_abs(s, a) - pow_abs(t - s, a);
}

// Empirical covariance of `sampler` paths against an exact covariance
// function, returning the largest absolute deviation over all pairs.
template <typename Sampler, typename CovFn>
double max_cov_dev(const Sampler& sampler, CovFn cov, int n_paths,
                   RngStream rng) {
  const Grid& g = sampler.grid();
  const std::size_t m = g.count;
  std::vector<double> acc(m * m, 0.0), path;
  for (int k = 0; k < n_paths; ++k) {
    sampler.sample(rng, path);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j <= i; ++j) acc[i * m + j] += path[i] * path[j];
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j <= i; ++j) {
      const double emp = acc[i * m + j] / n_paths;
      worst = std::max(worst, std::abs(emp - cov(g.point(i), g.point(j))));
    }
  return worst;
}

}  // namespace

TEST_CASE("grid construction pins both endpoints") {
  const Grid g = Grid::over(1.0, 0.1);
  CHECK(g.count == 11);
  CHECK(g.start == 0.0);
  CHECK(g.point(0) == 0.0);
  CHECK(g.end() == doctest::Approx(1.0).epsilon(1e-15));

  // A step that does not divide the horizon is adjusted, never truncated.
  const Grid h = Grid::over(1.0, 0.3);
  CHECK(h.count == 4);
  CHECK(h.step == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(h.end() == doctest::Approx(1.0).epsilon(1e-15));

  const Grid z = Grid::over(0.0, 0.5);
  CHECK(z.count == 1);
  CHECK(z.end() == 0.0);

  CHECK_THROWS_AS((void)Grid::over(-1.0, 0.1), std::invalid_argument);
  CHECK_THROWS_AS((void)Grid::over(1.0, 0.0), std::invalid_argument);
}

TEST_CASE("covariance model evaluates exp(-|t|^alpha)") {
  const CovarianceModel m1 = CovarianceModel::exp_alpha(1.0);
  CHECK(m1(0.0) == 1.0);
  CHECK(m1(0.1) == doctest::Approx(0.90483741803595957).epsilon(1e-15));
  CHECK(m1(-0.1) == m1(0.1));
  const CovarianceModel mh = CovarianceModel::exp_alpha(0.5);
  CHECK(mh(0.4) == doctest::Approx(0.53128560913296781).epsilon(1e-14));
  CHECK_THROWS_AS((void)CovarianceModel::exp_alpha(0.0), std::invalid_argument);
  CHECK_THROWS_AS((void)CovarianceModel::exp_alpha(2.5), std::invalid_argument);
}

TEST_CASE("alpha=2 paths are exactly linear in t") {
  const Grid g = Grid::over(2.0, 0.25);
  FbmSampler s(2.0, g);
  CHECK_FALSE(s.used_fallback());
  RngStream rng(11);
  std::vector<double> path;
  for (int k = 0; k < 50; ++k) {
    s.sample(rng, path);
    CHECK(path[0] == 0.0);
    const double slope = path[4] / g.point(4);
    for (std::size_t i = 1; i < g.count; ++i)
      CHECK(path[i] == doctest::Approx(slope * g.point(i)).epsilon(1e-12));
  }
}

TEST_CASE("fbm empirical covariance matches t^a + s^a - |t-s|^a") {
  const Grid g = Grid::over(1.0, 0.125);
  const int n = 50000;
  int lane = 0;
  for (double a : {0.5, 1.0, 1.25, 1.5, 1.9, 2.0}) {
    FbmSampler s(a, g);
    const double dev = max_cov_dev(
        s, [a](double t, double u) { return fbm_cov(t, u, a); }, n,
        RngStream(400, 0, 0, lane++));
    // covariance entries are O(2); stderr ~ 2 sqrt(2/n) ~ 0.013; allow ~6x.
    CHECK(dev < 0.08);
  }
}

TEST_CASE("fractional increments embed without fallback at moderate sizes") {
  const Grid g = Grid::over(1.0, 0.01);
  for (double a : {0.5, 1.25, 1.5, 1.9}) {
    FbmSampler s(a, g);
    CHECK_FALSE(s.used_fallback());
    CHECK(s.embedding_floor() >= -1e-8);
  }
}

TEST_CASE("forced dense route agrees with the automatic route in law") {
  const Grid g = Grid::over(1.0, 0.125);
  FbmSampler dense(1.5, g, SampleMethod::dense);
  CHECK(dense.used_fallback());
  const double dev = max_cov_dev(
      dense, [](double t, double u) { return fbm_cov(t, u, 1.5); }, 50000,
      RngStream(401));
  CHECK(dev < 0.08);

  // Forcing the dense route must also work for the closed-form alphas.
  FbmSampler dense2(2.0, g, SampleMethod::dense);
  CHECK(dense2.used_fallback());
  const double dev2 = max_cov_dev(
      dense2, [](double t, double u) { return fbm_cov(t, u, 2.0); }, 50000,
      RngStream(402));
  CHECK(dev2 < 0.08);
}

TEST_CASE("paths replay bit-identically from equal seeds") {
  const Grid g = Grid::over(1.0, 0.02);
  FbmSampler s(1.5, g);
  RngStream a(123, 7), b(123, 7);
  std::vector<double> pa, pb;
  s.sample(a, pa);
  s.sample(b, pb);
  CHECK(pa == pb);
  // A copied sampler is stateless with respect to draws.
  FbmSampler s2(s);
  RngStream c(123, 7);
  std::vector<double> pc;
  s2.sample(c, pc);
  CHECK(pa == pc);
}

TEST_CASE("drifted paths equal plain paths minus t^alpha draw-for-draw") {
  const Grid g = Grid::over(1.0, 0.1);
  RngStream a(9, 0), b(9, 0);
  const Path plain = fbm_sample(1.5, g, a);
  const Path drifted = pickands_process_sample(1.5, g, b);
  REQUIRE(plain.values.size() == drifted.values.size());
  CHECK(drifted.values[0] == 0.0);
  for (std::size_t i = 0; i < g.count; ++i)
    CHECK(drifted.values[i] ==
          doctest::Approx(plain.values[i] - std::pow(g.point(i), 1.5))
              .epsilon(1e-12));
}

TEST_CASE("stationary alpha=1 uses the exact recursion and matches e^-|t-s|") {
  const Grid g = Grid::over(1.0, 0.125);
  StationarySampler s(CovarianceModel::exp_alpha(1.0), g);
  CHECK(s.used_ar1());
  CHECK_FALSE(s.used_fallback());
  const double dev = max_cov_dev(
      s, [](double t, double u) { return std::exp(-std::abs(t - u)); }, 50000,
      RngStream(500));
  CHECK(dev < 0.03);
}

TEST_CASE("stationary alpha=1 embedding route agrees with the recursion") {
  const Grid g = Grid::over(1.0, 0.125);
  StationarySampler forced(CovarianceModel::exp_alpha(1.0), g,
                           SampleMethod::embedding);
  CHECK_FALSE(forced.used_ar1());
  CHECK_FALSE(forced.used_fallback());
  const double dev = max_cov_dev(
      forced, [](double t, double u) { return std::exp(-std::abs(t - u)); },
      50000, RngStream(501));
  CHECK(dev < 0.03);
}

TEST_CASE("stationary embedding depends on the window length") {
  // Long window: the correlation dies out well before the circulant wraps,
  // so exp(-|t|^1.5) embeds cleanly.
  StationarySampler ok(CovarianceModel::exp_alpha(1.5), Grid::over(5.0, 0.05));
  CHECK_FALSE(ok.used_fallback());
  CHECK_FALSE(ok.used_ar1());

  // Short window (wrap lag 1, residual correlation ~0.4): the minimal
  // circulant is indefinite for every smooth alpha > 1 here. The automatic
  // route must fall back, the forced embedding must refuse.
  const Grid g = Grid::over(1.0, 0.125);
  for (double a : {1.5, 2.0}) {
    StationarySampler fb(CovarianceModel::exp_alpha(a), g);
    CHECK(fb.used_fallback());
    CHECK_THROWS_AS(
        StationarySampler(CovarianceModel::exp_alpha(a), g,
                          SampleMethod::embedding),
        numerical_error);
    const double dev = max_cov_dev(
        fb,
        [a](double t, double u) {
          return std::exp(-std::pow(std::abs(t - u), a));
        },
        50000, RngStream(502));
    CHECK(dev < 0.03);
  }
}

TEST_CASE("free functions return finite paths across the alpha range") {
  const Grid g = Grid::over(0.7, 0.07);
  int lane = 0;
  for (double a : {0.25, 0.75, 1.25, 1.75, 2.0}) {
    RngStream rng(600, 0, 0, lane++);
    for (int k = 0; k < 100; ++k) {
      const Path p = pickands_process_sample(a, g, rng);
      for (double v : p.values) CHECK(std::isfinite(v));
      const Path q = stationary_sample(CovarianceModel::exp_alpha(a), g, rng);
      for (double v : q.values) CHECK(std::isfinite(v));
    }
  }
}

TEST_CASE("two-parameter field is exactly additively separable") {
  const Grid g1 = Grid::over(0.5, 0.1), g2 = Grid::over(0.8, 0.2);
  RngStream rng(77, 3);
  const Field2D f = pickands_field_2d_sample(1.5, g1, g2, rng);
  REQUIRE(f.values.size() == g1.count * g2.count);
  CHECK(f.value(0, 0) == 0.0);
  for (std::size_t i = 0; i < g1.count; ++i)
    for (std::size_t j = 0; j < g2.count; ++j) {
      const double recon =
          f.value(i, 0) + f.value(0, j) - f.value(0, 0);
      CHECK(f.value(i, j) == doctest::Approx(recon).epsilon(1e-12));
    }
}

TEST_CASE("samplers validate their inputs") {
  const Grid g = Grid::over(1.0, 0.1);
  CHECK_THROWS_AS(FbmSampler(0.0, g), std::invalid_argument);
  CHECK_THROWS_AS(FbmSampler(2.1, g), std::invalid_argument);
  Grid offset = g;
  offset.start = 0.5;
  CHECK_THROWS_AS(FbmSampler(1.0, offset), std::invalid_argument);
  CHECK_THROWS_AS(
      StationarySampler(CovarianceModel::exp_alpha(1.0), Grid{}),
      std::invalid_argument);
}
