#include "pickands/estimate.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "pickands/gauss.hpp"
#include "pickands/parallel.hpp"
#include "pickands/quadrature.hpp"
#include "pickands/rng.hpp"

namespace pickands {

namespace {

// Fixed stream ids: calls to different estimators with the same seed are
// independent of each other.
constexpr std::uint64_t kStreamHInterval = 1;
constexpr std::uint64_t kStreamHRect = 2;
constexpr std::uint64_t kStreamHTable = 3;

void check_common(double alpha, double step, std::uint64_t n) {
  if (!(alpha > 0.0) || !(alpha <= 2.0))
    throw std::invalid_argument("alpha must lie in (0, 2]");
  if (!(step > 0.0)) throw std::invalid_argument("step must be > 0");
  if (n < 2) throw std::invalid_argument("need at least 2 samples");
}

std::vector<double> drift_on(const Grid& grid, double alpha) {
  std::vector<double> d(grid.count);
  for (std::size_t i = 0; i < grid.count; ++i)
    d[i] = std::pow(grid.point(i), alpha);
  return d;
}

double grid_sup_minus_drift(const std::vector<double>& path,
                            const std::vector<double>& drift) {
  double s = path[0] - drift[0];
  for (std::size_t i = 1; i < path.size(); ++i)
    s = std::max(s, path[i] - drift[i]);
  return s;
}

// alpha = 2 only: sup_{t in [0,T]} (sqrt(2) t z - t^2) in closed form (the
// parabola vertex t* = z/sqrt(2) clipped to [0,T]). Evaluating the sup
// analytically instead of on the grid removes the one bias source of the
// sharpest oracle comparison.
double sup_parabola(double z, double horizon) {
  if (z <= 0.0) return 0.0;
  const double vertex = z / std::numbers::sqrt2;
  if (vertex <= horizon) return 0.5 * z * z;
  return std::numbers::sqrt2 * horizon * z - horizon * horizon;
}

// Draws n values of exp(sup chi) into a flat vector, chunk by chunk in
// deterministic order. Each chunk copies the prototype sampler (cheap: the
// heavy state is shared or rebuilt in microseconds) so workers never share
// mutable state.
std::vector<double> exp_sup_samples(const FbmSampler& proto,
                                    const std::vector<double>& drift,
                                    double alpha, double horizon,
                                    std::uint64_t n, const RngStream& root,
                                    std::uint64_t lane,
                                    const ExecPolicy& policy) {
  // At alpha = 2 a path is sqrt(2) t Z for a single normal Z, so the sup is
  // available in closed form; this consumes exactly the same draws as the
  // grid scan would, keeping every other stream untouched.
  const bool analytic = (alpha == 2.0);
  std::vector<double> out(n);
  const std::uint64_t chunk = policy.chunk > 0 ? policy.chunk : 16384;
  chunked_reduce<std::vector<double>>(
      n, policy,
      [&](std::uint64_t c, std::uint64_t count) {
        FbmSampler sampler(proto);
        RngStream rng = root.spawn(c, lane);
        std::vector<double> vals(count);
        std::vector<double> path;
        for (std::uint64_t i = 0; i < count; ++i) {
          if (analytic) {
            vals[i] = std::exp(sup_parabola(rng.normal(), horizon));
          } else {
            sampler.sample(rng, path);
            vals[i] = std::exp(grid_sup_minus_drift(path, drift));
          }
        }
        return vals;
      },
      [&](std::uint64_t c, const std::vector<double>& vals) {
        std::copy(vals.begin(), vals.end(), out.begin() + c * chunk);
      });
  return out;
}

Estimate summarize(const std::vector<double>& samples, double grid_step) {
  Estimate e;
  e.n_samples = samples.size();
  e.grid_step = grid_step;
  KahanSum total;
  for (double v : samples) total.add(v);
  e.mean = total.value() / static_cast<double>(samples.size());
  KahanSum sq;
  for (double v : samples) {
    const double d = v - e.mean;
    sq.add(d * d);
  }
  const double var = sq.value() / static_cast<double>(samples.size() - 1);
  e.std_error = std::sqrt(var / static_cast<double>(samples.size()));
  return e;
}

HIntervalStats interval_stats_impl(double alpha, double horizon, double step,
                                   std::uint64_t n, const RngStream& root,
                                   std::uint64_t lane,
                                   const ExecPolicy& policy) {
  check_common(alpha, step, n);
  if (!(horizon >= 0.0))
    throw std::invalid_argument("horizon must be >= 0");
  const Grid grid = Grid::over(horizon, step);
  const FbmSampler proto(alpha, grid);
  const auto drift = drift_on(grid, alpha);
  auto samples =
      exp_sup_samples(proto, drift, alpha, horizon, n, root, lane, policy);

  HIntervalStats stats;
  stats.estimate = summarize(samples, grid.step);
  std::vector<double> sorted(samples);
  std::sort(sorted.begin(), sorted.end());
  const auto idx = std::min<std::size_t>(
      sorted.size() - 1,
      static_cast<std::size_t>(
          std::ceil(0.999 * static_cast<double>(sorted.size()))) -
          1);
  stats.q999 = sorted[idx];
  stats.max_obs = sorted.back();
  return stats;
}

}  // namespace

Estimate estimate_H_interval(double alpha, double horizon, double step,
                             std::uint64_t n, std::uint64_t seed,
                             const ExecPolicy& policy) {
  return estimate_H_interval_stats(alpha, horizon, step, n, seed, policy)
      .estimate;
}

HIntervalStats estimate_H_interval_stats(double alpha, double horizon,
                                         double step, std::uint64_t n,
                                         std::uint64_t seed,
                                         const ExecPolicy& policy) {
  return interval_stats_impl(alpha, horizon, step, n,
                             RngStream(seed, kStreamHInterval), 0, policy);
}

Estimate estimate_H_rect(double alpha, double side_a, double side_b,
                         double step, std::uint64_t n, std::uint64_t seed,
                         const ExecPolicy& policy) {
  check_common(alpha, step, n);
  if (!(side_a >= 0.0) || !(side_b >= 0.0))
    throw std::invalid_argument("rectangle sides must be >= 0");
  const Grid ga = Grid::over(side_a, step);
  const Grid gb = Grid::over(side_b, step);
  const FbmSampler pa(alpha, ga), pb(alpha, gb);
  const auto da = drift_on(ga, alpha);
  const auto db = drift_on(gb, alpha);

  const RngStream root(seed, kStreamHRect);
  std::vector<double> out(n);
  const std::uint64_t chunk = policy.chunk > 0 ? policy.chunk : 16384;
  chunked_reduce<std::vector<double>>(
      n, policy,
      [&](std::uint64_t c, std::uint64_t count) {
        FbmSampler s1(pa), s2(pb);
        RngStream rng = root.spawn(c);
        std::vector<double> vals(count), p1, p2;
        const bool analytic = (alpha == 2.0);
        for (std::uint64_t i = 0; i < count; ++i) {
          // sup of an additive field over a product region splits exactly.
          if (analytic) {
            const double za = rng.normal();
            const double zb = rng.normal();
            vals[i] =
                std::exp(sup_parabola(za, side_a) + sup_parabola(zb, side_b));
          } else {
            s1.sample(rng, p1);
            s2.sample(rng, p2);
            vals[i] = std::exp(grid_sup_minus_drift(p1, da) +
                               grid_sup_minus_drift(p2, db));
          }
        }
        return vals;
      },
      [&](std::uint64_t c, const std::vector<double>& vals) {
        std::copy(vals.begin(), vals.end(), out.begin() + c * chunk);
      });
  return summarize(out, ga.step);
}

double h_exact_alpha2(double horizon) {
  if (!(horizon >= 0.0))
    throw std::invalid_argument("horizon must be >= 0");
  return 1.0 + horizon * std::numbers::inv_sqrtpi;
}

double h_quadrature_alpha1(double horizon) {
  if (!(horizon >= 0.0))
    throw std::invalid_argument("horizon must be >= 0");
  if (horizon == 0.0) return 1.0;
  const double T = horizon;
  const double s = std::sqrt(2.0 * T);
  // e^x P(sup >= x) with P from the reflection principle; the e^x e^{-x}
  // product in the second term cancels analytically, and the first term is
  // assembled in log space so no intermediate over/underflows.
  auto integrand = [T, s](double x) {
    const double tail = std_normal_tail((x + T) / s);
    const double term1 = tail > 0.0 ? std::exp(x + std::log(tail)) : 0.0;
    return term1 + std_normal_cdf((T - x) / s);
  };
  const double x_max = T + 16.0 * std::sqrt(T) + 60.0;
  return 1.0 + integrate(integrand, 0.0, x_max, 1e-10);
}

ConvergenceTable estimate_pickands_constant(double alpha,
                                            const std::vector<double>& horizons,
                                            double step, std::uint64_t n,
                                            std::uint64_t seed,
                                            const ExecPolicy& policy) {
  check_common(alpha, step, n);
  if (horizons.empty())
    throw std::invalid_argument("need at least one horizon");
  for (double T : horizons)
    if (!(T > 0.0)) throw std::invalid_argument("horizons must be > 0");

  const RngStream base(seed, kStreamHTable);
  ConvergenceTable table;
  table.rows.reserve(horizons.size());
  std::size_t argmax = 0;
  for (std::size_t r = 0; r < horizons.size(); ++r) {
    // Row r draws from lane r: rows are mutually independent but the whole
    // table is reproducible from (seed, horizons, step, n).
    const auto stats = interval_stats_impl(alpha, horizons[r], step, n, base,
                                           r, policy);
    ConvergenceRow row;
    row.horizon = horizons[r];
    row.mean = stats.estimate.mean;
    row.std_error = stats.estimate.std_error;
    row.ratio = row.mean / row.horizon;
    table.rows.push_back(row);
    if (horizons[r] > horizons[argmax]) argmax = r;
    if (r == 0) table.grid_step = stats.estimate.grid_step;
  }
  table.h_alpha = table.rows[argmax].ratio;
  return table;
}

double pickands_lower_bound(double alpha) {
  if (!(alpha > 0.0) || !(alpha <= 2.0))
    throw std::invalid_argument("alpha must lie in (0, 2]");
  return alpha /
         (std::pow(2.0, 2.0 + 2.0 / alpha) * gamma_fn(1.0 / alpha));
}

double ceiling_bound(double horizon, double h_unit) {
  if (!(horizon > 0.0)) throw std::invalid_argument("horizon must be > 0");
  if (!(h_unit >= 1.0))
    throw std::invalid_argument("unit-interval value must be >= 1");
  return std::ceil(horizon) * h_unit;
}

double ceiling_bound_rect(double side_a, double side_b, double h_square) {
  if (!(side_a > 0.0) || !(side_b > 0.0))
    throw std::invalid_argument("rectangle sides must be > 0");
  if (!(h_square >= 1.0))
    throw std::invalid_argument("unit-square value must be >= 1");
  return std::ceil(side_a) * std::ceil(side_b) * h_square;
}

}  // namespace pickands
