#include "pickands/doublesum.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "pickands/gauss.hpp"
#include "pickands/parallel.hpp"
#include "pickands/quadrature.hpp"

namespace pickands {

namespace {

constexpr std::uint64_t kStreamExceedance = 4;
constexpr std::uint64_t kStreamBracketing = 5;
constexpr std::uint64_t kStreamJoint = 6;
constexpr std::uint64_t kStreamSlepian = 7;
constexpr std::uint64_t kStreamBorell = 8;

void check_level_scale(double u) {
  if (!(u == u)) throw std::invalid_argument("level u must not be NaN");
}

double exceedance_scale(double u, double alpha) {
  // Natural horizon scale of the theorem; grids coarser than a tenth of it
  // under-resolve block maxima.
  return std::pow(std::abs(u) > 1.0 ? std::abs(u) : 1.0, -2.0 / alpha);
}

Estimate binomial_estimate(std::uint64_t hits, std::uint64_t n, double step) {
  Estimate e;
  e.n_samples = n;
  e.grid_step = step;
  const double phat = static_cast<double>(hits) / static_cast<double>(n);
  e.mean = phat;
  e.std_error = std::sqrt(phat * (1.0 - phat) / static_cast<double>(n));
  e.unreliable = hits < 10;
  return e;
}

}  // namespace

IntervalPartition interval_partition(double p, double u, double alpha,
                                     double block_scale) {
  if (!(p > 0.0)) throw std::invalid_argument("horizon p must be > 0");
  if (!(u > 0.0)) throw std::invalid_argument("level u must be > 0");
  if (!(alpha > 0.0) || !(alpha <= 2.0))
    throw std::invalid_argument("alpha must lie in (0, 2]");
  if (!(block_scale > 0.0))
    throw std::invalid_argument("block scale must be > 0");
  IntervalPartition part;
  part.block_length = std::pow(u, -2.0 / alpha) * block_scale;
  // The +1e-9 absorbs roundoff when p is an exact multiple of the length.
  part.n_blocks =
      static_cast<std::uint64_t>(std::floor(p / part.block_length + 1e-9));
  part.degenerate = part.n_blocks <= 1;
  return part;
}

double pickands_approximation(double alpha, double p, double u,
                              double h_alpha) {
  if (!(alpha > 0.0) || !(alpha <= 2.0))
    throw std::invalid_argument("alpha must lie in (0, 2]");
  if (!(p > 0.0) || !(u > 0.0) || !(h_alpha > 0.0))
    throw std::invalid_argument("p, u and the constant must be > 0");
  return h_alpha * p * std::pow(u, 2.0 / alpha) * std_normal_tail(u);
}

double bonferroni_lower(const std::vector<double>& singles,
                        const std::vector<std::vector<double>>& pairs) {
  const std::size_t k = singles.size();
  const std::size_t rows = k == 0 ? 0 : k - 1;
  if (pairs.size() != rows)
    throw std::invalid_argument(
        "pairs must have one row per event except the last");
  KahanSum total;
  for (double s : singles) {
    if (!(s >= 0.0) || !(s <= 1.0))
      throw std::invalid_argument("single probabilities must lie in [0,1]");
    total.add(s);
  }
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (pairs[i].size() != k - 1 - i)
      throw std::invalid_argument("pair row " + std::to_string(i) +
                                  " has the wrong length");
    for (double q : pairs[i]) {
      if (!(q >= 0.0) || !(q <= 1.0))
        throw std::invalid_argument("pair probabilities must lie in [0,1]");
      total.add(-q);
    }
  }
  return total.value();
}

Estimate mc_sup_exceedance(const CovarianceModel& model, double p, double u,
                           double step, std::uint64_t n, std::uint64_t seed,
                           const ExecPolicy& policy) {
  check_level_scale(u);
  if (!(p > 0.0)) throw std::invalid_argument("horizon p must be > 0");
  if (!(step > 0.0)) throw std::invalid_argument("step must be > 0");
  if (n < 2) throw std::invalid_argument("need at least 2 samples");

  const Grid grid = Grid::over(p, step);
  const StationarySampler proto(model, grid);
  const RngStream root(seed, kStreamExceedance);

  std::uint64_t hits = 0;
  chunked_reduce<std::uint64_t>(
      n, policy,
      [&](std::uint64_t c, std::uint64_t count) {
        StationarySampler sampler(proto);
        RngStream rng = root.spawn(c);
        std::vector<double> path;
        std::uint64_t h = 0;
        for (std::uint64_t i = 0; i < count; ++i) {
          sampler.sample(rng, path);
          h += *std::max_element(path.begin(), path.end()) > u;
        }
        return h;
      },
      [&](std::uint64_t, std::uint64_t h) { hits += h; });

  Estimate e = binomial_estimate(hits, n, grid.step);
  e.coarse_grid = grid.step > 0.1 * exceedance_scale(u, model.alpha);
  return e;
}

Estimate mc_joint_exceedance(const CovarianceModel& model, const Interval& a,
                             const Interval& b, double u, double step,
                             std::uint64_t n, std::uint64_t seed,
                             const ExecPolicy& policy) {
  check_level_scale(u);
  if (!(a.lo < a.hi) || !(b.lo < b.hi))
    throw std::invalid_argument("intervals must have positive length");
  if (std::max(a.lo, b.lo) < std::min(a.hi, b.hi))
    throw std::invalid_argument("intervals must be disjoint");
  if (!(step > 0.0)) throw std::invalid_argument("step must be > 0");
  if (n < 2) throw std::invalid_argument("need at least 2 samples");

  // Per-interval uniform grids glued into one point set; the gap carries no
  // points, so the joint law is sampled densely from the full covariance.
  auto points_of = [step](const Interval& iv, std::vector<double>& pts) {
    const auto m = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::llround((iv.hi - iv.lo) / step)));
    const double h = (iv.hi - iv.lo) / static_cast<double>(m);
    for (std::size_t i = 0; i <= m; ++i)
      pts.push_back(iv.lo + h * static_cast<double>(i));
    return h;
  };
  std::vector<double> pts;
  const double ha = points_of(a, pts);
  const std::size_t na = pts.size();
  const double hb = points_of(b, pts);

  const auto dim = static_cast<Eigen::Index>(pts.size());
  Eigen::MatrixXd cov(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i)
    for (Eigen::Index j = 0; j < dim; ++j)
      cov(i, j) = model(pts[static_cast<std::size_t>(i)] -
                        pts[static_cast<std::size_t>(j)]);
  const MvnSampler proto(Eigen::VectorXd::Zero(dim), cov);
  const RngStream root(seed, kStreamJoint);

  std::uint64_t hits = 0;
  chunked_reduce<std::uint64_t>(
      n, policy,
      [&](std::uint64_t c, std::uint64_t count) {
        RngStream rng = root.spawn(c);
        Eigen::VectorXd x(dim);
        std::uint64_t h = 0;
        for (std::uint64_t i = 0; i < count; ++i) {
          proto.sample(rng, x);
          const double max_a = x.head(static_cast<Eigen::Index>(na)).maxCoeff();
          const double max_b = x.tail(dim - static_cast<Eigen::Index>(na)).maxCoeff();
          h += (max_a > u) && (max_b > u);
        }
        return h;
      },
      [&](std::uint64_t, std::uint64_t h) { hits += h; });

  Estimate e = binomial_estimate(hits, n, std::max(ha, hb));
  e.coarse_grid =
      std::max(ha, hb) > 0.1 * exceedance_scale(u, model.alpha);
  return e;
}

BoundsReport exceedance_bracketing(const CovarianceModel& model, double p,
                                   double u, double block_scale, double step,
                                   std::uint64_t n, double h_alpha,
                                   std::uint64_t seed,
                                   const ExecPolicy& policy) {
  if (!(step > 0.0)) throw std::invalid_argument("step must be > 0");
  if (n < 2) throw std::invalid_argument("need at least 2 samples");
  const IntervalPartition part =
      interval_partition(p, u, model.alpha, block_scale);
  if (part.n_blocks < 1)
    throw std::invalid_argument(
        "horizon holds no full block at this level; enlarge p or shrink the "
        "block scale");

  // Shared grid over the n_blocks+1 covering blocks; each block holds ppb
  // intervals so block boundaries are exact grid points.
  const auto n_low = part.n_blocks;           // lower blocks 0..n_low-1
  const auto n_cover = part.n_blocks + 1;     // covering blocks 0..n_low
  const auto ppb = std::max<std::uint64_t>(
      2, static_cast<std::uint64_t>(std::llround(part.block_length / step)));
  Grid grid;
  grid.start = 0.0;
  grid.step = part.block_length / static_cast<double>(ppb);
  grid.count = static_cast<std::size_t>(n_cover * ppb + 1);
  // Largest index belonging to [0, p].
  const auto idx_p = std::min<std::size_t>(
      grid.count - 1,
      static_cast<std::size_t>(std::floor(p / grid.step + 1e-9)));

  const StationarySampler proto(model, grid);
  const RngStream root(seed, kStreamBracketing);

  struct Partial {
    std::uint64_t full = 0;           // sup over [0,p] grid > u
    std::uint64_t lower_union = 0;    // any lower block exceeds
    std::uint64_t upper_union = 0;    // any covering block exceeds
    std::uint64_t singles_low = 0;    // total lower-block exceedances
    std::uint64_t singles_all = 0;    // total covering-block exceedances
    std::uint64_t singles_all_sq = 0; // sum of squared per-path counts
    std::uint64_t pair_sum = 0;       // total lower-block pair exceedances
  };

  Partial total;
  chunked_reduce<Partial>(
      n, policy,
      [&](std::uint64_t c, std::uint64_t count) {
        StationarySampler sampler(proto);
        RngStream rng = root.spawn(c);
        std::vector<double> path;
        std::vector<unsigned char> block_hit(n_cover);
        Partial acc;
        for (std::uint64_t i = 0; i < count; ++i) {
          sampler.sample(rng, path);
          bool full = false;
          for (std::size_t j = 0; j <= idx_p; ++j)
            if (path[j] > u) {
              full = true;
              break;
            }
          acc.full += full;
          std::uint64_t s_all = 0, s_low = 0;
          for (std::uint64_t k = 0; k < n_cover; ++k) {
            const std::size_t lo = static_cast<std::size_t>(k * ppb);
            const std::size_t hi = lo + static_cast<std::size_t>(ppb);
            bool hit = false;
            for (std::size_t j = lo; j <= hi; ++j)
              if (path[j] > u) {
                hit = true;
                break;
              }
            block_hit[k] = hit;
            s_all += hit;
            s_low += hit && k < n_low;
          }
          acc.singles_all += s_all;
          acc.singles_all_sq += s_all * s_all;
          acc.singles_low += s_low;
          acc.upper_union += s_all > 0;
          acc.lower_union += s_low > 0;
          // Full double sum over lower-block pairs (every (i,j), i<j, once;
          // per lag this realizes the n_blocks-lag multiplicity).
          for (std::uint64_t ki = 0; ki + 1 < n_low; ++ki)
            if (block_hit[ki])
              for (std::uint64_t kj = ki + 1; kj < n_low; ++kj)
                acc.pair_sum += block_hit[kj];
        }
        return acc;
      },
      [&](std::uint64_t, const Partial& acc) {
        total.full += acc.full;
        total.lower_union += acc.lower_union;
        total.upper_union += acc.upper_union;
        total.singles_low += acc.singles_low;
        total.singles_all += acc.singles_all;
        total.singles_all_sq += acc.singles_all_sq;
        total.pair_sum += acc.pair_sum;
      });

  BoundsReport report;
  report.p = p;
  report.u = u;
  report.alpha = model.alpha;
  report.block_scale = block_scale;
  report.step = grid.step;
  report.n = n;
  report.seed = seed;
  report.partition = part;

  const double nd = static_cast<double>(n);
  report.mc = binomial_estimate(total.full, n, grid.step);
  report.mc.coarse_grid = grid.step > 0.1 * exceedance_scale(u, model.alpha);

  // Pooled single-block probability: mean and stderr of (count / n_cover).
  const double mean_all = static_cast<double>(total.singles_all) / nd;
  const double var_all =
      (static_cast<double>(total.singles_all_sq) - nd * mean_all * mean_all) /
      (nd - 1.0);
  report.single_block.mean = mean_all / static_cast<double>(n_cover);
  report.single_block.std_error =
      std::sqrt(std::max(0.0, var_all) / nd) / static_cast<double>(n_cover);
  report.single_block.n_samples = n;
  report.single_block.grid_step = grid.step;
  report.single_block.unreliable = total.singles_all < 10;
  report.single_block.coarse_grid = report.mc.coarse_grid;

  report.bonferroni_lower =
      (static_cast<double>(total.singles_low) -
       static_cast<double>(total.pair_sum)) /
      nd;
  report.union_upper = static_cast<double>(total.singles_all) / nd;
  report.pickands_value = pickands_approximation(model.alpha, p, u, h_alpha);

  report.lower_union_count = total.lower_union;
  report.full_count = total.full;
  report.upper_union_count = total.upper_union;
  return report;
}

double lemdlak_constant(double alpha, double t0, double block_scale,
                        double h_square) {
  if (!(alpha > 0.0) || !(alpha <= 2.0))
    throw std::invalid_argument("alpha must lie in (0, 2]");
  if (!(block_scale > 0.0) || !(t0 > block_scale))
    throw std::invalid_argument("need t0 > block scale > 0");
  if (!(h_square > 0.0))
    throw std::invalid_argument("unit-square constant must be > 0");
  const double c = std::pow(2.0 * std::numbers::sqrt2 / std::sqrt(7.0),
                            2.0 / alpha) *
                   std::pow(16.0, 1.0 / alpha);
  // c is rational at alpha = 1, so c*(t0 + T) can land exactly on an integer;
  // shave a relative epsilon so pow() roundoff a few ulp above the integer
  // does not bump the ceiling to the next block count.
  const auto int_ceil = [](double v) {
    return std::ceil(v - 1e-12 * std::max(1.0, std::abs(v)));
  };
  return 4.0 * int_ceil(c * block_scale) * int_ceil(c * (t0 + block_scale)) *
         std::exp(-std::pow(t0 - block_scale, alpha) / 8.0) * h_square;
}

double borell_bound(double m, double sigma2, double w) {
  if (!(sigma2 > 0.0)) throw std::invalid_argument("sigma2 must be > 0");
  if (!(w >= m)) throw std::invalid_argument("bound requires w >= m");
  const double d = w - m;
  return std::exp(-d * d / (2.0 * sigma2));
}

BorellReport borell_check(const CovarianceModel& model, double horizon,
                          double step, std::uint64_t n, std::uint64_t seed,
                          const ExecPolicy& policy) {
  if (!(horizon > 0.0)) throw std::invalid_argument("horizon must be > 0");
  if (!(step > 0.0)) throw std::invalid_argument("step must be > 0");
  if (n < 2) throw std::invalid_argument("need at least 2 samples");

  const Grid grid = Grid::over(horizon, step);
  const StationarySampler proto(model, grid);
  const RngStream root(seed, kStreamBorell);

  std::vector<double> sups(n);
  const std::uint64_t chunk = policy.chunk > 0 ? policy.chunk : 16384;
  chunked_reduce<std::vector<double>>(
      n, policy,
      [&](std::uint64_t c, std::uint64_t count) {
        StationarySampler sampler(proto);
        RngStream rng = root.spawn(c);
        std::vector<double> vals(count), path;
        for (std::uint64_t i = 0; i < count; ++i) {
          sampler.sample(rng, path);
          vals[i] = *std::max_element(path.begin(), path.end());
        }
        return vals;
      },
      [&](std::uint64_t c, const std::vector<double>& vals) {
        std::copy(vals.begin(), vals.end(), sups.begin() + c * chunk);
      });

  BorellReport report;
  KahanSum mean;
  for (double s : sups) mean.add(s);
  report.m_hat = mean.value() / static_cast<double>(n);

  report.all_ok = true;
  for (int k = 0; k < 10; ++k) {
    BorellLevel lvl;
    lvl.w = report.m_hat + static_cast<double>(k) / 3.0;
    std::uint64_t hits = 0;
    for (double s : sups) hits += s > lvl.w;
    const Estimate e = binomial_estimate(hits, n, grid.step);
    lvl.tail = e.mean;
    lvl.std_error = e.std_error;
    lvl.bound = borell_bound(report.m_hat, 1.0, lvl.w);
    lvl.ok = lvl.tail <= lvl.bound + 4.0 * lvl.std_error;
    report.all_ok = report.all_ok && lvl.ok;
    report.levels.push_back(lvl);
  }
  return report;
}

SlepianReport slepian_check(const Eigen::MatrixXd& cov_x,
                            const Eigen::MatrixXd& cov_y,
                            const Eigen::VectorXd& mean, double u,
                            std::uint64_t n, std::uint64_t seed,
                            const ExecPolicy& policy) {
  const Eigen::Index d = cov_x.rows();
  if (cov_x.cols() != d || cov_y.rows() != d || cov_y.cols() != d ||
      mean.size() != d || d == 0)
    throw std::invalid_argument("covariances and mean must share one size");
  if (n < 2) throw std::invalid_argument("need at least 2 samples");
  const double scale = std::max(
      {1.0, cov_x.cwiseAbs().maxCoeff(), cov_y.cwiseAbs().maxCoeff()});
  const double tol = 1e-12 * scale;
  for (Eigen::Index i = 0; i < d; ++i)
    if (std::abs(cov_x(i, i) - cov_y(i, i)) > tol)
      throw std::invalid_argument("diagonal mismatch at entry (" +
                                  std::to_string(i) + "," + std::to_string(i) +
                                  ")");
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j)
      if (cov_x(i, j) > cov_y(i, j) + tol)
        throw std::invalid_argument(
            "comparison requires cov_x <= cov_y elementwise; violated at (" +
            std::to_string(i) + "," + std::to_string(j) + ")");

  const MvnSampler sx(mean, cov_x);
  const MvnSampler sy(mean, cov_y);
  const RngStream root(seed, kStreamSlepian);

  struct Partial {
    std::uint64_t below_x = 0, below_y = 0;
  };
  Partial total;
  chunked_reduce<Partial>(
      n, policy,
      [&](std::uint64_t c, std::uint64_t count) {
        RngStream rx = root.spawn(c, 0);
        RngStream ry = root.spawn(c, 1);
        Eigen::VectorXd v(d);
        Partial acc;
        for (std::uint64_t i = 0; i < count; ++i) {
          sx.sample(rx, v);
          acc.below_x += v.maxCoeff() < u;
          sy.sample(ry, v);
          acc.below_y += v.maxCoeff() < u;
        }
        return acc;
      },
      [&](std::uint64_t, const Partial& acc) {
        total.below_x += acc.below_x;
        total.below_y += acc.below_y;
      });

  SlepianReport report;
  report.p_x = binomial_estimate(total.below_x, n, 0.0);
  report.p_y = binomial_estimate(total.below_y, n, 0.0);
  report.p_x.unreliable = false;
  report.p_y.unreliable = false;
  const double combined = std::hypot(report.p_x.std_error,
                                     report.p_y.std_error);
  report.consistent = report.p_x.mean <= report.p_y.mean + 4.0 * combined;
  return report;
}

double bivariate_rect_prob(double rho, double u) {
  if (!(std::abs(rho) < 1.0))
    throw std::invalid_argument("correlation must lie in (-1, 1)");
  const double det = 1.0 - rho * rho;
  const double norm = 1.0 / (2.0 * std::numbers::pi * std::sqrt(det));
  auto density = [rho, det, norm](double x, double y) {
    return norm * std::exp(-(x * x - 2.0 * rho * x * y + y * y) / (2.0 * det));
  };
  return integrate2d(density, -12.0, u, -12.0, u, 1e-11);
}

UnionBounds brute_force_union(const FiniteSpace& space) {
  double mass = 0.0;
  for (double m : space.atom_mass) {
    if (!(m >= 0.0)) throw std::invalid_argument("atom masses must be >= 0");
    mass += m;
  }
  if (std::abs(mass - 1.0) > 1e-9)
    throw std::invalid_argument("atom masses must sum to 1");
  const std::size_t k = space.events.size();
  if (k > 64) throw std::invalid_argument("at most 64 events supported");
  for (const auto& ev : space.events)
    for (std::size_t a : ev)
      if (a >= space.atom_mass.size())
        throw std::invalid_argument("event references a missing atom");

  // Membership masks per atom (k <= 6 events fit easily in 64 bits).
  std::vector<std::uint64_t> member(space.atom_mass.size(), 0);
  for (std::size_t e = 0; e < k; ++e)
    for (std::size_t a : space.events[e]) member[a] |= 1ull << e;

  UnionBounds out;
  out.singles.assign(k, 0.0);
  out.pairs.assign(k == 0 ? 0 : k - 1, {});
  for (std::size_t i = 0; i + 1 < k; ++i) out.pairs[i].assign(k - 1 - i, 0.0);

  for (std::size_t a = 0; a < space.atom_mass.size(); ++a) {
    const double m = space.atom_mass[a];
    const std::uint64_t bits = member[a];
    if (bits != 0) out.exact_union += m;
    for (std::size_t i = 0; i < k; ++i) {
      if (!(bits >> i & 1)) continue;
      out.singles[i] += m;
      for (std::size_t j = i + 1; j < k; ++j)
        if (bits >> j & 1) out.pairs[i][j - i - 1] += m;
    }
  }
  for (double s : out.singles) out.singles_sum += s;
  out.bonferroni = bonferroni_lower(out.singles, out.pairs);
  return out;
}

FiniteSpace random_dyadic_space(RngStream& rng, std::size_t max_atoms,
                                std::size_t max_events) {
  if (max_atoms == 0) throw std::invalid_argument("need at least one atom");
  constexpr std::uint64_t kGrain = 1ull << 20;
  FiniteSpace space;
  const std::size_t n_atoms =
      1 + static_cast<std::size_t>(rng.next_u64() % max_atoms);
  // Random composition of 2^20 into n_atoms nonnegative integer parts.
  std::vector<std::uint64_t> cuts(n_atoms - 1);
  for (auto& c : cuts) c = rng.next_u64() % (kGrain + 1);
  std::sort(cuts.begin(), cuts.end());
  space.atom_mass.resize(n_atoms);
  std::uint64_t prev = 0;
  for (std::size_t i = 0; i < n_atoms; ++i) {
    const std::uint64_t next = i + 1 < n_atoms ? cuts[i] : kGrain;
    space.atom_mass[i] =
        static_cast<double>(next - prev) / static_cast<double>(kGrain);
    prev = next;
  }
  const std::size_t n_events =
      static_cast<std::size_t>(rng.next_u64() % (max_events + 1));
  space.events.resize(n_events);
  for (auto& ev : space.events) {
    const std::uint64_t pick = rng.next_u64();
    for (std::size_t a = 0; a < n_atoms; ++a)
      if (pick >> a & 1) ev.push_back(a);
  }
  return space;
}

}  // namespace pickands
