#pragma once

#include <cstdint>
#include <vector>

#include "pickands/process.hpp"
#include "pickands/rng.hpp"
#include "pickands/types.hpp"

#include <Eigen/Core>

namespace pickands {

// --- Block partition at the exceedance scale --------------------------------
//
// For P(sup_{[0,p]} X > u) the natural block length is L = u^{-2/alpha} * T:
// [0,p] holds n_blocks = floor(p/L) full blocks, and n_blocks+1 blocks cover
// it. n_blocks <= 1 is flagged degenerate (no pair terms / no full block).

struct IntervalPartition {
  double block_length = 0.0;
  std::uint64_t n_blocks = 0;
  bool degenerate = false;
};

IntervalPartition interval_partition(double p, double u, double alpha,
                                     double block_scale);

// Theorem value H * p * u^(2/alpha) * Psi(u).
double pickands_approximation(double alpha, double p, double u, double h_alpha);

// Sum singles - sum of pairwise intersections (may be negative; returned
// as-is). pairs[i][j-i-1] holds P(A_i and A_j) for j > i; row i has
// singles.size()-1-i entries. All probabilities must lie in [0,1].
double bonferroni_lower(const std::vector<double>& singles,
                        const std::vector<std::vector<double>>& pairs);

// --- Monte Carlo exceedance probabilities -----------------------------------

// Fraction of paths whose grid maximum over [0,p] exceeds u, binomial
// standard error. Flags: unreliable when fewer than 10 paths exceeded,
// coarse_grid when the adjusted step exceeds 0.1 * u^(-2/alpha). The path
// ensemble depends on (model, p, step, n, seed) but not on u, so estimates at
// different levels share paths (common random numbers).
Estimate mc_sup_exceedance(const CovarianceModel& model, double p, double u,
                           double step, std::uint64_t n, std::uint64_t seed,
                           const ExecPolicy& policy = {});

// Closed interval [lo, hi].
struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

// Probability that the grid maxima over two disjoint intervals both exceed u.
Estimate mc_joint_exceedance(const CovarianceModel& model, const Interval& a,
                             const Interval& b, double u, double step,
                             std::uint64_t n, std::uint64_t seed,
                             const ExecPolicy& policy = {});

// --- Double-sum bracketing on a shared ensemble ------------------------------
//
// One path ensemble on [0, (n_blocks+1)*L] feeds every count below, so the
// bracketing inequalities hold pathwise-exactly, not just in expectation:
//   lower_union_count <= full_count <= upper_union_count.

struct BoundsReport {
  // Echoed configuration (step is the adjusted grid step).
  double p = 0.0, u = 0.0, alpha = 0.0, block_scale = 0.0, step = 0.0;
  std::uint64_t n = 0;
  std::uint64_t seed = 0;

  IntervalPartition partition;

  Estimate mc;            // direct P(sup over [0,p] grid > u)
  Estimate single_block;  // pooled per-block exceedance probability
  double bonferroni_lower = 0.0;  // n_blocks*single - full double sum
  double union_upper = 0.0;       // (n_blocks+1)*single
  double pickands_value = 0.0;    // H * p * u^(2/alpha) * Psi(u)

  // Pathwise counts on the shared ensemble.
  std::uint64_t lower_union_count = 0;  // any of the n_blocks lower blocks
  std::uint64_t full_count = 0;         // grid sup over [0,p]
  std::uint64_t upper_union_count = 0;  // any of the n_blocks+1 covering blocks
};

BoundsReport exceedance_bracketing(const CovarianceModel& model, double p,
                                   double u, double block_scale, double step,
                                   std::uint64_t n, double h_alpha,
                                   std::uint64_t seed,
                                   const ExecPolicy& policy = {});

// --- Gaussian comparison and concentration inequalities ----------------------

// Joint-exceedance ceiling for two blocks [0, L*T] and [L*t0, L*(t0+T)] at
// scale L = u^(-2/alpha):
//   4 * ceil(C*T) * ceil(C*(t0+T)) * exp(-(t0-T)^alpha / 8) * H_square,
// with C = (2*sqrt(2)/sqrt(7))^(2/alpha) * 16^(1/alpha). Requires t0 > T > 0.
double lemdlak_constant(double alpha, double t0, double block_scale,
                        double h_square);

// Concentration tail bound exp(-(w-m)^2 / (2*sigma2)) for w >= m.
double borell_bound(double m, double sigma2, double w);

struct BorellLevel {
  double w = 0.0;
  double tail = 0.0;       // empirical P(sup > w)
  double std_error = 0.0;  // binomial
  double bound = 0.0;      // borell_bound(m_hat, 1, w)
  bool ok = false;         // tail <= bound + 4*std_error
};

struct BorellReport {
  double m_hat = 0.0;  // sample mean of the grid supremum
  std::vector<BorellLevel> levels;
  bool all_ok = false;
};

// Samples sups of the stationary model on [0, horizon], then compares the
// empirical tail against the concentration bound (unit variance plugged in)
// at 10 levels m_hat + k/3, k = 0..9.
BorellReport borell_check(const CovarianceModel& model, double horizon,
                          double step, std::uint64_t n, std::uint64_t seed,
                          const ExecPolicy& policy = {});

struct SlepianReport {
  Estimate p_x;  // P(max X < u)
  Estimate p_y;  // P(max Y < u)
  bool consistent = false;  // p_x.mean <= p_y.mean + 4*combined stderr
};

// Comparison check: cov_x and cov_y must share the diagonal and satisfy
// cov_x <= cov_y elementwise (both PSD, one common mean vector); then
// P(max X < u) <= P(max Y < u). Violated preconditions throw
// std::invalid_argument naming the offending entry.
SlepianReport slepian_check(const Eigen::MatrixXd& cov_x,
                            const Eigen::MatrixXd& cov_y,
                            const Eigen::VectorXd& mean, double u,
                            std::uint64_t n, std::uint64_t seed,
                            const ExecPolicy& policy = {});

// P(X < u, Y < u) for a standard bivariate normal pair with correlation rho,
// by adaptive tensor quadrature of the density over [-12, u]^2.
double bivariate_rect_prob(double rho, double u);

// --- Exact finite-space oracle for the union bracketing ----------------------

struct FiniteSpace {
  std::vector<double> atom_mass;                  // nonnegative, sums to 1
  std::vector<std::vector<std::size_t>> events;   // atom index sets
};

struct UnionBounds {
  double exact_union = 0.0;
  std::vector<double> singles;
  std::vector<std::vector<double>> pairs;  // upper triangle, row i: j > i
  double singles_sum = 0.0;
  double bonferroni = 0.0;
};

// Exact enumeration over atoms. With dyadic masses every quantity is a
// multiple of 2^-20, so the bracketing comparisons are exact in double.
UnionBounds brute_force_union(const FiniteSpace& space);

// Random space with at most max_atoms atoms (masses k/2^20, k integer summing
// to 2^20) and at most max_events uniformly random events.
FiniteSpace random_dyadic_space(RngStream& rng, std::size_t max_atoms = 16,
                                std::size_t max_events = 6);

}  // namespace pickands
