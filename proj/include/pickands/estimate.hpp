#pragma once

#include <cstdint>
#include <vector>

#include "pickands/process.hpp"
#include "pickands/types.hpp"

namespace pickands {

// --- Monte Carlo estimators of H(T) = E exp(sup_{[0,T]} (B(t) - t^alpha)) ---
//
// The supremum is taken over the discrete grid, so every estimator carries a
// negative discretization bias that vanishes as step -> 0. All estimators are
// deterministic functions of (seed, parameters): chunk c of the sample loop
// consumes RNG substream c regardless of the worker count.

Estimate estimate_H_interval(double alpha, double horizon, double step,
                             std::uint64_t n, std::uint64_t seed,
                             const ExecPolicy& policy = {});

struct HIntervalStats {
  Estimate estimate;
  double q999 = 0.0;   // 0.999 sample quantile of exp(sup), tail diagnostic
  double max_obs = 0.0;  // largest observed exp(sup)
};

// Same estimator as estimate_H_interval (bitwise-identical mean for equal
// inputs), plus upper-tail diagnostics of the integrand distribution.
HIntervalStats estimate_H_interval_stats(double alpha, double horizon,
                                         double step, std::uint64_t n,
                                         std::uint64_t seed,
                                         const ExecPolicy& policy = {});

// E exp(sup over [0,a] x [0,b] of B1(t1) + B2(t2) - t1^alpha - t2^alpha).
// The field is additive, so the supremum splits per coordinate exactly.
Estimate estimate_H_rect(double alpha, double side_a, double side_b,
                         double step, std::uint64_t n, std::uint64_t seed,
                         const ExecPolicy& policy = {});

// --- Closed-form / quadrature references -----------------------------------

// alpha = 2: H(T) = 1 + T / sqrt(pi), exact.
double h_exact_alpha2(double horizon);

// alpha = 1: H(T) = 1 + integral_0^inf [ e^x Psi((x+T)/sqrt(2T))
//                                        + Phi((T-x)/sqrt(2T)) ] dx,
// evaluated by adaptive quadrature (the sup of drifted Brownian motion has an
// explicit tail from the reflection principle). Exact up to quadrature error.
double h_quadrature_alpha1(double horizon);

// --- Pickands constant: H_alpha = lim H(T)/T --------------------------------

struct ConvergenceRow {
  double horizon = 0.0;
  double mean = 0.0;       // estimated H(T)
  double std_error = 0.0;  // Monte Carlo standard error of the mean
  double ratio = 0.0;      // H(T) / T, the running constant estimate
};

struct ConvergenceTable {
  std::vector<ConvergenceRow> rows;  // one per requested horizon, same order
  double h_alpha = 0.0;              // ratio at the largest horizon
  double grid_step = 0.0;
};

// Estimates H(T)/T on each horizon with independent RNG lanes. The horizons
// need not be sorted; h_alpha is read off the largest one.
ConvergenceTable estimate_pickands_constant(double alpha,
                                            const std::vector<double>& horizons,
                                            double step, std::uint64_t n,
                                            std::uint64_t seed,
                                            const ExecPolicy& policy = {});

// Rigorous positive lower bound: H_alpha >= alpha / (2^(2+2/alpha) Gamma(1/alpha)).
double pickands_lower_bound(double alpha);

// Subadditivity ceilings: H(T) <= ceil(T) * H(1) and, on rectangles,
// H(a, b) <= ceil(a) * ceil(b) * H(1, 1).
double ceiling_bound(double horizon, double h_unit);
double ceiling_bound_rect(double side_a, double side_b, double h_square);

}  // namespace pickands
