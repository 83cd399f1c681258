// Acceptance gate: one pass/fail line per criterion, evaluated against exact
// oracles and pinned tolerances. Every criterion is executed twice with
// different worker counts; bit-identical numeric snapshots across the two
// runs are themselves the final criterion.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"
#include "pickands/doublesum.hpp"
#include "pickands/estimate.hpp"
#include "pickands/gauss.hpp"
#include "pickands/process.hpp"
#include "pickands/quadrature.hpp"
#include "pickands/report.hpp"
#include "pickands/rng.hpp"
#include "pickands/types.hpp"

using namespace pickands;
using nlohmann::json;

namespace {

struct Criterion {
  int id = 0;
  bool pass = false;
  std::string headline;
  std::vector<std::string> evidence;
};

struct RunOutput {
  std::vector<Criterion> criteria;
  json snaps = json::object();
  double c1_seconds = 0.0;
  double c7_seconds = 0.0;
};

std::string num(double v) { return fmt_double(v); }

double wall_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

// --- criterion 1: closed-form reproduction at alpha = 2 ---------------------
Criterion criterion1(const ExecPolicy& policy, json& snaps, double& seconds) {
  Criterion c{1, true,
              "alpha=2 estimate reproduces 1+T/sqrt(pi) within 3*stderr "
              "(T in {0.5,1,2}, n=200000)",
              {}};
  json snap = json::array();
  seconds = 0.0;
  std::uint64_t seed = 101;
  for (double T : {0.5, 1.0, 2.0}) {
    const auto t0 = std::chrono::steady_clock::now();
    const Estimate e = estimate_H_interval(2.0, T, 0.01, 200000, seed++,
                                           policy);
    if (T == 1.0) seconds = wall_since(t0);
    const double oracle = h_exact_alpha2(T);
    const bool ok = std::abs(e.mean - oracle) <= 3.0 * e.std_error;
    c.pass = c.pass && ok;
    c.evidence.push_back("T=" + num(T) + ": mean=" + num(e.mean) +
                         " oracle=" + num(oracle) + " stderr=" +
                         num(e.std_error) + (ok ? "" : "  <-- outside"));
    snap.push_back({{"T", T}, {"est", estimate_json(e)}});
  }
  if (seconds >= 60.0) {
    c.pass = false;
    c.evidence.push_back("T=1 run took " + num(seconds) + " s (budget 60)");
  }
  snaps["criterion1"] = snap;
  return c;
}

// --- criterion 2: quadrature oracle agreement at alpha = 1 ------------------
Criterion criterion2(const ExecPolicy& policy, json& snaps) {
  Criterion c{2, true,
              "alpha=1 estimate at T=2 (step 5e-4, n=1e5) agrees with the "
              "quadrature value within 4*stderr + 2%",
              {}};
  // Pre-validation: the quadrature itself against a dense-grid MC at T=1.
  // Step 2.5e-5 keeps the sup-discretization bias near -0.4%; n = 3e5 puts
  // the Monte Carlo noise (~0.17% stderr) well inside the 1% budget.
  const double q1 = h_quadrature_alpha1(1.0);
  const Estimate pre =
      estimate_H_interval(1.0, 1.0, 2.5e-5, 300000, 102, policy);
  const bool pre_ok = std::abs(pre.mean - q1) <= 0.01 * q1;
  c.pass = c.pass && pre_ok;
  c.evidence.push_back("pre-validation T=1: dense-grid mean=" +
                       num(pre.mean) + " quadrature=" + num(q1) +
                       " rel_gap=" + num(std::abs(pre.mean - q1) / q1) +
                       " (budget 1%)" + (pre_ok ? "" : "  <-- outside"));

  const double q2 = h_quadrature_alpha1(2.0);
  const Estimate e = estimate_H_interval(1.0, 2.0, 5e-4, 100000, 103, policy);
  const double budget = 4.0 * e.std_error + 0.02 * q2;
  const bool ok = std::abs(e.mean - q2) <= budget;
  c.pass = c.pass && ok;
  c.evidence.push_back("T=2: mean=" + num(e.mean) + " quadrature=" + num(q2) +
                       " |gap|=" + num(std::abs(e.mean - q2)) + " budget=" +
                       num(budget) + (ok ? "" : "  <-- outside"));
  snaps["criterion2"] = {{"pre", estimate_json(pre)},
                         {"q1", q1},
                         {"main", estimate_json(e)},
                         {"q2", q2}};
  return c;
}

// --- criterion 3: lower-bound formula and gamma oracle -----------------------
Criterion criterion3(json& snaps) {
  Criterion c{3, true,
              "lower-bound formula to 1e-9 relative; gamma function against "
              "a 12-digit quadrature oracle",
              {}};
  const struct {
    double alpha, want;
  } cases[] = {{1.0, 0.0625}, {2.0, 0.14104739588693907}, {0.5, 0.0078125}};
  json snap = json::object();
  json lbs = json::array();
  for (const auto& k : cases) {
    const double got = pickands_lower_bound(k.alpha);
    const bool ok = std::abs(got - k.want) <= 1e-9 * k.want;
    c.pass = c.pass && ok;
    c.evidence.push_back("alpha=" + num(k.alpha) + ": " + num(got) +
                         (ok ? "" : "  <-- not " + num(k.want)));
    lbs.push_back(got);
  }
  json gammas = json::array();
  // Upper limit 8 keeps the first Simpson probe points inside the integrand's
  // mass region (the truncated tail is below 1e-25 relative).
  for (double z : {0.5, 1.0, 1.5, 2.0}) {
    const double oracle =
        2.0 * integrate(
                  [z](double s) {
                    return std::pow(s, 2.0 * z - 1.0) * std::exp(-s * s);
                  },
                  0.0, 8.0, 1e-13);
    const double got = gamma_fn(z);
    const bool ok = std::abs(got - oracle) <= 1e-12 * std::abs(oracle);
    c.pass = c.pass && ok;
    if (!ok)
      c.evidence.push_back("gamma(" + num(z) + ")=" + num(got) +
                           " vs oracle " + num(oracle) + "  <-- outside");
    gammas.push_back(got);
  }
  if (c.pass && c.evidence.size() == 3)
    c.evidence.push_back("gamma(z) matched the quadrature oracle to 1e-12 "
                         "relative at z in {0.5,1,1.5,2}");
  snap["lower_bounds"] = lbs;
  snap["gammas"] = gammas;
  snaps["criterion3"] = snap;
  return c;
}

// --- criterion 4: Pickands-constant trend ------------------------------------
Criterion criterion4(const ExecPolicy& policy, json& snaps) {
  Criterion c{4, true,
              "constant trend: alpha=2 rows within 3*stderr and decreasing; "
              "alpha=1 T=40 ratio in (0.7,1.1); all ratios >= 0.0625",
              {}};
  const ConvergenceTable t2 =
      estimate_pickands_constant(2.0, {5.0, 10.0, 20.0}, 0.05, 200000, 104,
                                 policy);
  for (const auto& row : t2.rows) {
    const double oracle = h_exact_alpha2(row.horizon);
    const bool ok = std::abs(row.mean - oracle) <= 3.0 * row.std_error;
    c.pass = c.pass && ok;
    c.evidence.push_back(
        "alpha=2 T=" + num(row.horizon) + ": mean=" + num(row.mean) +
        " oracle=" + num(oracle) + " stderr=" + num(row.std_error) +
        " ratio=" + num(row.ratio) + (ok ? "" : "  <-- outside 3*stderr"));
  }
  const bool decreasing = t2.rows[0].ratio > t2.rows[1].ratio &&
                          t2.rows[1].ratio > t2.rows[2].ratio;
  c.pass = c.pass && decreasing;
  c.evidence.push_back(std::string("alpha=2 ratios strictly decreasing "
                                   "toward 0.5642: ") +
                       (decreasing ? "yes" : "no  <-- violated"));

  const ConvergenceTable t1 =
      estimate_pickands_constant(1.0, {10.0, 20.0, 40.0}, 0.025, 100000, 105,
                                 policy);
  const double r40 = t1.rows[2].ratio;
  const bool corridor = r40 > 0.7 && r40 < 1.1;
  c.pass = c.pass && corridor;
  c.evidence.push_back("alpha=1 T=40 ratio=" + num(r40) +
                       (corridor ? " in (0.7,1.1)"
                                 : "  <-- outside (0.7,1.1)"));
  bool floor_ok = true;
  for (const auto& row : t1.rows) floor_ok = floor_ok && row.ratio >= 0.0625;
  for (const auto& row : t2.rows) floor_ok = floor_ok && row.ratio >= 0.0625;
  c.pass = c.pass && floor_ok;
  c.evidence.push_back(std::string("every ratio >= 0.0625: ") +
                       (floor_ok ? "yes" : "no  <-- violated"));
  snaps["criterion4"] = {{"alpha2", convergence_table_json(t2)},
                         {"alpha1", convergence_table_json(t1)}};
  return c;
}

// --- criterion 5: factorization over the unit square -------------------------
Criterion criterion5(const ExecPolicy& policy, json& snaps,
                     double h_square_out[2]) {
  Criterion c{5, true,
              "H([0,1]^2) equals H([0,1])^2 within 4*combined stderr "
              "(alpha in {1,2})",
              {}};
  json snap = json::object();
  std::uint64_t seed = 106;
  int idx = 0;
  for (double alpha : {1.0, 2.0}) {
    const Estimate rect =
        estimate_H_rect(alpha, 1.0, 1.0, 0.01, 200000, seed++, policy);
    const Estimate side =
        estimate_H_interval(alpha, 1.0, 0.01, 200000, seed++, policy);
    const double square = side.mean * side.mean;
    const double comb = std::hypot(rect.std_error,
                                   2.0 * side.mean * side.std_error);
    const bool ok = std::abs(rect.mean - square) <= 4.0 * comb;
    c.pass = c.pass && ok;
    c.evidence.push_back("alpha=" + num(alpha) + ": rect=" + num(rect.mean) +
                         " side^2=" + num(square) + " |gap|=" +
                         num(std::abs(rect.mean - square)) + " budget=" +
                         num(4.0 * comb) + (ok ? "" : "  <-- outside"));
    snap["alpha_" + num(alpha)] = {{"rect", estimate_json(rect)},
                                   {"side", estimate_json(side)}};
    h_square_out[idx++] = rect.mean;
  }
  snaps["criterion5"] = snap;
  return c;
}

// --- criterion 6: exact union bracketing on random finite spaces -------------
Criterion criterion6(json& snaps) {
  Criterion c{6, true,
              "Bonferroni bracketing exact on 1000 random dyadic spaces "
              "(<=16 atoms, <=6 events)",
              {}};
  RngStream rng(115, 9);
  std::uint64_t violations = 0;
  double max_lower_gap = 0.0, max_upper_gap = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const FiniteSpace space = random_dyadic_space(rng);
    const UnionBounds b = brute_force_union(space);
    if (!(b.bonferroni <= b.exact_union && b.exact_union <= b.singles_sum))
      ++violations;
    max_lower_gap = std::max(max_lower_gap, b.exact_union - b.bonferroni);
    max_upper_gap = std::max(max_upper_gap, b.singles_sum - b.exact_union);
  }
  c.pass = violations == 0;
  c.evidence.push_back("violations=" + std::to_string(violations) +
                       " max_lower_gap=" + num(max_lower_gap) +
                       " max_upper_gap=" + num(max_upper_gap));
  snaps["criterion6"] = {{"violations", violations},
                         {"max_lower_gap", max_lower_gap},
                         {"max_upper_gap", max_upper_gap}};
  return c;
}

// --- criterion 7: pathwise bracketing on a shared ensemble --------------------
Criterion criterion7(const ExecPolicy& policy, json& snaps, double& seconds,
                     BoundsReport& u3_report) {
  Criterion c{7, true,
              "pathwise block-union sandwich at alpha=1, p=1, u=3, T=5, "
              "n=1e6 within 10 minutes",
              {}};
  const auto t0 = std::chrono::steady_clock::now();
  u3_report = exceedance_bracketing(CovarianceModel::exp_alpha(1.0), 1.0, 3.0,
                                    5.0, 0.005, 1000000, 1.0, 110, policy);
  seconds = wall_since(t0);
  const BoundsReport& r = u3_report;
  const bool chain = r.lower_union_count <= r.full_count &&
                     r.full_count <= r.upper_union_count;
  c.pass = chain && seconds < 600.0;
  c.evidence.push_back(
      "counts: lower_union=" + std::to_string(r.lower_union_count) +
      " full=" + std::to_string(r.full_count) +
      " upper_union=" + std::to_string(r.upper_union_count) +
      (chain ? "" : "  <-- sandwich violated"));
  c.evidence.push_back("mc=" + num(r.mc.mean) + " bonferroni_lower=" +
                       num(r.bonferroni_lower) + " union_upper=" +
                       num(r.union_upper) + " pickands_value=" +
                       num(r.pickands_value));
  c.evidence.push_back("wall=" + num(seconds) + " s (budget 600)");
  snaps["criterion7"] = bounds_report_json(r);
  return c;
}

// --- criterion 8: ratio stabilization across levels --------------------------
Criterion criterion8(const ExecPolicy& policy, json& snaps,
                     const BoundsReport& u3_report) {
  Criterion c{8, true,
              "theorem ratio mc/(p u^2 Psi(u)) at u=3 vs u=3.5 differs by "
              "<25% and lies in [0.25, 2.0]",
              {}};
  const BoundsReport b =
      exceedance_bracketing(CovarianceModel::exp_alpha(1.0), 1.0, 3.5, 5.0,
                            0.005, 1000000, 1.0, 110, policy);
  auto ratio = [](const BoundsReport& r) {
    return r.mc.mean / (r.p * r.u * r.u * std_normal_tail(r.u));
  };
  const double r1 = ratio(u3_report), r2 = ratio(b);
  const double rel = std::abs(r2 - r1) / r1;
  const bool ok =
      rel < 0.25 && r1 >= 0.25 && r1 <= 2.0 && r2 >= 0.25 && r2 <= 2.0;
  c.pass = ok;
  c.evidence.push_back("ratio(u=3)=" + num(r1) + " ratio(u=3.5)=" + num(r2) +
                       " rel_change=" + num(rel) +
                       (ok ? "" : "  <-- outside corridor"));
  snaps["criterion8"] = {{"ratio_u3", r1},
                         {"ratio_u35", r2},
                         {"rel_change", rel},
                         {"report_u35", bounds_report_json(b)}};
  return c;
}

// --- criterion 9: concentration and comparison suites ------------------------
Criterion criterion9(const ExecPolicy& policy, json& snaps) {
  Criterion c{9, true,
              "sup tails within the concentration bound at 10 levels; "
              "comparison check consistent on the quadrature and 10-point "
              "cases",
              {}};
  const BorellReport borell = borell_check(CovarianceModel::exp_alpha(1.0),
                                           1.0, 0.01, 200000, 111, policy);
  c.pass = c.pass && borell.all_ok;
  c.evidence.push_back(std::string("concentration: all 10 levels ok: ") +
                       (borell.all_ok ? "yes" : "no  <-- exceeded") +
                       " (m_hat=" + num(borell.m_hat) + ")");

  Eigen::MatrixXd cx(2, 2), cy(2, 2);
  cx << 1.0, 0.2, 0.2, 1.0;
  cy << 1.0, 0.8, 0.8, 1.0;
  const SlepianReport quad = slepian_check(cx, cy, Eigen::VectorXd::Zero(2),
                                           1.0, 200000, 112, policy);
  const double ox = bivariate_rect_prob(0.2, 1.0);
  const double oy = bivariate_rect_prob(0.8, 1.0);
  const bool qx = std::abs(quad.p_x.mean - ox) <= 4.0 * quad.p_x.std_error;
  const bool qy = std::abs(quad.p_y.mean - oy) <= 4.0 * quad.p_y.std_error;
  c.pass = c.pass && quad.consistent && qx && qy;
  c.evidence.push_back("2-D case: p_x=" + num(quad.p_x.mean) + " (oracle " +
                       num(ox) + ") p_y=" + num(quad.p_y.mean) + " (oracle " +
                       num(oy) + ") consistent=" +
                       (quad.consistent ? "yes" : "no") +
                       ((qx && qy) ? "" : "  <-- off oracle"));

  const Eigen::Index dim = 10;
  Eigen::MatrixXd ou_x(dim, dim), ou_y(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i)
    for (Eigen::Index j = 0; j < dim; ++j) {
      const double dt = 0.25 * static_cast<double>(i - j);
      ou_x(i, j) = std::exp(-std::abs(dt));
      ou_y(i, j) = std::exp(-std::abs(dt) / 2.0);
    }
  const SlepianReport ou = slepian_check(ou_x, ou_y,
                                         Eigen::VectorXd::Zero(dim), 2.0,
                                         1000000, 113, policy);
  c.pass = c.pass && ou.consistent;
  c.evidence.push_back("10-point case: p_x=" + num(ou.p_x.mean) + " p_y=" +
                       num(ou.p_y.mean) + " consistent=" +
                       (ou.consistent ? "yes" : "no  <-- violated"));
  snaps["criterion9"] = {{"borell", borell_report_json(borell)},
                         {"quad", slepian_report_json(quad)},
                         {"ou", slepian_report_json(ou)}};
  return c;
}

// --- criterion 10: joint-exceedance ceiling -----------------------------------
Criterion criterion10(const ExecPolicy& policy, json& snaps,
                      const double h_square[2]) {
  Criterion c{10, true,
              "joint exceedance / Psi(u) stays under the ceiling constant "
              "(alpha in {1,2}, t0 in {3,5}, u in {4,5})",
              {}};
  json snap = json::array();
  std::uint64_t seed = 120;
  int alpha_idx = 0;
  for (double alpha : {1.0, 2.0}) {
    const double hsq = h_square[alpha_idx++];
    for (double t0 : {3.0, 5.0}) {
      for (double u : {4.0, 5.0}) {
        const double scale = std::pow(u, -2.0 / alpha);
        const Interval a{0.0, scale};
        const Interval b{scale * t0, scale * (t0 + 1.0)};
        const double step = scale / 20.0;
        const Estimate joint =
            mc_joint_exceedance(CovarianceModel::exp_alpha(alpha), a, b, u,
                                step, 1000000, seed++, policy);
        const double psi = std_normal_tail(u);
        const double bound = lemdlak_constant(alpha, t0, 1.0, hsq);
        const double lhs = (joint.mean - 4.0 * joint.std_error) / psi;
        const bool ok = lhs <= bound;
        c.pass = c.pass && ok;
        c.evidence.push_back(
            "alpha=" + num(alpha) + " t0=" + num(t0) + " u=" + num(u) +
            ": joint=" + num(joint.mean) + " ratio_low=" + num(lhs) +
            " ceiling=" + num(bound) + (ok ? "" : "  <-- exceeded"));
        snap.push_back({{"alpha", alpha},
                        {"t0", t0},
                        {"u", u},
                        {"joint", estimate_json(joint)},
                        {"bound", bound}});
      }
    }
  }
  snaps["criterion10"] = snap;
  return c;
}

RunOutput run_all(const ExecPolicy& policy) {
  RunOutput out;
  double h_square[2] = {0.0, 0.0};
  BoundsReport u3_report;
  out.criteria.push_back(criterion1(policy, out.snaps, out.c1_seconds));
  out.criteria.push_back(criterion2(policy, out.snaps));
  out.criteria.push_back(criterion3(out.snaps));
  out.criteria.push_back(criterion4(policy, out.snaps));
  out.criteria.push_back(criterion5(policy, out.snaps, h_square));
  out.criteria.push_back(criterion6(out.snaps));
  out.criteria.push_back(criterion7(policy, out.snaps, out.c7_seconds,
                                    u3_report));
  out.criteria.push_back(criterion8(policy, out.snaps, u3_report));
  out.criteria.push_back(criterion9(policy, out.snaps));
  out.criteria.push_back(criterion10(policy, out.snaps, h_square));
  return out;
}

}  // namespace

int main() {
  std::printf("running all criteria with 2 workers...\n");
  const RunOutput a = run_all(ExecPolicy{2, 16384});
  std::printf("re-running all criteria with 4 workers...\n\n");
  const RunOutput b = run_all(ExecPolicy{4, 16384});

  bool all_pass = true;
  for (const Criterion& c : a.criteria) {
    std::printf("[%s] criterion %d: %s\n", c.pass ? "PASS" : "FAIL", c.id,
                c.headline.c_str());
    for (const std::string& line : c.evidence)
      std::printf("    %s\n", line.c_str());
    all_pass = all_pass && c.pass;
  }

  // criterion 11: bit-identical numeric outputs across worker counts, and
  // the same verdicts on every criterion.
  bool verdicts_match = a.criteria.size() == b.criteria.size();
  for (std::size_t i = 0; verdicts_match && i < a.criteria.size(); ++i)
    verdicts_match = a.criteria[i].pass == b.criteria[i].pass;
  const bool identical = a.snaps.dump() == b.snaps.dump() && verdicts_match;
  std::printf("[%s] criterion 11: identical outputs with 2 and 4 workers\n",
              identical ? "PASS" : "FAIL");
  std::printf("    snapshot bytes: %zu vs %zu; verdicts %s\n",
              a.snaps.dump().size(), b.snaps.dump().size(),
              verdicts_match ? "match" : "differ");
  all_pass = all_pass && identical;

  std::printf("\n%d of 11 criteria passed\n",
              static_cast<int>(identical) +
                  static_cast<int>(std::count_if(
                      a.criteria.begin(), a.criteria.end(),
                      [](const Criterion& c) { return c.pass; })));
  return all_pass ? 0 : 1;
}
