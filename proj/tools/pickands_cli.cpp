// Command-line front end: seeded reproducible runs of the estimators and
// bound checks, CSV/JSON emission on stdout, and an append-only NDJSON run
// ledger. Exit codes: 0 ok, 2 invalid configuration, 3 numerical failure,
// 4 reliability flag raised under --strict.

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <numbers>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "pickands/doublesum.hpp"
#include "pickands/estimate.hpp"
#include "pickands/gauss.hpp"
#include "pickands/process.hpp"
#include "pickands/report.hpp"
#include "pickands/rng.hpp"
#include "pickands/types.hpp"

namespace {

using nlohmann::json;
using namespace pickands;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitUnreliable = 4;

std::string iso_timestamp() {
  const std::time_t now =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

struct RunResult {
  std::string stdout_text;  // exact bytes for stdout (replay-stable)
  json outputs;             // JSON form for the ledger
  bool unreliable = false;  // any reliability flag raised
};

struct CommonOpts {
  std::string format = "csv";
  unsigned workers = 1;
  bool strict = false;
  std::string ledger = "pickands-runs.jsonl";
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--format", opts.format, "Output format")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  cmd->add_option("--workers", opts.workers, "Worker threads")
      ->check(CLI::Range(1u, 64u))
      ->capture_default_str();
  cmd->add_flag("--strict", opts.strict,
                "Exit 4 when a reliability flag is raised");
  cmd->add_option("--ledger", opts.ledger,
                  "Run ledger path (PICKANDS_LEDGER overrides)")
      ->capture_default_str();
}

std::string ledger_path(const CommonOpts& opts) {
  if (const char* env = std::getenv("PICKANDS_LEDGER"); env && *env)
    return env;
  return opts.ledger;
}

void append_ledger(const std::string& path, const std::string& command,
                   const json& config, const json& outputs, double wall_ms) {
  json record{{"schema", 1},
              {"timestamp", iso_timestamp()},
              {"version", PICKANDS_VERSION},
              {"command", command},
              {"config", config},
              {"outputs", outputs},
              {"wall_ms", wall_ms}};
  std::ofstream out(path, std::ios::app);
  if (!out) {
    std::cerr << "warning: cannot append run ledger at " << path << "\n";
    return;
  }
  out << record.dump() << "\n";
}

std::string json_text(const json& j) { return j.dump(2) + "\n"; }

// Default H_alpha for the theorem value when the caller does not supply one;
// only the two analytically known cases have a default.
double default_h_alpha(double alpha) {
  if (alpha == 1.0) return 1.0;
  if (alpha == 2.0) return std::numbers::inv_sqrtpi;
  throw std::invalid_argument(
      "--h is required for alpha outside {1, 2} (no exact constant known)");
}

double default_step(double u, double alpha) {
  return std::pow(u, -2.0 / alpha) / 20.0;
}

// ---------------------------------------------------------------------------

RunResult run_simulate(const std::string& model, double alpha, double p,
                       double step, std::uint64_t seed,
                       const std::string& format) {
  const Grid grid = Grid::over(p, step);
  RngStream rng(seed, 0);
  Path path;
  if (model == "exp")
    path = stationary_sample(CovarianceModel::exp_alpha(alpha), grid, rng);
  else if (model == "fbm")
    path = fbm_sample(alpha, grid, rng);
  else
    path = pickands_process_sample(alpha, grid, rng);

  RunResult r;
  r.outputs = {{"schema", 1}, {"command", "simulate"}, {"path", path_json(path)}};
  r.stdout_text = format == "json" ? json_text(r.outputs) : path_csv(path);
  return r;
}

RunResult run_estimate_h(double alpha, double horizon, double step,
                         std::uint64_t n, std::uint64_t seed,
                         const ExecPolicy& policy, const std::string& format) {
  const Estimate e = estimate_H_interval(alpha, horizon, step, n, seed, policy);
  RunResult r;
  r.outputs = {{"schema", 1},
               {"command", "estimate-h"},
               {"estimate", estimate_json(e)},
               {"flags", estimate_flags_json(e)}};
  r.stdout_text = format == "json" ? json_text(r.outputs) : estimate_csv(e);
  r.unreliable = e.unreliable;
  return r;
}

RunResult run_estimate_h_rect(double alpha, double side_a, double side_b,
                              double step, std::uint64_t n, std::uint64_t seed,
                              const ExecPolicy& policy,
                              const std::string& format) {
  const Estimate e =
      estimate_H_rect(alpha, side_a, side_b, step, n, seed, policy);
  RunResult r;
  r.outputs = {{"schema", 1},
               {"command", "estimate-h-rect"},
               {"estimate", estimate_json(e)},
               {"flags", estimate_flags_json(e)}};
  r.stdout_text = format == "json" ? json_text(r.outputs) : estimate_csv(e);
  r.unreliable = e.unreliable;
  return r;
}

RunResult run_pickands_constant(double alpha, std::vector<double> horizons,
                                double step, std::uint64_t n,
                                std::uint64_t seed, const ExecPolicy& policy,
                                const std::string& format) {
  const ConvergenceTable table =
      estimate_pickands_constant(alpha, horizons, step, n, seed, policy);
  RunResult r;
  r.outputs = {{"schema", 1},
               {"command", "pickands-constant"},
               {"table", convergence_table_json(table)}};
  r.stdout_text =
      format == "json" ? json_text(r.outputs) : convergence_table_csv(table);
  return r;
}

RunResult run_lower_bound(double alpha, const std::string& format) {
  const double v = pickands_lower_bound(alpha);
  RunResult r;
  r.outputs = {{"schema", 1}, {"command", "lower-bound"}, {"value", v}};
  r.stdout_text = format == "json" ? json_text(r.outputs) : fmt_double(v) + "\n";
  return r;
}

RunResult run_verify_asymptotic(double alpha, double p, double u, double u2,
                                double block_scale, double step,
                                std::uint64_t n, double h_alpha,
                                std::uint64_t seed, const ExecPolicy& policy,
                                const std::string& format) {
  const CovarianceModel model = CovarianceModel::exp_alpha(alpha);
  const BoundsReport low =
      exceedance_bracketing(model, p, u, block_scale, step, n, h_alpha, seed,
                            policy);
  const BoundsReport high =
      exceedance_bracketing(model, p, u2, block_scale, step, n, h_alpha, seed,
                            policy);
  auto theorem_ratio = [&](const BoundsReport& b) {
    return b.mc.mean / (b.p * std::pow(b.u, 2.0 / alpha) * std_normal_tail(b.u));
  };
  const double r1 = theorem_ratio(low);
  const double r2 = theorem_ratio(high);
  const double rel_change = r1 != 0.0 ? std::abs(r2 - r1) / std::abs(r1) : 0.0;

  RunResult r;
  r.outputs = {{"schema", 1},
               {"command", "verify-asymptotic"},
               {"reports", {bounds_report_json(low), bounds_report_json(high)}},
               {"ratio_low", r1},
               {"ratio_high", r2},
               {"rel_change", rel_change}};
  if (format == "json") {
    r.stdout_text = json_text(r.outputs);
  } else {
    std::string csv =
        "u,mc_mean,mc_stderr,bonferroni_lower,union_upper,pickands_value,"
        "ratio\n";
    for (const BoundsReport* b : {&low, &high}) {
      csv += fmt_double(b->u) + "," + fmt_double(b->mc.mean) + "," +
             fmt_double(b->mc.std_error) + "," +
             fmt_double(b->bonferroni_lower) + "," +
             fmt_double(b->union_upper) + "," + fmt_double(b->pickands_value) +
             "," + fmt_double(theorem_ratio(*b)) + "\n";
    }
    r.stdout_text = csv;
  }
  r.unreliable = low.mc.unreliable || high.mc.unreliable;
  return r;
}

RunResult run_joint_bound(double alpha, double u, double t0,
                          double block_scale, double step, std::uint64_t n,
                          double h_square, std::uint64_t seed,
                          const ExecPolicy& policy, const std::string& format) {
  const double scale = std::pow(u, -2.0 / alpha);
  const Interval a{0.0, scale * block_scale};
  const Interval b{scale * t0, scale * (t0 + block_scale)};
  const Estimate joint =
      mc_joint_exceedance(CovarianceModel::exp_alpha(alpha), a, b, u, step, n,
                          seed, policy);
  const double psi = std_normal_tail(u);
  const double ratio = joint.mean / psi;
  const double bound = lemdlak_constant(alpha, t0, block_scale, h_square);
  const bool holds = (joint.mean - 4.0 * joint.std_error) / psi <= bound;

  RunResult r;
  r.outputs = {{"schema", 1},
               {"command", "joint-bound"},
               {"joint", estimate_json(joint)},
               {"flags", estimate_flags_json(joint)},
               {"psi", psi},
               {"ratio_over_psi", ratio},
               {"lemdlak", bound},
               {"holds", holds}};
  if (format == "json") {
    r.stdout_text = json_text(r.outputs);
  } else {
    r.stdout_text =
        "joint_mean,joint_stderr,psi,ratio_over_psi,lemdlak,holds\n" +
        fmt_double(joint.mean) + "," + fmt_double(joint.std_error) + "," +
        fmt_double(psi) + "," + fmt_double(ratio) + "," + fmt_double(bound) +
        "," + (holds ? std::string("1") : std::string("0")) + "\n";
  }
  r.unreliable = joint.unreliable;
  return r;
}

RunResult run_check_inequalities(double alpha, double horizon, double step,
                                 double u, std::uint64_t n, std::uint64_t seed,
                                 const ExecPolicy& policy,
                                 const std::string& format) {
  const CovarianceModel model = CovarianceModel::exp_alpha(alpha);
  const BorellReport borell =
      borell_check(model, horizon, step, n, seed, policy);

  // Canned comparison pair: 10-point grids of two exponential-decay
  // covariances, the slower decay dominating entrywise.
  const Eigen::Index dim = 10;
  Eigen::MatrixXd cov_x(dim, dim), cov_y(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i)
    for (Eigen::Index j = 0; j < dim; ++j) {
      const double dt = 0.25 * static_cast<double>(i - j);
      cov_x(i, j) = std::exp(-std::abs(dt));
      cov_y(i, j) = std::exp(-std::abs(dt) / 2.0);
    }
  const SlepianReport slepian = slepian_check(
      cov_x, cov_y, Eigen::VectorXd::Zero(dim), u, n, seed, policy);

  const bool all_ok = borell.all_ok && slepian.consistent;
  RunResult r;
  r.outputs = {{"schema", 1},
               {"command", "check-inequalities"},
               {"borell", borell_report_json(borell)},
               {"slepian", slepian_report_json(slepian)},
               {"all_ok", all_ok}};
  if (format == "json") {
    r.stdout_text = json_text(r.outputs);
  } else {
    std::string csv = "section,a,b,c,d,e\n";
    for (const auto& lvl : borell.levels)
      csv += "borell," + fmt_double(lvl.w) + "," + fmt_double(lvl.tail) + "," +
             fmt_double(lvl.std_error) + "," + fmt_double(lvl.bound) + "," +
             (lvl.ok ? "1" : "0") + std::string("\n");
    csv += "slepian," + fmt_double(slepian.p_x.mean) + "," +
           fmt_double(slepian.p_x.std_error) + "," +
           fmt_double(slepian.p_y.mean) + "," +
           fmt_double(slepian.p_y.std_error) + "," +
           (slepian.consistent ? "1" : "0") + std::string("\n");
    r.stdout_text = csv;
  }
  return r;
}

RunResult run_bonferroni_oracle(std::uint64_t count, std::uint64_t seed,
                                const std::string& format) {
  RngStream rng(seed, 9);
  std::uint64_t violations = 0;
  double max_lower_gap = 0.0, max_upper_gap = 0.0;
  for (std::uint64_t i = 0; i < count; ++i) {
    const FiniteSpace space = random_dyadic_space(rng);
    const UnionBounds b = brute_force_union(space);
    if (!(b.bonferroni <= b.exact_union && b.exact_union <= b.singles_sum))
      ++violations;
    max_lower_gap = std::max(max_lower_gap, b.exact_union - b.bonferroni);
    max_upper_gap = std::max(max_upper_gap, b.singles_sum - b.exact_union);
  }
  RunResult r;
  r.outputs = {{"schema", 1},
               {"command", "bonferroni-oracle"},
               {"count", count},
               {"violations", violations},
               {"max_lower_gap", max_lower_gap},
               {"max_upper_gap", max_upper_gap}};
  r.stdout_text = format == "json"
                      ? json_text(r.outputs)
                      : "count,violations\n" + std::to_string(count) + "," +
                            std::to_string(violations) + "\n";
  if (violations > 0)
    throw numerical_error("exact union bracketing violated on " +
                          std::to_string(violations) + " spaces");
  return r;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical laboratory for Gaussian supremum asymptotics"};
  app.require_subcommand(1);

  // Shared option storage (one subcommand runs per invocation).
  CommonOpts common;
  double alpha = 1.0, p = 1.0, horizon = 1.0, step = 0.0, u = 3.0, u2 = 0.0;
  double side_a = 1.0, side_b = 1.0, block_scale = 5.0, t0 = 3.0;
  double h_alpha = 0.0, h_square = 0.0;
  std::uint64_t n = 100000, seed = 0, count = 1000;
  std::vector<double> horizons;
  std::string model = "exp";

  auto positive = CLI::PositiveNumber;
  auto alpha_range = CLI::Range(1e-9, 2.0);

  CLI::App* simulate = app.add_subcommand("simulate", "Sample one path");
  simulate->add_option("--model", model, "exp | fbm | pickands")
      ->check(CLI::IsMember({"exp", "fbm", "pickands"}))
      ->capture_default_str();
  simulate->add_option("--alpha", alpha)->required()->check(alpha_range);
  simulate->add_option("--p", p, "Horizon")->required()
      ->check(CLI::NonNegativeNumber);
  simulate->add_option("--step", step)->required()->check(positive);
  simulate->add_option("--seed", seed)->required();
  add_common(simulate, common);

  CLI::App* est_h = app.add_subcommand(
      "estimate-h", "Monte Carlo E exp(sup (B(t) - t^alpha)) on [0, T]");
  est_h->add_option("--alpha", alpha)->required()->check(alpha_range);
  est_h->add_option("--T", horizon)->required()->check(CLI::NonNegativeNumber);
  est_h->add_option("--step", step)->required()->check(positive);
  est_h->add_option("--n", n)->required()->check(CLI::Range(std::uint64_t{2},
                                                 std::uint64_t{1} << 40));
  est_h->add_option("--seed", seed)->required();
  add_common(est_h, common);

  CLI::App* est_rect = app.add_subcommand(
      "estimate-h-rect", "Same estimator on the rectangle [0,a] x [0,b]");
  est_rect->add_option("--alpha", alpha)->required()->check(alpha_range);
  est_rect->add_option("--a", side_a)->required()
      ->check(CLI::NonNegativeNumber);
  est_rect->add_option("--b", side_b)->required()
      ->check(CLI::NonNegativeNumber);
  est_rect->add_option("--step", step)->required()->check(positive);
  est_rect->add_option("--n", n)->required()->check(CLI::Range(
      std::uint64_t{2}, std::uint64_t{1} << 40));
  est_rect->add_option("--seed", seed)->required();
  add_common(est_rect, common);

  CLI::App* constant = app.add_subcommand(
      "pickands-constant", "H(T)/T convergence table over a horizon list");
  constant->add_option("--alpha", alpha)->required()->check(alpha_range);
  constant->add_option("--T-list", horizons, "Horizons (repeat or comma-sep)")
      ->required()
      ->delimiter(',');
  constant->add_option("--step", step)->required()->check(positive);
  constant->add_option("--n", n)->required()->check(CLI::Range(
      std::uint64_t{2}, std::uint64_t{1} << 40));
  constant->add_option("--seed", seed)->required();
  add_common(constant, common);

  CLI::App* lower = app.add_subcommand(
      "lower-bound", "Closed-form positive lower bound for the constant");
  lower->add_option("--alpha", alpha)->required()->check(alpha_range);
  add_common(lower, common);

  CLI::App* verify = app.add_subcommand(
      "verify-asymptotic",
      "Bracket P(sup > u) at two levels and report theorem ratios");
  // This subcommand owns a --h option, so its help flag must be long-only.
  verify->set_help_flag("--help", "Print this help message and exit");
  verify->add_option("--alpha", alpha)->required()->check(alpha_range);
  verify->add_option("--p", p)->required()->check(positive);
  verify->add_option("--u", u)->required()->check(positive);
  verify->add_option("--u2", u2, "Second level (default u + 0.5)");
  verify->add_option("--T", block_scale, "Block scale")
      ->check(positive)
      ->capture_default_str();
  verify->add_option("--step", step, "Grid step (default u^(-2/alpha)/20)");
  verify->add_option("--n", n)->required()->check(CLI::Range(
      std::uint64_t{2}, std::uint64_t{1} << 40));
  verify->add_option("--h", h_alpha,
                     "Constant H_alpha (defaults only for alpha in {1,2})");
  verify->add_option("--seed", seed)->required();
  add_common(verify, common);

  CLI::App* joint = app.add_subcommand(
      "joint-bound", "Joint block exceedance against its analytic ceiling");
  joint->add_option("--alpha", alpha)->required()->check(alpha_range);
  joint->add_option("--u", u)->required()->check(positive);
  joint->add_option("--t0", t0, "Block offset (scaled time)")
      ->required()
      ->check(positive);
  joint->add_option("--T", block_scale, "Block scale")
      ->check(positive)
      ->capture_default_str();
  joint->add_option("--step", step, "Grid step (default u^(-2/alpha)/20)");
  joint->add_option("--n", n)->required()->check(CLI::Range(
      std::uint64_t{2}, std::uint64_t{1} << 40));
  joint->add_option("--h-square", h_square, "Unit-square constant estimate")
      ->required()
      ->check(positive);
  joint->add_option("--seed", seed)->required();
  add_common(joint, common);

  CLI::App* check = app.add_subcommand(
      "check-inequalities", "Concentration and comparison inequality suite");
  check->add_option("--alpha", alpha)->required()->check(alpha_range);
  check->add_option("--T", horizon, "Horizon")
      ->check(positive)
      ->capture_default_str();
  check->add_option("--step", step)->check(positive);
  check->add_option("--u", u, "Comparison level")->capture_default_str();
  check->add_option("--n", n)->required()->check(CLI::Range(
      std::uint64_t{2}, std::uint64_t{1} << 40));
  check->add_option("--seed", seed)->required();
  add_common(check, common);

  CLI::App* oracle = app.add_subcommand(
      "bonferroni-oracle", "Exact union bracketing on random finite spaces");
  oracle->add_option("--count", count)->check(positive)->capture_default_str();
  oracle->add_option("--seed", seed)->required();
  add_common(oracle, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    app.exit(e);
    return kExitConfig;
  }

  const ExecPolicy policy{common.workers, 16384};
  const auto t0_clock = std::chrono::steady_clock::now();

  try {
    RunResult result;
    json config;
    std::string command;

    if (simulate->parsed()) {
      command = "simulate";
      config = {{"model", model}, {"alpha", alpha},        {"p", p},
                {"step", step},   {"seed", seed},          {"format", common.format},
                {"workers", common.workers}};
      result = run_simulate(model, alpha, p, step, seed, common.format);
    } else if (est_h->parsed()) {
      command = "estimate-h";
      config = {{"alpha", alpha}, {"T", horizon}, {"step", step},
                {"n", n},         {"seed", seed}, {"format", common.format},
                {"workers", common.workers}};
      result = run_estimate_h(alpha, horizon, step, n, seed, policy,
                              common.format);
    } else if (est_rect->parsed()) {
      command = "estimate-h-rect";
      config = {{"alpha", alpha}, {"a", side_a},  {"b", side_b},
                {"step", step},   {"n", n},       {"seed", seed},
                {"format", common.format}, {"workers", common.workers}};
      result = run_estimate_h_rect(alpha, side_a, side_b, step, n, seed,
                                   policy, common.format);
    } else if (constant->parsed()) {
      command = "pickands-constant";
      config = {{"alpha", alpha}, {"T_list", horizons}, {"step", step},
                {"n", n},         {"seed", seed},       {"format", common.format},
                {"workers", common.workers}};
      result = run_pickands_constant(alpha, horizons, step, n, seed, policy,
                                     common.format);
    } else if (lower->parsed()) {
      command = "lower-bound";
      config = {{"alpha", alpha}, {"format", common.format}};
      result = run_lower_bound(alpha, common.format);
    } else if (verify->parsed()) {
      command = "verify-asymptotic";
      if (u2 == 0.0) u2 = u + 0.5;
      if (step == 0.0) step = default_step(u, alpha);
      if (h_alpha == 0.0) h_alpha = default_h_alpha(alpha);
      config = {{"alpha", alpha}, {"p", p},       {"u", u},
                {"u2", u2},       {"T", block_scale}, {"step", step},
                {"n", n},         {"h", h_alpha}, {"seed", seed},
                {"format", common.format}, {"workers", common.workers}};
      result = run_verify_asymptotic(alpha, p, u, u2, block_scale, step, n,
                                     h_alpha, seed, policy, common.format);
    } else if (joint->parsed()) {
      command = "joint-bound";
      if (step == 0.0) step = default_step(u, alpha);
      config = {{"alpha", alpha},  {"u", u},       {"t0", t0},
                {"T", block_scale}, {"step", step}, {"n", n},
                {"h_square", h_square}, {"seed", seed},
                {"format", common.format}, {"workers", common.workers}};
      result = run_joint_bound(alpha, u, t0, block_scale, step, n, h_square,
                               seed, policy, common.format);
    } else if (check->parsed()) {
      command = "check-inequalities";
      if (step == 0.0) step = 0.01;
      config = {{"alpha", alpha}, {"T", horizon}, {"step", step},
                {"u", u},         {"n", n},       {"seed", seed},
                {"format", common.format}, {"workers", common.workers}};
      result = run_check_inequalities(alpha, horizon, step, u, n, seed,
                                      policy, common.format);
    } else {
      command = "bonferroni-oracle";
      config = {{"count", count}, {"seed", seed}, {"format", common.format}};
      result = run_bonferroni_oracle(count, seed, common.format);
    }

    const double wall_ms =
        std::chrono::duration<double, std::milli>(
            std::chrono::steady_clock::now() - t0_clock)
            .count();
    std::cout << result.stdout_text;
    append_ledger(ledger_path(common), command, config, result.outputs,
                  wall_ms);
    if (result.unreliable && common.strict) {
      std::cerr << "reliability flag raised (fewer than 10 observed hits)\n";
      return kExitUnreliable;
    }
    return kExitOk;
  } catch (const numerical_error& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid configuration: " << e.what() << "\n";
    return kExitConfig;
  }
}
