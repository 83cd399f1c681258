#include "pickands/report.hpp"

#include <cstdio>

namespace pickands {

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

nlohmann::json estimate_json(const Estimate& e) {
  return {{"mean", e.mean},
          {"stderr", e.std_error},
          {"n_samples", e.n_samples},
          {"grid_step", e.grid_step}};
}

nlohmann::json estimate_flags_json(const Estimate& e) {
  return {{"unreliable", e.unreliable}, {"coarse_grid", e.coarse_grid}};
}

nlohmann::json bounds_report_json(const BoundsReport& r) {
  return {{"p", r.p},
          {"u", r.u},
          {"alpha", r.alpha},
          {"T", r.block_scale},
          {"step", r.step},
          {"n", r.n},
          {"seed", r.seed},
          {"mc", estimate_json(r.mc)},
          {"bonferroni_lower", r.bonferroni_lower},
          {"union_upper", r.union_upper},
          {"pickands_value", r.pickands_value},
          {"flags",
           {{"unreliable", r.mc.unreliable},
            {"coarse_grid", r.mc.coarse_grid},
            {"degenerate_partition", r.partition.degenerate}}}};
}

nlohmann::json convergence_table_json(const ConvergenceTable& t) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : t.rows)
    rows.push_back({{"T", row.horizon},
                    {"mean", row.mean},
                    {"stderr", row.std_error},
                    {"ratio", row.ratio}});
  return {{"rows", rows}, {"h_alpha", t.h_alpha}, {"grid_step", t.grid_step}};
}

nlohmann::json borell_report_json(const BorellReport& r) {
  nlohmann::json levels = nlohmann::json::array();
  for (const auto& lvl : r.levels)
    levels.push_back({{"w", lvl.w},
                      {"tail", lvl.tail},
                      {"stderr", lvl.std_error},
                      {"bound", lvl.bound},
                      {"ok", lvl.ok}});
  return {{"m_hat", r.m_hat}, {"levels", levels}, {"all_ok", r.all_ok}};
}

nlohmann::json slepian_report_json(const SlepianReport& r) {
  return {{"p_x", estimate_json(r.p_x)},
          {"p_y", estimate_json(r.p_y)},
          {"consistent", r.consistent}};
}

nlohmann::json path_json(const Path& p) {
  nlohmann::json t = nlohmann::json::array();
  nlohmann::json v = nlohmann::json::array();
  for (std::size_t i = 0; i < p.grid.count; ++i) {
    t.push_back(p.grid.point(i));
    v.push_back(p.values[i]);
  }
  return {{"t", t}, {"values", v}};
}

std::string path_csv(const Path& p) {
  std::string out;
  for (std::size_t i = 0; i < p.grid.count; ++i) {
    out += fmt_double(p.grid.point(i));
    out += ',';
    out += fmt_double(p.values[i]);
    out += '\n';
  }
  return out;
}

std::string estimate_csv(const Estimate& e) {
  std::string out = "mean,stderr,n_samples,grid_step\n";
  out += fmt_double(e.mean);
  out += ',';
  out += fmt_double(e.std_error);
  out += ',';
  out += std::to_string(e.n_samples);
  out += ',';
  out += fmt_double(e.grid_step);
  out += '\n';
  return out;
}

std::string convergence_table_csv(const ConvergenceTable& t) {
  std::string out = "T,mean,stderr,ratio\n";
  for (const auto& row : t.rows) {
    out += fmt_double(row.horizon);
    out += ',';
    out += fmt_double(row.mean);
    out += ',';
    out += fmt_double(row.std_error);
    out += ',';
    out += fmt_double(row.ratio);
    out += '\n';
  }
  return out;
}

}  // namespace pickands
