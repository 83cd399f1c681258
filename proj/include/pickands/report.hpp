#pragma once

#include <string>

#include "json.hpp"

#include "pickands/doublesum.hpp"
#include "pickands/estimate.hpp"
#include "pickands/process.hpp"
#include "pickands/types.hpp"

namespace pickands {

// Round-trip decimal image of a double (%.17g), for CSV cells.
std::string fmt_double(double v);

// --- JSON ---------------------------------------------------------------
// nlohmann::json with default (sorted-key) object ordering: serialization is
// a pure function of the value, so equal reports dump to equal bytes.

nlohmann::json estimate_json(const Estimate& e);
nlohmann::json estimate_flags_json(const Estimate& e);
nlohmann::json bounds_report_json(const BoundsReport& r);
nlohmann::json convergence_table_json(const ConvergenceTable& t);
nlohmann::json borell_report_json(const BorellReport& r);
nlohmann::json slepian_report_json(const SlepianReport& r);
nlohmann::json path_json(const Path& p);

// --- CSV ----------------------------------------------------------------

// "t,value" rows, no header (one line per grid point).
std::string path_csv(const Path& p);

// Header "mean,stderr,n_samples,grid_step" plus one row.
std::string estimate_csv(const Estimate& e);

// Header "T,mean,stderr,ratio" plus one row per horizon.
std::string convergence_table_csv(const ConvergenceTable& t);

}  // namespace pickands
