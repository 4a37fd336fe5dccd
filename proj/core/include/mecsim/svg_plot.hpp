#pragma once

#include <string>
#include <vector>

namespace mecsim {

// Renders one SVG line chart per metric column (total_time_pct,
// mmtc_energy_pct, urllc_time_pct) from metrics CSV text, one series per
// policy, and writes them into out_dir. Rows are sorted by (policy,
// sweep_value) first, so any row order produces identical files. Returns the
// written paths.
std::vector<std::string> render_plots(const std::string& csv_text, const std::string& out_dir);

}  // namespace mecsim
