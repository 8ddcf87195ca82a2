// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "qplan/simulate.hpp"

namespace qplan {

//! Deterministic number formatting shared by every report writer: integers
//! print without a decimal point, everything else as %.6g.
std::string format_number(double v);

//! Compact single-token operator label, safe inside CSV cells.
std::string op_label(const OpKey& key);

//! Writes load_<strategy>.csv (per-window stream-processor load),
//! alloc_<strategy>.csv (per-operator allocation vs demand) and
//! cov_<strategy>.csv (demand variability over the evaluation windows) into
//! `dir`; optionally a load_<strategy>.svg chart. Output is byte-stable for
//! identical runs.
void emit_report(const SimulationRun& run, const std::string& dir, bool svg = false);

//! Merges several runs into loads.csv and summary.csv (plus compare.svg when
//! requested) for side-by-side comparison.
void compare_runs(const std::vector<SimulationRun>& runs, const std::string& dir,
                  bool svg = false);

}  // namespace qplan
