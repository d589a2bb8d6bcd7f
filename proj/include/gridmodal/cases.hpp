#pragma once

#include <string>
#include <vector>

#include "gridmodal/types.hpp"

namespace gridmodal {

/// Directory holding the bundled cases; GRIDMODAL_CASES overrides the
/// compiled-in source location.
std::string bundled_case_dir();

/// Resolve "smib" or "smib.case" to a bundled path; pass through anything
/// that already names an existing file.
std::string resolve_case_path(const std::string& name_or_path);

std::vector<std::string> bundled_case_names();

struct CaseStats {
  std::string name;
  int buses = 0;
  int branches = 0;
  int units = 0;
  std::vector<double> unit_mva;   // ratings in case order
  double total_load_mw = 0.0;
  int long_lines = 0;   // branches carried as exact PI sections
};

CaseStats case_statistics(const std::string& name, const PowerSystemCase& sys);

}  // namespace gridmodal
