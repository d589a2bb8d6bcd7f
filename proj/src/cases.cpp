#include "gridmodal/cases.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>

#include "gridmodal/errors.hpp"

#ifndef GRIDMODAL_CASE_DIR
#define GRIDMODAL_CASE_DIR ""
#endif

namespace gridmodal {

std::string bundled_case_dir() {
  if (const char* env = std::getenv("GRIDMODAL_CASES"); env && *env) return env;
  return GRIDMODAL_CASE_DIR;
}

std::string resolve_case_path(const std::string& name_or_path) {
  namespace fs = std::filesystem;
  if (fs::exists(name_or_path) && fs::is_regular_file(name_or_path)) return name_or_path;
  const fs::path dir = bundled_case_dir();
  for (const std::string cand :
       {name_or_path, name_or_path + ".case"}) {
    const fs::path p = dir / cand;
    if (fs::exists(p) && fs::is_regular_file(p)) return p.string();
  }
  throw GridError("CaseNotFound: name=" + name_or_path);
}

std::vector<std::string> bundled_case_names() {
  namespace fs = std::filesystem;
  std::vector<std::string> names;
  const fs::path dir = bundled_case_dir();
  if (!fs::exists(dir)) return names;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".case")
      names.push_back(entry.path().stem().string());
  }
  std::sort(names.begin(), names.end());
  return names;
}

CaseStats case_statistics(const std::string& name, const PowerSystemCase& sys) {
  CaseStats st;
  st.name = name;
  st.buses = static_cast<int>(sys.buses.size());
  st.branches = static_cast<int>(sys.branches.size());
  st.units = static_cast<int>(sys.units.size());
  for (const auto& un : sys.units) st.unit_mva.push_back(un.mva_base);
  for (const auto& ld : sys.loads) st.total_load_mw += ld.p0;
  for (const auto& br : sys.branches)
    if (br.model == LineModel::DistributedExactPi) st.long_lines++;
  return st;
}

}  // namespace gridmodal
