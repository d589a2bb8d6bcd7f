#pragma once

#include <string>
#include <vector>

#include "gridmodal/power_flow.hpp"
#include "gridmodal/small_signal.hpp"
#include "gridmodal/time_domain.hpp"

namespace gridmodal {

void write_pf_csv(const std::string& path, const PowerSystemCase& sys,
                  const PowerFlowSolution& sol);

void write_modal_csv(const std::string& path, const ModalResult& modal);

void write_timeseries_csv(const std::string& path, const TimeSeries& ts);

/// Eigenvalue map: unstable half-plane shaded, imaginary axis drawn, the five
/// least-damped oscillatory modes labelled.
void write_eigen_map_svg(const std::string& path, const ModalResult& modal);

/// One line plot per quantity, units overlaid.
void write_timeseries_svg(const std::string& path, const TimeSeries& ts,
                          const std::string& quantity);

struct RunManifest {
  std::string tool_version;
  std::string command;
  std::string case_path;
  std::string case_hash;
  std::string options;
  std::string output_dir;
};

void write_manifest(const std::string& path, const RunManifest& m);

/// FNV-1a 64-bit over the raw file bytes, lowercase hex.
std::string file_hash(const std::string& path);

}  // namespace gridmodal
