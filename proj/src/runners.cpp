#include "gridmodal/runners.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "gridmodal/case_parser.hpp"
#include "gridmodal/cases.hpp"
#include "gridmodal/dynamic_system.hpp"
#include "gridmodal/errors.hpp"
#include "gridmodal/power_flow.hpp"
#include "gridmodal/reports.hpp"
#include "gridmodal/small_signal.hpp"
#include "gridmodal/time_domain.hpp"

namespace gridmodal {

namespace {

constexpr const char* kToolVersion = "gridmodal 1.0.0";

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

int classify_error(const GridError& e) {
  if (dynamic_cast<const Diverged*>(&e) || dynamic_cast<const SingularJacobian*>(&e))
    return kExitPfDiverged;
  if (dynamic_cast<const NewtonFailure*>(&e) || dynamic_cast<const StepUnderflow*>(&e))
    return kExitSimFailure;
  if (dynamic_cast<const NoConvergence*>(&e) || dynamic_cast<const DefectiveMode*>(&e) ||
      dynamic_cast<const SingularAlgebraicJacobian*>(&e) ||
      dynamic_cast<const NotAtEquilibrium*>(&e) || dynamic_cast<const ZeroEigenvalue*>(&e))
    return kExitEigenFailure;
  return kExitInputError;
}

std::string prepare_out_dir(const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  return out_dir;
}

std::string join_path(const std::string& dir, const std::string& file) {
  return (std::filesystem::path(dir) / file).string();
}

}  // namespace

int run_pf(const std::string& case_ref, const PfRunOptions& opt, const std::string& out_dir) {
  try {
    const std::string path = resolve_case_path(case_ref);
    const PowerSystemCase sys = parse_case_file(path);
    PfOptions po;
    po.tolerance = opt.tolerance;
    po.max_iter = opt.max_iter;
    const PowerFlowSolution sol = solve_power_flow(sys, po);

    prepare_out_dir(out_dir);
    write_pf_csv(join_path(out_dir, "pf.csv"), sys, sol);
    RunManifest m;
    m.tool_version = kToolVersion;
    m.command = "pf " + case_ref;
    m.case_path = path;
    m.case_hash = file_hash(path);
    m.options = "tolerance=" + num(opt.tolerance) + " max_iter=" + std::to_string(opt.max_iter);
    m.output_dir = out_dir;
    write_manifest(join_path(out_dir, "manifest.json"), m);

    double v_lo = 1e9, v_hi = -1e9;
    for (int i = 0; i < sol.v_mag.size(); ++i) {
      v_lo = std::min(v_lo, sol.v_mag[i]);
      v_hi = std::max(v_hi, sol.v_mag[i]);
    }
    std::cout << "pf " << case_ref << ": converged iterations=" << sol.iterations
              << " max_mismatch=" << num(sol.max_mismatch) << " v_range=[" << num(v_lo)
              << "," << num(v_hi) << "]\n";
    return kExitOk;
  } catch (const GridError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return classify_error(e);
  }
}

int run_modal(const std::string& case_ref, const ModalRunOptions& opt,
              const std::string& out_dir) {
  try {
    const std::string path = resolve_case_path(case_ref);
    const PowerSystemCase sys = parse_case_file(path);
    const PowerFlowSolution sol = solve_power_flow(sys);
    AssembleOptions ao;
    ao.enable_pss = opt.pss;
    const DynamicSystem dyn = assemble(sys, sol, ao);
    const StateMatrix sm = linearize(dyn, opt.h_rel);
    const ModalResult modal = eigen_analysis(sm);

    prepare_out_dir(out_dir);
    write_modal_csv(join_path(out_dir, "modal.csv"), modal);
    if (opt.svg) write_eigen_map_svg(join_path(out_dir, "eigen_map.svg"), modal);
    RunManifest m;
    m.tool_version = kToolVersion;
    m.command = "modal " + case_ref;
    m.case_path = path;
    m.case_hash = file_hash(path);
    m.options = std::string("pss=") + (opt.pss ? "1" : "0") + " svg=" +
                (opt.svg ? "1" : "0") + " h_rel=" + num(opt.h_rel);
    m.output_dir = out_dir;
    write_manifest(join_path(out_dir, "manifest.json"), m);

    std::ostringstream line;
    line << "modal " << case_ref << ": states=" << sm.a.rows()
         << " modes=" << modal.modes.size() << " stable=" << (modal.stable ? "yes" : "no");
    if (modal.least_damped >= 0) {
      const Mode& w = modal.modes[static_cast<size_t>(modal.least_damped)];
      line << " least_damped: f=" << num(w.freq_hz) << "Hz zeta=" << num(w.damping)
           << " (" << to_string(w.category) << ")";
    }
    std::cout << line.str() << "\n";
    return modal.stable ? kExitOk : kExitUnstable;
  } catch (const GridError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return classify_error(e);
  }
}

int run_sim(const std::string& case_ref, const SimRunOptions& opt, const std::string& out_dir) {
  try {
    const std::string path = resolve_case_path(case_ref);
    const PowerSystemCase sys = parse_case_file(path);
    std::vector<Event> events;
    for (const auto& spec : opt.events) events.push_back(parse_event_spec(spec));
    const PowerFlowSolution sol = solve_power_flow(sys);
    AssembleOptions ao;
    ao.enable_pss = opt.pss;
    const DynamicSystem dyn = assemble(sys, sol, ao);

    SimOptions so;
    so.t_end = opt.t_end;
    so.max_step = opt.max_step;
    so.output_dt = opt.output_dt;
    so.rel_tol = opt.rel_tol;
    const TimeSeries ts = simulate(dyn, events, so);

    prepare_out_dir(out_dir);
    write_timeseries_csv(join_path(out_dir, "timeseries.csv"), ts);
    if (opt.svg) {
      write_timeseries_svg(join_path(out_dir, "omega.svg"), ts, "omega_pu");
      write_timeseries_svg(join_path(out_dir, "v_terminal.svg"), ts, "v_terminal");
    }
    RunManifest m;
    m.tool_version = kToolVersion;
    m.command = "sim " + case_ref;
    m.case_path = path;
    m.case_hash = file_hash(path);
    std::ostringstream os;
    os << "t_end=" << num(opt.t_end) << " pss=" << (opt.pss ? "1" : "0")
       << " svg=" << (opt.svg ? "1" : "0") << " max_step=" << num(opt.max_step)
       << " output_dt=" << num(opt.output_dt) << " rel_tol=" << num(opt.rel_tol)
       << " events=[";
    for (size_t i = 0; i < opt.events.size(); ++i) {
      if (i) os << ";";
      os << opt.events[i];
    }
    os << "]";
    m.options = os.str();
    m.output_dir = out_dir;
    write_manifest(join_path(out_dir, "manifest.json"), m);

    std::cout << "sim " << case_ref << ": samples=" << ts.t.size()
              << " t_end=" << num(opt.t_end) << " events=" << events.size() << "\n";
    return kExitOk;
  } catch (const GridError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return classify_error(e);
  }
}

int run_cases() {
  try {
    const auto names = bundled_case_names();
    for (const auto& name : names) {
      const PowerSystemCase sys = parse_case_file(resolve_case_path(name));
      const CaseStats st = case_statistics(name, sys);
      std::cout << st.name << ": buses=" << st.buses << " branches=" << st.branches
                << " units=" << st.units;
      if (!st.unit_mva.empty()) {
        std::cout << " ratings_mva=";
        for (std::size_t i = 0; i < st.unit_mva.size(); ++i)
          std::cout << (i ? "/" : "") << num(st.unit_mva[i]);
      }
      std::cout << " load_mw=" << num(st.total_load_mw)
                << " long_lines=" << st.long_lines << "\n";
    }
    return kExitOk;
  } catch (const GridError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return classify_error(e);
  }
}

}  // namespace gridmodal
