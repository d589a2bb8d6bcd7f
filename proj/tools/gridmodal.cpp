#include <cstdlib>
#include <string>

#include "CLI11.hpp"
#include "gridmodal/runners.hpp"

namespace {

std::string default_out_dir() {
  if (const char* env = std::getenv("GRIDMODAL_OUT"); env && *env) return env;
  return "out";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Power system small-signal stability toolkit"};
  app.require_subcommand(1);

  std::string case_ref;
  std::string out_dir = default_out_dir();

  gridmodal::PfRunOptions pf_opt;
  CLI::App* pf = app.add_subcommand("pf", "Solve the steady-state power flow");
  pf->add_option("case", case_ref, "Bundled case name or path to a .case file")->required();
  pf->add_option("-o,--out", out_dir, "Output directory");
  pf->add_option("--tol", pf_opt.tolerance, "Mismatch tolerance, pu");
  pf->add_option("--max-iter", pf_opt.max_iter, "Newton iteration cap");

  gridmodal::ModalRunOptions modal_opt;
  CLI::App* modal = app.add_subcommand("modal", "Linearize and analyze the mode spectrum");
  modal->add_option("case", case_ref, "Bundled case name or path to a .case file")->required();
  modal->add_option("-o,--out", out_dir, "Output directory");
  modal->add_flag("--no-pss{false},--pss{true}", modal_opt.pss, "Toggle stabilizers");
  modal->add_flag("--svg", modal_opt.svg, "Also write the eigenvalue map");
  modal->add_option("--h-rel", modal_opt.h_rel, "Relative finite-difference step");

  gridmodal::SimRunOptions sim_opt;
  CLI::App* sim = app.add_subcommand("sim", "Integrate the nonlinear response");
  sim->add_option("case", case_ref, "Bundled case name or path to a .case file")->required();
  sim->add_option("-o,--out", out_dir, "Output directory");
  sim->add_option("-e,--event", sim_opt.events,
                  "Event spec <unit>:<pm|vref>:<+|-><value>[%]@<time>, repeatable");
  sim->add_option("--t-end", sim_opt.t_end, "Simulation horizon, s");
  sim->add_flag("--no-pss{false},--pss{true}", sim_opt.pss, "Toggle stabilizers");
  sim->add_flag("--svg", sim_opt.svg, "Also write response plots");
  sim->add_option("--max-step", sim_opt.max_step, "Step ceiling, s");
  sim->add_option("--output-dt", sim_opt.output_dt, "Output grid spacing, s");
  sim->add_option("--rel-tol", sim_opt.rel_tol, "Local error tolerance");

  CLI::App* cases = app.add_subcommand("cases", "List the bundled cases");
  (void)cases;

  CLI11_PARSE(app, argc, argv);

  if (pf->parsed()) return gridmodal::run_pf(case_ref, pf_opt, out_dir);
  if (modal->parsed()) return gridmodal::run_modal(case_ref, modal_opt, out_dir);
  if (sim->parsed()) return gridmodal::run_sim(case_ref, sim_opt, out_dir);
  return gridmodal::run_cases();
}
