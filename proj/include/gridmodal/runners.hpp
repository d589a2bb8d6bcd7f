#pragma once

#include <string>
#include <vector>

namespace gridmodal {

/// Process exit codes shared by the CLI and the batch runners.
enum ExitCode {
  kExitOk = 0,
  kExitInputError = 1,
  kExitPfDiverged = 2,
  kExitUnstable = 3,
  kExitEigenFailure = 4,
  kExitSimFailure = 5,
};

struct PfRunOptions {
  double tolerance = 1e-8;
  int max_iter = 30;
};

struct ModalRunOptions {
  bool pss = true;
  bool svg = false;
  double h_rel = 1e-6;
};

struct SimRunOptions {
  std::vector<std::string> events;
  double t_end = 10.0;
  bool pss = true;
  bool svg = false;
  double max_step = 0.02;
  double output_dt = 0.02;
  double rel_tol = 1e-6;
};

/// Each runner resolves the case, executes, writes its CSV/SVG set plus a
/// manifest into out_dir, prints a short summary to stdout and returns the
/// process exit code. Errors are reported on stderr, never thrown.
int run_pf(const std::string& case_ref, const PfRunOptions& opt, const std::string& out_dir);
int run_modal(const std::string& case_ref, const ModalRunOptions& opt, const std::string& out_dir);
int run_sim(const std::string& case_ref, const SimRunOptions& opt, const std::string& out_dir);
int run_cases();

}  // namespace gridmodal
