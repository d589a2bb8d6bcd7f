#pragma once

#include <utility>

#include "gridmodal/types.hpp"

namespace gridmodal {

/// Load drawn at voltage v_pu, in MW/MVAr. Throws NonPositiveVoltage for v <= 0.
std::pair<double, double> load_power(const LoadModel& load, double v_pu);

/// Physical branch constants recovered from per-unit data at the branch's
/// voltage level (both ends share one level in this toolkit).
struct PhysicalBranch {
  double r_ohm = 0.0;
  double x_ohm = 0.0;
  double b_siemens = 0.0;
};

PhysicalBranch branch_to_physical(const Branch& br, double base_kv, double s_base_mva);
Branch branch_from_physical(const PhysicalBranch& ph, const Branch& prototype,
                            double base_kv, double s_base_mva);

/// Structural validation shared by the parser and by tests that build cases
/// programmatically. Throws the specific error for the first violation found.
void validate_case(const PowerSystemCase& sys);

void validate_machine(const MachineParams& p, int line_no);
void validate_exciter(const ExciterST1A& e, int line_no);
void validate_governor(const GovernorParams& g, int line_no);
void validate_pss(const PssMB& p, int line_no);

}  // namespace gridmodal
