#pragma once

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "gridmodal/machine.hpp"
#include "gridmodal/power_flow.hpp"
#include "gridmodal/types.hpp"

namespace gridmodal {

struct AssembleOptions {
  bool enable_pss = true;
  // Freezing replaces a controller's output with its equilibrium value and
  // drops its states from the catalog. Used for reduced-order studies.
  bool freeze_exciters = false;
  bool freeze_governors = false;
};

enum class GovernorKind { Hydro, Gas };

/// One unit as wired into the DAE. Machine constants are on the system base;
/// controllers keep machine-base quantities and their torque is rescaled by
/// torque_scale = mva_base / s_base at the swing equation.
struct AssembledUnit {
  std::string name;
  int bus = 0;                  // internal bus index
  MachineParams mach;           // system base
  double torque_scale = 1.0;
  ExciterST1A exciter;
  GovernorKind gov_kind = GovernorKind::Hydro;
  HydroGovernor hydro;
  GasGovernor gas;
  std::optional<PssMB> pss;
  bool exciter_frozen = false;
  bool governor_frozen = false;

  int x_off = 0;                // offset of this unit's slice in the state vector
  int n_states = 0;
  int exc_off = -1;             // offsets within the slice, -1 when absent
  int gov_off = -1;
  int pss_off = -1;

  // Equilibrium references, filled by initialization.
  double p_ref0 = 0.0;          // governor reference, machine pu (droop form for hydro)
  double v_ref0 = 0.0;
  double efd0 = 0.0;
  double tm0 = 0.0;             // machine pu
};

/// Semi-explicit index-1 DAE wrapper around one operating point:
///   dx/dt = f(x, y, u),  0 = g(x, y, u)
/// x: unit states in case order; y: bus voltages as (re, im) pairs;
/// u: additive offsets on the governor and exciter references, zero at
/// the initialized equilibrium.
class DynamicSystem {
 public:
  int n_states() const { return n_states_; }
  int n_algebraic() const { return n_algebraic_; }
  int n_inputs() const { return n_inputs_; }

  const std::vector<std::string>& state_names() const { return state_names_; }
  const std::vector<std::string>& algebraic_names() const { return algebraic_names_; }
  const std::vector<std::string>& input_names() const { return input_names_; }

  const Eigen::VectorXd& x0() const { return x0_; }
  const Eigen::VectorXd& y0() const { return y0_; }
  const Eigen::VectorXd& u0() const { return u0_; }

  /// Reference value behind additive input i (p_ref0 or v_ref0 of its unit).
  double input_reference(int input_index) const { return input_ref_[input_index]; }

  void f(const Eigen::VectorXd& x, const Eigen::VectorXd& y, const Eigen::VectorXd& u,
         Eigen::VectorXd& out) const;
  void g(const Eigen::VectorXd& x, const Eigen::VectorXd& y, const Eigen::VectorXd& u,
         Eigen::VectorXd& out) const;

  double residual_inf_norm(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                           const Eigen::VectorXd& u) const;

  int state_index(const std::string& unit, const std::string& state) const;
  int input_index(const std::string& unit, const std::string& input) const;

  const std::vector<AssembledUnit>& units() const { return units_; }
  const PowerSystemCase& system_case() const { return case_; }
  const Eigen::MatrixXcd& ybus() const { return ybus_; }

  std::complex<double> bus_voltage(const Eigen::VectorXd& y, int bus_index) const {
    return {y[2 * bus_index], y[2 * bus_index + 1]};
  }

  /// Observables recorded by the simulator, one struct per unit.
  struct UnitOutputs {
    double delta_deg = 0.0;
    double omega_pu = 0.0;
    double v_terminal = 0.0;
    double p_elec = 0.0;     // machine pu
    double p_accel = 0.0;    // tm - te, machine pu
    double efd = 0.0;
    double vs_pss = 0.0;
  };
  UnitOutputs unit_outputs(int unit_index, const Eigen::VectorXd& x,
                           const Eigen::VectorXd& y, const Eigen::VectorXd& u) const;

  friend DynamicSystem assemble(const PowerSystemCase&, const PowerFlowSolution&,
                                const AssembleOptions&);

 private:
  PowerSystemCase case_;
  AssembleOptions opts_;
  Eigen::MatrixXcd ybus_;
  std::vector<AssembledUnit> units_;
  std::vector<int> source_buses_;   // slack buses without a unit: ideal sources
  std::vector<std::vector<int>> loads_at_bus_;
  std::vector<std::vector<int>> units_at_bus_;

  int n_states_ = 0, n_algebraic_ = 0, n_inputs_ = 0;
  std::vector<std::string> state_names_, algebraic_names_, input_names_;
  Eigen::VectorXd x0_, y0_, u0_;
  std::vector<double> input_ref_;

  struct UnitEval;
  UnitEval eval_unit(int unit_index, const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                     const Eigen::VectorXd& u) const;
};

/// Build the DAE at the power-flow operating point and initialize every state
/// so the full residual vanishes. Throws NoGeneratorAtPvBus, SingularStator,
/// LimitBindingAtEquilibrium or InitializationFailed.
DynamicSystem assemble(const PowerSystemCase& sys, const PowerFlowSolution& pf,
                       const AssembleOptions& opts = {});

/// Function view of a DAE for the linearizer and integrator: residuals at
/// fixed input layout, no ownership.
struct DaeView {
  int nx = 0, ny = 0, nu = 0;
  std::function<void(const Eigen::VectorXd&, const Eigen::VectorXd&, const Eigen::VectorXd&,
                     Eigen::VectorXd&)> f;
  std::function<void(const Eigen::VectorXd&, const Eigen::VectorXd&, const Eigen::VectorXd&,
                     Eigen::VectorXd&)> g;
};

DaeView make_view(const DynamicSystem& sys);

}  // namespace gridmodal
