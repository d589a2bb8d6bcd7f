#pragma once

#include <array>

#include "gridmodal/types.hpp"

namespace gridmodal {

/// Half-width of the C1 blend applied to every controller limit so the
/// right-hand side stays continuously differentiable for the implicit
/// integrator. Exactly the identity further than one width inside the limits.
constexpr double kLimitBlendWidth = 1e-4;

double soft_clamp(double x, double lo, double hi, double width = kLimitBlendWidth);

// ------------------------------------------------------------------- exciter

/// State layout: [vm] or [vm, x_ll] when the lead-lag stage is active.
int exciter_state_count(const ExciterST1A& e);

struct ExciterEval {
  double efd = 0.0;
  double d_vm = 0.0;
  double d_x_ll = 0.0;  // meaningful only when the lead-lag stage exists
};

/// v_ref enters through the summing junction v_ref - vm + v_pss; the clamp on
/// efd is the only nonlinearity.
ExciterEval exciter_derivatives(const ExciterST1A& e, double vm, double x_ll,
                                double v_terminal, double v_ref, double v_pss);

struct ExciterEquilibrium {
  double vm0 = 0.0;
  double x_ll0 = 0.0;
  double v_ref0 = 0.0;
  bool limit_binding = false;
};

ExciterEquilibrium exciter_equilibrium(const ExciterST1A& e, double v_terminal, double efd0);

// ----------------------------------------------------------------- governors

/// Hydro state layout: [x_i, x_d, gate, q].
constexpr int kHydroStates = 4;
/// Fixed filter time constant for the PID derivative path, s.
constexpr double kHydroDerivFilter = 0.05;

struct HydroEval {
  std::array<double, kHydroStates> dx{};
  double tm = 0.0;  // mechanical torque, machine pu
};

HydroEval hydro_derivatives(const HydroGovernor& g, const std::array<double, kHydroStates>& s,
                            double speed_dev, double p_ref);

struct HydroEquilibrium {
  std::array<double, kHydroStates> s{};
  double p_ref0 = 0.0;
  bool limit_binding = false;
};

HydroEquilibrium hydro_equilibrium(const HydroGovernor& g, double tm0);

/// Gas state layout: [x_valve, x_comb, x_turb].
constexpr int kGasStates = 3;

struct GasEval {
  std::array<double, kGasStates> dx{};
  double tm = 0.0;
};

GasEval gas_derivatives(const GasGovernor& g, const std::array<double, kGasStates>& s,
                        double speed_dev, double p_ref);

struct GasEquilibrium {
  std::array<double, kGasStates> s{};
  double p_ref0 = 0.0;
  bool limit_binding = false;
};

GasEquilibrium gas_equilibrium(const GasGovernor& g, double tm0);

// ----------------------------------------------------------------------- pss

/// Three band-pass differencers, two cascaded low-pass states per band:
/// [l1, l2, i1, i2, h1, h2]. Band output s1 - s2 has exactly zero DC gain.
constexpr int kPssStates = 6;

struct PssEval {
  std::array<double, kPssStates> dx{};
  double vs = 0.0;
};

PssEval pss_derivatives(const PssMB& p, const std::array<double, kPssStates>& s,
                        double speed_dev);

}  // namespace gridmodal
