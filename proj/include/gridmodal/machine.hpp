#pragma once

#include <utility>

#include "gridmodal/types.hpp"

namespace gridmodal {

/// Flux interpolation weights used by the rotor equations, the torque
/// expression and the stator interface alike. Both axes satisfy c1 + c2 = 1.
struct FluxCoeffs {
  double c_d1 = 0.0;  // (xd_pp - xls) / (xd_p - xls)
  double c_d2 = 0.0;  // (xd_p - xd_pp) / (xd_p - xls)
  double c_q1 = 0.0;  // (xq_pp - xls) / (xq_p - xls)
  double c_q2 = 0.0;  // (xq_p - xq_pp) / (xq_p - xls)
};

FluxCoeffs flux_coeffs(const MachineParams& p);

struct MachineState {
  double delta = 0.0;    // rotor angle, rad
  double omega = 0.0;    // rotor speed, rad/s
  double eq_p = 0.0;     // q-axis transient voltage
  double ed_p = 0.0;     // d-axis transient voltage
  double psi_1d = 0.0;   // d-axis damper flux
  double psi_2q = 0.0;   // q-axis damper flux
};

struct MachineDerivatives {
  double d_delta = 0.0;
  double d_omega = 0.0;
  double d_eq_p = 0.0;
  double d_ed_p = 0.0;
  double d_psi_1d = 0.0;
  double d_psi_2q = 0.0;
};

/// Sub-transient voltages behind x'': eq'' pairs with the q-axis stator
/// equation, ed'' with the d-axis one.
struct SubtransientEmf {
  double ed = 0.0;
  double eq = 0.0;
};

SubtransientEmf subtransient_emf(const MachineParams& p, double eq_p, double ed_p,
                                 double psi_1d, double psi_2q);

/// Air-gap torque: eq''*iq + ed''*id + (xq'' - xd'')*iq*id.
double electrical_torque(const MachineParams& p, double eq_p, double ed_p,
                         double psi_1d, double psi_2q, double i_d, double i_q);

/// Two-axis rotor dynamics with one damper per axis. Currents follow the
/// generator convention (positive out of the machine); speed damping is
/// d * (omega - omega_s) / omega_s in torque units.
MachineDerivatives machine_derivatives(const MachineParams& p, const MachineState& s,
                                       double i_d, double i_q, double efd, double tm,
                                       double omega_s);

/// Solve the stator interface
///   v_d = ed'' - rs*i_d + xq''*i_q
///   v_q = eq'' - rs*i_q - xd''*i_d
/// for the dq currents. Throws SingularStator when rs^2 + xd''*xq'' vanishes.
std::pair<double, double> stator_algebraic(const MachineParams& p, const MachineState& s,
                                           double v_d, double v_q);

}  // namespace gridmodal
