#include "gridmodal/machine.hpp"

#include <cmath>

#include "gridmodal/errors.hpp"

namespace gridmodal {

FluxCoeffs flux_coeffs(const MachineParams& p) {
  FluxCoeffs c;
  c.c_d1 = (p.xd_pp - p.xls) / (p.xd_p - p.xls);
  c.c_d2 = (p.xd_p - p.xd_pp) / (p.xd_p - p.xls);
  c.c_q1 = (p.xq_pp - p.xls) / (p.xq_p - p.xls);
  c.c_q2 = (p.xq_p - p.xq_pp) / (p.xq_p - p.xls);
  return c;
}

SubtransientEmf subtransient_emf(const MachineParams& p, double eq_p, double ed_p,
                                 double psi_1d, double psi_2q) {
  const FluxCoeffs c = flux_coeffs(p);
  SubtransientEmf e;
  e.eq = c.c_d1 * eq_p + c.c_d2 * psi_1d;
  e.ed = c.c_q1 * ed_p - c.c_q2 * psi_2q;
  return e;
}

double electrical_torque(const MachineParams& p, double eq_p, double ed_p,
                         double psi_1d, double psi_2q, double i_d, double i_q) {
  const SubtransientEmf e = subtransient_emf(p, eq_p, ed_p, psi_1d, psi_2q);
  return e.eq * i_q + e.ed * i_d + (p.xq_pp - p.xd_pp) * i_q * i_d;
}

MachineDerivatives machine_derivatives(const MachineParams& p, const MachineState& s,
                                       double i_d, double i_q, double efd, double tm,
                                       double omega_s) {
  const FluxCoeffs c = flux_coeffs(p);
  const double t_e = electrical_torque(p, s.eq_p, s.ed_p, s.psi_1d, s.psi_2q, i_d, i_q);

  MachineDerivatives d;
  d.d_delta = s.omega - omega_s;
  d.d_omega =
      (omega_s / (2.0 * p.h)) * (tm - p.d * (s.omega - omega_s) / omega_s - t_e);

  const double k_d = c.c_d2 / (p.xd_p - p.xls);
  const double sat_d = s.psi_1d + (p.xd_p - p.xls) * i_d - s.eq_p;
  d.d_eq_p = (-s.eq_p - (p.xd - p.xd_p) * (i_d - k_d * sat_d) + efd) / p.tdo_p;

  const double k_q = c.c_q2 / (p.xq_p - p.xls);
  const double sat_q = s.psi_2q + (p.xq_p - p.xls) * i_q + s.ed_p;
  d.d_ed_p = (-s.ed_p + (p.xq - p.xq_p) * (i_q - k_q * sat_q)) / p.tqo_p;

  d.d_psi_1d = (-s.psi_1d + s.eq_p - (p.xd_p - p.xls) * i_d) / p.tdo_pp;
  d.d_psi_2q = (-s.psi_2q - s.ed_p - (p.xq_p - p.xls) * i_q) / p.tqo_pp;
  return d;
}

std::pair<double, double> stator_algebraic(const MachineParams& p, const MachineState& s,
                                           double v_d, double v_q) {
  // [ rs   -xq_pp ] [id]   [ed_pp - vd]
  // [ xd_pp   rs  ] [iq] = [eq_pp - vq]
  const SubtransientEmf e = subtransient_emf(p, s.eq_p, s.ed_p, s.psi_1d, s.psi_2q);
  const double det = p.rs * p.rs + p.xd_pp * p.xq_pp;
  if (det == 0.0) throw SingularStator();
  const double b1 = e.ed - v_d;
  const double b2 = e.eq - v_q;
  const double i_d = (p.rs * b1 + p.xq_pp * b2) / det;
  const double i_q = (-p.xd_pp * b1 + p.rs * b2) / det;
  return {i_d, i_q};
}

}  // namespace gridmodal
