#include "gridmodal/controllers.hpp"

#include <cmath>
#include <numbers>

#include "gridmodal/errors.hpp"

namespace gridmodal {

double soft_clamp(double x, double lo, double hi, double w) {
  // C1 join: linear inside, constant outside, quadratic over a 2w band
  // centered on each limit. Requires hi - lo > 2w, guaranteed by validation.
  if (x <= lo - w) return lo;
  if (x < lo + w) {
    const double t = x - (lo - w);
    return lo + t * t / (4.0 * w);
  }
  if (x <= hi - w) return x;
  if (x < hi + w) {
    const double t = (hi + w) - x;
    return hi - t * t / (4.0 * w);
  }
  return hi;
}

int exciter_state_count(const ExciterST1A& e) { return e.tb > 0.0 ? 2 : 1; }

ExciterEval exciter_derivatives(const ExciterST1A& e, double vm, double x_ll,
                                double v_terminal, double v_ref, double v_pss) {
  ExciterEval out;
  out.d_vm = (v_terminal - vm) / e.tr;
  const double err = v_ref - vm + v_pss;
  double e_ll = err;
  if (e.tb > 0.0) {
    out.d_x_ll = (err - x_ll) / e.tb;
    e_ll = x_ll + (e.tc / e.tb) * (err - x_ll);
  } else {
    out.d_x_ll = 0.0;
  }
  out.efd = soft_clamp(e.ka * e_ll, e.efd_min, e.efd_max, kLimitBlendWidth);
  return out;
}

ExciterEquilibrium exciter_equilibrium(const ExciterST1A& e, double v_terminal,
                                       double efd0) {
  ExciterEquilibrium eq;
  eq.vm0 = v_terminal;
  // Steady state must lie on the linear segment of the limiter.
  const double margin = 2.0 * kLimitBlendWidth;
  eq.limit_binding = efd0 <= e.efd_min + margin || efd0 >= e.efd_max - margin;
  const double e_ll = efd0 / e.ka;
  eq.x_ll0 = e_ll;  // lead-lag state equals its input at rest
  eq.v_ref0 = e_ll + eq.vm0;
  return eq;
}

HydroEval hydro_derivatives(const HydroGovernor& g,
                            const std::array<double, kHydroStates>& s, double speed_dev,
                            double p_ref) {
  const double x_i = s[0], x_d = s[1], gate = s[2], q = s[3];
  const double err = p_ref - speed_dev - g.r_perm * gate;

  HydroEval out;
  out.dx[0] = g.ki * err;
  out.dx[1] = (err - x_d) / kHydroDerivFilter;
  const double pid = g.kp * err + x_i + g.kd * (err - x_d) / kHydroDerivFilter;

  const double rate = soft_clamp((pid - gate) / g.ta_servo, -g.rate_limit, g.rate_limit,
                                 kLimitBlendWidth);
  // The position limit enters as a soft barrier on the commanded gate.
  const double g_held =
      soft_clamp(gate + g.ta_servo * rate, g.g_min, g.g_max, kLimitBlendWidth);
  out.dx[2] = (g_held - gate) / g.ta_servo;

  const double head = (q / gate) * (q / gate);
  out.dx[3] = (1.0 - head) / g.tw;
  out.tm = g.at * head * (q - g.q_nl);
  return out;
}

HydroEquilibrium hydro_equilibrium(const HydroGovernor& g, double tm0) {
  // At rest the head is 1, so q = tm0 / at + q_nl and gate = q.
  HydroEquilibrium eq;
  const double q0 = tm0 / g.at + g.q_nl;
  const double gate0 = q0;
  const double margin = 2.0 * kLimitBlendWidth;
  eq.limit_binding = gate0 <= g.g_min + margin || gate0 >= g.g_max - margin;
  eq.p_ref0 = g.r_perm * gate0;
  eq.s[0] = gate0;  // the integrator carries the whole gate command
  eq.s[1] = 0.0;
  eq.s[2] = gate0;
  eq.s[3] = q0;
  return eq;
}

GasEval gas_derivatives(const GasGovernor& g, const std::array<double, kGasStates>& s,
                        double speed_dev, double p_ref) {
  const double xv = s[0], xc = s[1], xt = s[2];
  const double cmd = p_ref - speed_dev / g.r_droop;
  const double fuel = soft_clamp(cmd, g.f_min, g.f_max, kLimitBlendWidth);

  GasEval out;
  out.dx[0] = (fuel - xv) / g.t_valve;
  out.dx[1] = (xv - xc) / g.t_comb;
  out.dx[2] = (xc - xt) / g.t_turb;
  out.tm = g.k_turb * xt;
  return out;
}

GasEquilibrium gas_equilibrium(const GasGovernor& g, double tm0) {
  GasEquilibrium eq;
  const double fuel0 = tm0 / g.k_turb;
  const double margin = 2.0 * kLimitBlendWidth;
  eq.limit_binding = fuel0 <= g.f_min + margin || fuel0 >= g.f_max - margin;
  eq.p_ref0 = fuel0;
  eq.s[0] = fuel0;
  eq.s[1] = fuel0;
  eq.s[2] = fuel0;
  return eq;
}

PssEval pss_derivatives(const PssMB& p, const std::array<double, kPssStates>& s,
                        double speed_dev) {
  // Each band is the washout sT/(1+sT)^2 realized as the difference of two
  // cascaded first-order lags on the speed deviation.
  const double f_band[3] = {p.f_l, p.f_i, p.f_h};
  const double k_band[3] = {p.k_l, p.k_i, p.k_h};
  PssEval out;
  double vs_raw = 0.0;
  for (int b = 0; b < 3; ++b) {
    const double t = 1.0 / (2.0 * std::numbers::pi * f_band[b]);
    const double s1 = s[2 * b], s2 = s[2 * b + 1];
    out.dx[2 * b] = (speed_dev - s1) / t;
    out.dx[2 * b + 1] = (s1 - s2) / t;
    vs_raw += k_band[b] * (s1 - s2);
  }
  out.vs = soft_clamp(vs_raw, p.vs_min, p.vs_max, kLimitBlendWidth);
  return out;
}

}  // namespace gridmodal
