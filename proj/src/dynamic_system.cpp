#include "gridmodal/dynamic_system.hpp"

#include <cmath>
#include <complex>

#include "gridmodal/controllers.hpp"
#include "gridmodal/errors.hpp"
#include "gridmodal/system_model.hpp"
#include "gridmodal/ybus.hpp"

namespace gridmodal {

namespace {

constexpr double kHalfPi = 1.5707963267948966;

std::vector<std::string> hydro_state_tags() {
  return {"gov_xi", "gov_xd", "gov_gate", "gov_q"};
}
std::vector<std::string> gas_state_tags() { return {"gov_xv", "gov_xc", "gov_xt"}; }
std::vector<std::string> pss_state_tags() {
  return {"pss_l1", "pss_l2", "pss_i1", "pss_i2", "pss_h1", "pss_h2"};
}

}  // namespace

struct DynamicSystem::UnitEval {
  MachineState ms;
  double v_d = 0.0, v_q = 0.0, v_terminal = 0.0;
  double i_d = 0.0, i_q = 0.0;          // system base
  std::complex<double> i_inj;           // network frame, system base
  double efd = 0.0, vs = 0.0;
  double tm_mach = 0.0;                 // machine pu
  double te_sys = 0.0;                  // system-base air-gap torque
  MachineDerivatives md;
  double d_exc[2] = {0.0, 0.0};
  std::array<double, kHydroStates> d_gov{};  // gas uses the first three slots
  std::array<double, kPssStates> d_pss{};
};

DynamicSystem::UnitEval DynamicSystem::eval_unit(int unit_index, const Eigen::VectorXd& x,
                                                 const Eigen::VectorXd& y,
                                                 const Eigen::VectorXd& u) const {
  const AssembledUnit& un = units_[static_cast<size_t>(unit_index)];
  const double omega_s = case_.base.omega_s();
  UnitEval ev;

  const int o = un.x_off;
  ev.ms.delta = x[o + 0];
  ev.ms.omega = x[o + 1];
  ev.ms.eq_p = x[o + 2];
  ev.ms.ed_p = x[o + 3];
  ev.ms.psi_1d = x[o + 4];
  ev.ms.psi_2q = x[o + 5];

  const std::complex<double> v = bus_voltage(y, un.bus);
  ev.v_terminal = std::abs(v);
  const std::complex<double> rot = std::polar(1.0, kHalfPi - ev.ms.delta);
  const std::complex<double> v_dq = v * rot;
  ev.v_d = v_dq.real();
  ev.v_q = v_dq.imag();

  std::tie(ev.i_d, ev.i_q) = stator_algebraic(un.mach, ev.ms, ev.v_d, ev.v_q);
  ev.i_inj = std::complex<double>(ev.i_d, ev.i_q) * std::conj(rot);

  const double speed_dev = (ev.ms.omega - omega_s) / omega_s;
  const double u_pm = u[2 * unit_index];
  const double u_vref = u[2 * unit_index + 1];

  if (un.pss_off >= 0) {
    std::array<double, kPssStates> s{};
    for (int i = 0; i < kPssStates; ++i) s[static_cast<size_t>(i)] = x[o + un.pss_off + i];
    const PssEval pe = pss_derivatives(*un.pss, s, speed_dev);
    ev.d_pss = pe.dx;
    ev.vs = pe.vs;
  }

  // A frozen controller holds its equilibrium output; the matching input
  // offset then acts on that output directly instead of on the reference.
  if (un.exciter_frozen) {
    ev.efd = un.efd0 + u_vref;
  } else {
    const double vm = x[o + un.exc_off];
    const double x_ll =
        exciter_state_count(un.exciter) == 2 ? x[o + un.exc_off + 1] : 0.0;
    const ExciterEval ee = exciter_derivatives(un.exciter, vm, x_ll, ev.v_terminal,
                                               un.v_ref0 + u_vref, ev.vs);
    ev.efd = ee.efd;
    ev.d_exc[0] = ee.d_vm;
    ev.d_exc[1] = ee.d_x_ll;
  }

  if (un.governor_frozen) {
    ev.tm_mach = un.tm0 + u_pm;
  } else if (un.gov_kind == GovernorKind::Hydro) {
    std::array<double, kHydroStates> s{};
    for (int i = 0; i < kHydroStates; ++i) s[static_cast<size_t>(i)] = x[o + un.gov_off + i];
    const HydroEval he = hydro_derivatives(un.hydro, s, speed_dev, un.p_ref0 + u_pm);
    ev.d_gov = he.dx;
    ev.tm_mach = he.tm;
  } else {
    std::array<double, kGasStates> s{};
    for (int i = 0; i < kGasStates; ++i) s[static_cast<size_t>(i)] = x[o + un.gov_off + i];
    const GasEval ge = gas_derivatives(un.gas, s, speed_dev, un.p_ref0 + u_pm);
    for (int i = 0; i < kGasStates; ++i) ev.d_gov[static_cast<size_t>(i)] = ge.dx[static_cast<size_t>(i)];
    ev.tm_mach = ge.tm;
  }

  ev.te_sys = electrical_torque(un.mach, ev.ms.eq_p, ev.ms.ed_p, ev.ms.psi_1d,
                                ev.ms.psi_2q, ev.i_d, ev.i_q);
  ev.md = machine_derivatives(un.mach, ev.ms, ev.i_d, ev.i_q, ev.efd,
                              ev.tm_mach * un.torque_scale, omega_s);
  return ev;
}

void DynamicSystem::f(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                      const Eigen::VectorXd& u, Eigen::VectorXd& out) const {
  out.resize(n_states_);
  for (size_t k = 0; k < units_.size(); ++k) {
    const AssembledUnit& un = units_[k];
    const UnitEval ev = eval_unit(static_cast<int>(k), x, y, u);
    const int o = un.x_off;
    out[o + 0] = ev.md.d_delta;
    out[o + 1] = ev.md.d_omega;
    out[o + 2] = ev.md.d_eq_p;
    out[o + 3] = ev.md.d_ed_p;
    out[o + 4] = ev.md.d_psi_1d;
    out[o + 5] = ev.md.d_psi_2q;
    if (un.exc_off >= 0) {
      out[o + un.exc_off] = ev.d_exc[0];
      if (exciter_state_count(un.exciter) == 2) out[o + un.exc_off + 1] = ev.d_exc[1];
    }
    if (un.gov_off >= 0) {
      const int ng = un.gov_kind == GovernorKind::Hydro ? kHydroStates : kGasStates;
      for (int i = 0; i < ng; ++i) out[o + un.gov_off + i] = ev.d_gov[static_cast<size_t>(i)];
    }
    if (un.pss_off >= 0)
      for (int i = 0; i < kPssStates; ++i) out[o + un.pss_off + i] = ev.d_pss[static_cast<size_t>(i)];
  }
}

void DynamicSystem::g(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                      const Eigen::VectorXd& u, Eigen::VectorXd& out) const {
  const int n = static_cast<int>(case_.buses.size());
  out.resize(2 * n);

  Eigen::VectorXcd v(n);
  for (int i = 0; i < n; ++i) v[i] = bus_voltage(y, i);

  // Current balance: unit injections minus load draws minus network flow.
  Eigen::VectorXcd bal = -(ybus_ * v);
  for (size_t k = 0; k < units_.size(); ++k)
    bal[units_[k].bus] += eval_unit(static_cast<int>(k), x, y, u).i_inj;

  for (int i = 0; i < n; ++i) {
    for (const int li : loads_at_bus_[static_cast<size_t>(i)]) {
      const LoadModel& ld = case_.loads[static_cast<size_t>(li)];
      const auto [p_mw, q_mvar] = load_power(ld, std::abs(v[i]));
      const std::complex<double> s_pu(p_mw / case_.base.s_base,
                                      q_mvar / case_.base.s_base);
      bal[i] -= std::conj(s_pu / v[i]);
    }
    out[2 * i] = bal[i].real();
    out[2 * i + 1] = bal[i].imag();
  }

  // A slack bus without a unit is an ideal source pinning its own voltage.
  for (const int sb : source_buses_) {
    const Bus& b = case_.buses[static_cast<size_t>(sb)];
    out[2 * sb] = y[2 * sb] - b.v_set * std::cos(b.angle_set);
    out[2 * sb + 1] = y[2 * sb + 1] - b.v_set * std::sin(b.angle_set);
  }
}

double DynamicSystem::residual_inf_norm(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                                        const Eigen::VectorXd& u) const {
  Eigen::VectorXd rf, rg;
  f(x, y, u, rf);
  g(x, y, u, rg);
  return std::max(rf.lpNorm<Eigen::Infinity>(), rg.lpNorm<Eigen::Infinity>());
}

int DynamicSystem::state_index(const std::string& unit, const std::string& state) const {
  const std::string key = unit + "." + state;
  for (size_t i = 0; i < state_names_.size(); ++i)
    if (state_names_[i] == key) return static_cast<int>(i);
  throw UnknownTarget(key);
}

int DynamicSystem::input_index(const std::string& unit, const std::string& input) const {
  const std::string key = unit + "." + input;
  for (size_t i = 0; i < input_names_.size(); ++i)
    if (input_names_[i] == key) return static_cast<int>(i);
  throw UnknownTarget(key);
}

DynamicSystem::UnitOutputs DynamicSystem::unit_outputs(int unit_index,
                                                       const Eigen::VectorXd& x,
                                                       const Eigen::VectorXd& y,
                                                       const Eigen::VectorXd& u) const {
  const AssembledUnit& un = units_[static_cast<size_t>(unit_index)];
  const UnitEval ev = eval_unit(unit_index, x, y, u);
  const std::complex<double> v = bus_voltage(y, un.bus);

  UnitOutputs o;
  o.delta_deg = ev.ms.delta * 180.0 / M_PI;
  o.omega_pu = ev.ms.omega / case_.base.omega_s();
  o.v_terminal = ev.v_terminal;
  o.p_elec = (v * std::conj(ev.i_inj)).real() / un.torque_scale;
  o.p_accel = ev.tm_mach - ev.te_sys / un.torque_scale;
  o.efd = ev.efd;
  o.vs_pss = ev.vs;
  return o;
}

namespace {

// Central-difference Jacobian of the stacked residual [f; g] in (x, y),
// used once to polish the assembled equilibrium.
Eigen::MatrixXd stacked_jacobian(const DynamicSystem& ds, const Eigen::VectorXd& x,
                                 const Eigen::VectorXd& y, const Eigen::VectorXd& u) {
  const int nx = ds.n_states(), ny = ds.n_algebraic();
  Eigen::MatrixXd jac(nx + ny, nx + ny);
  Eigen::VectorXd xp = x, yp = y, rf_p, rg_p, rf_m, rg_m;
  for (int k = 0; k < nx + ny; ++k) {
    double& var = k < nx ? xp[k] : yp[k - nx];
    const double save = var;
    const double h = 1e-7 * std::max(1.0, std::abs(save));
    var = save + h;
    ds.f(xp, yp, u, rf_p);
    ds.g(xp, yp, u, rg_p);
    var = save - h;
    ds.f(xp, yp, u, rf_m);
    ds.g(xp, yp, u, rg_m);
    var = save;
    jac.col(k).head(nx) = (rf_p - rf_m) / (2.0 * h);
    jac.col(k).tail(ny) = (rg_p - rg_m) / (2.0 * h);
  }
  return jac;
}

}  // namespace

DynamicSystem assemble(const PowerSystemCase& sys, const PowerFlowSolution& pf,
                       const AssembleOptions& opts) {
  DynamicSystem ds;
  ds.case_ = sys;
  ds.opts_ = opts;
  ds.ybus_ = build_ybus(sys);

  const int n = static_cast<int>(sys.buses.size());
  ds.loads_at_bus_.assign(static_cast<size_t>(n), {});
  ds.units_at_bus_.assign(static_cast<size_t>(n), {});
  for (size_t i = 0; i < sys.loads.size(); ++i)
    ds.loads_at_bus_[static_cast<size_t>(sys.bus_index(sys.loads[i].bus))].push_back(
        static_cast<int>(i));
  for (size_t k = 0; k < sys.units.size(); ++k)
    ds.units_at_bus_[static_cast<size_t>(sys.bus_index(sys.units[k].bus))].push_back(
        static_cast<int>(k));

  for (int i = 0; i < n; ++i) {
    const Bus& b = sys.buses[static_cast<size_t>(i)];
    const bool has_unit = !ds.units_at_bus_[static_cast<size_t>(i)].empty();
    if (b.kind == BusKind::PV && !has_unit) throw NoGeneratorAtPvBus(b.id);
    if (b.kind == BusKind::Slack && !has_unit) ds.source_buses_.push_back(i);
  }

  // Wire units in case order: convert constants to the system base, lay out
  // the state slices and name every entry.
  int off = 0;
  for (const GeneratingUnit& gu : sys.units) {
    AssembledUnit au;
    au.name = gu.name;
    au.bus = sys.bus_index(gu.bus);
    const double zr = sys.base.s_base / gu.mva_base;
    au.mach = gu.machine;
    au.mach.xd *= zr;
    au.mach.xd_p *= zr;
    au.mach.xd_pp *= zr;
    au.mach.xq *= zr;
    au.mach.xq_p *= zr;
    au.mach.xq_pp *= zr;
    au.mach.xls *= zr;
    au.mach.rs *= zr;
    au.mach.h /= zr;
    au.mach.d /= zr;
    au.torque_scale = gu.mva_base / sys.base.s_base;
    au.exciter = gu.exciter;
    if (std::holds_alternative<HydroGovernor>(gu.governor)) {
      au.gov_kind = GovernorKind::Hydro;
      au.hydro = std::get<HydroGovernor>(gu.governor);
    } else {
      au.gov_kind = GovernorKind::Gas;
      au.gas = std::get<GasGovernor>(gu.governor);
    }
    if (opts.enable_pss) au.pss = gu.pss;
    au.exciter_frozen = opts.freeze_exciters;
    au.governor_frozen = opts.freeze_governors;

    au.x_off = off;
    int local = 6;
    std::vector<std::string> tags = {"delta", "omega", "eq_p", "ed_p", "psi_1d", "psi_2q"};
    if (!au.exciter_frozen) {
      au.exc_off = local;
      local += exciter_state_count(au.exciter);
      tags.push_back("exc_vm");
      if (exciter_state_count(au.exciter) == 2) tags.push_back("exc_xll");
    }
    if (!au.governor_frozen) {
      au.gov_off = local;
      const auto gov_tags =
          au.gov_kind == GovernorKind::Hydro ? hydro_state_tags() : gas_state_tags();
      local += static_cast<int>(gov_tags.size());
      tags.insert(tags.end(), gov_tags.begin(), gov_tags.end());
    }
    if (au.pss) {
      au.pss_off = local;
      const auto ptags = pss_state_tags();
      local += static_cast<int>(ptags.size());
      tags.insert(tags.end(), ptags.begin(), ptags.end());
    }
    au.n_states = local;
    off += local;

    for (const auto& t : tags) ds.state_names_.push_back(au.name + "." + t);
    ds.input_names_.push_back(au.name + ".pm");
    ds.input_names_.push_back(au.name + ".vref");
    ds.units_.push_back(std::move(au));
  }
  ds.n_states_ = off;
  ds.n_algebraic_ = 2 * n;
  ds.n_inputs_ = 2 * static_cast<int>(ds.units_.size());

  for (int i = 0; i < n; ++i) {
    const std::string tag = "B" + std::to_string(sys.buses[static_cast<size_t>(i)].id);
    ds.algebraic_names_.push_back(tag + ".v_re");
    ds.algebraic_names_.push_back(tag + ".v_im");
  }

  // Operating point: back-solve every unit from the power-flow voltages so
  // the full residual starts at round-off level, then polish.
  ds.x0_ = Eigen::VectorXd::Zero(ds.n_states_);
  ds.y0_ = Eigen::VectorXd::Zero(ds.n_algebraic_);
  ds.u0_ = Eigen::VectorXd::Zero(ds.n_inputs_);
  for (int i = 0; i < n; ++i) {
    const std::complex<double> v = pf.voltage(i);
    ds.y0_[2 * i] = v.real();
    ds.y0_[2 * i + 1] = v.imag();
  }

  const double omega_s = sys.base.omega_s();
  for (auto& au : ds.units_) {
    const MachineParams& m = au.mach;
    const int bi = au.bus;
    const std::complex<double> v = pf.voltage(bi);

    double p_load = 0.0, q_load = 0.0;
    for (const int li : ds.loads_at_bus_[static_cast<size_t>(bi)]) {
      const auto [p_mw, q_mvar] = load_power(sys.loads[static_cast<size_t>(li)], std::abs(v));
      p_load += p_mw / sys.base.s_base;
      q_load += q_mvar / sys.base.s_base;
    }
    const std::complex<double> s_mach(pf.p_inj[bi] + p_load, pf.q_inj[bi] + q_load);
    const std::complex<double> i_ph = std::conj(s_mach / v);

    const double delta0 = std::arg(v + std::complex<double>(m.rs, m.xq) * i_ph);
    const std::complex<double> rot = std::polar(1.0, kHalfPi - delta0);
    const std::complex<double> v_dq = v * rot;
    const std::complex<double> i_dq = i_ph * rot;
    const double i_d = i_dq.real(), i_q = i_dq.imag();

    const double ed_p = (m.xq - m.xq_p) * i_q;
    const double psi_2q = -ed_p - (m.xq_p - m.xls) * i_q;
    const double eq_p = v_dq.imag() + m.rs * i_q + m.xd_p * i_d;
    const double psi_1d = eq_p - (m.xd_p - m.xls) * i_d;
    au.efd0 = eq_p + (m.xd - m.xd_p) * i_d;
    const double te0 = electrical_torque(m, eq_p, ed_p, psi_1d, psi_2q, i_d, i_q);
    au.tm0 = te0 / au.torque_scale;

    const int o = au.x_off;
    ds.x0_[o + 0] = delta0;
    ds.x0_[o + 1] = omega_s;
    ds.x0_[o + 2] = eq_p;
    ds.x0_[o + 3] = ed_p;
    ds.x0_[o + 4] = psi_1d;
    ds.x0_[o + 5] = psi_2q;

    if (!au.exciter_frozen) {
      const ExciterEquilibrium ee = exciter_equilibrium(au.exciter, std::abs(v), au.efd0);
      if (ee.limit_binding) throw LimitBindingAtEquilibrium(au.name, "efd");
      au.v_ref0 = ee.v_ref0;
      ds.x0_[o + au.exc_off] = ee.vm0;
      if (exciter_state_count(au.exciter) == 2) ds.x0_[o + au.exc_off + 1] = ee.x_ll0;
    } else {
      au.v_ref0 = au.efd0;
    }

    if (!au.governor_frozen) {
      if (au.gov_kind == GovernorKind::Hydro) {
        const HydroEquilibrium he = hydro_equilibrium(au.hydro, au.tm0);
        if (he.limit_binding) throw LimitBindingAtEquilibrium(au.name, "gate");
        au.p_ref0 = he.p_ref0;
        for (int i = 0; i < kHydroStates; ++i)
          ds.x0_[o + au.gov_off + i] = he.s[static_cast<size_t>(i)];
      } else {
        const GasEquilibrium ge = gas_equilibrium(au.gas, au.tm0);
        if (ge.limit_binding) throw LimitBindingAtEquilibrium(au.name, "fuel");
        au.p_ref0 = ge.p_ref0;
        for (int i = 0; i < kGasStates; ++i)
          ds.x0_[o + au.gov_off + i] = ge.s[static_cast<size_t>(i)];
      }
    } else {
      au.p_ref0 = au.tm0;
    }

    if (au.pss) {
      const double margin = 2.0 * kLimitBlendWidth;
      if (au.pss->vs_min >= -margin || au.pss->vs_max <= margin)
        throw LimitBindingAtEquilibrium(au.name, "vs");
      // Band states rest at zero for zero speed deviation.
    }

    ds.input_ref_.push_back(au.p_ref0);
    ds.input_ref_.push_back(au.v_ref0);
  }

  // Newton polish of (x0, y0). The Jacobian is singular by one rank when no
  // ideal source pins the reference frame, so solve in the least-squares
  // sense, which picks the minimum-norm correction.
  Eigen::VectorXd x = ds.x0_, y = ds.y0_;
  double best = ds.residual_inf_norm(x, y, ds.u0_);
  for (int it = 0; it < 8 && best > 1e-12; ++it) {
    const Eigen::MatrixXd jac = stacked_jacobian(ds, x, y, ds.u0_);
    Eigen::VectorXd r(ds.n_states_ + ds.n_algebraic_), rf, rg;
    ds.f(x, y, ds.u0_, rf);
    ds.g(x, y, ds.u0_, rg);
    r << rf, rg;
    const Eigen::VectorXd dz = jac.completeOrthogonalDecomposition().solve(-r);
    const Eigen::VectorXd xn = x + dz.head(ds.n_states_);
    const Eigen::VectorXd yn = y + dz.tail(ds.n_algebraic_);
    const double rn = ds.residual_inf_norm(xn, yn, ds.u0_);
    if (!std::isfinite(rn) || rn >= best) break;
    x = xn;
    y = yn;
    best = rn;
  }
  if (!(best < 1e-8))
    throw InitializationFailed("equilibrium residual " + std::to_string(best));
  ds.x0_ = x;
  ds.y0_ = y;
  return ds;
}

DaeView make_view(const DynamicSystem& sys) {
  DaeView v;
  v.nx = sys.n_states();
  v.ny = sys.n_algebraic();
  v.nu = sys.n_inputs();
  v.f = [&sys](const Eigen::VectorXd& x, const Eigen::VectorXd& y,
               const Eigen::VectorXd& u, Eigen::VectorXd& out) { sys.f(x, y, u, out); };
  v.g = [&sys](const Eigen::VectorXd& x, const Eigen::VectorXd& y,
               const Eigen::VectorXd& u, Eigen::VectorXd& out) { sys.g(x, y, u, out); };
  return v;
}

}  // namespace gridmodal
