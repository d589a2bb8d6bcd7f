#include "gridmodal/time_domain.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>

#include "gridmodal/errors.hpp"
#include "gridmodal/small_signal.hpp"

namespace gridmodal {

namespace {

// gamma = 2 - sqrt(2) makes both implicit stages share the coefficient
// d = gamma/2, so one factorization serves the whole step.
constexpr double kGamma = 2.0 - 1.4142135623730951;
constexpr double kD = kGamma / 2.0;
const double kA1 = 1.0 / (kGamma * (2.0 - kGamma));
const double kA2 = -(1.0 - kGamma) * (1.0 - kGamma) / (kGamma * (2.0 - kGamma));
const double kErrC =
    (-3.0 * kGamma * kGamma + 4.0 * kGamma - 2.0) / (12.0 * (2.0 - kGamma));

// Steps a cached Jacobian may serve before a forced refresh.
constexpr int kJacMaxAge = 25;
// Residual level, relative to the state magnitude, treated as "already at
// equilibrium": the exact solution is constant to far better than any
// tolerance, so the step is taken without moving the state.
constexpr double kEquilibriumHold = 1e-13;

struct Workspace {
  int nx = 0, ny = 0;
  DaeJacobian jac;
  bool jac_valid = false;
  int jac_age = 0;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu;
  bool lu_valid = false;
  double lu_h = -1.0;

  Workspace(int nx_, int ny_) : nx(nx_), ny(ny_) {}

  void invalidate() {
    jac_valid = false;
    lu_valid = false;
  }

  void refresh(const DaeView& view, const Eigen::VectorXd& x, const Eigen::VectorXd& y,
               const Eigen::VectorXd& u) {
    jac = dae_jacobian(view, x, y, u);
    jac_valid = true;
    jac_age = 0;
    lu_valid = false;
  }

  void factor(double h) {
    if (lu_valid && lu_h == h) return;
    Eigen::MatrixXd m(nx + ny, nx + ny);
    m.topLeftCorner(nx, nx) =
        Eigen::MatrixXd::Identity(nx, nx) - kD * h * jac.fx;
    m.topRightCorner(nx, ny) = -kD * h * jac.fy;
    m.bottomLeftCorner(ny, nx) = jac.gx;
    m.bottomRightCorner(ny, ny) = jac.gy;
    lu.compute(m);
    lu_valid = true;
    lu_h = h;
  }
};

double weighted_rms(const Eigen::VectorXd& v, const Eigen::VectorXd& scale_ref,
                    double rel_tol, double abs_tol) {
  double acc = 0.0;
  for (int i = 0; i < v.size(); ++i) {
    const double w = abs_tol + rel_tol * std::abs(scale_ref[i]);
    acc += (v[i] / w) * (v[i] / w);
  }
  return std::sqrt(acc / static_cast<double>(v.size()));
}

// Solve one implicit stage x_s = base + dh * f(x_s, y_s), g(x_s, y_s) = 0
// with a frozen factorization. Returns false when Newton stalls.
bool solve_stage(const DaeView& view, const Eigen::VectorXd& u, double dh,
                 const Eigen::VectorXd& base, Eigen::VectorXd& xs, Eigen::VectorXd& ys,
                 const Workspace& ws, double rel_tol, double abs_tol) {
  const int nx = ws.nx, ny = ws.ny;
  Eigen::VectorXd rf, rg, r(nx + ny), dz;
  for (int it = 0; it < 8; ++it) {
    view.f(xs, ys, u, rf);
    view.g(xs, ys, u, rg);
    r.head(nx) = xs - base - dh * rf;
    r.tail(ny) = rg;
    if (!r.allFinite()) return false;
    if (r.lpNorm<Eigen::Infinity>() <=
        1e-13 * std::max(1.0, xs.lpNorm<Eigen::Infinity>()))
      return true;
    dz = ws.lu.solve(-r);
    if (!dz.allFinite()) return false;
    xs += dz.head(nx);
    ys += dz.tail(ny);
    double acc = 0.0;
    for (int i = 0; i < nx; ++i) {
      const double w = abs_tol + rel_tol * std::abs(xs[i]);
      acc += (dz[i] / w) * (dz[i] / w);
    }
    for (int i = 0; i < ny; ++i) {
      const double w = abs_tol + rel_tol * std::abs(ys[i]);
      acc += (dz[nx + i] / w) * (dz[nx + i] / w);
    }
    if (std::sqrt(acc / static_cast<double>(nx + ny)) < 0.1) return true;
  }
  return false;
}

struct StepOutcome {
  bool newton_ok = false;
  Eigen::VectorXd x, y, est;
};

// One TR-BDF2 step with a prefactored workspace; est is the stiffly damped
// third-order error estimate.
StepOutcome attempt_step(const DaeView& view, const Eigen::VectorXd& u, double h,
                         const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                         const Workspace& ws, double rel_tol, double abs_tol) {
  StepOutcome out;
  const int nx = ws.nx, ny = ws.ny;

  Eigen::VectorXd f_n;
  view.f(x, y, u, f_n);

  Eigen::VectorXd xg = x + kGamma * h * f_n;
  Eigen::VectorXd yg = y;
  const Eigen::VectorXd base_tr = x + kD * h * f_n;
  if (!solve_stage(view, u, kD * h, base_tr, xg, yg, ws, rel_tol, abs_tol)) return out;

  Eigen::VectorXd f_g;
  view.f(xg, yg, u, f_g);

  Eigen::VectorXd xb = x + (xg - x) / kGamma;
  Eigen::VectorXd yb = yg + (yg - y) * ((1.0 - kGamma) / kGamma);
  const Eigen::VectorXd base_b = kA1 * xg + kA2 * x;
  if (!solve_stage(view, u, kD * h, base_b, xb, yb, ws, rel_tol, abs_tol)) return out;

  Eigen::VectorXd f_1;
  view.f(xb, yb, u, f_1);

  const Eigen::VectorXd raw =
      kErrC * h *
      (f_n / kGamma - f_g / (kGamma * (1.0 - kGamma)) + f_1 / (1.0 - kGamma));
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nx + ny);
  rhs.head(nx) = raw;
  const Eigen::VectorXd filtered = ws.lu.solve(rhs);
  if (!filtered.allFinite()) return out;

  out.newton_ok = true;
  out.x = std::move(xb);
  out.y = std::move(yb);
  out.est = filtered.head(nx);
  return out;
}

}  // namespace

int TimeSeries::column_index(const std::string& name) const {
  for (size_t i = 0; i < columns.size(); ++i)
    if (columns[i] == name) return static_cast<int>(i);
  return -1;
}

Event parse_event_spec(const std::string& spec) {
  const size_t p1 = spec.find(':');
  const size_t p2 = p1 == std::string::npos ? std::string::npos : spec.find(':', p1 + 1);
  const size_t at = p2 == std::string::npos ? std::string::npos : spec.find('@', p2 + 1);
  if (p1 == std::string::npos || p2 == std::string::npos || at == std::string::npos ||
      p1 == 0)
    throw UnknownTarget(spec);

  Event ev;
  ev.unit = spec.substr(0, p1);
  const std::string target = spec.substr(p1 + 1, p2 - p1 - 1);
  if (target == "pm")
    ev.input = EventInput::MechanicalPowerRef;
  else if (target == "vref")
    ev.input = EventInput::VoltageRef;
  else
    throw UnknownTarget(spec);

  std::string value = spec.substr(p2 + 1, at - p2 - 1);
  if (value.empty()) throw UnknownTarget(spec);
  if (value.back() == '%') {
    ev.kind = EventKind::StepRelative;
    value.pop_back();
  } else {
    ev.kind = EventKind::StepAbsolute;
  }
  const char* vc = value.c_str();
  char* end = nullptr;
  ev.value = std::strtod(vc, &end);
  if (end == vc || *end != '\0') throw UnknownTarget(spec);
  if (ev.kind == EventKind::StepRelative) ev.value /= 100.0;

  const std::string when = spec.substr(at + 1);
  const char* tc = when.c_str();
  ev.time = std::strtod(tc, &end);
  if (end == tc || *end != '\0' || !(ev.time >= 0.0)) throw UnknownTarget(spec);
  return ev;
}

void apply_event(const DynamicSystem& sys, const Event& ev, Eigen::VectorXd& u) {
  int unit_index = -1;
  for (size_t k = 0; k < sys.units().size(); ++k)
    if (sys.units()[k].name == ev.unit) unit_index = static_cast<int>(k);
  if (unit_index < 0) throw UnknownTarget(ev.unit);

  const int i = 2 * unit_index + (ev.input == EventInput::MechanicalPowerRef ? 0 : 1);
  if (ev.kind == EventKind::StepAbsolute) {
    u[i] += ev.value;
  } else {
    const double ref = sys.input_reference(i);
    u[i] = (ref + u[i]) * (1.0 + ev.value) - ref;
  }
}

StepResult trbdf2_step(const DaeView& view, const Eigen::VectorXd& u, double h,
                       const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  Workspace ws(view.nx, view.ny);
  ws.refresh(view, x, y, u);
  ws.factor(h);
  const StepOutcome o = attempt_step(view, u, h, x, y, ws, 1e-6, 1e-9);
  if (!o.newton_ok) throw NewtonFailure(0.0, "stage iteration stalled");
  StepResult r;
  r.x = o.x;
  r.y = o.y;
  r.error_estimate = o.est;
  return r;
}

TimeSeries simulate_from(const DynamicSystem& sys, const std::vector<Event>& events,
                         const SimOptions& opt, const Eigen::VectorXd& x_init,
                         const Eigen::VectorXd& y_init) {
  const DaeView view = make_view(sys);
  const int nx = view.nx, ny = view.ny;
  const int n_units = static_cast<int>(sys.units().size());
  const int n_buses = static_cast<int>(sys.system_case().buses.size());

  Eigen::VectorXd x = x_init, y = y_init, u = sys.u0();

  std::vector<Event> evs = events;
  std::stable_sort(evs.begin(), evs.end(),
                   [](const Event& a, const Event& b) { return a.time < b.time; });

  TimeSeries ts;
  for (const auto& un : sys.units()) {
    ts.columns.push_back(un.name + ".delta_deg");
    ts.columns.push_back(un.name + ".omega_pu");
    ts.columns.push_back(un.name + ".v_terminal");
    ts.columns.push_back(un.name + ".p_elec");
    ts.columns.push_back(un.name + ".p_accel");
    ts.columns.push_back(un.name + ".efd");
    ts.columns.push_back(un.name + ".vs_pss");
  }
  for (int i = 0; i < n_buses; ++i)
    ts.columns.push_back("B" + std::to_string(sys.system_case().buses[static_cast<size_t>(i)].id) +
                         ".v_mag");
  ts.data.assign(ts.columns.size(), {});

  auto record = [&](double t_now) {
    ts.t.push_back(t_now);
    size_t c = 0;
    for (int k = 0; k < n_units; ++k) {
      const DynamicSystem::UnitOutputs o = sys.unit_outputs(k, x, y, u);
      ts.data[c++].push_back(o.delta_deg);
      ts.data[c++].push_back(o.omega_pu);
      ts.data[c++].push_back(o.v_terminal);
      ts.data[c++].push_back(o.p_elec);
      ts.data[c++].push_back(o.p_accel);
      ts.data[c++].push_back(o.efd);
      ts.data[c++].push_back(o.vs_pss);
    }
    for (int i = 0; i < n_buses; ++i)
      ts.data[c++].push_back(std::abs(sys.bus_voltage(y, i)));
  };

  record(0.0);
  double t = 0.0;
  double next_out = opt.output_dt;
  size_t ev_i = 0;
  Workspace ws(nx, ny);
  double h = std::min(opt.max_step, 1e-3);

  while (t < opt.t_end - 1e-12) {
    for (; ev_i < evs.size() && evs[ev_i].time <= t + 1e-12; ++ev_i) {
      apply_event(sys, evs[ev_i], u);
      ws.invalidate();
    }

    double t_stop = std::min(opt.t_end, next_out);
    if (ev_i < evs.size()) t_stop = std::min(t_stop, evs[ev_i].time);
    const double gap = t_stop - t;

    // At (numerical) equilibrium the solution is constant: jump the gap.
    if (sys.residual_inf_norm(x, y, u) <=
        kEquilibriumHold * std::max(1.0, x.lpNorm<Eigen::Infinity>())) {
      t = t_stop;
      while (next_out <= t + 1e-9) {
        record(t);
        next_out += opt.output_dt;
      }
      continue;
    }

    double h_try = std::min(h, gap);
    bool fresh = false;
    for (;;) {
      if (!ws.jac_valid || ws.jac_age >= kJacMaxAge) {
        ws.refresh(view, x, y, u);
        fresh = true;
      }
      ws.factor(h_try);
      const StepOutcome o = attempt_step(view, u, h_try, x, y, ws, opt.rel_tol, opt.abs_tol);

      if (!o.newton_ok) {
        if (!fresh) {
          ws.refresh(view, x, y, u);
          fresh = true;
          continue;
        }
        h_try *= 0.25;
        if (h_try < opt.h_min) throw StepUnderflow(t);
        continue;
      }

      const double wrms = weighted_rms(o.est, o.x, opt.rel_tol, opt.abs_tol);
      if (wrms <= 1.0) {
        x = o.x;
        y = o.y;
        double t_new = t + h_try;
        if (std::abs(t_new - t_stop) <= 1e-9) t_new = t_stop;
        t = t_new;
        ws.jac_age++;
        while (next_out <= t + 1e-9) {
          record(t);
          next_out += opt.output_dt;
        }
        const double factor =
            wrms > 0.0 ? std::clamp(0.9 * std::pow(wrms, -1.0 / 3.0), 0.2, 2.0) : 2.0;
        h = std::clamp(h_try * factor, opt.h_min, opt.max_step);
        break;
      }

      const double factor = std::max(0.2, 0.9 * std::pow(wrms, -1.0 / 3.0));
      h_try *= factor;
      if (h_try < opt.h_min) throw StepUnderflow(t);
    }
  }

  if (ts.t.empty() || ts.t.back() < opt.t_end - 1e-9) record(opt.t_end);
  ts.x_final = x;
  ts.y_final = y;
  return ts;
}

TimeSeries simulate(const DynamicSystem& sys, const std::vector<Event>& events,
                    const SimOptions& opt) {
  return simulate_from(sys, events, opt, sys.x0(), sys.y0());
}

}  // namespace gridmodal
