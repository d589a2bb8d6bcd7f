#include "gridmodal/power_flow.hpp"

#include <cmath>
#include <complex>

#include "gridmodal/errors.hpp"
#include "gridmodal/system_model.hpp"
#include "gridmodal/ybus.hpp"

namespace gridmodal {

namespace {

struct LoadTotals {
  double p = 0.0, q = 0.0;       // pu drawn at voltage v
  double dp_dv = 0.0, dq_dv = 0.0;
};

// Aggregate voltage-dependent load at one bus, pu, with voltage sensitivity.
LoadTotals bus_load(const PowerSystemCase& sys, const std::vector<const LoadModel*>& loads,
                    double v) {
  LoadTotals t;
  for (const LoadModel* ld : loads) {
    const auto [p_mw, q_mvar] = load_power(*ld, v);
    t.p += p_mw / sys.base.s_base;
    t.q += q_mvar / sys.base.s_base;
    t.dp_dv += ld->a * (p_mw / sys.base.s_base) / v;
    t.dq_dv += ld->b * (q_mvar / sys.base.s_base) / v;
  }
  return t;
}

}  // namespace

PowerFlowSolution solve_power_flow(const PowerSystemCase& sys, const PfOptions& opt) {
  const int n = static_cast<int>(sys.buses.size());
  const Eigen::MatrixXcd y = build_ybus(sys);

  std::vector<std::vector<const LoadModel*>> loads(n);
  for (const auto& ld : sys.loads) loads[sys.bus_index(ld.bus)].push_back(&ld);

  // Scheduled generation, pu. The slack schedule is irrelevant.
  Eigen::VectorXd p_gen = Eigen::VectorXd::Zero(n);
  for (const auto& un : sys.units)
    p_gen[sys.bus_index(un.bus)] += un.p_set / sys.base.s_base;

  const int slack = sys.slack_bus_index();
  std::vector<int> ang_vars;   // buses with a free angle
  std::vector<int> mag_vars;   // buses with a free magnitude
  for (int i = 0; i < n; ++i) {
    if (i == slack) continue;
    ang_vars.push_back(i);
    if (sys.buses[i].kind == BusKind::PQ) mag_vars.push_back(i);
  }
  const int n_ang = static_cast<int>(ang_vars.size());
  const int n_mag = static_cast<int>(mag_vars.size());
  const int n_var = n_ang + n_mag;

  Eigen::VectorXd vm(n), va(n);
  for (int i = 0; i < n; ++i) {
    const auto& b = sys.buses[i];
    vm[i] = (b.kind == BusKind::PQ) ? 1.0 : b.v_set;
    va[i] = (b.kind == BusKind::Slack) ? b.angle_set : 0.0;
  }

  if (!opt.flat_start && n_ang > 0) {
    // DC seed: angles from B' theta = P with constant-power load estimates at v0.
    Eigen::MatrixXd bp = Eigen::MatrixXd::Zero(n_ang, n_ang);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n_ang);
    std::vector<int> pos(n, -1);
    for (int k = 0; k < n_ang; ++k) pos[ang_vars[k]] = k;
    for (const auto& br : sys.branches) {
      const int i = sys.bus_index(br.from_bus), j = sys.bus_index(br.to_bus);
      const Eigen::Vector3d pi = branch_pi_totals(br);
      const double bij = 1.0 / pi[1];
      if (pos[i] >= 0) bp(pos[i], pos[i]) += bij;
      if (pos[j] >= 0) bp(pos[j], pos[j]) += bij;
      if (pos[i] >= 0 && pos[j] >= 0) {
        bp(pos[i], pos[j]) -= bij;
        bp(pos[j], pos[i]) -= bij;
      }
    }
    for (int k = 0; k < n_ang; ++k) {
      const int i = ang_vars[k];
      double p = p_gen[i];
      for (const LoadModel* ld : loads[i]) p -= ld->p0 / sys.base.s_base;
      rhs[k] = p;
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(bp);
    if (lu.isInvertible()) {
      const Eigen::VectorXd theta = lu.solve(rhs);
      for (int k = 0; k < n_ang; ++k) va[ang_vars[k]] = theta[k] + va[slack];
    }
  }

  PowerFlowSolution sol;
  auto calc_injection = [&](int i) -> std::complex<double> {
    std::complex<double> acc(0.0, 0.0);
    for (int j = 0; j < n; ++j) acc += y(i, j) * std::polar(vm[j], va[j]);
    return std::polar(vm[i], va[i]) * std::conj(acc);
  };

  for (int iter = 1; iter <= opt.max_iter; ++iter) {
    // Mismatch: scheduled minus calculated injection, loads at today's voltage.
    Eigen::VectorXd mis(n_var);
    std::vector<LoadTotals> lt(n);
    for (int i = 0; i < n; ++i) lt[i] = bus_load(sys, loads[i], vm[i]);
    std::vector<std::complex<double>> s_calc(n);
    for (int i = 0; i < n; ++i) s_calc[i] = calc_injection(i);

    for (int k = 0; k < n_ang; ++k) {
      const int i = ang_vars[k];
      mis[k] = p_gen[i] - lt[i].p - s_calc[i].real();
    }
    for (int k = 0; k < n_mag; ++k) {
      const int i = mag_vars[k];
      mis[n_ang + k] = -lt[i].q - s_calc[i].imag();
    }

    const double norm = n_var == 0 ? 0.0 : mis.lpNorm<Eigen::Infinity>();
    sol.mismatch_history.push_back(norm);
    if (norm <= opt.tolerance) {
      sol.iterations = iter;
      sol.max_mismatch = norm;
      break;
    }
    if (!std::isfinite(norm) || norm > 1e8) throw Diverged(iter, norm);
    if (iter == opt.max_iter) throw Diverged(iter, norm);

    // Polar Jacobian of the calculated injections, with the load sensitivity
    // folded into the d/dV columns (mismatch derivative, sign absorbed).
    Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(n_var, n_var);
    auto v_at = [&](int i) { return std::polar(vm[i], va[i]); };

    for (int r = 0; r < n_var; ++r) {
      const bool row_p = r < n_ang;
      const int i = row_p ? ang_vars[r] : mag_vars[r - n_ang];
      for (int c = 0; c < n_var; ++c) {
        const bool col_ang = c < n_ang;
        const int j = col_ang ? ang_vars[c] : mag_vars[c - n_ang];
        double d = 0.0;
        const std::complex<double> yij = y(i, j);
        const double g = yij.real(), b = yij.imag();
        const double th = va[i] - va[j];
        if (i != j) {
          const double vivj = vm[i] * vm[j];
          if (row_p && col_ang) d = vivj * (g * std::sin(th) - b * std::cos(th));
          else if (row_p) d = vm[i] * (g * std::cos(th) + b * std::sin(th));
          else if (col_ang) d = -vivj * (g * std::cos(th) + b * std::sin(th));
          else d = vm[i] * (g * std::sin(th) - b * std::cos(th));
        } else {
          const double p = s_calc[i].real(), q = s_calc[i].imag();
          if (row_p && col_ang) d = -q - b * vm[i] * vm[i];
          else if (row_p) d = p / vm[i] + g * vm[i];
          else if (col_ang) d = p - g * vm[i] * vm[i];
          else d = q / vm[i] - b * vm[i];
        }
        // d(mismatch)/dx = -d(S_calc)/dx - d(load)/dx
        double dm = -d;
        if (!col_ang && i == j) {
          if (row_p) dm -= lt[i].dp_dv;
          else dm -= lt[i].dq_dv;
        }
        jac(r, c) = dm;
      }
    }

    Eigen::FullPivLU<Eigen::MatrixXd> lu(jac);
    if (!lu.isInvertible()) throw SingularJacobian(iter);
    const Eigen::VectorXd dx = lu.solve(-mis);
    if (!dx.allFinite()) throw SingularJacobian(iter);

    for (int k = 0; k < n_ang; ++k) va[ang_vars[k]] += dx[k];
    for (int k = 0; k < n_mag; ++k) vm[mag_vars[k]] += dx[n_ang + k];
    for (int k = 0; k < n_mag; ++k)
      if (vm[mag_vars[k]] <= 0) throw Diverged(iter, norm);
  }

  sol.v_mag = vm;
  sol.v_ang = va;
  sol.p_inj.resize(n);
  sol.q_inj.resize(n);
  for (int i = 0; i < n; ++i) {
    const std::complex<double> s = calc_injection(i);
    sol.p_inj[i] = s.real();
    sol.q_inj[i] = s.imag();
  }
  return sol;
}

std::pair<double, double> bus_injection(const PowerSystemCase& sys,
                                        const Eigen::VectorXd& v_mag,
                                        const Eigen::VectorXd& v_ang, int bus_id) {
  const Eigen::MatrixXcd y = build_ybus(sys);
  const int n = static_cast<int>(sys.buses.size());
  const int i = sys.bus_index(bus_id);
  std::complex<double> acc(0.0, 0.0);
  for (int j = 0; j < n; ++j) acc += y(i, j) * std::polar(v_mag[j], v_ang[j]);
  const std::complex<double> s = std::polar(v_mag[i], v_ang[i]) * std::conj(acc);
  return {s.real(), s.imag()};
}

}  // namespace gridmodal
