#include <Eigen/Dense>
#include <cmath>
#include <string>
#include <vector>

#include "doctest.h"
#include "gridmodal/case_parser.hpp"
#include "gridmodal/cases.hpp"
#include "gridmodal/dynamic_system.hpp"
#include "gridmodal/errors.hpp"
#include "gridmodal/power_flow.hpp"
#include "gridmodal/time_domain.hpp"

using namespace gridmodal;

namespace {

DynamicSystem assemble_bundled(const std::string& name, const AssembleOptions& opts = {}) {
  const auto sys = parse_case_file(resolve_case_path(name));
  const auto pf = solve_power_flow(sys);
  return assemble(sys, pf, opts);
}

DaeView scalar_decay(double lambda) {
  DaeView v;
  v.nx = 1;
  v.ny = 0;
  v.nu = 0;
  v.f = [lambda](const Eigen::VectorXd& x, const Eigen::VectorXd&, const Eigen::VectorXd&,
                 Eigen::VectorXd& out) { out = lambda * x; };
  v.g = [](const Eigen::VectorXd&, const Eigen::VectorXd&, const Eigen::VectorXd&,
           Eigen::VectorXd& out) { out.resize(0); };
  return v;
}

double one_decay_step(double h) {
  const DaeView v = scalar_decay(-1.0);
  Eigen::VectorXd x(1), y(0), u(0);
  x[0] = 1.0;
  return trbdf2_step(v, u, h, x, y).x[0];
}

}  // namespace

TEST_CASE("single-step order on exponential decay is three") {
  // Local truncation error of a second-order one-step method scales as h^3.
  const double e1 = std::abs(one_decay_step(0.1) - std::exp(-0.1));
  const double e2 = std::abs(one_decay_step(0.05) - std::exp(-0.05));
  const double e3 = std::abs(one_decay_step(0.025) - std::exp(-0.025));
  const double p12 = std::log2(e1 / e2);
  const double p23 = std::log2(e2 / e3);
  CHECK(p12 > 2.9);
  CHECK(p12 < 3.2);
  CHECK(p23 > 2.9);
  CHECK(p23 < 3.2);
}

TEST_CASE("embedded error estimate tracks the true local error") {
  const double h = 0.05;
  const DaeView v = scalar_decay(-1.0);
  Eigen::VectorXd x(1), y(0), u(0);
  x[0] = 1.0;
  const StepResult r = trbdf2_step(v, u, h, x, y);
  const double true_err = std::abs(r.x[0] - std::exp(-h));
  const double est = std::abs(r.error_estimate[0]);
  CHECK(est > 0.3 * true_err);
  CHECK(est < 3.0 * true_err);
}

TEST_CASE("stiff decay collapses in one step") {
  // lambda*h = -1e6: an L-stable method drives the state to nearly zero,
  // while the trapezoidal rule alone would flip sign with magnitude ~1.
  const DaeView v = scalar_decay(-1e6);
  Eigen::VectorXd x(1), y(0), u(0);
  x[0] = 1.0;
  const StepResult r = trbdf2_step(v, u, 1.0, x, y);
  CHECK(std::abs(r.x[0]) < 1e-3);
}

TEST_CASE("fixed steps reproduce a damped oscillator through the algebraic path") {
  // x1' = x2, x2' = -w^2 z - 2 zeta w x2 with the constraint z = x1 keeps the
  // algebraic elimination inside every stage.
  const double w = 2.0 * M_PI, zeta = 0.1;
  DaeView v;
  v.nx = 2;
  v.ny = 1;
  v.nu = 0;
  v.f = [&](const Eigen::VectorXd& x, const Eigen::VectorXd& y, const Eigen::VectorXd&,
            Eigen::VectorXd& out) {
    out.resize(2);
    out[0] = x[1];
    out[1] = -w * w * y[0] - 2.0 * zeta * w * x[1];
  };
  v.g = [](const Eigen::VectorXd& x, const Eigen::VectorXd& y, const Eigen::VectorXd&,
           Eigen::VectorXd& out) {
    out.resize(1);
    out[0] = y[0] - x[0];
  };

  Eigen::VectorXd x(2), y(1), u(0);
  x << 1.0, 0.0;
  y << 1.0;
  const double h = 1e-3;
  const int n = 1000;
  for (int i = 0; i < n; ++i) {
    const StepResult r = trbdf2_step(v, u, h, x, y);
    x = r.x;
    y = r.y;
  }
  const double t = n * h;
  const double wd = w * std::sqrt(1.0 - zeta * zeta);
  const double exact =
      std::exp(-zeta * w * t) * (std::cos(wd * t) + zeta * w / wd * std::sin(wd * t));
  CHECK(std::abs(x[0] - exact) < 1e-4);
  CHECK(std::abs(y[0] - x[0]) < 1e-10);
}

TEST_CASE("event grammar round trip") {
  const Event a = parse_event_spec("G1:pm:+5%@40");
  CHECK(a.unit == "G1");
  CHECK(a.input == EventInput::MechanicalPowerRef);
  CHECK(a.kind == EventKind::StepRelative);
  CHECK(a.value == doctest::Approx(0.05));
  CHECK(a.time == 40.0);

  const Event b = parse_event_spec("Dokan:vref:-0.02@1.5");
  CHECK(b.unit == "Dokan");
  CHECK(b.input == EventInput::VoltageRef);
  CHECK(b.kind == EventKind::StepAbsolute);
  CHECK(b.value == doctest::Approx(-0.02));
  CHECK(b.time == 1.5);

  const Event c = parse_event_spec("G2:pm:-10%@0");
  CHECK(c.value == doctest::Approx(-0.10));
  CHECK(c.time == 0.0);

  CHECK_THROWS_AS(parse_event_spec(""), UnknownTarget);
  CHECK_THROWS_AS(parse_event_spec("G1:pm"), UnknownTarget);
  CHECK_THROWS_AS(parse_event_spec("G1:pm:+5%"), UnknownTarget);
  CHECK_THROWS_AS(parse_event_spec("G1:foo:+1@2"), UnknownTarget);
  CHECK_THROWS_AS(parse_event_spec(":pm:+1@2"), UnknownTarget);
  CHECK_THROWS_AS(parse_event_spec("G1:pm:@2"), UnknownTarget);
  CHECK_THROWS_AS(parse_event_spec("G1:pm:abc@2"), UnknownTarget);
  CHECK_THROWS_AS(parse_event_spec("G1:pm:+1@-2"), UnknownTarget);
  CHECK_THROWS_AS(parse_event_spec("G1:pm:+1@x"), UnknownTarget);
}

TEST_CASE("events mutate the input offsets as documented") {
  const DynamicSystem sys = assemble_bundled("smib");
  Eigen::VectorXd u = sys.u0();
  REQUIRE(u.size() == 2);
  CHECK(u.cwiseAbs().maxCoeff() == 0.0);

  Event abs_ev;
  abs_ev.unit = "G1";
  abs_ev.input = EventInput::VoltageRef;
  abs_ev.kind = EventKind::StepAbsolute;
  abs_ev.value = 0.03;
  apply_event(sys, abs_ev, u);
  CHECK(u[1] == doctest::Approx(0.03).epsilon(1e-12));
  apply_event(sys, abs_ev, u);
  CHECK(u[1] == doctest::Approx(0.06).epsilon(1e-12));

  Event rel_ev;
  rel_ev.unit = "G1";
  rel_ev.input = EventInput::MechanicalPowerRef;
  rel_ev.kind = EventKind::StepRelative;
  rel_ev.value = 0.05;
  apply_event(sys, rel_ev, u);
  const double ref = sys.input_reference(0);
  CHECK(u[0] == doctest::Approx(0.05 * ref).epsilon(1e-12));
  // Relative steps compound on the effective reference.
  apply_event(sys, rel_ev, u);
  CHECK(u[0] == doctest::Approx(ref * (1.05 * 1.05 - 1.0)).epsilon(1e-12));

  Event bad = rel_ev;
  bad.unit = "nope";
  CHECK_THROWS_AS(apply_event(sys, bad, u), UnknownTarget);
}

TEST_CASE("equilibrium persists without events") {
  const DynamicSystem sys = assemble_bundled("smib");
  SimOptions opt;
  opt.t_end = 5.0;
  const TimeSeries ts = simulate(sys, {}, opt);

  const int ic = ts.column_index("G1.omega_pu");
  REQUIRE(ic >= 0);
  for (double v : ts.data[static_cast<size_t>(ic)]) CHECK(std::abs(v - 1.0) < 1e-9);

  REQUIRE(ts.x_final.size() == sys.x0().size());
  CHECK((ts.x_final - sys.x0()).cwiseAbs().maxCoeff() < 1e-9);
  CHECK((ts.y_final - sys.y0()).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("output grid and column catalog") {
  const DynamicSystem sys = assemble_bundled("smib");
  SimOptions opt;
  opt.t_end = 1.0;
  const TimeSeries ts = simulate(sys, {}, opt);

  REQUIRE(ts.t.size() == 51);  // 0.02 s grid over one second
  CHECK(ts.t.front() == 0.0);
  CHECK(ts.t.back() == doctest::Approx(1.0).epsilon(1e-12));
  for (size_t i = 1; i < ts.t.size(); ++i)
    CHECK(ts.t[i] - ts.t[i - 1] == doctest::Approx(0.02).epsilon(1e-9));

  REQUIRE(ts.data.size() == ts.columns.size());
  for (const auto& col : ts.data) CHECK(col.size() == ts.t.size());

  for (const char* name : {"G1.delta_deg", "G1.omega_pu", "G1.v_terminal", "G1.p_elec",
                           "G1.p_accel", "G1.efd", "G1.vs_pss", "B1.v_mag", "B2.v_mag"})
    CHECK(ts.column_index(name) >= 0);
  CHECK(ts.column_index("G9.omega_pu") == -1);
}

TEST_CASE("a mechanical step accelerates the rotor after its scheduled time") {
  const DynamicSystem sys = assemble_bundled("smib");
  SimOptions opt;
  opt.t_end = 2.0;
  // Off-grid event time exercises the step snap.
  const TimeSeries ts = simulate(sys, {parse_event_spec("G1:pm:+2%@0.013")}, opt);

  const auto& omega = ts.data[static_cast<size_t>(ts.column_index("G1.omega_pu"))];
  CHECK(std::abs(omega[0] - 1.0) < 1e-12);  // sample at t=0 precedes the event
  double peak = 0.0;
  for (double v : omega) peak = std::max(peak, v - 1.0);
  CHECK(peak > 1e-5);

  const auto& pe = ts.data[static_cast<size_t>(ts.column_index("G1.p_elec"))];
  CHECK(pe.back() > pe.front());
}

TEST_CASE("simulate_from splices seamlessly") {
  const DynamicSystem sys = assemble_bundled("smib");
  const Event ev = parse_event_spec("G1:pm:+2%@0");

  SimOptions full_opt;
  full_opt.t_end = 2.0;
  const TimeSeries full = simulate(sys, {ev}, full_opt);

  SimOptions half_opt;
  half_opt.t_end = 1.0;
  const TimeSeries part1 = simulate(sys, {ev}, half_opt);
  const TimeSeries part2 = simulate_from(sys, {ev}, half_opt, part1.x_final, part1.y_final);

  const int ic = full.column_index("G1.omega_pu");
  const auto& wf = full.data[static_cast<size_t>(ic)];
  const auto& w1 = part1.data[static_cast<size_t>(ic)];
  const auto& w2 = part2.data[static_cast<size_t>(ic)];
  CHECK(std::abs(w2.front() - w1.back()) < 1e-12);
  CHECK(std::abs(w2.back() - wf.back()) < 1e-4);
}

TEST_CASE("repeated runs are bitwise identical") {
  const DynamicSystem sys = assemble_bundled("smib");
  SimOptions opt;
  opt.t_end = 3.0;
  const std::vector<Event> evs = {parse_event_spec("G1:pm:+5%@1")};
  const TimeSeries a = simulate(sys, evs, opt);
  const TimeSeries b = simulate(sys, evs, opt);
  REQUIRE(a.t == b.t);
  REQUIRE(a.columns == b.columns);
  CHECK(a.data == b.data);
  CHECK(a.x_final == b.x_final);
}

TEST_CASE("impossible tolerances underflow the step size") {
  const DynamicSystem sys = assemble_bundled("smib");
  SimOptions opt;
  opt.t_end = 0.1;
  opt.rel_tol = 1e-30;
  opt.abs_tol = 1e-30;
  opt.h_min = 1e-4;
  CHECK_THROWS_AS(simulate(sys, {parse_event_spec("G1:pm:+5%@0.005")}, opt), StepUnderflow);
}
