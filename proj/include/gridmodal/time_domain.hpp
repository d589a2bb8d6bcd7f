#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "gridmodal/dynamic_system.hpp"

namespace gridmodal {

enum class EventInput { MechanicalPowerRef, VoltageRef };
enum class EventKind { StepRelative, StepAbsolute };

struct Event {
  double time = 0.0;
  std::string unit;
  EventInput input = EventInput::MechanicalPowerRef;
  EventKind kind = EventKind::StepRelative;
  double value = 0.0;   // fraction for StepRelative, pu for StepAbsolute
};

/// Grammar: "<unit>:<pm|vref>:<+|-><value>[%]@<time>".
/// A '%' suffix selects StepRelative with value/100, otherwise StepAbsolute.
Event parse_event_spec(const std::string& spec);

/// Mutates the input vector in place. StepRelative scales the effective
/// reference (ref0 + offset) by 1 + fraction; StepAbsolute adds pu.
void apply_event(const DynamicSystem& sys, const Event& ev, Eigen::VectorXd& u);

struct SimOptions {
  double t_end = 10.0;
  double max_step = 0.02;
  double output_dt = 0.02;
  double rel_tol = 1e-6;
  double abs_tol = 1e-9;
  double h_min = 1e-10;
};

struct TimeSeries {
  std::vector<double> t;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> data;   // data[column][sample]
  Eigen::VectorXd x_final, y_final;        // integrator state at t_end

  int column_index(const std::string& name) const;
};

/// TR-BDF2 (trapezoidal stage to t + gamma*h, BDF2-form stage to t + h,
/// gamma = 2 - sqrt(2)) with the embedded third-order error estimate driving
/// the step size. Steps land exactly on event times and on the output grid.
TimeSeries simulate(const DynamicSystem& sys, const std::vector<Event>& events,
                    const SimOptions& opt = {});

/// As simulate(), but starting from a caller-supplied state (equilibrium
/// perturbation studies). x_init/y_init must satisfy g within Newton reach.
TimeSeries simulate_from(const DynamicSystem& sys, const std::vector<Event>& events,
                         const SimOptions& opt, const Eigen::VectorXd& x_init,
                         const Eigen::VectorXd& y_init);

/// One TR-BDF2 step on a bare DAE view with the inputs frozen; exposed for
/// order and stability verification. Returns the embedded error estimate.
struct StepResult {
  Eigen::VectorXd x;
  Eigen::VectorXd y;
  Eigen::VectorXd error_estimate;
};
StepResult trbdf2_step(const DaeView& view, const Eigen::VectorXd& u, double h,
                       const Eigen::VectorXd& x, const Eigen::VectorXd& y);

}  // namespace gridmodal
