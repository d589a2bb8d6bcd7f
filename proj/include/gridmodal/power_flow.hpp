#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "gridmodal/types.hpp"

namespace gridmodal {

struct PfOptions {
  double tolerance = 1e-8;   // infinity norm of the pu mismatch vector
  int max_iter = 30;
  bool flat_start = true;    // false seeds angles from a DC power flow
};

struct PowerFlowSolution {
  Eigen::VectorXd v_mag;     // pu
  Eigen::VectorXd v_ang;     // rad
  Eigen::VectorXd p_inj;     // net pu injection into the network
  Eigen::VectorXd q_inj;
  int iterations = 0;
  double max_mismatch = 0.0;
  std::vector<double> mismatch_history;  // infinity norm per iteration

  std::complex<double> voltage(int bus_index) const {
    return std::polar(v_mag[bus_index], v_ang[bus_index]);
  }
};

/// Full-Jacobian Newton-Raphson in polar coordinates. Voltage-dependent loads
/// are re-evaluated inside the mismatch each iteration and their voltage
/// sensitivities enter the Jacobian. No reactive limits in this version.
PowerFlowSolution solve_power_flow(const PowerSystemCase& sys, const PfOptions& opt = {});

/// Net injection seen from the network at one bus for a given voltage profile.
std::pair<double, double> bus_injection(const PowerSystemCase& sys,
                                        const Eigen::VectorXd& v_mag,
                                        const Eigen::VectorXd& v_ang,
                                        int bus_id);

}  // namespace gridmodal
