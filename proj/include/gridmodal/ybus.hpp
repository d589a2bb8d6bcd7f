#pragma once

#include <Eigen/Dense>
#include <complex>

#include "gridmodal/types.hpp"

namespace gridmodal {

/// Bus admittance matrix on the system base. Long branches
/// (model == DistributedExactPi) enter through their exact PI equivalent.
Eigen::MatrixXcd build_ybus(const PowerSystemCase& sys);

/// PI totals a branch contributes to the admittance matrix: (r, x, b_shunt),
/// exact-PI corrected when the branch is flagged long.
Eigen::Vector3d branch_pi_totals(const Branch& br);

}  // namespace gridmodal
