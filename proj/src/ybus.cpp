#include "gridmodal/ybus.hpp"

#include "gridmodal/line_model.hpp"

namespace gridmodal {

Eigen::Vector3d branch_pi_totals(const Branch& br) {
  if (br.model == LineModel::DistributedExactPi && br.length_km > 0) {
    const PiSection pi = long_line_to_pi(br.r / br.length_km, br.x / br.length_km,
                                         br.b_shunt / br.length_km, br.length_km);
    return {pi.r, pi.x, pi.b_shunt};
  }
  return {br.r, br.x, br.b_shunt};
}

Eigen::MatrixXcd build_ybus(const PowerSystemCase& sys) {
  const int n = static_cast<int>(sys.buses.size());
  Eigen::MatrixXcd y = Eigen::MatrixXcd::Zero(n, n);

  for (const auto& br : sys.branches) {
    const Eigen::Vector3d pi = branch_pi_totals(br);
    const std::complex<double> z(pi[0], pi[1]);
    const std::complex<double> y_series = 1.0 / z;
    const std::complex<double> y_half(0.0, pi[2] / 2.0);

    const int i = sys.bus_index(br.from_bus);
    const int j = sys.bus_index(br.to_bus);
    y(i, i) += y_series + y_half;
    y(j, j) += y_series + y_half;
    y(i, j) -= y_series;
    y(j, i) -= y_series;
  }
  return y;
}

}  // namespace gridmodal
