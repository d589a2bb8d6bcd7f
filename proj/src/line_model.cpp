#include "gridmodal/line_model.hpp"

#include <cmath>
#include <complex>

#include "gridmodal/errors.hpp"

namespace gridmodal {

namespace {

using cplx = std::complex<double>;

// sinh(u)/u with a series fallback around the removable singularity.
cplx sinhc(cplx u) {
  if (std::abs(u) < 1e-6) return 1.0 + u * u / 6.0;
  return std::sinh(u) / u;
}

// tanh(u)/u, same treatment.
cplx tanhc(cplx u) {
  if (std::abs(u) < 1e-6) return 1.0 - u * u / 3.0;
  return std::tanh(u) / u;
}

}  // namespace

PiSection long_line_to_pi(double r_per_km, double x_per_km, double b_per_km,
                          double length_km) {
  if (length_km <= 0) throw DegenerateLine("non-positive length");
  const cplx z_total(r_per_km * length_km, x_per_km * length_km);
  const cplx y_total(0.0, b_per_km * length_km);
  if (z_total == cplx(0.0, 0.0)) throw DegenerateLine("zero series impedance");

  // gamma*l = sqrt(z*y)*l is computable from the totals alone.
  const cplx u = std::sqrt(z_total * y_total);
  const cplx z_exact = z_total * sinhc(u);
  const cplx y_exact = y_total * tanhc(u / 2.0);

  return {z_exact.real(), z_exact.imag(), y_exact.imag()};
}

}  // namespace gridmodal
