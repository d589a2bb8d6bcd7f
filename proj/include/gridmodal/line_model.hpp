#pragma once

namespace gridmodal {

/// Lumped PI equivalent: series r + jx, total shunt susceptance b (split half
/// per end at admittance assembly).
struct PiSection {
  double r = 0.0;
  double x = 0.0;
  double b_shunt = 0.0;
};

/// Exact distributed-parameter PI equivalent of a line described by per-km
/// per-unit constants. Series  Zc*sinh(gamma*l), total shunt 2*tanh(gamma*l/2)/Zc,
/// computed as correction factors on the nominal totals so that zero-charging
/// lines degrade gracefully to the nominal PI. The vanishing shunt conductance
/// produced by the exact transformation is dropped.
PiSection long_line_to_pi(double r_per_km, double x_per_km, double b_per_km,
                          double length_km);

constexpr double kLongLineThresholdKm = 25.0;

}  // namespace gridmodal
