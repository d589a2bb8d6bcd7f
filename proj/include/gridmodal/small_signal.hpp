#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "gridmodal/dynamic_system.hpp"

namespace gridmodal {

struct StateMatrix {
  Eigen::MatrixXd a;
  std::vector<std::string> labels;
};

enum class ModeCategory {
  NonOscillatory,
  InterArea,     // [0.3, 1.0) Hz
  LocalPlant,    // [1.0, 2.0) Hz
  InterPlant,    // [2.0, 3.0) Hz
  ControlMode,   // [4.0, 10.0) Hz
  Torsional,     // [10.0, 46.0] Hz
  Unclassified,
};

const char* to_string(ModeCategory c);

/// Half-open, lower-inclusive frequency bands; exact zero is non-oscillatory,
/// gaps and anything above 46 Hz stay unclassified.
ModeCategory classify_mode(double freq_hz);

/// zeta = -Re(lambda) / |lambda|; +-1 for real modes. Throws ZeroEigenvalue.
double damping_ratio(std::complex<double> lambda);

struct Mode {
  std::complex<double> lambda;    // Im >= 0 representative of its pair
  double freq_hz = 0.0;
  double damping = 0.0;
  ModeCategory category = ModeCategory::Unclassified;
  // Top participating states, largest first.
  int dominant_state_1 = -1;
  int dominant_state_2 = -1;
  double p_1 = 0.0;
  double p_2 = 0.0;
};

struct ModalResult {
  std::vector<Mode> modes;                 // conjugate pairs reported once
  Eigen::MatrixXd participation;           // state x mode, columns sum to 1
  std::vector<std::string> labels;
  bool stable = false;                     // max Re(lambda) below the rigid-body tolerance
  double max_real = 0.0;
  int least_damped = -1;                   // index into modes, oscillatory preferred
};

/// Central finite differences with per-variable step h_rel*max(1, |v|),
/// algebraic variables eliminated through the Schur complement
/// A = f_x - f_y * g_y^{-1} * g_x.
Eigen::MatrixXd linearize_at(const DaeView& view, const Eigen::VectorXd& x,
                             const Eigen::VectorXd& y, const Eigen::VectorXd& u,
                             double h_rel = 1e-6);

/// Input sensitivity of the reduced model, same elimination.
Eigen::MatrixXd input_matrix_at(const DaeView& view, const Eigen::VectorXd& x,
                                const Eigen::VectorXd& y, const Eigen::VectorXd& u,
                                double h_rel = 1e-6);

/// Checks the stored equilibrium (NotAtEquilibrium above 1e-6) and reduces.
StateMatrix linearize(const DynamicSystem& sys, double h_rel = 1e-6);

/// |v_ki * w_ki| column-normalized; w rows come from V^{-1}.
Eigen::MatrixXd participation_factors(const Eigen::MatrixXd& a);

/// Dense full-spectrum analysis with participation and classification.
ModalResult eigen_analysis(const StateMatrix& sm);

/// Finite-difference Jacobian blocks of a DAE, shared by the linearizer and
/// the implicit integrator.
struct DaeJacobian {
  Eigen::MatrixXd fx, fy, gx, gy;
};
DaeJacobian dae_jacobian(const DaeView& view, const Eigen::VectorXd& x,
                         const Eigen::VectorXd& y, const Eigen::VectorXd& u,
                         double h_rel = 1e-6);

}  // namespace gridmodal
