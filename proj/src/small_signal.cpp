#include "gridmodal/small_signal.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>

#include "gridmodal/errors.hpp"

namespace gridmodal {

namespace {

// Perturb one entry of a copy of v by +-h and report the central difference
// of the residual; shared by all four Jacobian blocks.
void fd_columns(const std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&)>& eval,
                Eigen::VectorXd v, double h_rel, Eigen::MatrixXd& out, int rows) {
  const int n = static_cast<int>(v.size());
  out.resize(rows, n);
  Eigen::VectorXd rp, rm;
  for (int k = 0; k < n; ++k) {
    const double save = v[k];
    const double h = h_rel * std::max(1.0, std::abs(save));
    v[k] = save + h;
    eval(v, rp);
    v[k] = save - h;
    eval(v, rm);
    v[k] = save;
    out.col(k) = (rp - rm) / (2.0 * h);
  }
}

}  // namespace

DaeJacobian dae_jacobian(const DaeView& view, const Eigen::VectorXd& x,
                         const Eigen::VectorXd& y, const Eigen::VectorXd& u,
                         double h_rel) {
  DaeJacobian j;
  fd_columns([&](const Eigen::VectorXd& xv, Eigen::VectorXd& r) { view.f(xv, y, u, r); },
             x, h_rel, j.fx, view.nx);
  fd_columns([&](const Eigen::VectorXd& yv, Eigen::VectorXd& r) { view.f(x, yv, u, r); },
             y, h_rel, j.fy, view.nx);
  fd_columns([&](const Eigen::VectorXd& xv, Eigen::VectorXd& r) { view.g(xv, y, u, r); },
             x, h_rel, j.gx, view.ny);
  fd_columns([&](const Eigen::VectorXd& yv, Eigen::VectorXd& r) { view.g(x, yv, u, r); },
             y, h_rel, j.gy, view.ny);
  return j;
}

Eigen::MatrixXd linearize_at(const DaeView& view, const Eigen::VectorXd& x,
                             const Eigen::VectorXd& y, const Eigen::VectorXd& u,
                             double h_rel) {
  const DaeJacobian j = dae_jacobian(view, x, y, u, h_rel);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(j.gy);
  if (!lu.isInvertible()) throw SingularAlgebraicJacobian();
  return j.fx - j.fy * lu.solve(j.gx);
}

Eigen::MatrixXd input_matrix_at(const DaeView& view, const Eigen::VectorXd& x,
                                const Eigen::VectorXd& y, const Eigen::VectorXd& u,
                                double h_rel) {
  const DaeJacobian j = dae_jacobian(view, x, y, u, h_rel);
  Eigen::MatrixXd fu, gu;
  fd_columns([&](const Eigen::VectorXd& uv, Eigen::VectorXd& r) { view.f(x, y, uv, r); },
             u, h_rel, fu, view.nx);
  fd_columns([&](const Eigen::VectorXd& uv, Eigen::VectorXd& r) { view.g(x, y, uv, r); },
             u, h_rel, gu, view.ny);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(j.gy);
  if (!lu.isInvertible()) throw SingularAlgebraicJacobian();
  return fu - j.fy * lu.solve(gu);
}

StateMatrix linearize(const DynamicSystem& sys, double h_rel) {
  const double res = sys.residual_inf_norm(sys.x0(), sys.y0(), sys.u0());
  if (!(res <= 1e-6)) throw NotAtEquilibrium(res);
  StateMatrix sm;
  sm.a = linearize_at(make_view(sys), sys.x0(), sys.y0(), sys.u0(), h_rel);
  sm.labels = sys.state_names();
  return sm;
}

const char* to_string(ModeCategory c) {
  switch (c) {
    case ModeCategory::NonOscillatory: return "non_oscillatory";
    case ModeCategory::InterArea: return "inter_area";
    case ModeCategory::LocalPlant: return "local_plant";
    case ModeCategory::InterPlant: return "inter_plant";
    case ModeCategory::ControlMode: return "control";
    case ModeCategory::Torsional: return "torsional";
    case ModeCategory::Unclassified: return "unclassified";
  }
  return "unclassified";
}

ModeCategory classify_mode(double freq_hz) {
  if (freq_hz == 0.0) return ModeCategory::NonOscillatory;
  if (freq_hz >= 0.3 && freq_hz < 1.0) return ModeCategory::InterArea;
  if (freq_hz >= 1.0 && freq_hz < 2.0) return ModeCategory::LocalPlant;
  if (freq_hz >= 2.0 && freq_hz < 3.0) return ModeCategory::InterPlant;
  if (freq_hz >= 4.0 && freq_hz < 10.0) return ModeCategory::ControlMode;
  if (freq_hz >= 10.0 && freq_hz <= 46.0) return ModeCategory::Torsional;
  return ModeCategory::Unclassified;
}

double damping_ratio(std::complex<double> lambda) {
  const double mag = std::abs(lambda);
  if (mag == 0.0) throw ZeroEigenvalue();
  return -lambda.real() / mag;
}

Eigen::MatrixXd participation_factors(const Eigen::MatrixXd& a) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(a);
  if (es.info() != Eigen::Success) throw NoConvergence();
  const Eigen::MatrixXcd v = es.eigenvectors();
  Eigen::FullPivLU<Eigen::MatrixXcd> lu(v);
  if (!lu.isInvertible()) throw DefectiveMode();
  const Eigen::MatrixXcd w = lu.inverse();

  const int n = static_cast<int>(a.rows());
  Eigen::MatrixXd p(n, n);
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < n; ++k) p(k, i) = std::abs(v(k, i) * w(i, k));
    const double sum = p.col(i).sum();
    if (sum > 0.0) p.col(i) /= sum;
  }
  return p;
}

ModalResult eigen_analysis(const StateMatrix& sm) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(sm.a);
  if (es.info() != Eigen::Success) throw NoConvergence();
  const Eigen::VectorXcd lam = es.eigenvalues();
  const Eigen::MatrixXcd v = es.eigenvectors();
  Eigen::FullPivLU<Eigen::MatrixXcd> lu(v);
  if (!lu.isInvertible()) throw DefectiveMode();
  const Eigen::MatrixXcd w = lu.inverse();

  const int n = static_cast<int>(sm.a.rows());
  ModalResult out;
  out.labels = sm.labels;
  out.max_real = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) out.max_real = std::max(out.max_real, lam[i].real());
  // One rigid-body eigenvalue at the origin is expected when nothing pins the
  // network reference angle; anything further right is a genuine instability.
  out.stable = out.max_real < 1e-8;

  // Real Schur form gives exactly real 1x1 blocks and exactly conjugate 2x2
  // blocks, so a sign test on Im selects one representative per pair.
  std::vector<int> keep;
  for (int i = 0; i < n; ++i)
    if (lam[i].imag() >= 0.0) keep.push_back(i);
  std::sort(keep.begin(), keep.end(), [&](int a_, int b_) {
    if (lam[a_].imag() != lam[b_].imag()) return lam[a_].imag() < lam[b_].imag();
    return lam[a_].real() < lam[b_].real();
  });

  out.participation.resize(n, static_cast<int>(keep.size()));
  for (size_t m = 0; m < keep.size(); ++m) {
    const int i = keep[m];
    Mode mode;
    mode.lambda = lam[i];
    mode.freq_hz = lam[i].imag() / (2.0 * std::numbers::pi);
    const double mag = std::abs(lam[i]);
    mode.damping = mag > 0.0 ? -lam[i].real() / mag : 1.0;
    mode.category = classify_mode(mode.freq_hz);

    Eigen::VectorXd p(n);
    for (int k = 0; k < n; ++k) p[k] = std::abs(v(k, i) * w(i, k));
    const double sum = p.sum();
    if (sum > 0.0) p /= sum;
    out.participation.col(static_cast<int>(m)) = p;

    int best1 = -1, best2 = -1;
    for (int k = 0; k < n; ++k) {
      if (best1 < 0 || p[k] > p[best1]) {
        best2 = best1;
        best1 = k;
      } else if (best2 < 0 || p[k] > p[best2]) {
        best2 = k;
      }
    }
    mode.dominant_state_1 = best1;
    mode.dominant_state_2 = best2;
    mode.p_1 = best1 >= 0 ? p[best1] : 0.0;
    mode.p_2 = best2 >= 0 ? p[best2] : 0.0;
    out.modes.push_back(mode);
  }

  for (size_t m = 0; m < out.modes.size(); ++m) {
    if (out.modes[m].lambda.imag() <= 0.0) continue;
    if (out.least_damped < 0 || out.modes[m].damping < out.modes[static_cast<size_t>(out.least_damped)].damping)
      out.least_damped = static_cast<int>(m);
  }
  if (out.least_damped < 0 && !out.modes.empty()) {
    for (size_t m = 0; m < out.modes.size(); ++m)
      if (out.least_damped < 0 ||
          out.modes[m].damping < out.modes[static_cast<size_t>(out.least_damped)].damping)
        out.least_damped = static_cast<int>(m);
  }
  return out;
}

}  // namespace gridmodal
