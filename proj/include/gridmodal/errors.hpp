#pragma once

#include <stdexcept>
#include <string>

namespace gridmodal {

/// Base class for every toolkit error. The what() string is machine-readable:
/// "<Kind>: <detail>" with key=value fields where applicable.
struct GridError : std::runtime_error {
  explicit GridError(const std::string& msg) : std::runtime_error(msg) {}
};

// ---------------------------------------------------------------- case input

struct MalformedCase : GridError {
  int line;
  MalformedCase(int line_no, const std::string& reason)
      : GridError("MalformedCase: line=" + std::to_string(line_no) + " " + reason),
        line(line_no) {}
};

struct DuplicateId : GridError {
  explicit DuplicateId(const std::string& detail) : GridError("DuplicateId: " + detail) {}
};

struct NoSlackBus : GridError {
  NoSlackBus() : GridError("NoSlackBus: case declares no slack bus") {}
};

struct MultipleSlackBuses : GridError {
  MultipleSlackBuses() : GridError("MultipleSlackBuses: more than one slack bus declared") {}
};

struct UnitOnPqBus : GridError {
  explicit UnitOnPqBus(int bus)
      : GridError("UnitOnPqBus: bus=" + std::to_string(bus)) {}
};

struct NonPositiveVoltage : GridError {
  explicit NonPositiveVoltage(double v)
      : GridError("NonPositiveVoltage: v=" + std::to_string(v)) {}
};

struct DegenerateLine : GridError {
  explicit DegenerateLine(const std::string& detail) : GridError("DegenerateLine: " + detail) {}
};

// ---------------------------------------------------------------- power flow

struct Diverged : GridError {
  int iterations;
  double mismatch;
  Diverged(int iters, double mis)
      : GridError("Diverged: iterations=" + std::to_string(iters) +
                  " mismatch=" + std::to_string(mis)),
        iterations(iters), mismatch(mis) {}
};

struct SingularJacobian : GridError {
  explicit SingularJacobian(int iteration)
      : GridError("SingularJacobian: iteration=" + std::to_string(iteration)) {}
};

// ------------------------------------------------------------------ dynamics

struct SingularStator : GridError {
  SingularStator() : GridError("SingularStator: rs^2 + xd''*xq'' is zero") {}
};

struct InitializationFailed : GridError {
  explicit InitializationFailed(const std::string& detail)
      : GridError("InitializationFailed: " + detail) {}
};

struct LimitBindingAtEquilibrium : GridError {
  LimitBindingAtEquilibrium(const std::string& unit, const std::string& limit)
      : GridError("LimitBindingAtEquilibrium: unit=" + unit + " limit=" + limit) {}
};

struct NoGeneratorAtPvBus : GridError {
  explicit NoGeneratorAtPvBus(int bus)
      : GridError("NoGeneratorAtPvBus: bus=" + std::to_string(bus)) {}
};

// -------------------------------------------------------------- small signal

struct SingularAlgebraicJacobian : GridError {
  SingularAlgebraicJacobian() : GridError("SingularAlgebraicJacobian: g_y is not invertible") {}
};

struct NotAtEquilibrium : GridError {
  double residual;
  explicit NotAtEquilibrium(double res)
      : GridError("NotAtEquilibrium: residual=" + std::to_string(res)), residual(res) {}
};

struct NoConvergence : GridError {
  NoConvergence() : GridError("NoConvergence: eigensolver failed") {}
};

struct DefectiveMode : GridError {
  DefectiveMode() : GridError("DefectiveMode: eigenvector matrix is numerically singular") {}
};

struct ZeroEigenvalue : GridError {
  ZeroEigenvalue() : GridError("ZeroEigenvalue: damping ratio undefined at lambda=0") {}
};

// --------------------------------------------------------------- time domain

struct NewtonFailure : GridError {
  double t;
  NewtonFailure(double time, const std::string& detail)
      : GridError("NewtonFailure: t=" + std::to_string(time) + " " + detail), t(time) {}
};

struct StepUnderflow : GridError {
  double t;
  explicit StepUnderflow(double time)
      : GridError("StepUnderflow: t=" + std::to_string(time)), t(time) {}
};

struct UnknownTarget : GridError {
  explicit UnknownTarget(const std::string& target)
      : GridError("UnknownTarget: " + target) {}
};

}  // namespace gridmodal
