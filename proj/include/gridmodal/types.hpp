#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace gridmodal {

enum class BusKind { Slack, PV, PQ };

struct Bus {
  int id = 0;                 // 1-based, contiguous after parsing
  std::string name;
  BusKind kind = BusKind::PQ;
  double base_kv = 0.0;
  double v_set = 1.0;         // pu, meaningful for PV/Slack
  double angle_set = 0.0;     // rad, meaningful for Slack
};

enum class LineModel { NominalPi, DistributedExactPi };

struct Branch {
  int from_bus = 0;
  int to_bus = 0;
  // Total series impedance and total charging susceptance, per unit on the
  // system base. Values are stored as given in the case file; the exact-PI
  // correction for long lines is applied at admittance assembly.
  double r = 0.0;
  double x = 0.0;
  double b_shunt = 0.0;
  double length_km = 0.0;
  LineModel model = LineModel::NominalPi;
};

/// Exponential static load: P = p0*(v/v0)^a, Q = q0*(v/v0)^b.
struct LoadModel {
  int bus = 0;
  double p0 = 0.0;   // MW drawn at v0
  double q0 = 0.0;   // MVAr drawn at v0
  double v0 = 1.0;   // pu reference voltage
  double a = 2.0;    // constant-impedance default
  double b = 2.0;
};

/// Sub-transient machine constants, per unit on the unit's own MVA base.
/// Reactance ordering invariants: xd > xd_p > xd_pp > xls and
/// xq > xq_p > xq_pp > xls, all time constants positive.
struct MachineParams {
  double h = 0.0;       // inertia constant, s
  double d = 0.0;       // damping torque per pu speed deviation
  double xd = 0.0, xd_p = 0.0, xd_pp = 0.0;
  double xq = 0.0, xq_p = 0.0, xq_pp = 0.0;
  double xls = 0.0;
  double rs = 0.0;
  double tdo_p = 0.0, tdo_pp = 0.0;
  double tqo_p = 0.0, tqo_pp = 0.0;
};

/// Static exciter with measurement lag, optional lead-lag, gain and ceiling.
struct ExciterST1A {
  double tr = 0.02;
  double ka = 200.0;
  double tb = 0.0;      // tb <= 0 disables the lead-lag stage
  double tc = 0.0;
  double efd_min = -6.0;
  double efd_max = 6.0;
};

/// Hydro turbine and governor: PID, rate/position limited gate servo,
/// lumped-inertia penstock with nonlinear head.
struct HydroGovernor {
  double kp = 0.0, ki = 0.0, kd = 0.0;
  double ta_servo = 0.0;     // gate servomotor time constant, s
  double g_min = 0.0, g_max = 1.0;
  double rate_limit = 0.1;   // pu gate per s
  double tw = 1.0;           // water starting time, s
  double at = 1.0;           // turbine gain
  double q_nl = 0.0;         // no-load flow, pu
  double r_perm = 0.05;      // permanent droop
};

/// Gas turbine and governor: droop fuel command into valve, combustor and
/// turbine first-order lags.
struct GasGovernor {
  double r_droop = 0.05;
  double t_valve = 0.4;
  double t_comb = 0.3;
  double t_turb = 0.5;
  double f_min = 0.0, f_max = 1.5;
  double k_turb = 1.0;
};

using GovernorParams = std::variant<HydroGovernor, GasGovernor>;

/// Multi-band stabilizer: low/intermediate/high band-pass differencers on
/// pu speed deviation, summed and clamped.
struct PssMB {
  double f_l = 0.2, k_l = 10.0;
  double f_i = 1.0, k_i = 25.0;
  double f_h = 8.0, k_h = 60.0;
  double vs_min = -0.15, vs_max = 0.15;
};

struct GeneratingUnit {
  int bus = 0;
  std::string name;
  double mva_base = 0.0;
  double p_set = 0.0;        // MW dispatch; absent/ignored at the slack bus
  MachineParams machine;
  ExciterST1A exciter;
  GovernorParams governor;
  std::optional<PssMB> pss;
};

struct SystemBase {
  double s_base = 100.0;     // MVA
  double f_nominal = 50.0;   // Hz, 50 or 60
  double omega_s() const { return 2.0 * M_PI * f_nominal; }
};

struct PowerSystemCase {
  SystemBase base;
  std::vector<Bus> buses;        // sorted by id; ids are 1..buses.size()
  std::vector<Branch> branches;
  std::vector<LoadModel> loads;
  std::vector<GeneratingUnit> units;

  // Bus ids are contiguous from 1, so index lookup is arithmetic.
  int bus_index(int id) const { return id - 1; }
  const Bus& bus_by_id(int id) const { return buses[static_cast<size_t>(id - 1)]; }
  int slack_bus_index() const {
    for (size_t i = 0; i < buses.size(); ++i)
      if (buses[i].kind == BusKind::Slack) return static_cast<int>(i);
    return -1;
  }
  const GeneratingUnit* unit_at_bus(int bus_id) const {
    for (const auto& u : units)
      if (u.bus == bus_id) return &u;
    return nullptr;
  }
};

}  // namespace gridmodal
