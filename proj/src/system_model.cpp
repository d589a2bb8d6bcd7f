#include "gridmodal/system_model.hpp"

#include <cmath>
#include <set>

#include "gridmodal/errors.hpp"

namespace gridmodal {

std::pair<double, double> load_power(const LoadModel& load, double v_pu) {
  if (v_pu <= 0.0) throw NonPositiveVoltage(v_pu);
  const double ratio = v_pu / load.v0;
  return {load.p0 * std::pow(ratio, load.a), load.q0 * std::pow(ratio, load.b)};
}

PhysicalBranch branch_to_physical(const Branch& br, double base_kv, double s_base_mva) {
  const double z_base = base_kv * base_kv / s_base_mva;  // ohm
  return {br.r * z_base, br.x * z_base, br.b_shunt / z_base};
}

Branch branch_from_physical(const PhysicalBranch& ph, const Branch& prototype,
                            double base_kv, double s_base_mva) {
  const double z_base = base_kv * base_kv / s_base_mva;
  Branch out = prototype;
  out.r = ph.r_ohm / z_base;
  out.x = ph.x_ohm / z_base;
  out.b_shunt = ph.b_siemens * z_base;
  return out;
}

void validate_machine(const MachineParams& p, int line_no) {
  auto fail = [&](const std::string& why) { throw MalformedCase(line_no, "machine: " + why); };
  if (p.h <= 0) fail("h must be positive");
  if (p.d < 0) fail("d must be non-negative");
  if (!(p.xd > p.xd_p && p.xd_p > p.xd_pp && p.xd_pp > p.xls))
    fail("reactance ordering xd > xd' > xd'' > xls violated");
  if (!(p.xq > p.xq_p && p.xq_p > p.xq_pp && p.xq_pp > p.xls))
    fail("reactance ordering xq > xq' > xq'' > xls violated");
  if (p.xls <= 0) fail("xls must be positive");
  if (p.rs < 0) fail("rs must be non-negative");
  if (p.tdo_p <= 0 || p.tdo_pp <= 0 || p.tqo_p <= 0 || p.tqo_pp <= 0)
    fail("time constants must be positive");
}

void validate_exciter(const ExciterST1A& e, int line_no) {
  auto fail = [&](const std::string& why) { throw MalformedCase(line_no, "exciter: " + why); };
  if (e.tr <= 0) fail("tr must be positive");
  if (e.ka <= 0) fail("ka must be positive");
  if (e.tb < 0 || e.tc < 0) fail("tb and tc must be non-negative");
  if (e.tb == 0.0 && e.tc > 0.0) fail("tc without tb is a pure derivative");
  if (!(e.efd_min < e.efd_max)) fail("efd_min must be below efd_max");
}

void validate_governor(const GovernorParams& g, int line_no) {
  auto fail = [&](const std::string& why) { throw MalformedCase(line_no, "governor: " + why); };
  if (const auto* h = std::get_if<HydroGovernor>(&g)) {
    if (h->kp < 0 || h->ki < 0 || h->kd < 0) fail("PID gains must be non-negative");
    if (h->ki == 0) fail("ki must be positive for a defined gate equilibrium");
    if (h->ta_servo <= 0) fail("ta_servo must be positive");
    if (!(h->g_min < h->g_max)) fail("g_min must be below g_max");
    if (h->g_min < 0) fail("g_min must be non-negative");
    if (h->rate_limit <= 0) fail("rate_limit must be positive");
    if (h->tw <= 0) fail("tw must be positive");
    if (h->at <= 0) fail("at must be positive");
    if (h->q_nl < 0) fail("q_nl must be non-negative");
    if (h->r_perm <= 0) fail("r_perm must be positive");
  } else {
    const auto& t = std::get<GasGovernor>(g);
    if (t.r_droop <= 0) fail("r_droop must be positive");
    if (t.t_valve <= 0 || t.t_comb <= 0 || t.t_turb <= 0) fail("lag time constants must be positive");
    if (!(t.f_min < t.f_max)) fail("f_min must be below f_max");
    if (t.k_turb <= 0) fail("k_turb must be positive");
  }
}

void validate_pss(const PssMB& p, int line_no) {
  auto fail = [&](const std::string& why) { throw MalformedCase(line_no, "pss: " + why); };
  if (!(0 < p.f_l && p.f_l < p.f_i && p.f_i < p.f_h)) fail("band centers must satisfy 0 < f_l < f_i < f_h");
  if (p.k_l < 0 || p.k_i < 0 || p.k_h < 0) fail("band gains must be non-negative");
  if (!(p.vs_min < 0 && 0 < p.vs_max)) fail("output limits must bracket zero");
}

void validate_case(const PowerSystemCase& sys) {
  if (sys.base.s_base <= 0) throw MalformedCase(0, "s_base must be positive");
  if (sys.base.f_nominal != 50.0 && sys.base.f_nominal != 60.0)
    throw MalformedCase(0, "f must be 50 or 60");

  const int n = static_cast<int>(sys.buses.size());
  if (n == 0) throw MalformedCase(0, "case declares no buses");
  std::set<int> ids;
  int slack_count = 0;
  for (const auto& b : sys.buses) {
    if (!ids.insert(b.id).second) throw DuplicateId("bus id=" + std::to_string(b.id));
    if (b.base_kv <= 0) throw MalformedCase(0, "bus " + std::to_string(b.id) + ": kv must be positive");
    if (b.v_set <= 0) throw NonPositiveVoltage(b.v_set);
    if (b.kind == BusKind::Slack) ++slack_count;
  }
  if (*ids.begin() != 1 || *ids.rbegin() != n)
    throw MalformedCase(0, "bus ids must be contiguous from 1");
  if (slack_count == 0) throw NoSlackBus();
  if (slack_count > 1) throw MultipleSlackBuses();

  for (const auto& br : sys.branches) {
    if (!ids.count(br.from_bus) || !ids.count(br.to_bus))
      throw MalformedCase(0, "branch endpoint references unknown bus");
    if (br.from_bus == br.to_bus)
      throw DegenerateLine("branch loops bus " + std::to_string(br.from_bus));
    if (br.r == 0.0 && br.x == 0.0)
      throw DegenerateLine("branch " + std::to_string(br.from_bus) + "-" +
                           std::to_string(br.to_bus) + " has zero impedance");
    if (br.length_km < 0) throw MalformedCase(0, "branch length must be non-negative");
  }

  for (const auto& ld : sys.loads) {
    if (!ids.count(ld.bus)) throw MalformedCase(0, "load references unknown bus");
    if (ld.v0 <= 0) throw NonPositiveVoltage(ld.v0);
    if (ld.a < 0 || ld.a > 2 || ld.b < 0 || ld.b > 2)
      throw MalformedCase(0, "load exponents must lie in [0, 2]");
  }

  std::set<int> unit_buses;
  std::set<std::string> unit_names;
  for (const auto& un : sys.units) {
    if (!ids.count(un.bus)) throw MalformedCase(0, "unit references unknown bus");
    const auto& bus = sys.bus_by_id(un.bus);
    if (bus.kind == BusKind::PQ) throw UnitOnPqBus(un.bus);
    if (!unit_buses.insert(un.bus).second)
      throw DuplicateId("second unit at bus " + std::to_string(un.bus));
    if (!unit_names.insert(un.name).second) throw DuplicateId("unit name " + un.name);
    if (un.mva_base <= 0) throw MalformedCase(0, "unit mva must be positive");
    validate_machine(un.machine, 0);
    validate_exciter(un.exciter, 0);
    validate_governor(un.governor, 0);
    if (un.pss) validate_pss(*un.pss, 0);
  }
}

}  // namespace gridmodal
