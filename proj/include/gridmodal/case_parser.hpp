#pragma once

#include <istream>
#include <string>

#include "gridmodal/types.hpp"

namespace gridmodal {

/// Parse the plain-text case format.
///
/// Lines are records; `#` starts a comment. Records:
///   SYSTEM s_base=<MVA> f=<Hz>
///   BUS id=<n> name=<text> kind=slack|pv|pq kv=<kV> [vset=<pu>] [angle_deg=<deg>]
///   BRANCH from=<id> to=<id> r=<pu> x=<pu> b=<pu> [len=<km>]
///   LOAD bus=<id> p0=<MW> [q0=<MVAr>] [v0=<pu>] [a=<exp>] [b=<exp>]
///   UNIT bus=<id> name=<text> mva=<MVA> [pset=<MW>] machine{...} [exciter{...}]
///        governor{hydro|gas ...} [pss{...}]
/// A UNIT record may span lines until its braces balance. Unknown keys are
/// rejected. Branch impedances are per unit on the system base; branches
/// longer than 25 km are flagged for the distributed-parameter PI correction.
PowerSystemCase parse_case(std::istream& in);
PowerSystemCase parse_case_file(const std::string& path);
PowerSystemCase parse_case_text(const std::string& text);

}  // namespace gridmodal
