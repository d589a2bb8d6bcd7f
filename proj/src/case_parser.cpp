#include "gridmodal/case_parser.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include "gridmodal/errors.hpp"
#include "gridmodal/line_model.hpp"
#include "gridmodal/system_model.hpp"

namespace gridmodal {

namespace {

struct Token {
  std::string text;
  int line = 0;
};

// A record is one logical statement: the keyword plus every token up to the
// next keyword line, with braces kept as their own tokens.
struct Record {
  std::string keyword;
  int line = 0;
  std::vector<Token> tokens;
};

bool is_record_keyword(const std::string& w) {
  return w == "SYSTEM" || w == "BUS" || w == "BRANCH" || w == "LOAD" || w == "UNIT";
}

std::vector<Token> tokenize_line(const std::string& raw, int line_no) {
  std::string s = raw;
  if (auto pos = s.find('#'); pos != std::string::npos) s.erase(pos);
  // Braces become standalone tokens so "machine{h=3" splits cleanly.
  std::string padded;
  padded.reserve(s.size() + 8);
  for (char c : s) {
    if (c == '{' || c == '}') {
      padded += ' ';
      padded += c;
      padded += ' ';
    } else {
      padded += c;
    }
  }
  std::vector<Token> out;
  std::istringstream iss(padded);
  std::string w;
  while (iss >> w) out.push_back({w, line_no});
  return out;
}

double parse_number(const Token& tok, const std::string& key) {
  const std::string& v = tok.text;
  char* end = nullptr;
  const double x = std::strtod(v.c_str(), &end);
  if (end != v.c_str() + v.size() || v.empty())
    throw MalformedCase(tok.line, "bad number for " + key + ": '" + v + "'");
  return x;
}

// key=value fields of one record section, preserving source lines for errors.
struct Fields {
  std::map<std::string, Token> kv;
  int line = 0;

  bool has(const std::string& k) const { return kv.count(k) != 0; }
  double num(const std::string& k) const {
    auto it = kv.find(k);
    if (it == kv.end()) throw MalformedCase(line, "missing required key '" + k + "'");
    return parse_number(it->second, k);
  }
  double num_or(const std::string& k, double dflt) const {
    auto it = kv.find(k);
    return it == kv.end() ? dflt : parse_number(it->second, k);
  }
  std::string str(const std::string& k) const {
    auto it = kv.find(k);
    if (it == kv.end()) throw MalformedCase(line, "missing required key '" + k + "'");
    return it->second.text;
  }
  std::string str_or(const std::string& k, const std::string& dflt) const {
    auto it = kv.find(k);
    return it == kv.end() ? dflt : it->second.text;
  }
  void reject_unknown(const std::string& where, std::initializer_list<const char*> allowed) const {
    for (const auto& [k, tok] : kv) {
      if (std::find_if(allowed.begin(), allowed.end(),
                       [&](const char* a) { return k == a; }) == allowed.end())
        throw MalformedCase(tok.line, where + ": unknown key '" + k + "'");
    }
  }
};

Fields split_fields(const std::vector<Token>& tokens, int line) {
  Fields f;
  f.line = line;
  for (const auto& tok : tokens) {
    auto eq = tok.text.find('=');
    if (eq == std::string::npos || eq == 0)
      throw MalformedCase(tok.line, "expected key=value, got '" + tok.text + "'");
    const std::string key = tok.text.substr(0, eq);
    if (f.kv.count(key)) throw MalformedCase(tok.line, "repeated key '" + key + "'");
    Token val{tok.text.substr(eq + 1), tok.line};
    if (val.text.empty()) throw MalformedCase(tok.line, "empty value for '" + key + "'");
    f.kv.emplace(key, val);
  }
  return f;
}

// Splits a UNIT record into top-level key=value tokens and named blocks.
struct UnitParts {
  std::vector<Token> top;
  struct Block {
    std::string name;
    int line = 0;
    std::vector<Token> tokens;
  };
  std::vector<Block> blocks;
};

UnitParts split_unit(const Record& rec) {
  UnitParts parts;
  size_t i = 0;
  const auto& t = rec.tokens;
  while (i < t.size()) {
    if (i + 1 < t.size() && t[i + 1].text == "{") {
      UnitParts::Block blk;
      blk.name = t[i].text;
      blk.line = t[i].line;
      i += 2;
      int depth = 1;
      while (i < t.size() && depth > 0) {
        if (t[i].text == "{") ++depth;
        else if (t[i].text == "}") --depth;
        else blk.tokens.push_back(t[i]);
        ++i;
      }
      if (depth != 0) throw MalformedCase(blk.line, "unbalanced braces in block '" + blk.name + "'");
      parts.blocks.push_back(std::move(blk));
    } else if (t[i].text == "{" || t[i].text == "}") {
      throw MalformedCase(t[i].line, "unexpected brace");
    } else {
      parts.top.push_back(t[i]);
      ++i;
    }
  }
  return parts;
}

BusKind parse_kind(const Token& tok) {
  std::string k = tok.text;
  std::transform(k.begin(), k.end(), k.begin(), [](unsigned char c) { return std::tolower(c); });
  if (k == "slack") return BusKind::Slack;
  if (k == "pv") return BusKind::PV;
  if (k == "pq") return BusKind::PQ;
  throw MalformedCase(tok.line, "unknown bus kind '" + tok.text + "'");
}

MachineParams parse_machine_block(const UnitParts::Block& blk) {
  Fields f = split_fields(blk.tokens, blk.line);
  f.reject_unknown("machine", {"h", "d", "xd", "xd_p", "xd_pp", "xq", "xq_p", "xq_pp",
                               "xls", "rs", "tdo_p", "tdo_pp", "tqo_p", "tqo_pp"});
  MachineParams p;
  p.h = f.num("h");
  p.d = f.num_or("d", 0.0);
  p.xd = f.num("xd");
  p.xd_p = f.num("xd_p");
  p.xd_pp = f.num("xd_pp");
  p.xq = f.num("xq");
  p.xq_p = f.num("xq_p");
  p.xq_pp = f.num("xq_pp");
  p.xls = f.num("xls");
  p.rs = f.num_or("rs", 0.0);
  p.tdo_p = f.num("tdo_p");
  p.tdo_pp = f.num("tdo_pp");
  p.tqo_p = f.num("tqo_p");
  p.tqo_pp = f.num("tqo_pp");
  validate_machine(p, blk.line);
  return p;
}

ExciterST1A parse_exciter_block(const UnitParts::Block& blk) {
  Fields f = split_fields(blk.tokens, blk.line);
  f.reject_unknown("exciter", {"tr", "ka", "tb", "tc", "efd_min", "efd_max"});
  ExciterST1A e;
  e.tr = f.num_or("tr", e.tr);
  e.ka = f.num_or("ka", e.ka);
  e.tb = f.num_or("tb", e.tb);
  e.tc = f.num_or("tc", e.tc);
  e.efd_min = f.num_or("efd_min", e.efd_min);
  e.efd_max = f.num_or("efd_max", e.efd_max);
  validate_exciter(e, blk.line);
  return e;
}

GovernorParams parse_governor_block(const UnitParts::Block& blk) {
  if (blk.tokens.empty()) throw MalformedCase(blk.line, "governor block needs a variant tag");
  const std::string tag = blk.tokens.front().text;
  std::vector<Token> rest(blk.tokens.begin() + 1, blk.tokens.end());
  Fields f = split_fields(rest, blk.line);
  GovernorParams out;
  if (tag == "hydro") {
    f.reject_unknown("governor hydro", {"kp", "ki", "kd", "ta_servo", "g_min", "g_max",
                                        "rate_limit", "tw", "at", "q_nl", "r_perm"});
    HydroGovernor g;
    g.kp = f.num("kp");
    g.ki = f.num("ki");
    g.kd = f.num_or("kd", 0.0);
    g.ta_servo = f.num("ta_servo");
    g.g_min = f.num_or("g_min", 0.0);
    g.g_max = f.num_or("g_max", 1.0);
    g.rate_limit = f.num("rate_limit");
    g.tw = f.num("tw");
    g.at = f.num("at");
    g.q_nl = f.num_or("q_nl", 0.0);
    g.r_perm = f.num("r_perm");
    out = g;
  } else if (tag == "gas") {
    f.reject_unknown("governor gas", {"r_droop", "t_valve", "t_comb", "t_turb",
                                      "f_min", "f_max", "k_turb"});
    GasGovernor g;
    g.r_droop = f.num("r_droop");
    g.t_valve = f.num("t_valve");
    g.t_comb = f.num("t_comb");
    g.t_turb = f.num("t_turb");
    g.f_min = f.num_or("f_min", 0.0);
    g.f_max = f.num_or("f_max", 1.5);
    g.k_turb = f.num("k_turb");
    out = g;
  } else {
    throw MalformedCase(blk.line, "unknown governor variant '" + tag + "'");
  }
  validate_governor(out, blk.line);
  return out;
}

PssMB parse_pss_block(const UnitParts::Block& blk) {
  Fields f = split_fields(blk.tokens, blk.line);
  f.reject_unknown("pss", {"f_l", "k_l", "f_i", "k_i", "f_h", "k_h", "vs_min", "vs_max"});
  PssMB p;
  p.f_l = f.num("f_l");
  p.k_l = f.num("k_l");
  p.f_i = f.num("f_i");
  p.k_i = f.num("k_i");
  p.f_h = f.num("f_h");
  p.k_h = f.num("k_h");
  p.vs_min = f.num_or("vs_min", p.vs_min);
  p.vs_max = f.num_or("vs_max", p.vs_max);
  validate_pss(p, blk.line);
  return p;
}

}  // namespace

PowerSystemCase parse_case(std::istream& in) {
  std::vector<Record> records;
  std::string raw;
  int line_no = 0;
  int brace_depth = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    auto tokens = tokenize_line(raw, line_no);
    if (tokens.empty()) continue;
    if (brace_depth == 0 && is_record_keyword(tokens.front().text)) {
      Record rec;
      rec.keyword = tokens.front().text;
      rec.line = line_no;
      rec.tokens.assign(tokens.begin() + 1, tokens.end());
      records.push_back(std::move(rec));
    } else {
      if (records.empty())
        throw MalformedCase(line_no, "expected a record keyword, got '" + tokens.front().text + "'");
      auto& rec = records.back();
      rec.tokens.insert(rec.tokens.end(), tokens.begin(), tokens.end());
    }
    brace_depth = 0;
    if (!records.empty()) {
      for (const auto& t : records.back().tokens) {
        if (t.text == "{") ++brace_depth;
        else if (t.text == "}") --brace_depth;
      }
      if (brace_depth < 0) throw MalformedCase(line_no, "unmatched '}'");
      // Only UNIT records may continue across lines, and only inside braces.
      if (brace_depth > 0 && records.back().keyword != "UNIT")
        throw MalformedCase(line_no, "block braces are only valid inside UNIT records");
    }
  }
  if (brace_depth != 0) throw MalformedCase(line_no, "unterminated block at end of file");

  PowerSystemCase sys;
  bool seen_system = false;
  for (const auto& rec : records) {
    if (rec.keyword == "SYSTEM") {
      if (seen_system) throw MalformedCase(rec.line, "repeated SYSTEM record");
      seen_system = true;
      Fields f = split_fields(rec.tokens, rec.line);
      f.reject_unknown("SYSTEM", {"s_base", "f"});
      sys.base.s_base = f.num_or("s_base", 100.0);
      sys.base.f_nominal = f.num_or("f", 50.0);
      if (sys.base.s_base <= 0) throw MalformedCase(rec.line, "s_base must be positive");
      if (sys.base.f_nominal != 50.0 && sys.base.f_nominal != 60.0)
        throw MalformedCase(rec.line, "f must be 50 or 60");
    } else if (rec.keyword == "BUS") {
      Fields f = split_fields(rec.tokens, rec.line);
      f.reject_unknown("BUS", {"id", "name", "kind", "kv", "vset", "angle_deg"});
      Bus b;
      b.id = static_cast<int>(f.num("id"));
      b.name = f.str_or("name", "bus" + std::to_string(b.id));
      b.kind = parse_kind(f.kv.at("kind"));
      b.base_kv = f.num("kv");
      if (f.has("vset")) {
        if (b.kind == BusKind::PQ) throw MalformedCase(rec.line, "vset is only valid on PV/slack buses");
        b.v_set = f.num("vset");
      }
      if (f.has("angle_deg")) {
        if (b.kind != BusKind::Slack) throw MalformedCase(rec.line, "angle_deg is only valid on the slack bus");
        b.angle_set = f.num("angle_deg") * M_PI / 180.0;
      }
      sys.buses.push_back(b);
    } else if (rec.keyword == "BRANCH") {
      Fields f = split_fields(rec.tokens, rec.line);
      f.reject_unknown("BRANCH", {"from", "to", "r", "x", "b", "len"});
      Branch br;
      br.from_bus = static_cast<int>(f.num("from"));
      br.to_bus = static_cast<int>(f.num("to"));
      br.r = f.num("r");
      br.x = f.num("x");
      br.b_shunt = f.num_or("b", 0.0);
      br.length_km = f.num_or("len", 0.0);
      br.model = br.length_km > kLongLineThresholdKm ? LineModel::DistributedExactPi
                                                     : LineModel::NominalPi;
      sys.branches.push_back(br);
    } else if (rec.keyword == "LOAD") {
      Fields f = split_fields(rec.tokens, rec.line);
      f.reject_unknown("LOAD", {"bus", "p0", "q0", "v0", "a", "b"});
      LoadModel ld;
      ld.bus = static_cast<int>(f.num("bus"));
      ld.p0 = f.num("p0");
      ld.q0 = f.num_or("q0", 0.0);
      ld.v0 = f.num_or("v0", 1.0);
      ld.a = f.num_or("a", 2.0);
      ld.b = f.num_or("b", 2.0);
      if (ld.a < 0 || ld.a > 2 || ld.b < 0 || ld.b > 2)
        throw MalformedCase(rec.line, "load exponents must lie in [0, 2]");
      if (ld.v0 <= 0) throw MalformedCase(rec.line, "load v0 must be positive");
      sys.loads.push_back(ld);
    } else {  // UNIT
      UnitParts parts = split_unit(rec);
      Fields f = split_fields(parts.top, rec.line);
      f.reject_unknown("UNIT", {"bus", "name", "mva", "pset"});
      GeneratingUnit un;
      un.bus = static_cast<int>(f.num("bus"));
      un.name = f.str_or("name", "G" + std::to_string(un.bus));
      un.mva_base = f.num("mva");
      bool has_pset = f.has("pset");
      if (has_pset) un.p_set = f.num("pset");

      bool saw_machine = false, saw_governor = false, saw_exciter = false, saw_pss = false;
      for (const auto& blk : parts.blocks) {
        if (blk.name == "machine") {
          if (saw_machine) throw MalformedCase(blk.line, "repeated machine block");
          un.machine = parse_machine_block(blk);
          saw_machine = true;
        } else if (blk.name == "exciter") {
          if (saw_exciter) throw MalformedCase(blk.line, "repeated exciter block");
          un.exciter = parse_exciter_block(blk);
          saw_exciter = true;
        } else if (blk.name == "governor") {
          if (saw_governor) throw MalformedCase(blk.line, "repeated governor block");
          un.governor = parse_governor_block(blk);
          saw_governor = true;
        } else if (blk.name == "pss") {
          if (saw_pss) throw MalformedCase(blk.line, "repeated pss block");
          un.pss = parse_pss_block(blk);
          saw_pss = true;
        } else {
          throw MalformedCase(blk.line, "unknown block '" + blk.name + "'");
        }
      }
      if (!saw_machine) throw MalformedCase(rec.line, "unit needs a machine block");
      if (!saw_governor) throw MalformedCase(rec.line, "unit needs a governor block");
      if (!has_pset) un.p_set = 0.0;
      sys.units.push_back(un);
    }
  }

  std::sort(sys.buses.begin(), sys.buses.end(),
            [](const Bus& a, const Bus& b) { return a.id < b.id; });
  validate_case(sys);

  // pset at the slack unit contradicts "slack absorbs the balance".
  for (const auto& un : sys.units) {
    if (sys.bus_by_id(un.bus).kind == BusKind::Slack && un.p_set != 0.0)
      throw MalformedCase(0, "unit '" + un.name + "' at the slack bus must not set pset");
  }
  return sys;
}

PowerSystemCase parse_case_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MalformedCase(0, "cannot open case file '" + path + "'");
  return parse_case(in);
}

PowerSystemCase parse_case_text(const std::string& text) {
  std::istringstream in(text);
  return parse_case(in);
}

}  // namespace gridmodal
