#pragma once

#include <nlohmann/json.hpp>

#include <limits>
#include <string>
#include <vector>

#include "reebidx/bott.hpp"
#include "reebidx/chomology.hpp"
#include "reebidx/cijt.hpp"
#include "reebidx/config.hpp"
#include "reebidx/errors.hpp"
#include "reebidx/rational.hpp"
#include "reebidx/sympath.hpp"

namespace reebidx {

/// Sorted-key JSON document; the std::map backing makes emission canonical.
using Json = nlohmann::json;

inline constexpr long json_schema_version = 1;

inline std::string canonical_text(const Json& j) { return j.dump(2) + "\n"; }

inline Json parse_text(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const std::exception& e) {
    fail(ErrorKind::structural, std::string("JSON parse error: ") + e.what());
  }
}

/// Floating-point values never appear bare; they carry an explicit marker.
inline Json approx_json(double v) { return Json{{"approx", true}, {"value", v}}; }

inline Json rational_json(const Rational& r) { return format_rational(r); }

inline Rational json_rational(const Json& j, const std::string& what) {
  if (j.is_number_integer()) return Rational(j.get<long long>());
  require(j.is_string(), ErrorKind::structural,
          what + " must be an integer or a 'p/q' string");
  const std::string s = j.get<std::string>();
  try {
    const auto slash = s.find('/');
    if (slash == std::string::npos) return Rational(Integer(s));
    const Integer num(s.substr(0, slash));
    const Integer den(s.substr(slash + 1));
    require(den != 0, ErrorKind::structural, what + " has a zero denominator");
    return Rational(num) / Rational(den);
  } catch (const Error&) {
    throw;
  } catch (const std::exception&) {
    fail(ErrorKind::structural, what + " is not a valid rational literal: '" + s + "'");
  }
}

inline long long json_to_int64(const Integer& v, const std::string& what) {
  require(v >= std::numeric_limits<long long>::min() &&
              v <= std::numeric_limits<long long>::max(),
          ErrorKind::not_representable, what + " exceeds the 64-bit JSON integer range");
  return v.convert_to<long long>();
}

inline Json integer_json(const Integer& v) { return json_to_int64(v, "integer field"); }

inline Integer json_integer(const Json& j, const std::string& what) {
  if (j.is_number_integer()) return Integer(j.get<long long>());
  require(j.is_string(), ErrorKind::structural, what + " must be an integer");
  const Rational r = json_rational(j, what);
  require(is_integer(r), ErrorKind::structural, what + " must be an integer");
  return numerator(r);
}

inline Json jump_json(const BottJump& j) {
  Json out;
  if (auto r = j.angle.exact_rational()) {
    out["angle_num"] = json_to_int64(Integer(numerator(*r)), "angle numerator");
    out["angle_den"] = json_to_int64(Integer(denominator(*r)), "angle denominator");
  } else if (j.angle.lo() == j.angle.hi()) {
    const Tilted t = j.angle.lo();
    out["angle_num"] = json_to_int64(Integer(numerator(t.value)), "angle numerator");
    out["angle_den"] = json_to_int64(Integer(denominator(t.value)), "angle denominator");
    out["tilt"] = t.side;
  } else {
    out["angle_lo"] = rational_json(j.angle.lo().value);
    out["angle_hi"] = rational_json(j.angle.hi().value);
  }
  out["s_plus"] = j.s_plus;
  out["s_minus"] = j.s_minus;
  out["nu"] = j.nu;
  return out;
}

inline BottJump json_jump(const Json& j) {
  require(j.is_object(), ErrorKind::structural, "jump record must be an object");
  BottJump out;
  if (j.contains("angle_lo") || j.contains("angle_hi")) {
    require(j.contains("angle_lo") && j.contains("angle_hi"), ErrorKind::structural,
            "enclosure jumps need both angle bounds");
    out.angle = Angle::enclosure(json_rational(j.at("angle_lo"), "angle_lo"),
                                 json_rational(j.at("angle_hi"), "angle_hi"));
  } else {
    require(j.contains("angle_num") && j.contains("angle_den"), ErrorKind::structural,
            "jump record needs angle_num and angle_den");
    const Rational value =
        Rational(json_integer(j.at("angle_num"), "angle_num")) /
        Rational(json_integer(j.at("angle_den"), "angle_den"));
    const int tilt = j.value("tilt", 0);
    require(tilt == -1 || tilt == 0 || tilt == 1, ErrorKind::structural,
            "tilt must be -1, 0, or 1");
    out.angle = tilt == 0 ? Angle::exact(value) : Angle::exact(Tilted{value, tilt});
  }
  out.s_plus = j.value("s_plus", 0);
  out.s_minus = j.value("s_minus", 0);
  out.nu = j.value("nu", 1);
  return out;
}

inline Json orbit_json(const BottData& d) {
  Json out;
  out["name"] = d.name;
  out["dim2n"] = d.dim2n;
  out["b_at_one"] = json_to_int64(d.b_at_one, "b_at_one");
  out["elliptic_height"] = d.elliptic_height;
  out["jumps"] = Json::array();
  for (const BottJump& j : d.jumps) out["jumps"].push_back(jump_json(j));
  if (d.jump_at_one)
    out["jump_at_one"] = Json{{"s", d.jump_at_one->s}, {"nu", d.jump_at_one->nu}};
  else
    out["jump_at_one"] = nullptr;
  if (d.local_homology) {
    Json table = Json::object();
    for (const auto& [deg, rank] : *d.local_homology) table[std::to_string(deg)] = rank;
    out["local_homology"] = table;
  } else {
    out["local_homology"] = nullptr;
  }
  return out;
}

inline BottData json_orbit(const Json& j) {
  require(j.is_object(), ErrorKind::structural, "orbit record must be an object");
  BottData d;
  d.name = j.value("name", std::string());
  require(j.contains("dim2n") && j.contains("b_at_one"), ErrorKind::structural,
          "orbit record needs dim2n and b_at_one");
  d.dim2n = j.at("dim2n").get<int>();
  d.b_at_one = json_integer(j.at("b_at_one"), "b_at_one");
  d.elliptic_height = j.value("elliptic_height", 0);
  if (j.contains("jumps"))
    for (const Json& rec : j.at("jumps")) d.jumps.push_back(json_jump(rec));
  if (j.contains("jump_at_one") && !j.at("jump_at_one").is_null()) {
    const Json& one = j.at("jump_at_one");
    d.jump_at_one = JumpAtOne{one.value("s", 0), one.value("nu", 0)};
  }
  if (j.contains("local_homology") && !j.at("local_homology").is_null()) {
    std::map<long, long> table;
    for (const auto& [key, rank] : j.at("local_homology").items()) {
      try {
        table[std::stol(key)] = rank.get<long>();
      } catch (const std::exception&) {
        fail(ErrorKind::structural, "local homology degree '" + key + "' is not an integer");
      }
    }
    d.local_homology = std::move(table);
  }
  validate_bott(d);
  return d;
}

inline Json profile_json(const PrequantProfile& p) {
  Json out;
  out["n"] = p.n;
  out["betti"] = p.betti;
  out["I"] = json_to_int64(p.index_period, "recurrence index");
  out["c_B"] = json_to_int64(p.c_b, "twisting degree");
  return out;
}

inline PrequantProfile json_profile(const Json& j) {
  require(j.is_object(), ErrorKind::structural, "profile record must be an object");
  require(j.contains("n") && j.contains("betti") && j.contains("I") && j.contains("c_B"),
          ErrorKind::structural, "profile record needs n, betti, I, and c_B");
  PrequantProfile p;
  p.n = j.at("n").get<int>();
  p.betti = j.at("betti").get<std::vector<long>>();
  p.index_period = json_integer(j.at("I"), "I");
  p.c_b = json_integer(j.at("c_B"), "c_B");
  validate_profile(p);
  return p;
}

inline Json catalog_json(const OrbitCatalog& c) {
  Json out;
  out["schema_version"] = json_schema_version;
  out["profile"] = profile_json(c.profile);
  out["orbits"] = Json::array();
  for (const BottData& d : c.orbits) out["orbits"].push_back(orbit_json(d));
  out["claimed_complete"] = c.claimed_complete;
  return out;
}

inline void require_schema(const Json& j) {
  if (j.contains("schema_version"))
    require(j.at("schema_version") == json_schema_version, ErrorKind::structural,
            "unsupported schema version");
}

inline OrbitCatalog json_catalog(const Json& j) {
  require(j.is_object(), ErrorKind::structural, "catalog record must be an object");
  require_schema(j);
  require(j.contains("profile") && j.contains("orbits"), ErrorKind::structural,
          "catalog record needs profile and orbits");
  OrbitCatalog c;
  c.profile = json_profile(j.at("profile"));
  for (const Json& rec : j.at("orbits")) c.orbits.push_back(json_orbit(rec));
  c.claimed_complete = j.value("claimed_complete", false);
  validate_catalog(c);
  return c;
}

namespace detail {

inline Json generator_json(const Generator& g) {
  Json out;
  switch (g.kind) {
    case Generator::Kind::block_sum: {
      bool all_rot = true, all_hyp = true;
      for (const Block& b : g.blocks) {
        all_rot = all_rot && b.lam == 1;
        all_hyp = all_hyp && b.r == 0;
      }
      if (all_rot) {
        out["kind"] = "rotation_sum";
        Json params = Json::array();
        for (const Block& b : g.blocks) params.push_back(rational_json(b.r));
        out["params"] = params;
      } else if (all_hyp) {
        out["kind"] = "hyperbolic_sum";
        Json params = Json::array();
        for (const Block& b : g.blocks) params.push_back(rational_json(b.lam));
        out["params"] = params;
      } else {
        out["kind"] = "block_sum";
        Json params = Json::array();
        for (const Block& b : g.blocks)
          params.push_back(Json::array({rational_json(b.r), rational_json(b.lam)}));
        out["params"] = params;
      }
      return out;
    }
    case Generator::Kind::exp_symmetric: {
      out["kind"] = "exp_symmetric";
      Json rows = Json::array();
      for (int i = 0; i < g.sym.rows(); ++i) {
        Json row = Json::array();
        for (int k = 0; k < g.sym.cols(); ++k) row.push_back(rational_json(g.sym(i, k)));
        rows.push_back(row);
      }
      out["params"] = rows;
      return out;
    }
    default: {
      out["kind"] = "loop_product";
      Json turns = Json::array();
      for (const Integer& t : g.loop_turns)
        turns.push_back(json_to_int64(t, "loop turn count"));
      out["turns"] = turns;
      Generator base;
      base.kind = g.base_kind;
      base.blocks = g.blocks;
      base.sym = g.sym;
      out["base"] = generator_json(base);
      return out;
    }
  }
}

inline Generator json_generator(const Json& j) {
  require(j.is_object() && j.contains("kind"), ErrorKind::structural,
          "generator record needs a kind");
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "loop_product") {
    require(j.contains("turns") && j.contains("base"), ErrorKind::structural,
            "loop generator needs turns and base");
    std::vector<Integer> turns;
    for (const Json& t : j.at("turns")) turns.push_back(json_integer(t, "loop turn"));
    return loop_product(std::move(turns), json_generator(j.at("base")));
  }
  require(j.contains("params"), ErrorKind::structural, "generator record needs params");
  const Json& params = j.at("params");
  require(params.is_array(), ErrorKind::structural, "generator params must be an array");
  if (kind == "rotation_sum") {
    std::vector<Block> blocks;
    for (const Json& p : params)
      blocks.push_back(Block{json_rational(p, "rotation parameter"), Rational(1)});
    return block_sum(std::move(blocks));
  }
  if (kind == "hyperbolic_sum") {
    std::vector<Block> blocks;
    for (const Json& p : params)
      blocks.push_back(Block{Rational(0), json_rational(p, "dilation parameter")});
    return block_sum(std::move(blocks));
  }
  if (kind == "block_sum") {
    std::vector<Block> blocks;
    for (const Json& p : params) {
      require(p.is_array() && p.size() == 2, ErrorKind::structural,
              "block parameters are [half_turns, dilation] pairs");
      blocks.push_back(Block{json_rational(p[0], "block half-turns"),
                             json_rational(p[1], "block dilation")});
    }
    return block_sum(std::move(blocks));
  }
  if (kind == "exp_symmetric") {
    const int rows = int(params.size());
    require(rows > 0, ErrorKind::structural, "quadratic generator matrix must be non-empty");
    RatMatrix m(rows, rows);
    for (int i = 0; i < rows; ++i) {
      const Json& row = params[size_t(i)];
      require(row.is_array() && int(row.size()) == rows, ErrorKind::structural,
              "quadratic generator matrix must be square");
      for (int k = 0; k < rows; ++k)
        m(i, k) = json_rational(row[size_t(k)], "matrix entry");
    }
    return exp_symmetric(std::move(m));
  }
  fail(ErrorKind::structural, "unknown generator kind '" + kind + "'");
}

}  // namespace detail

inline Json path_json(const SymplecticPath& p) {
  Json out;
  out["dim2n"] = p.dim2n;
  if (!p.name.empty()) out["name"] = p.name;
  if (p.gen) {
    out["generator"] = detail::generator_json(*p.gen);
    return out;
  }
  Json samples = Json::array();
  bool exact = !p.samples.empty();
  for (const PathSample& s : p.samples) {
    exact = exact && s.entries_exact;
    Json rows = Json::array();
    for (int i = 0; i < s.m.rows(); ++i) {
      Json row = Json::array();
      for (int k = 0; k < s.m.cols(); ++k) row.push_back(rational_json(s.m(i, k)));
      rows.push_back(row);
    }
    samples.push_back(Json::array({rational_json(s.t), rows}));
  }
  out["samples"] = samples;
  out["entries_exact"] = exact;
  return out;
}

inline SymplecticPath json_path(const Json& j) {
  require(j.is_object() && j.contains("dim2n"), ErrorKind::structural,
          "path record needs dim2n");
  require(j.contains("generator") || j.contains("samples"), ErrorKind::structural,
          "path record needs a generator or samples");
  const int dim2n = j.at("dim2n").get<int>();
  const std::string name = j.value("name", std::string());
  if (j.contains("generator")) {
    SymplecticPath p = make_path(detail::json_generator(j.at("generator")), name);
    require(p.dim2n == dim2n, ErrorKind::structural,
            "generator dimension disagrees with the declared dim2n");
    return p;
  }
  SymplecticPath p;
  p.dim2n = dim2n;
  p.name = name;
  const bool exact = j.value("entries_exact", false);
  for (const Json& rec : j.at("samples")) {
    require(rec.is_array() && rec.size() == 2, ErrorKind::structural,
            "each sample is a [t, matrix] pair");
    PathSample s;
    s.t = json_rational(rec[0], "sample time");
    const Json& rows = rec[1];
    const int r = int(rows.size());
    require(r == dim2n, ErrorKind::structural, "sample matrix must match dim2n");
    s.m = RatMatrix(r, r);
    for (int i = 0; i < r; ++i) {
      const Json& row = rows[size_t(i)];
      require(row.is_array() && int(row.size()) == r, ErrorKind::structural,
              "sample matrix must be square");
      for (int k = 0; k < r; ++k)
        s.m(i, k) = json_rational(row[size_t(k)], "sample entry");
    }
    s.entries_exact = exact;
    p.samples.push_back(std::move(s));
  }
  return p;
}

inline Json check_entries_json(const std::map<std::string, CheckEntry>& checks) {
  Json out = Json::object();
  for (const auto& [id, entry] : checks)
    out[id] = Json{{"pass", entry.pass}, {"lhs", entry.lhs}, {"rhs", entry.rhs}};
  return out;
}

inline Json certificate_json(const CijtCertificate& c) {
  Json out;
  out["N"] = json_to_int64(c.n_value, "N");
  out["N0"] = json_to_int64(c.n0, "N0");
  out["k_factor"] = json_to_int64(c.k_factor, "k_factor");
  out["m"] = Json::array();
  for (const Integer& mj : c.m) out["m"].push_back(json_to_int64(mj, "m_j"));
  out["delta"] = c.delta;
  out["q_param"] = json_to_int64(c.q_param, "q_param");
  out["epsilon"] = rational_json(c.epsilon);
  out["frac_delta"] = c.frac_delta ? Json(rational_json(*c.frac_delta)) : Json(nullptr);
  out["checks"] = check_entries_json(c.checks);
  return out;
}

inline CijtCertificate json_certificate(const Json& j) {
  require(j.is_object(), ErrorKind::structural, "certificate record must be an object");
  require(j.contains("N") && j.contains("N0") && j.contains("k_factor") &&
              j.contains("m") && j.contains("delta"),
          ErrorKind::structural, "certificate record is missing required fields");
  CijtCertificate c;
  c.n_value = json_integer(j.at("N"), "N");
  c.n0 = json_integer(j.at("N0"), "N0");
  c.k_factor = json_integer(j.at("k_factor"), "k_factor");
  for (const Json& mj : j.at("m")) c.m.push_back(json_integer(mj, "m_j"));
  c.delta = j.at("delta").get<std::vector<int>>();
  c.q_param = json_integer(j.value("q_param", Json(1)), "q_param");
  c.epsilon = json_rational(j.value("epsilon", Json("0")), "epsilon");
  if (j.contains("frac_delta") && !j.at("frac_delta").is_null())
    c.frac_delta = json_rational(j.at("frac_delta"), "frac_delta");
  if (j.contains("checks"))
    for (const auto& [id, rec] : j.at("checks").items())
      c.checks[id] = CheckEntry{rec.value("pass", false), rec.value("lhs", std::string()),
                                rec.value("rhs", std::string())};
  return c;
}

inline Json tolerances_json(const RunConfig& cfg) {
  Json out;
  out["tol_symplectic"] = approx_json(cfg.tol_symplectic);
  out["tol_rank"] = approx_json(cfg.tol_rank);
  out["tol_form"] = approx_json(cfg.tol_form);
  out["tol_time"] = approx_json(cfg.tol_time);
  out["max_sample_jump"] = approx_json(cfg.max_sample_jump);
  return out;
}

inline Json convexity_json(const ConvexityReport& r) {
  Json out;
  out["pass"] = r.pass;
  out["vacuous"] = r.vacuous;
  out["threshold"] = json_to_int64(r.threshold, "threshold");
  out["mode"] = r.mode == ConvexityMode::positive ? "positive" : "negative";
  if (!r.pass) {
    out["offender"] = r.offender;
    out["iterate"] = r.iterate;
    out["value"] = json_to_int64(r.value, "offending index");
  }
  return out;
}

inline Json resonance_json(const ResonanceReport& r) {
  Json out;
  out["pass"] = r.pass;
  out["exact"] = r.exact;
  if (r.exact) {
    out["sum"] = rational_json(r.sum.lo);
    out["defect"] = rational_json(r.defect);
  } else {
    out["sum_lo"] = rational_json(r.sum.lo);
    out["sum_hi"] = rational_json(r.sum.hi);
  }
  out["expected"] = rational_json(r.expected);
  return out;
}

inline Json morse_json(const MorseReport& r) {
  Json out;
  out["alternating_ok"] = r.alternating_ok;
  out["pointwise_ok"] = r.pointwise_ok;
  out["vacuous"] = r.vacuous;
  Json rows = Json::array();
  for (const MorseRow& row : r.rows)
    rows.push_back(Json{{"degree", row.degree},
                        {"count", row.count},
                        {"rank", row.rank0},
                        {"partial", row.partial}});
  out["rows"] = rows;
  return out;
}

inline Json audit_json(const AuditReport& r) {
  Json out;
  out["schema_version"] = json_schema_version;
  out["verdict"] = verdict_name(r.verdict);
  out["reason"] = r.reason;
  out["convexity"] = convexity_json(r.convexity);
  out["certificate"] = r.certificate ? certificate_json(*r.certificate) : Json(nullptr);
  out["mean_euler"] = Json{{"lhs", rational_json(r.mean_euler_lhs)},
                           {"rhs", rational_json(r.mean_euler_rhs)},
                           {"pass", r.mean_euler_pass}};
  Json window = Json::object();
  for (const auto& [deg, names] : r.window) window[std::to_string(deg)] = names;
  out["window"] = window;
  out["window_distinct"] = r.window_distinct;
  out["window_required"] = r.window_required;
  out["counting"] = Json{{"count_alternating",
                          Json{{"lhs", json_to_int64(r.counting.count_alternating_lhs, "lhs")},
                               {"rhs", json_to_int64(r.counting.count_alternating_rhs, "rhs")},
                               {"pass", r.counting.count_alternating_pass}}},
                         {"rank_alternating",
                          Json{{"lhs", json_to_int64(r.counting.rank_alternating_lhs, "lhs")},
                               {"rhs", json_to_int64(r.counting.rank_alternating_rhs, "rhs")},
                               {"pass", r.counting.rank_alternating_pass}}},
                         {"top_comparison",
                          Json{{"lhs", json_to_int64(r.counting.top_comparison_lhs, "lhs")},
                               {"rhs", json_to_int64(r.counting.top_comparison_rhs, "rhs")},
                               {"pass", r.counting.top_comparison_pass}}},
                         {"note", r.counting.note}};
  out["morse"] = morse_json(r.morse);
  out["witnesses"] = Json{{"elliptic", r.witnesses.elliptic},
                          {"sdm_candidates", r.witnesses.sdm_candidates},
                          {"non_hyperbolic", r.witnesses.non_hyperbolic},
                          {"degree_n", r.witnesses.degree_n},
                          {"top_contributor", r.witnesses.top_contributor},
                          {"gap_note", r.witnesses.gap_note}};
  out["perfect"] = r.perfect;
  out["even_orbit_count"] = r.even_orbit_count;
  out["expected_orbit_count"] = r.expected_orbit_count;
  out["N"] = json_to_int64(r.n_value, "N");
  out["s"] = json_to_int64(r.s_value, "s");
  return out;
}

}  // namespace reebidx
