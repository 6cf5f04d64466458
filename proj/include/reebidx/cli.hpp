#pragma once

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "reebidx/chomology.hpp"
#include "reebidx/cijt.hpp"
#include "reebidx/index.hpp"
#include "reebidx/json_io.hpp"
#include "reebidx/models.hpp"

namespace reebidx {
namespace cli {

inline const char* kind_name(ErrorKind k) {
  switch (k) {
    case ErrorKind::structural: return "structural";
    case ErrorKind::precondition: return "precondition";
    case ErrorKind::domain: return "domain";
    case ErrorKind::resolution: return "resolution";
    case ErrorKind::precision: return "precision";
    case ErrorKind::data_required: return "data_required";
    case ErrorKind::inference: return "inference";
    case ErrorKind::ambiguity: return "ambiguity";
    case ErrorKind::bounded_search: return "bounded_search";
    case ErrorKind::not_representable: return "not_representable";
    case ErrorKind::construction: return "construction";
  }
  return "unknown";
}

inline int exit_code_for(ErrorKind k) {
  switch (k) {
    case ErrorKind::bounded_search: return 2;
    case ErrorKind::data_required:
    case ErrorKind::inference:
    case ErrorKind::ambiguity: return 4;
    case ErrorKind::resolution:
    case ErrorKind::precision: return 5;
    default: return 1;
  }
}

namespace detail {

inline Rational parse_rational_arg(const std::string& s, const std::string& what) {
  return json_rational(Json(s), what);
}

inline Integer parse_integer_arg(const std::string& s, const std::string& what) {
  return json_integer(Json(s), what);
}

inline Json read_document(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), ErrorKind::structural, "cannot open input file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_text(buf.str());
}

inline void write_document(const std::string& path, const Json& doc) {
  std::ofstream out(path);
  require(out.good(), ErrorKind::structural, "cannot open output file '" + path + "'");
  out << canonical_text(doc);
  require(out.good(), ErrorKind::structural, "failed to write '" + path + "'");
}

/// Orbit lists arrive either as a bare array of orbit records or as a
/// catalog document; the catalog's profile is ignored here.
inline std::vector<BottData> read_orbit_list(const std::string& path) {
  const Json doc = read_document(path);
  std::vector<BottData> orbits;
  if (doc.is_array()) {
    for (const Json& rec : doc) orbits.push_back(json_orbit(rec));
    return orbits;
  }
  require(doc.is_object() && doc.contains("orbits"), ErrorKind::structural,
          "orbit input must be an array of orbit records or a catalog");
  require_schema(doc);
  for (const Json& rec : doc.at("orbits")) orbits.push_back(json_orbit(rec));
  return orbits;
}

struct Emitter {
  std::ostream* out;
  bool compact = false;

  void emit(const Json& doc) const {
    if (compact)
      *out << doc.dump() << "\n";
    else
      *out << canonical_text(doc);
  }
};

inline Json wrap_report(const RunConfig& cfg, Json payload) {
  payload["schema_version"] = json_schema_version;
  payload["tolerances"] = tolerances_json(cfg);
  return payload;
}

/// Bott inference with the data horizon widened on underdetermined systems.
inline BottData infer_with_retry(const SymplecticPath& p, int k_start,
                                 const RunConfig& cfg) {
  int k = k_start;
  for (;;) {
    try {
      return infer_bott(p, k, cfg);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::ambiguity || k >= 60) throw;
      k += 6;
    }
  }
}

}  // namespace detail

struct CommonOptions {
  RunConfig cfg;
  bool compact = false;
};

inline int cmd_index(const std::string& path_file, const CommonOptions& common,
                     const detail::Emitter& emitter) {
  const SymplecticPath p = json_path(detail::read_document(path_file));
  const IndexTriple t = index_triple(p, common.cfg);
  Json payload;
  if (!p.name.empty()) payload["path"] = p.name;
  payload["nullity"] = t.nullity;
  payload["mu_rs"] = rational_json(t.rs());
  if (t.nullity == 0) {
    payload["mu_cz"] = json_to_int64(t.mu_minus, "mu_cz");
  } else {
    payload["mu_minus"] = json_to_int64(t.mu_minus, "mu_minus");
    payload["mu_plus"] = json_to_int64(t.mu_plus, "mu_plus");
  }
  emitter.emit(detail::wrap_report(common.cfg, payload));
  return 0;
}

inline int cmd_bott(const std::string& path_file, int k_data,
                    const std::string& out_file, const CommonOptions& common,
                    const detail::Emitter& emitter) {
  const SymplecticPath p = json_path(detail::read_document(path_file));
  const BottData d = detail::infer_with_retry(p, k_data, common.cfg);
  const Json record = orbit_json(d);
  if (!out_file.empty()) detail::write_document(out_file, record);
  Json payload;
  payload["orbit"] = record;
  const RatInterval delta = mean_index(d);
  if (delta.exact())
    payload["mean_index"] = rational_json(delta.lo);
  else
    payload["mean_index"] = Json{{"lo", rational_json(delta.lo)},
                                 {"hi", rational_json(delta.hi)}};
  emitter.emit(detail::wrap_report(common.cfg, payload));
  return 0;
}

inline int cmd_iterate(const std::string& orbit_file, long k_max,
                       const CommonOptions& common, const detail::Emitter& emitter) {
  const BottData d = json_orbit(detail::read_document(orbit_file));
  Json rows = Json::array();
  for (long k = 1; k <= k_max; ++k)
    rows.push_back(Json{{"k", k},
                        {"index", json_to_int64(iterated_index(d, k), "index")},
                        {"nullity", iterated_nullity(d, k)}});
  Json payload;
  if (!d.name.empty()) payload["orbit"] = d.name;
  payload["iterates"] = rows;
  const RatInterval delta = mean_index(d);
  if (delta.exact())
    payload["mean_index"] = rational_json(delta.lo);
  else
    payload["mean_index"] = Json{{"lo", rational_json(delta.lo)},
                                 {"hi", rational_json(delta.hi)}};
  emitter.emit(detail::wrap_report(common.cfg, payload));
  return 0;
}

struct CijtOptions {
  std::string orbits_file;
  std::string n0;
  std::string epsilon;
  std::string frac_delta;
  std::string q_multiple;
  std::string bound = "1000000";
  std::string verify_file;
  std::string out_file;
};

inline int cmd_cijt(const CijtOptions& opt, const CommonOptions& common,
                    const detail::Emitter& emitter) {
  std::vector<BottData> orbits = detail::read_orbit_list(opt.orbits_file);
  for (BottData& d : orbits) d = tilt_collapse(d);
  if (!opt.verify_file.empty()) {
    const CijtCertificate cert =
        json_certificate(detail::read_document(opt.verify_file));
    const auto checks = verify_certificate(orbits, cert);
    const bool ok = all_checks_pass(checks);
    Json payload;
    payload["checks"] = check_entries_json(checks);
    payload["all_pass"] = ok;
    emitter.emit(detail::wrap_report(common.cfg, payload));
    return ok ? 0 : 3;
  }
  require(!opt.n0.empty(), ErrorKind::structural, "cijt needs --n0 or --verify");
  std::optional<Rational> epsilon;
  if (!opt.epsilon.empty())
    epsilon = detail::parse_rational_arg(opt.epsilon, "epsilon");
  std::optional<Rational> frac_delta;
  if (!opt.frac_delta.empty())
    frac_delta = detail::parse_rational_arg(opt.frac_delta, "frac-delta");
  std::optional<Integer> q_multiple;
  if (!opt.q_multiple.empty())
    q_multiple = detail::parse_integer_arg(opt.q_multiple, "q-multiple");
  const CijtCertificate cert = find_jump(
      orbits, detail::parse_integer_arg(opt.n0, "N0"), epsilon,
      detail::parse_integer_arg(opt.bound, "search bound"), q_multiple, frac_delta);
  const Json record = certificate_json(cert);
  if (!opt.out_file.empty()) detail::write_document(opt.out_file, record);
  Json payload;
  payload["certificate"] = record;
  payload["all_pass"] = all_checks_pass(cert.checks);
  emitter.emit(detail::wrap_report(common.cfg, payload));
  return 0;
}

inline int cmd_homology(const std::string& profile_file, const std::string& degrees,
                        const CommonOptions& common, const detail::Emitter& emitter) {
  const PrequantProfile p = json_profile(detail::read_document(profile_file));
  const auto sep = degrees.find("..");
  require(sep != std::string::npos, ErrorKind::structural,
          "--degrees expects the form a..b");
  const Integer lo = detail::parse_integer_arg(degrees.substr(0, sep), "degree start");
  const Integer hi = detail::parse_integer_arg(degrees.substr(sep + 2), "degree end");
  require(lo <= hi, ErrorKind::structural, "degree range is empty");
  require(hi - lo <= 100000, ErrorKind::domain, "degree range too large");
  Json ranks = Json::object();
  for (Integer d = lo; d <= hi; ++d)
    ranks[d.str()] = prequant_rank(p, d);
  Json payload;
  payload["profile"] = profile_json(p);
  payload["ranks"] = ranks;
  emitter.emit(detail::wrap_report(common.cfg, payload));
  return 0;
}

struct AuditCliOptions {
  std::string catalog_file;
  std::string bound = "1000000";
  std::string threshold;
  std::string n0_multiple;
  std::string mode = "positive";
  std::string report_file;
};

inline int cmd_audit(const AuditCliOptions& opt, const CommonOptions& common,
                     const detail::Emitter& emitter) {
  const OrbitCatalog catalog = json_catalog(detail::read_document(opt.catalog_file));
  AuditOptions options;
  options.search_bound = detail::parse_integer_arg(opt.bound, "search bound");
  if (!opt.threshold.empty())
    options.threshold_override =
        detail::parse_integer_arg(opt.threshold, "relaxed threshold");
  if (!opt.n0_multiple.empty())
    options.n0_multiple = detail::parse_integer_arg(opt.n0_multiple, "N0 multiple");
  require(opt.mode == "positive" || opt.mode == "negative", ErrorKind::structural,
          "--mode must be positive or negative");
  options.mode =
      opt.mode == "positive" ? ConvexityMode::positive : ConvexityMode::negative;
  const AuditReport rep = audit(catalog, options);
  Json doc = audit_json(rep);
  doc["tolerances"] = tolerances_json(common.cfg);
  if (!opt.report_file.empty()) detail::write_document(opt.report_file, doc);
  emitter.emit(doc);
  switch (rep.verdict) {
    case AuditVerdict::consistent: return 0;
    case AuditVerdict::contradiction: return 3;
    default: return 4;
  }
}

struct ModelsOptions {
  std::string aspects;
  bool exact_angles = false;
  int verify_up_to = 12;
  std::string profile_name;
  int profile_n = 0;
  std::string index_period;
  std::string out_file;
};

inline int cmd_models_ellipsoid(const ModelsOptions& opt, const CommonOptions&,
                                const detail::Emitter& emitter) {
  EllipsoidSpec spec;
  std::stringstream ss(opt.aspects);
  std::string piece;
  while (std::getline(ss, piece, ','))
    spec.aspects.push_back(detail::parse_rational_arg(piece, "aspect"));
  EllipsoidOptions options;
  options.exact_angles = opt.exact_angles;
  options.verify_up_to = opt.verify_up_to;
  const EllipsoidModel model = ellipsoid_catalog(spec, options);
  Json doc;
  if (model.paths_only) {
    Json paths = Json::array();
    for (const SymplecticPath& p : model.generators) paths.push_back(path_json(p));
    doc["schema_version"] = json_schema_version;
    doc["paths_only"] = true;
    doc["paths"] = paths;
  } else {
    doc = catalog_json(model.catalog);
  }
  if (!opt.out_file.empty()) detail::write_document(opt.out_file, doc);
  emitter.emit(doc);
  return 0;
}

inline int cmd_models_profile(const ModelsOptions& opt, const CommonOptions&,
                              const detail::Emitter& emitter) {
  std::optional<Integer> period;
  if (!opt.index_period.empty())
    period = detail::parse_integer_arg(opt.index_period, "recurrence index");
  const PrequantProfile p = catalog_profile(opt.profile_name, opt.profile_n, period);
  const Json doc = profile_json(p);
  if (!opt.out_file.empty()) detail::write_document(opt.out_file, doc);
  emitter.emit(doc);
  return 0;
}

/// Seeded end-to-end property sweep over randomized fixtures.
inline int cmd_selftest(unsigned seed, int trials, const CommonOptions& common,
                        std::ostream& out) {
  std::mt19937 rng(seed);
  bool ok = true;
  auto report = [&](const std::string& name, bool pass) {
    out << "selftest " << name << ": " << (pass ? "pass" : "FAIL") << "\n";
    ok = ok && pass;
  };

  {
    bool pass = true;
    std::uniform_int_distribution<int> num(-8, 8);
    std::uniform_int_distribution<int> den(1, 6);
    for (int t = 0; t < trials && pass; ++t) {
      std::vector<Block> blocks;
      for (int b = 0; b < 2; ++b) {
        Rational r(num(rng), den(rng));
        if (r == 0) r = Rational(1, 2);
        blocks.push_back(Block{r, Rational(1)});
      }
      const SymplecticPath p = make_path(block_sum(blocks));
      const BottData d = detail::infer_with_retry(p, 12, common.cfg);
      for (long k = 1; k <= 8 && pass; ++k) {
        if (iterated_nullity(d, k) != 0) continue;
        pass = iterated_index(d, k) == cz_lower(iterate_path(p, k), common.cfg);
      }
    }
    report("bott-inference-matches-path-oracle", pass);
  }

  {
    bool pass = true;
    std::uniform_int_distribution<int> num(1, 9);
    std::uniform_int_distribution<int> den(1, 4);
    for (int t = 0; t < trials && pass; ++t) {
      Rational tau(num(rng), den(rng));
      if (tau == 1) tau += 1;
      const EllipsoidModel model =
          ellipsoid_catalog(EllipsoidSpec{{Rational(1), tau}});
      const ResonanceReport res = resonance_check(model.catalog);
      pass = res.pass && res.exact && res.sum.lo == Rational(-1, 2) &&
             audit(model.catalog).verdict == AuditVerdict::consistent;
    }
    report("ellipsoid-catalogs-audit-consistent", pass);
  }

  {
    const EllipsoidModel model =
        ellipsoid_catalog(EllipsoidSpec{{Rational(1), Rational(2)}});
    std::vector<BottData> collapsed;
    for (const BottData& d : model.catalog.orbits)
      collapsed.push_back(tilt_collapse(d));
    CijtCertificate cert =
        find_jump(collapsed, Integer(4), Rational(1, 4), Integer(1000000));
    bool pass = all_checks_pass(verify_certificate(collapsed, cert));
    cert.m[0] += 1;
    pass = pass && !all_checks_pass(verify_certificate(collapsed, cert));
    report("certificates-reverify-and-reject-tampering", pass);
  }

  return ok ? 0 : 3;
}

/// Argument-vector entry point used by both main() and the test suite.
inline int run(const std::vector<std::string>& args, std::ostream& out,
               std::ostream& err) {
  CLI::App app{"exact index arithmetic for periodic Reeb orbits"};
  app.require_subcommand(1);

  CommonOptions common;
  app.add_flag("--compact", common.compact, "single-line JSON output");
  app.add_option("--tol-symplectic", common.cfg.tol_symplectic,
                 "symplectic deviation tolerance for sampled paths");
  app.add_option("--tol-rank", common.cfg.tol_rank,
                 "rank-decision tolerance for sampled paths");
  app.add_option("--tol-form", common.cfg.tol_form,
                 "crossing-form tolerance for sampled paths");
  app.add_option("--tol-time", common.cfg.tol_time, "time-grid tolerance");
  app.add_option("--grid-cap", common.cfg.max_grid,
                 "maximum refinement grid for sampled paths");

  std::string path_file, orbit_file, profile_file, degrees, out_file;
  int k_data = 12;
  long k_max = 12;
  CijtOptions cijt_opt;
  AuditCliOptions audit_opt;
  ModelsOptions models_opt;
  unsigned seed = 12345;
  int trials = 5;

  CLI::App* c_index = app.add_subcommand("index", "index of a symplectic path");
  c_index->add_option("--path", path_file, "path descriptor JSON")->required();

  CLI::App* c_bott = app.add_subcommand("bott", "fit iteration data to a path");
  c_bott->add_option("--path", path_file, "path descriptor JSON")->required();
  c_bott->add_option("--k-data", k_data, "iterates fed to the fit");
  c_bott->add_option("--out", out_file, "write the orbit record here");

  CLI::App* c_iter = app.add_subcommand("iterate", "index table of an orbit record");
  c_iter->add_option("--orbit", orbit_file, "orbit record JSON")->required();
  c_iter->add_option("--k", k_max, "last iterate to tabulate")
      ->check(CLI::Range(1L, 100000L));

  CLI::App* c_cijt = app.add_subcommand("cijt", "common index jump certificates");
  c_cijt->add_option("--orbits", cijt_opt.orbits_file, "orbit list JSON")->required();
  c_cijt->add_option("--n0", cijt_opt.n0, "base level N0");
  c_cijt->add_option("--epsilon", cijt_opt.epsilon, "closeness parameter");
  c_cijt->add_option("--frac-delta", cijt_opt.frac_delta, "fractional-part target");
  c_cijt->add_option("--q-multiple", cijt_opt.q_multiple, "extra factor for q");
  c_cijt->add_option("--bound", cijt_opt.bound, "search bound for k_factor");
  c_cijt->add_option("--verify", cijt_opt.verify_file, "re-check this certificate");
  c_cijt->add_option("--out", cijt_opt.out_file, "write the certificate here");

  CLI::App* c_hom = app.add_subcommand("homology", "ambient ranks of a profile");
  c_hom->add_option("--profile", profile_file, "profile JSON")->required();
  c_hom->add_option("--degrees", degrees, "degree range a..b")->required();

  CLI::App* c_audit = app.add_subcommand("audit", "consistency audit of a catalog");
  c_audit->add_option("--catalog", audit_opt.catalog_file, "catalog JSON")->required();
  c_audit->add_option("--bound", audit_opt.bound, "certificate search bound");
  c_audit->add_option("--relaxed-threshold", audit_opt.threshold,
                      "advisory convexity threshold");
  c_audit->add_option("--mode", audit_opt.mode, "positive or negative orientation");
  c_audit->add_option("--n0-multiple", audit_opt.n0_multiple,
                      "force N0 to a multiple of this");
  c_audit->add_option("--report", audit_opt.report_file, "write the report here");

  CLI::App* c_models = app.add_subcommand("models", "bundled fixtures");
  c_models->require_subcommand(1);
  CLI::App* c_ell = c_models->add_subcommand("ellipsoid", "ellipsoid orbit catalog");
  c_ell->add_option("--aspects", models_opt.aspects, "comma-separated aspect list")
      ->required();
  c_ell->add_flag("--exact-angles", models_opt.exact_angles,
                  "keep resonant angles exact instead of tilting");
  c_ell->add_option("--verify-up-to", models_opt.verify_up_to,
                    "iterates checked against the path oracle")
      ->check(CLI::Range(1, 64));
  c_ell->add_option("--out", models_opt.out_file, "write the catalog here");
  CLI::App* c_prof = c_models->add_subcommand("profile", "named base profile");
  c_prof->add_option("--name", models_opt.profile_name, "profile family name")
      ->required();
  c_prof->add_option("--n", models_opt.profile_n, "half the contact dimension")
      ->required();
  c_prof->add_option("--I", models_opt.index_period, "recurrence index override");
  c_prof->add_option("--out", models_opt.out_file, "write the profile here");

  CLI::App* c_self = app.add_subcommand("selftest", "seeded property sweep");
  c_self->add_option("--seed", seed, "random seed");
  c_self->add_option("--trials", trials, "trials per property")
      ->check(CLI::Range(1, 1000));

  for (CLI::App* sub : {c_index, c_bott, c_iter, c_cijt, c_hom, c_audit, c_models,
                        c_ell, c_prof, c_self})
    sub->fallthrough();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n";
    return 1;
  }

  const detail::Emitter emitter{&out, common.compact};
  try {
    if (app.got_subcommand(c_index)) return cmd_index(path_file, common, emitter);
    if (app.got_subcommand(c_bott))
      return cmd_bott(path_file, k_data, out_file, common, emitter);
    if (app.got_subcommand(c_iter)) return cmd_iterate(orbit_file, k_max, common, emitter);
    if (app.got_subcommand(c_cijt)) return cmd_cijt(cijt_opt, common, emitter);
    if (app.got_subcommand(c_hom))
      return cmd_homology(profile_file, degrees, common, emitter);
    if (app.got_subcommand(c_audit)) return cmd_audit(audit_opt, common, emitter);
    if (app.got_subcommand(c_models)) {
      if (c_models->got_subcommand(c_ell))
        return cmd_models_ellipsoid(models_opt, common, emitter);
      return cmd_models_profile(models_opt, common, emitter);
    }
    if (app.got_subcommand(c_self)) return cmd_selftest(seed, trials, common, out);
  } catch (const Error& e) {
    Json doc;
    doc["schema_version"] = json_schema_version;
    doc["error"] = Json{{"kind", kind_name(e.kind())}, {"message", e.what()}};
    emitter.emit(doc);
    err << e.what() << "\n";
    return exit_code_for(e.kind());
  }
  err << "no subcommand dispatched\n";
  return 1;
}

}  // namespace cli
}  // namespace reebidx
