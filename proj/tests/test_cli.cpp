#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <reebidx/cli.hpp>

using namespace reebidx;

namespace {

struct CliResult {
  int code = -1;
  std::string out;
  std::string err;
};

CliResult run_cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  CliResult r;
  r.code = cli::run(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::filesystem::path scratch() {
  static const std::filesystem::path dir = [] {
    std::filesystem::path d = std::filesystem::temp_directory_path() / "reebidx_cli_test";
    std::filesystem::create_directories(d);
    return d;
  }();
  return dir;
}

std::string fixture(const std::string& name, const std::string& text) {
  const std::filesystem::path p = scratch() / name;
  std::ofstream f(p);
  f << text;
  return p.string();
}

std::string fixture_doc(const std::string& name, const Json& doc) {
  return fixture(name, canonical_text(doc));
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

OrbitCatalog lonely_catalog() {
  OrbitCatalog cat;
  cat.profile = catalog_profile("sphere", 2);
  BottData d;
  d.name = "lonely";
  d.dim2n = 4;
  d.b_at_one = 4;
  BottJump j;
  j.angle = Angle::exact(Tilted{Rational(0), +1});
  j.s_plus = 0;
  j.s_minus = 2;
  j.nu = 2;
  d.jumps.push_back(j);
  d.elliptic_height = 4;
  cat.orbits.push_back(d);
  cat.claimed_complete = true;
  return cat;
}

}  // namespace

TEST_CASE("usage and parse failures exit 1") {
  CHECK(run_cli({}).code == 1);
  CHECK(run_cli({"--bogus"}).code == 1);
  CHECK(run_cli({"transmogrify"}).code == 1);
  CHECK(run_cli({"index"}).code == 1);
  CHECK(run_cli({"index", "--path", (scratch() / "missing.json").string()}).code == 1);
  const std::string garbled = fixture("garbled.json", "{not json");
  const CliResult r = run_cli({"index", "--path", garbled});
  CHECK(r.code == 1);
  CHECK(parse_text(r.out).at("error").at("kind") == "structural");
  CHECK(!r.err.empty());
  const std::string prof = fixture_doc(
      "sphere1.json", profile_json(catalog_profile("sphere", 1)));
  CHECK(run_cli({"homology", "--profile", prof, "--degrees", "backwards"}).code == 1);
  CHECK(run_cli({"homology", "--profile", prof, "--degrees", "9..1"}).code == 1);
}

TEST_CASE("help text exits 0") {
  const CliResult r = run_cli({"--help"});
  CHECK(r.code == 0);
  for (const char* name :
       {"index", "bott", "iterate", "cijt", "homology", "audit", "models", "selftest"})
    CHECK(r.out.find(name) != std::string::npos);
}

TEST_CASE("index subcommand reports the one-fifth rotation") {
  const std::string rot = fixture(
      "rot.json",
      R"({"dim2n": 2, "generator": {"kind": "rotation_sum", "params": ["2/5"]}})");
  const CliResult r = run_cli({"index", "--path", rot});
  REQUIRE(r.code == 0);
  const Json doc = parse_text(r.out);
  CHECK(doc.at("mu_cz") == 1);
  CHECK(doc.at("nullity") == 0);
  CHECK(doc.at("mu_rs") == "1");
  CHECK(doc.at("schema_version") == json_schema_version);
  CHECK(doc.at("tolerances").at("tol_symplectic").at("approx") == true);

  SECTION("degenerate endpoints report the one-sided pair instead") {
    const std::string loop = fixture(
        "loop.json",
        R"({"dim2n": 2, "generator": {"kind": "rotation_sum", "params": ["2"]}})");
    const CliResult d = run_cli({"index", "--path", loop});
    REQUIRE(d.code == 0);
    const Json doc2 = parse_text(d.out);
    CHECK(!doc2.contains("mu_cz"));
    CHECK(doc2.at("nullity") == 2);
    CHECK(doc2.at("mu_plus") == doc2.at("mu_minus").get<long>() + 2);
  }
  SECTION("compact output is a single line with equal values") {
    const CliResult c = run_cli({"index", "--path", rot, "--compact"});
    REQUIRE(c.code == 0);
    CHECK(c.out.find('\n') == c.out.size() - 1);
    CHECK(parse_text(c.out) == parse_text(r.out));
  }
}

TEST_CASE("bott and iterate speak through orbit record files") {
  const std::string rot = fixture(
      "mixed.json",
      R"({"dim2n": 4, "generator": {"kind": "rotation_sum", "params": ["2/5", "1/3"]}})");
  const std::string orbit_file = (scratch() / "mixed_orbit.json").string();
  const CliResult b = run_cli({"bott", "--path", rot, "--out", orbit_file});
  REQUIRE(b.code == 0);
  const Json report = parse_text(b.out);
  CHECK(report.at("mean_index") == "11/15");
  CHECK(report.at("orbit").at("b_at_one") == 2);

  const BottData d = json_orbit(parse_text(slurp(orbit_file)));
  const CliResult it = run_cli({"iterate", "--orbit", orbit_file, "--k", "9"});
  REQUIRE(it.code == 0);
  const Json table = parse_text(it.out);
  REQUIRE(table.at("iterates").size() == 9);
  for (const Json& row : table.at("iterates")) {
    const long k = row.at("k").get<long>();
    CHECK(row.at("index").get<long long>() == json_to_int64(iterated_index(d, k), "index"));
    CHECK(row.at("nullity").get<int>() == iterated_nullity(d, k));
  }
  CHECK(table.at("mean_index") == "11/15");
}

TEST_CASE("cijt searches, verifies, and rejects tampering") {
  const EllipsoidModel model = ellipsoid_catalog(EllipsoidSpec{{Rational(1), Rational(2)}});
  Json orbit_array = Json::array();
  for (const BottData& d : model.catalog.orbits) orbit_array.push_back(orbit_json(d));
  const std::string orbits = fixture_doc("e12_orbits.json", orbit_array);
  const std::string cert_file = (scratch() / "e12_cert.json").string();

  const CliResult found =
      run_cli({"cijt", "--orbits", orbits, "--n0", "4", "--out", cert_file});
  REQUIRE(found.code == 0);
  const Json rep = parse_text(found.out);
  CHECK(rep.at("all_pass") == true);
  CHECK(rep.at("certificate").at("N") == 12);
  CHECK(rep.at("certificate").at("m") == Json::array({4, 2}));

  SECTION("emitted certificates re-verify") {
    const CliResult v = run_cli({"cijt", "--orbits", orbits, "--verify", cert_file});
    CHECK(v.code == 0);
    CHECK(parse_text(v.out).at("all_pass") == true);
  }
  SECTION("tampered certificates are refuted") {
    Json bad = parse_text(slurp(cert_file));
    bad["m"][0] = 99;
    const std::string bad_file = fixture_doc("e12_cert_bad.json", bad);
    const CliResult v = run_cli({"cijt", "--orbits", orbits, "--verify", bad_file});
    CHECK(v.code == 3);
    CHECK(parse_text(v.out).at("all_pass") == false);
  }
  SECTION("an exhausted search exits 2 with a machine-readable error") {
    const CliResult x = run_cli({"cijt", "--orbits", orbits, "--n0", "4", "--bound", "2"});
    CHECK(x.code == 2);
    CHECK(parse_text(x.out).at("error").at("kind") == "bounded_search");
  }
  SECTION("catalog files are accepted as orbit lists") {
    const std::string catalog = fixture_doc("e12_catalog.json", catalog_json(model.catalog));
    const CliResult c = run_cli({"cijt", "--orbits", catalog, "--n0", "4"});
    CHECK(c.code == 0);
    CHECK(parse_text(c.out).at("certificate").at("N") == 12);
  }
}

TEST_CASE("homology subcommand tabulates ambient ranks") {
  const PrequantProfile p = catalog_profile("sphere", 2);
  const std::string prof = fixture_doc("sphere2.json", profile_json(p));
  const CliResult r = run_cli({"homology", "--profile", prof, "--degrees", "2..8"});
  REQUIRE(r.code == 0);
  const Json doc = parse_text(r.out);
  CHECK(doc.at("profile").at("I") == 6);
  for (long d = 2; d <= 8; ++d)
    CHECK(doc.at("ranks").at(std::to_string(d)).get<long>() ==
          prequant_rank(p, Integer(d)));
  CHECK(doc.at("ranks").at("4") == 1);
  CHECK(doc.at("ranks").at("5") == 0);
}

TEST_CASE("audit verdicts map to exit codes") {
  const EllipsoidModel model = ellipsoid_catalog(EllipsoidSpec{{Rational(1), Rational(2)}});
  const std::string catalog = fixture_doc("audit_e12.json", catalog_json(model.catalog));
  SECTION("consistent catalogs exit 0 and mirror the report file") {
    const std::string report_file = (scratch() / "audit_report.json").string();
    const CliResult r = run_cli({"audit", "--catalog", catalog, "--bound", "1000000",
                                 "--report", report_file});
    CHECK(r.code == 0);
    const Json doc = parse_text(r.out);
    CHECK(doc.at("verdict") == "consistent");
    CHECK(doc.at("certificate").at("N") == 12);
    CHECK(doc.at("tolerances").at("tol_rank").at("approx") == true);
    CHECK(parse_text(slurp(report_file)) == doc);
  }
  SECTION("a missing orbit is a contradiction, exit 3") {
    OrbitCatalog broken = model.catalog;
    broken.orbits.pop_back();
    const std::string file = fixture_doc("audit_missing.json", catalog_json(broken));
    const CliResult r = run_cli({"audit", "--catalog", file});
    CHECK(r.code == 3);
    const Json doc = parse_text(r.out);
    CHECK(doc.at("verdict") == "contradiction");
    CHECK(doc.at("reason").get<std::string>().rfind("resonance:", 0) == 0);
  }
  SECTION("negative-orientation audits pass through --mode") {
    OrbitCatalog inverted = model.catalog;
    for (BottData& d : inverted.orbits) d = bott_invert(d);
    const std::string file = fixture_doc("audit_inverted.json", catalog_json(inverted));
    CHECK(run_cli({"audit", "--catalog", file}).code == 3);
    const CliResult r = run_cli({"audit", "--catalog", file, "--mode", "negative"});
    CHECK(r.code == 0);
    CHECK(run_cli({"audit", "--catalog", file, "--mode", "sideways"}).code == 1);
  }
  SECTION("advisory thresholds downgrade refutations to exit 4") {
    const std::string file = fixture_doc("audit_lonely.json", catalog_json(lonely_catalog()));
    CHECK(run_cli({"audit", "--catalog", file}).code == 3);
    const CliResult r = run_cli({"audit", "--catalog", file, "--relaxed-threshold", "1"});
    CHECK(r.code == 4);
    const Json doc = parse_text(r.out);
    CHECK(doc.at("verdict") == "inconclusive");
    CHECK(doc.at("reason").get<std::string>().rfind("advisory threshold:", 0) == 0);
  }
  SECTION("an undecidable mean index exits 5") {
    OrbitCatalog cat;
    cat.profile = catalog_profile("sphere", 2);
    BottData d;
    d.name = "straddle";
    d.dim2n = 4;
    d.b_at_one = 1;
    BottJump j;
    j.angle = Angle::enclosure(Rational(1, 4), Rational(3, 4));
    j.s_plus = 0;
    j.s_minus = 2;
    j.nu = 2;
    d.jumps.push_back(j);
    d.elliptic_height = 4;
    cat.orbits.push_back(d);
    cat.claimed_complete = true;
    const std::string file = fixture_doc("audit_straddle.json", catalog_json(cat));
    const CliResult r = run_cli({"audit", "--catalog", file});
    CHECK(r.code == 5);
    CHECK(parse_text(r.out).at("error").at("kind") == "precision");
  }
}

TEST_CASE("models subcommands emit reusable artifacts") {
  SECTION("ellipsoid catalogs are canonical on disk") {
    const std::string out_file = (scratch() / "e123.json").string();
    const CliResult r =
        run_cli({"models", "ellipsoid", "--aspects", "1,2,3", "--out", out_file});
    REQUIRE(r.code == 0);
    const std::string text = slurp(out_file);
    CHECK(text == r.out);
    const OrbitCatalog cat = json_catalog(parse_text(text));
    CHECK(cat.orbits.size() == 3);
    CHECK(canonical_text(catalog_json(cat)) == text);
  }
  SECTION("rational aspects parse from the comma list") {
    const CliResult r = run_cli({"models", "ellipsoid", "--aspects", "1,7/2", "--compact"});
    REQUIRE(r.code == 0);
    CHECK(parse_text(r.out).at("orbits").size() == 2);
  }
  SECTION("equal aspects fall back to a paths-only document") {
    const CliResult r = run_cli({"models", "ellipsoid", "--aspects", "1,1"});
    REQUIRE(r.code == 0);
    const Json doc = parse_text(r.out);
    CHECK(doc.at("paths_only") == true);
    CHECK(doc.at("paths").size() == 2);
    CHECK(json_path(doc.at("paths")[0]).dim2n == 2);
  }
  SECTION("invalid aspects exit 1") {
    CHECK(run_cli({"models", "ellipsoid", "--aspects", "1,0"}).code == 1);
    CHECK(run_cli({"models", "ellipsoid", "--aspects", "2"}).code == 1);
  }
  SECTION("profile artifacts round-trip") {
    const CliResult r = run_cli(
        {"models", "profile", "--name", "unit-cotangent-sphere", "--n", "2", "--I", "6"});
    REQUIRE(r.code == 0);
    const PrequantProfile p = json_profile(parse_text(r.out));
    CHECK(p.betti == std::vector<long>{1, 0, 2, 0, 1});
    CHECK(run_cli({"models", "profile", "--name", "unit-cotangent-sphere", "--n", "2"})
              .code == 1);
  }
}

TEST_CASE("selftest is deterministic for a fixed seed") {
  const CliResult a = run_cli({"selftest", "--seed", "9", "--trials", "3"});
  const CliResult b = run_cli({"selftest", "--seed", "9", "--trials", "3"});
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(a.out.find("FAIL") == std::string::npos);
  size_t lines = 0;
  for (char c : a.out) lines += c == '\n';
  CHECK(lines == 3);
}
