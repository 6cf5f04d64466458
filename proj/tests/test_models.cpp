#include <catch2/catch_amalgamated.hpp>

#include <random>

#include <reebidx/chomology.hpp>
#include <reebidx/index.hpp>
#include <reebidx/models.hpp>

using namespace reebidx;

namespace {

template <typename F>
ErrorKind thrown_kind(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::structural;
}

EllipsoidSpec aspect2() { return {{Rational(1), Rational(2)}}; }

}  // namespace

TEST_CASE("aspect-2 ellipsoid catalog") {
  const EllipsoidModel m = ellipsoid_catalog(aspect2());
  REQUIRE(m.catalog.orbits.size() == 2);
  REQUIRE(m.generators.size() == 2);
  CHECK_FALSE(m.paths_only);
  CHECK(m.catalog.claimed_complete);
  CHECK(m.catalog.profile.n == 1);
  CHECK(m.catalog.profile.index_period == 4);

  SECTION("short-orbit index sequence from the generator path") {
    const long expected[] = {3, 5, 9, 11, 15};
    for (long k = 1; k <= 5; ++k) {
      CHECK(cz_lower(iterate_path(m.generators[0], k)) + 2 * k ==
            Integer(expected[k - 1]));
      CHECK(iterated_index(m.catalog.orbits[0], k) == Integer(expected[k - 1]));
    }
  }

  SECTION("long orbit carries the upper perturbed index") {
    for (long k = 1; k <= 5; ++k)
      CHECK(iterated_index(m.catalog.orbits[1], k) == Integer(6 * k + 1));
  }

  SECTION("no iterate of a tilted catalog is degenerate") {
    for (const BottData& d : m.catalog.orbits)
      for (long k = 1; k <= 12; ++k) CHECK(iterated_nullity(d, k) == 0);
  }

  SECTION("generator paths validate as symplectic") {
    for (const SymplecticPath& p : m.generators) CHECK(validate_path(p).ok);
  }

  SECTION("tilt collapse recovers the exact resonant catalog") {
    const BottData c1 = tilt_collapse(m.catalog.orbits[0]);
    CHECK(c1.b_at_one == 3);
    REQUIRE(c1.jumps.size() == 1);
    CHECK(c1.jumps[0].angle.exact_rational() == Rational(1));
    const BottData c2 = tilt_collapse(m.catalog.orbits[1]);
    CHECK(c2.b_at_one == 5);
    REQUIRE(c2.jump_at_one.has_value());
    CHECK(c2.jump_at_one->s == 1);
    CHECK(c2.jump_at_one->nu == 2);
  }

  SECTION("the catalog audits as consistent") {
    const AuditReport rep = audit(m.catalog);
    CHECK(rep.verdict == AuditVerdict::consistent);
    CHECK(rep.perfect);
    CHECK(rep.even_orbit_count == 2);
    CHECK(rep.witnesses.elliptic.size() == 2);
  }
}

TEST_CASE("exact-angle ellipsoid catalog with injected tables") {
  EllipsoidOptions opt;
  opt.exact_angles = true;
  opt.local_homology = {{"gamma1", {{7, 1}}}, {"gamma2", {{5, 1}}}};
  const EllipsoidModel m = ellipsoid_catalog(aspect2(), opt);
  REQUIRE(m.catalog.orbits.size() == 2);
  CHECK(m.catalog.orbits[0].local_homology.has_value());
  CHECK(iterated_nullity(m.catalog.orbits[0], 2) == 2);
  CHECK(iterated_nullity(m.catalog.orbits[1], 1) == 2);

  const AuditReport rep = audit(m.catalog);
  CHECK(rep.verdict == AuditVerdict::consistent);
}

TEST_CASE("equal aspects degenerate at every iterate") {
  const EllipsoidSpec round{{Rational(1), Rational(1)}};

  SECTION("without tables only the paths are returned") {
    const EllipsoidModel m = ellipsoid_catalog(round);
    CHECK(m.paths_only);
    CHECK(m.catalog.orbits.empty());
    REQUIRE(m.generators.size() == 2);
    for (const SymplecticPath& p : m.generators) {
      CHECK(validate_path(p).ok);
      CHECK(cz_lower(p) == 1);
    }
  }

  SECTION("split tables complete the round catalog") {
    EllipsoidOptions opt;
    opt.local_homology = {{"gamma1", {{3, 1}}}, {"gamma2", {{5, 1}}}};
    const EllipsoidModel m = ellipsoid_catalog(round, opt);
    CHECK_FALSE(m.paths_only);
    REQUIRE(m.catalog.orbits.size() == 2);
    for (const BottData& d : m.catalog.orbits) {
      REQUIRE(d.jump_at_one.has_value());
      CHECK(iterated_nullity(d, 1) == 2);
    }
    const ResonanceReport rr = resonance_check(m.catalog);
    CHECK(rr.pass);
    const AuditReport rep = audit(m.catalog);
    CHECK(rep.verdict == AuditVerdict::consistent);
  }
}

TEST_CASE("rational aspect ratios keep the resonance identity") {
  const Rational taus[] = {Rational(5, 3), Rational(7, 2), Rational(9, 4),
                           Rational(13, 5)};
  for (const Rational& tau : taus) {
    const EllipsoidModel m = ellipsoid_catalog({{Rational(1), tau}});
    const ResonanceReport rr = resonance_check(m.catalog);
    CHECK(rr.exact);
    CHECK(rr.pass);
    CHECK(rr.expected == Rational(-1, 2));
  }
  const EllipsoidModel m = ellipsoid_catalog({{Rational(1), Rational(2), Rational(3)}});
  const ResonanceReport rr = resonance_check(m.catalog);
  CHECK(rr.pass);
  CHECK(rr.expected == Rational(1, 2));
}

TEST_CASE("named base profiles") {
  const PrequantProfile s1 = catalog_profile("sphere", 1);
  CHECK(s1.index_period == 4);
  CHECK(s1.c_b == 2);
  CHECK(k_minus(s1) == 3);
  CHECK(r_b(s1) == 2);

  const PrequantProfile s2 = catalog_profile("sphere", 2);
  CHECK(r_b(s2) == 3);
  CHECK(s2.c_b == 3);
  CHECK(s2.index_period == 6);

  const PrequantProfile s1w = catalog_profile("sphere", 1, Integer(8));
  CHECK(s1w.index_period == 8);

  SECTION("unit cotangent profiles need an explicit recurrence index") {
    const PrequantProfile u1 = catalog_profile("unit-cotangent-sphere", 1, Integer(4));
    CHECK(r_b(u1) == 2);
    CHECK(u1.c_b == 2);
    const PrequantProfile u2 = catalog_profile("unit-cotangent-sphere", 2, Integer(6));
    CHECK(r_b(u2) == 4);
    CHECK(u2.c_b == 2);
    CHECK(u2.betti[2] == 2);
    const PrequantProfile u3 = catalog_profile("unit-cotangent-sphere", 3, Integer(6));
    CHECK(r_b(u3) == 4);
    const PrequantProfile u4 = catalog_profile("unit-cotangent-sphere", 4, Integer(8));
    CHECK(r_b(u4) == 6);
    CHECK(thrown_kind([&] { catalog_profile("unit-cotangent-sphere", 2); }) ==
          ErrorKind::domain);
  }

  SECTION("unknown names and bad dimensions are domain errors") {
    CHECK(thrown_kind([&] { catalog_profile("torus", 1); }) == ErrorKind::domain);
    CHECK(thrown_kind([&] { catalog_profile("sphere", 0); }) == ErrorKind::domain);
  }
}

TEST_CASE("elementary blocks") {
  SECTION("a fifth-turn rotation has index one") {
    const SymplecticPath p = block(BlockKind::rotation, Rational(1, 5));
    CHECK(validate_path(p).ok);
    CHECK(cz_index(p) == 1);
    CHECK(cz_lower(iterate_path(p, 5)) == 1);
    CHECK(path_nullity(iterate_path(p, 5)) == 2);
  }

  SECTION("a hyperbolic block has vanishing Bott function") {
    const SymplecticPath p = block(BlockKind::hyperbolic, Rational(2));
    CHECK(validate_path(p).ok);
    const BottData d = infer_bott(p, 8);
    CHECK(d.b_at_one == 0);
    CHECK(d.jumps.empty());
    CHECK_FALSE(d.jump_at_one.has_value());
    for (long k = 1; k <= 10; ++k) CHECK(iterated_index(d, k) == 0);
  }

  SECTION("negative eigenvalues pass through a half turn") {
    const SymplecticPath p = block(BlockKind::hyperbolic, Rational(-2));
    CHECK(validate_path(p).ok);
    CHECK(path_nullity(p) == 0);
    CHECK(cz_index(p) == 1);
  }

  SECTION("degenerate eigenvalues are rejected") {
    for (long lam : {0L, 1L, -1L})
      CHECK(thrown_kind([&] { block(BlockKind::hyperbolic, Rational(lam)); }) ==
            ErrorKind::domain);
    CHECK(thrown_kind([&] { block(BlockKind::rotation, Rational(0)); }) ==
          ErrorKind::domain);
  }

  SECTION("the identity block is constant with full nullity") {
    const SymplecticPath p = block(BlockKind::identity);
    CHECK(validate_path(p).ok);
    CHECK(cz_lower(p) == -1);
    CHECK(path_nullity(p) == 2);
  }

  SECTION("appending an identity block shifts the lower index down") {
    std::vector<Block> blocks{Block{Rational(2, 5), Rational(1)},
                              Block{Rational(0), Rational(1)}};
    const SymplecticPath p = make_path(block_sum(std::move(blocks)), "mixed");
    CHECK(cz_lower(p) == 0);
    CHECK(path_nullity(p) == 2);
  }
}

TEST_CASE("ellipsoid paths without catalog claims") {
  const std::vector<SymplecticPath> paths =
      ellipsoid_paths({{Rational(1), Rational(1), Rational(1)}});
  REQUIRE(paths.size() == 3);
  for (const SymplecticPath& p : paths) {
    CHECK(p.dim2n == 4);
    CHECK(validate_path(p).ok);
    CHECK(cz_lower(p) == 2);
  }
  CHECK(thrown_kind([&] { ellipsoid_paths({{}}); }) == ErrorKind::structural);
  CHECK(thrown_kind([&] { ellipsoid_catalog({{Rational(2)}}); }) ==
        ErrorKind::domain);
  CHECK(thrown_kind([&] { ellipsoid_catalog({{Rational(1), Rational(-2)}}); }) ==
        ErrorKind::structural);
}

TEST_CASE("random ellipsoid catalogs audit as consistent") {
  std::mt19937 rng(20260818);
  std::uniform_int_distribution<int> aspect(1, 6);
  std::uniform_int_distribution<int> scale_num(1, 7);
  std::uniform_int_distribution<int> scale_den(1, 7);
  for (int n = 1; n <= 3; ++n) {
    for (int trial = 0; trial < 10; ++trial) {
      std::set<int> ints;
      while (int(ints.size()) < n + 1) ints.insert(aspect(rng));
      const Rational s(scale_num(rng), scale_den(rng));
      EllipsoidSpec spec;
      for (int a : ints) spec.aspects.push_back(Rational(a) * s);
      const EllipsoidModel m = ellipsoid_catalog(spec);
      CHECK(convexity_check(m.catalog).pass);
      CHECK(resonance_check(m.catalog).pass);
      const AuditReport rep = audit(m.catalog);
      INFO("n=" << n << " trial=" << trial << " reason=" << rep.reason);
      CHECK(rep.verdict == AuditVerdict::consistent);
      const MorseReport mo = morse_check(m.catalog, 2 * rep.n_value - 1);
      CHECK(mo.alternating_ok);
      CHECK(mo.pointwise_ok);
    }
  }
}
