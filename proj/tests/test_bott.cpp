#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include <reebidx/bott.hpp>
#include <reebidx/index.hpp>

using namespace reebidx;

namespace {

BottData rot_data(const Rational& angle) {
  BottData d;
  d.dim2n = 2;
  d.b_at_one = 1;
  d.elliptic_height = 2;
  BottJump j;
  j.angle = Angle::exact(angle);
  if (angle == 1) {
    j.s_plus = 1;
    j.s_minus = 1;
    j.nu = 2;
  } else {
    j.s_plus = 0;
    j.s_minus = 1;
    j.nu = 1;
  }
  d.jumps.push_back(j);
  return d;
}

BottData constant_data(long c, int dim2n = 2) {
  BottData d;
  d.dim2n = dim2n;
  d.b_at_one = c;
  d.elliptic_height = 0;
  return d;
}

// Simple short orbit on the ellipsoid with aspect ratio 2: unit-speed
// rotation factor plus a half-speed one, i.e. the block path R(3*pi*t).
BottData short_ellipsoid_orbit() {
  BottData d;
  d.dim2n = 2;
  d.b_at_one = 3;
  d.elliptic_height = 2;
  d.jumps.push_back({Angle::exact(Rational(1)), 1, 1, 2});
  d.name = "e12_gamma1";
  return d;
}

Integer naive_iterated(const BottData& d, long k) {
  Integer total{0};
  for (long j = 0; j < k; ++j) total += bott_value(d, Rational(2 * j, k));
  return total;
}

// Smallest k at which a root of unity lands on the angle (units of pi).
long first_hit(const Rational& angle) {
  if (angle == 0) return 1;
  return to_long(denominator(Rational(angle / 2)));
}

RatMatrix rationalize(const Eigen::MatrixXd& m) {
  const long long den = 10000000000000LL;
  RatMatrix out(int(m.rows()), int(m.cols()));
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j)
      out(i, j) = Rational(llround(m(i, j) * double(den)), den);
  return out;
}

SymplecticPath sampled_rotation_plus_hyperbolic(int count) {
  SymplecticPath p;
  p.dim2n = 4;
  p.name = "sampled_sum";
  for (int i = 0; i <= count; ++i) {
    double t = double(i) / count;
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(4, 4);
    m.block<2, 2>(0, 0) = rot2(2.0 * M_PI / 5.0 * t);
    double ch = std::cosh(t), sh = std::sinh(t);
    m(2, 2) = ch;
    m(2, 3) = sh;
    m(3, 2) = sh;
    m(3, 3) = ch;
    PathSample ps;
    ps.t = Rational(i, count);
    ps.m = rationalize(m);
    ps.entries_exact = false;
    p.samples.push_back(std::move(ps));
  }
  return p;
}

// Short iterate windows can fail to separate the splitting unknowns even
// when each jump angle is hit; widening the window breaks the coincidence.
BottData infer_with_retries(const SymplecticPath& p, int K) {
  for (;; K += 6) {
    try {
      return infer_bott(p, K);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::ambiguity || K > 60) throw;
    }
  }
}

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

std::vector<BottData> exact_corpus() {
  std::vector<BottData> out;
  out.push_back(rot_data(Rational(2, 5)));
  out.push_back(rot_data(Rational(1)));
  out.push_back(rot_data(Rational(7, 9)));
  out.push_back(short_ellipsoid_orbit());
  out.push_back(constant_data(-2, 4));
  {
    BottData d;
    d.dim2n = 4;
    d.b_at_one = 2;
    d.elliptic_height = 4;
    d.jumps.push_back({Angle::exact(Rational(1, 3)), 0, 1, 1});
    d.jumps.push_back({Angle::exact(Rational(3, 4)), 1, 0, 1});
    out.push_back(d);
  }
  {
    BottData d;
    d.dim2n = 4;
    d.b_at_one = 0;
    d.jump_at_one = JumpAtOne{1, 2};
    d.elliptic_height = 4;
    d.jumps.push_back({Angle::exact(Rational(1, 2)), 1, 0, 1});
    out.push_back(d);
  }
  return out;
}

} // namespace

TEST_CASE("circle values walk the arcs and mirror across conjugation") {
  BottData d = rot_data(Rational(2, 5));
  CHECK(bott_value(d, Rational(0)) == 1);
  CHECK(bott_value(d, Rational(1, 5)) == 1);
  CHECK(bott_value(d, Rational(2, 5)) == 0);
  CHECK(bott_value(d, Rational(4, 5)) == 0);
  CHECK(bott_value(d, Rational(1)) == 0);
  for (const Rational& phi :
       {Rational(1, 5), Rational(2, 5), Rational(1, 2), Rational(9, 10), Rational(1)})
    CHECK(bott_value(d, phi) == bott_value(d, 2 - phi));
  CHECK(thrown_kind([&] { bott_value(d, Rational(2)); }) == ErrorKind::domain);
}

TEST_CASE("one-sided limits at a jump recover the splitting numbers") {
  BottData d = rot_data(Rational(2, 5));
  Rational at(2, 5), tiny(1, 1000);
  CHECK(bott_value(d, at + tiny) == bott_value(d, at) + d.jumps[0].s_plus);
  CHECK(bott_value(d, at - tiny) == bott_value(d, at) + d.jumps[0].s_minus);

  BottData e = short_ellipsoid_orbit();
  CHECK(bott_value(e, Rational(1)) == 2);
  CHECK(bott_value(e, 1 - tiny) == bott_value(e, Rational(1)) + e.jumps[0].s_minus);
  CHECK(bott_value(e, 1 + tiny) == bott_value(e, 1 - tiny));
}

TEST_CASE("closed-form iterated index equals the naive root-of-unity sum") {
  for (const BottData& d : exact_corpus())
    for (long k = 1; k <= 30; ++k)
      CHECK(iterated_index(d, k) == naive_iterated(d, k));
}

TEST_CASE("tilted jump angles are never hit by roots of unity") {
  BottData d;
  d.dim2n = 2;
  d.b_at_one = 3;
  d.elliptic_height = 2;
  d.jumps.push_back({Angle::exact(Tilted{Rational(1, 2), -1}), 0, 1, 1});
  for (long k = 1; k <= 30; ++k) {
    CHECK(iterated_index(d, k) == naive_iterated(d, k));
    CHECK(iterated_nullity(d, k) == 0);
  }
  CHECK(bott_value(d, Rational(1, 2)) == 2);
}

TEST_CASE("iterated indices agree with the exact block route") {
  for (const Rational& r :
       {Rational(1), Rational(2, 5), Rational(7, 3), Rational(-2, 5), Rational(5, 2)}) {
    SymplecticPath p = make_path(block_sum({Block{r, 1}}));
    Rational u = r - 2 * Rational(rat_floor(r / 2));
    Rational ang = u <= 1 ? u : 2 - u;
    int K = int(std::max<long>(4, first_hit(ang) + 2));
    BottData d = infer_bott(p, K);
    for (long k = 1; k <= 24; ++k) {
      CHECK(iterated_index(d, k) == cz_lower(iterate_path(p, k)));
      CHECK(iterated_nullity(d, k) == path_nullity(iterate_path(p, k)));
    }
  }
}

TEST_CASE("short ellipsoid orbit data reproduces its known iterates") {
  BottData d = short_ellipsoid_orbit();
  CHECK(iterated_index(d, 2) == 5);
  CHECK(iterated_index(d, 5) == 15);
  CHECK(iterated_nullity(d, 2) == 2);
  CHECK(iterated_nullity(d, 3) == 0);
  CHECK(mean_index(d).as_exact("mean") == 3);
  CHECK(good_iterate(d, 2));
  CHECK(index_gap_check(d, 3));
  CHECK(elliptic_flags(d).elliptic);

  SymplecticPath p = make_path(block_sum({Block{3, 1}}));
  for (long k = 1; k <= 12; ++k) {
    CHECK(iterated_index(d, k) == cz_lower(iterate_path(p, k)));
    CHECK(iterated_nullity(d, k) == path_nullity(iterate_path(p, k)));
  }
}

TEST_CASE("mean index integrates the arc values") {
  CHECK(mean_index(rot_data(Rational(2, 5))).as_exact("mean") == Rational(2, 5));
  CHECK(mean_index(rot_data(Rational(1))).as_exact("mean") == 1);
  CHECK(mean_index(constant_data(7)).as_exact("mean") == 7);
}

TEST_CASE("rotation nullities follow root-of-unity membership") {
  BottData d = rot_data(Rational(2, 5));
  CHECK(iterated_nullity(d, 5) == 2);
  CHECK(iterated_nullity(d, 3) == 0);
  CHECK(iterated_nullity(d, 10) == 2);
  BottData pi = rot_data(Rational(1));
  CHECK(iterated_nullity(pi, 2) == 2);
  CHECK(iterated_nullity(pi, 1) == 0);
}

TEST_CASE("elliptic and hyperbolic flags read the elliptic height") {
  EllipticFlags f = elliptic_flags(rot_data(Rational(2, 5)));
  CHECK(f.elliptic);
  CHECK_FALSE(f.hyperbolic);
  CHECK(f.e == 2);
  EllipticFlags h = elliptic_flags(constant_data(1));
  CHECK(h.hyperbolic);
  CHECK_FALSE(h.elliptic);
}

TEST_CASE("inverse data satisfies the index-nullity reflection") {
  for (const BottData& d : exact_corpus()) {
    BottData inv = bott_invert(d);
    for (long k = 1; k <= 12; ++k) {
      CHECK(iterated_index(inv, k) == -iterated_index(d, k) - iterated_nullity(d, k));
      CHECK(iterated_nullity(inv, k) == iterated_nullity(d, k));
    }
    BottData back = bott_invert(inv);
    CHECK(back.b_at_one == d.b_at_one);
    for (size_t j = 0; j < d.jumps.size(); ++j) {
      CHECK(back.jumps[j].s_plus == d.jumps[j].s_plus);
      CHECK(back.jumps[j].s_minus == d.jumps[j].s_minus);
    }
  }
}

TEST_CASE("inverse data matches the inverted path") {
  SymplecticPath p = make_path(block_sum({Block{Rational(2, 5), 1}}));
  BottData d = infer_bott(p, 7);
  BottData inv = bott_invert(d);
  SymplecticPath q = invert_path(p);
  for (long k = 1; k <= 12; ++k)
    CHECK(iterated_index(inv, k) == cz_lower(iterate_path(q, k)));
}

TEST_CASE("splitting numbers are solved from iterated indices") {
  SymplecticPath p = make_path(block_sum({Block{Rational(2, 5), 1}}));
  BottData d = infer_bott(p, 7);
  CHECK(d.b_at_one == 1);
  REQUIRE(d.jumps.size() == 1);
  CHECK(d.jumps[0].s_minus == 1);
  CHECK(d.jumps[0].s_plus == 0);
  CHECK(d.jumps[0].nu == 1);
  REQUIRE(d.jumps[0].angle.exact_rational().has_value());
  CHECK(*d.jumps[0].angle.exact_rational() == Rational(2, 5));
  CHECK(d.elliptic_height == 2);
  CHECK_FALSE(d.jump_at_one.has_value());
}

TEST_CASE("hyperbolic paths infer a constant circle function") {
  RatMatrix a(2, 2);
  a(0, 0) = 1;
  a(1, 1) = -1;
  BottData d = infer_bott(make_path(exp_symmetric(a)), 4);
  CHECK(d.b_at_one == 0);
  CHECK(d.jumps.empty());
  CHECK(d.elliptic_height == 0);
  CHECK_FALSE(d.jump_at_one.has_value());
  for (long k = 1; k <= 10; ++k) CHECK(iterated_index(d, k) == 0);
}

TEST_CASE("a full loop shifts the circle function uniformly") {
  Generator g = loop_product({Integer(1)}, block_sum({Block{Rational(2, 5), 1}}));
  BottData d = infer_bott(make_path(g), 7);
  CHECK(d.b_at_one == 3);
  REQUIRE(d.jumps.size() == 1);
  CHECK(d.jumps[0].s_minus == 1);
  CHECK(d.jumps[0].s_plus == 0);
  SymplecticPath p = make_path(g);
  for (long k = 1; k <= 24; ++k)
    CHECK(iterated_index(d, k) == cz_lower(iterate_path(p, k)));
}

TEST_CASE("direct sums add their jump data") {
  SymplecticPath p = make_path(block_sum({Block{Rational(2, 5), 1}, Block{0, 2}}));
  BottData d = infer_bott(p, 7);
  CHECK(d.b_at_one == 1);
  CHECK(d.elliptic_height == 2);
  REQUIRE(d.jumps.size() == 1);
  CHECK(d.jumps[0].s_minus == 1);
  CHECK(d.jumps[0].s_plus == 0);
  CHECK(d.jumps[0].nu == 1);
}

TEST_CASE("sampled direct sums infer the same data numerically") {
  SymplecticPath p = sampled_rotation_plus_hyperbolic(1200);
  BottData d = infer_bott(p, 6);
  CHECK(d.b_at_one == 1);
  CHECK(d.elliptic_height == 2);
  CHECK_FALSE(d.jump_at_one.has_value());
  REQUIRE(d.jumps.size() == 1);
  REQUIRE(d.jumps[0].angle.exact_rational().has_value());
  CHECK(*d.jumps[0].angle.exact_rational() == Rational(2, 5));
  CHECK(d.jumps[0].s_minus == 1);
  CHECK(d.jumps[0].s_plus == 0);
  CHECK(d.jumps[0].nu == 1);
}

TEST_CASE("jumps that no iterate can pin down raise an ambiguity error") {
  RatMatrix a = RatMatrix::identity(2);
  CHECK(thrown_kind([&] { infer_bott(make_path(exp_symmetric(a)), 7); }) ==
        ErrorKind::ambiguity);
}

TEST_CASE("closed-form iteration parameters match the generic patterns") {
  IterationParams rot = nondeg_iteration_params(rot_data(Rational(2, 5)));
  CHECK(rot.a == 0);
  CHECK(rot.b == 1);
  REQUIRE(rot.angles.size() == 1);
  CHECK(*rot.angles[0].exact_rational() == Rational(2, 5));

  IterationParams ell = nondeg_iteration_params(short_ellipsoid_orbit());
  CHECK(ell.a == 2);
  CHECK(ell.b == 1);
  REQUIRE(ell.angles.size() == 1);
  CHECK(*ell.angles[0].exact_rational() == 1);

  IterationParams flat = nondeg_iteration_params(constant_data(4));
  CHECK(flat.a == 4);
  CHECK(flat.b == 0);
  CHECK(flat.angles.empty());

  IterationParams mir = nondeg_iteration_params(bott_invert(rot_data(Rational(2, 5))));
  CHECK(mir.a == -2);
  CHECK(mir.b == 1);
  REQUIRE(mir.angles.size() == 1);
  CHECK(*mir.angles[0].exact_rational() == Rational(8, 5));

  BottData bad = rot_data(Rational(1, 2));
  bad.jumps[0].s_plus = 1;
  CHECK(thrown_kind([&] { nondeg_iteration_params(bad); }) ==
        ErrorKind::not_representable);
  CHECK(thrown_kind([&] {
          BottData d = constant_data(0);
          d.jump_at_one = JumpAtOne{1, 2};
          d.elliptic_height = 2;
          return nondeg_iteration_params(d);
        }) == ErrorKind::not_representable);
}

TEST_CASE("index gap between consecutive even and odd iterates") {
  BottData d = short_ellipsoid_orbit();
  CHECK(iterated_index(d, 4) == 11);
  CHECK(iterated_index(d, 5) == 15);
  CHECK(index_gap_check(d, 3));
  CHECK_FALSE(index_gap_check(constant_data(0), 5));
  CHECK(index_gap_check(constant_data(2), 2));
  CHECK(thrown_kind([&] { index_gap_check(d, 1); }) == ErrorKind::domain);
}

TEST_CASE("iterate inequalities and parity hold across a random block corpus") {
  std::mt19937 rng(12345);
  std::uniform_int_distribution<int> den(1, 6), num(-12, 12), pick(0, 3);
  std::vector<BottData> corpus = exact_corpus();

  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Block> blocks;
    int nb = 1 + trial % 3;
    long max_hit = 1;
    for (int b = 0; b < nb; ++b) {
      if (pick(rng) == 0) {
        blocks.push_back({Rational(pick(rng) - 1), Rational(1 + pick(rng))});
        continue;
      }
      Rational r;
      do {
        r = Rational(num(rng), den(rng));
      } while (r == 0);
      Rational u = r - 2 * Rational(rat_floor(r / 2));
      Rational ang = u <= 1 ? u : 2 - u;
      max_hit = std::max(max_hit, first_hit(ang));
      blocks.push_back({r, 1});
    }
    SymplecticPath p = make_path(block_sum(blocks));
    int K = int(std::max<long>(long(2 * blocks.size()) + 3, max_hit + 2));
    BottData d = infer_with_retries(p, K);
    for (long k = 1; k <= 24; ++k)
      CHECK(iterated_index(d, k) == cz_lower(iterate_path(p, k)));
    corpus.push_back(d);
  }

  for (const BottData& d : corpus) {
    const int n = d.dim2n / 2;
    Integer base = iterated_index(d, 1);
    Rational delta = mean_index(d).as_exact("mean");
    bool weakly_nondeg = !d.jumps.empty() || d.elliptic_height < d.dim2n;
    for (long m = 1; m <= 50; ++m) {
      Integer lhs = Integer(iterated_nullity(d, m)) - d.elliptic_height / 2;
      Integer gap = iterated_index(d, m + 1) - iterated_index(d, m) - base;
      CHECK(lhs <= gap);
      Rational drift = rat_abs(Rational(iterated_index(d, m)) - m * delta);
      CHECK(drift <= d.dim2n);
      if (iterated_nullity(d, m) == 0 && weakly_nondeg) CHECK(drift < n);
      if (m >= 2) {
        Integer a = iterated_index(d, m);
        Integer b = iterated_index(d, m - 2 >= 1 ? m - 2 : m);
        CHECK((a - b) % 2 == 0);
      }
    }
    if (d.b_at_one >= n)
      for (long m = 1; m <= 50; ++m)
        CHECK(iterated_index(d, m + 1) >= iterated_index(d, m));
  }
}

TEST_CASE("local homology must sit in the admissible degree window") {
  BottData d = constant_data(1);
  d.jump_at_one = JumpAtOne{1, 2};
  d.elliptic_height = 2;
  d.local_homology = std::map<long, long>{{2, 1}};
  CHECK(mean_index(d).as_exact("mean") == 2);
  validate_bott(d);

  d.local_homology = std::map<long, long>{{5, 1}};
  CHECK(thrown_kind([&] { validate_bott(d); }) == ErrorKind::structural);
  d.local_homology = std::map<long, long>{{1, 1}};
  validate_bott(d);
  d.local_homology = std::map<long, long>{{0, 1}};
  CHECK(thrown_kind([&] { validate_bott(d); }) == ErrorKind::structural);
}

TEST_CASE("invalid jump data is rejected") {
  BottData d = rot_data(Rational(2, 5));
  d.jumps[0].s_minus = 2;
  CHECK(thrown_kind([&] { validate_bott(d); }) == ErrorKind::structural);

  BottData e = rot_data(Rational(1));
  e.jumps[0].s_plus = 0;
  CHECK(thrown_kind([&] { validate_bott(e); }) == ErrorKind::structural);

  BottData f = rot_data(Rational(2, 5));
  f.elliptic_height = 0;
  CHECK(thrown_kind([&] { validate_bott(f); }) == ErrorKind::structural);

  BottData g = rot_data(Rational(2, 5));
  g.jumps.push_back(g.jumps[0]);
  g.dim2n = 4;
  g.elliptic_height = 4;
  CHECK(thrown_kind([&] { validate_bott(g); }) == ErrorKind::structural);
}
