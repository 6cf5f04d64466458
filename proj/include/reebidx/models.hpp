#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "reebidx/bott.hpp"
#include "reebidx/chomology.hpp"
#include "reebidx/errors.hpp"
#include "reebidx/index.hpp"
#include "reebidx/rational.hpp"
#include "reebidx/sympath.hpp"

namespace reebidx {

/// Ellipsoid semi-axis weights; only the pairwise ratios matter.
struct EllipsoidSpec {
  std::vector<Rational> aspects;
};

inline void validate_ellipsoid(const EllipsoidSpec& s) {
  require(!s.aspects.empty(), ErrorKind::structural, "aspect list must be non-empty");
  for (const Rational& a : s.aspects)
    require(a > 0, ErrorKind::structural, "aspects must be positive");
}

enum class BlockKind { rotation, hyperbolic, identity };

/// Elementary 2x2 generator paths. rotation takes the turn fraction rho and
/// yields R(2 pi rho t); hyperbolic takes the end eigenvalue lambda outside
/// {0, 1, -1}, negative values reached through a half-turn; identity is the
/// constant path.
inline SymplecticPath block(BlockKind kind, const Rational& param = Rational(1)) {
  switch (kind) {
    case BlockKind::rotation:
      require(param != 0, ErrorKind::domain, "rotation block needs a nonzero turn fraction");
      return make_path(block_sum({Block{2 * param, Rational(1)}}), "rotation");
    case BlockKind::hyperbolic:
      require(param != 0 && param != 1 && param != -1, ErrorKind::domain,
              "hyperbolic block needs an eigenvalue outside {0, 1, -1}");
      if (param > 0) return make_path(block_sum({Block{Rational(0), param}}), "hyperbolic");
      return make_path(block_sum({Block{Rational(1), -param}}), "hyperbolic");
    default:
      return make_path(block_sum({Block{Rational(0), Rational(1)}}), "identity");
  }
}

/// Profiles of the supported bases. sphere(n) is the complex projective
/// base with recurrence 2(n+1) unless overridden; unit-cotangent-sphere(n)
/// is the oriented 2-plane Grassmannian base, which needs an explicit
/// recurrence index.
inline PrequantProfile catalog_profile(const std::string& name, int n,
                                       std::optional<Integer> index_period = {}) {
  require(n >= 1, ErrorKind::domain, "profile dimension must be at least 1");
  PrequantProfile p;
  p.n = n;
  p.betti.assign(size_t(2 * n + 1), 0);
  if (name == "sphere") {
    for (int i = 0; i <= 2 * n; i += 2) p.betti[size_t(i)] = 1;
    p.index_period = index_period ? *index_period : Integer(2 * (n + 1));
    p.c_b = n + 1;
  } else if (name == "unit-cotangent-sphere") {
    for (int i = 0; i <= 2 * n; i += 2) p.betti[size_t(i)] = 1;
    if (n % 2 == 0) p.betti[size_t(n)] += 1;
    p.c_b = n == 1 ? 2 : n;
    require(index_period.has_value(), ErrorKind::domain,
            "this profile needs an explicit recurrence index");
    p.index_period = *index_period;
  } else {
    fail(ErrorKind::domain, "unknown profile name '" + name + "'");
  }
  validate_profile(p);
  return p;
}

namespace detail {

/// Accumulates the Bott contribution of one rotation factor R(2 pi rho t).
/// In exact mode the eigenvalue angle is placed exactly; in tilted mode it
/// is displaced by an infinitesimal relative perturbation of rho with the
/// given sign, so no iterate is ever degenerate.
struct EllipsoidAccumulator {
  Integer b{2};
  int s1 = 0;
  int nu1 = 0;
  std::map<Tilted, BottJump> jumps;

  void add_jump(const Tilted& at, int sp, int sm, int nu) {
    auto [it, fresh] = jumps.try_emplace(at);
    BottJump& j = it->second;
    if (fresh) {
      j.angle = Angle::exact(at);
      j.s_plus = 0;
      j.s_minus = 0;
      j.nu = 0;
    }
    j.s_plus += sp;
    j.s_minus += sm;
    j.nu += nu;
  }

  void add_exact(const Rational& rho) {
    const Rational f = rat_frac(rho);
    if (f == 0) {
      b += 2 * rat_floor(rho) - 1;
      s1 += 1;
      nu1 += 2;
      return;
    }
    b += 2 * rat_floor(rho) + 1;
    if (f == Rational(1, 2)) {
      add_jump(Tilted{Rational(1)}, 1, 1, 2);
    } else if (f < Rational(1, 2)) {
      add_jump(Tilted{2 * f}, 0, 1, 1);
    } else {
      add_jump(Tilted{2 * (1 - f)}, 1, 0, 1);
    }
  }

  void add_tilted(const Rational& rho, int dir) {
    const Rational f = rat_frac(rho);
    if (f == 0) {
      if (dir > 0) {
        b += 2 * rat_floor(rho) + 1;
        add_jump(Tilted{Rational(0), 1}, 0, 1, 1);
      } else {
        b += 2 * rat_floor(rho) - 1;
        add_jump(Tilted{Rational(0), 1}, 1, 0, 1);
      }
      return;
    }
    b += 2 * rat_floor(rho) + 1;
    if (f == Rational(1, 2)) {
      if (dir > 0)
        add_jump(Tilted{Rational(1), -1}, 1, 0, 1);
      else
        add_jump(Tilted{Rational(1), -1}, 0, 1, 1);
    } else if (f < Rational(1, 2)) {
      add_jump(Tilted{2 * f, dir}, 0, 1, 1);
    } else {
      add_jump(Tilted{2 * (1 - f), -dir}, 1, 0, 1);
    }
  }

  BottData finish(int dim2n, std::string name) const {
    BottData d;
    d.dim2n = dim2n;
    d.elliptic_height = dim2n;
    d.b_at_one = b;
    if (nu1 > 0) d.jump_at_one = JumpAtOne{s1, nu1};
    for (const auto& [at, j] : jumps) d.jumps.push_back(j);
    d.name = std::move(name);
    return d;
  }
};

} // namespace detail

struct EllipsoidOptions {
  /// Place eigenvalue angles exactly instead of tilting them; resonant
  /// iterates then become degenerate and may need local homology.
  bool exact_angles = false;
  /// Local homology tables injected by orbit name, exact mode only.
  std::map<std::string, std::map<long, long>> local_homology;
  /// Iterates per orbit checked against the path oracle.
  long verify_up_to = 12;
};

struct EllipsoidModel {
  OrbitCatalog catalog;
  std::vector<SymplecticPath> generators;
  /// Set when equal aspects make the tilted representation undefined and no
  /// local homology was injected; the catalog then carries no orbits.
  bool paths_only = false;
};

/// Closed-orbit catalog of the ellipsoid with the given aspects, one orbit
/// per aspect, over the sphere profile. Orbit j rotates by 2 pi a_j/a_i in
/// the i-th transverse plane and every iterate gains a uniform degree shift
/// of 2. The Bott data is not trusted as ground truth: each orbit is checked
/// against the path index oracle on its generator before returning, exactly
/// at nondegenerate iterates and by window containment at degenerate ones.
inline EllipsoidModel ellipsoid_catalog(const EllipsoidSpec& spec,
                                        const EllipsoidOptions& opts = {}) {
  validate_ellipsoid(spec);
  const size_t count = spec.aspects.size();
  require(count >= 2, ErrorKind::domain, "a catalog needs at least two aspects");
  const int n = int(count) - 1;

  bool has_equal_pair = false;
  for (size_t j = 0; j < count; ++j)
    for (size_t i = j + 1; i < count; ++i)
      has_equal_pair = has_equal_pair || spec.aspects[i] == spec.aspects[j];

  EllipsoidModel model;
  model.catalog.profile = catalog_profile("sphere", n);
  model.catalog.claimed_complete = true;

  for (size_t j = 0; j < count; ++j) {
    std::vector<Block> blocks;
    for (size_t i = 0; i < count; ++i)
      if (i != j) blocks.push_back(Block{2 * spec.aspects[j] / spec.aspects[i], Rational(1)});
    model.generators.push_back(
        make_path(block_sum(std::move(blocks)), "gamma" + std::to_string(j + 1)));
  }

  const bool exact_mode = opts.exact_angles || has_equal_pair;
  if (has_equal_pair && !opts.exact_angles && opts.local_homology.empty()) {
    model.paths_only = true;
    return model;
  }

  for (size_t j = 0; j < count; ++j) {
    detail::EllipsoidAccumulator acc;
    detail::EllipsoidAccumulator exact_twin;
    for (size_t i = 0; i < count; ++i) {
      if (i == j) continue;
      const Rational rho = spec.aspects[j] / spec.aspects[i];
      exact_twin.add_exact(rho);
      if (exact_mode) {
        acc.add_exact(rho);
      } else {
        const int dir = spec.aspects[j] > spec.aspects[i] ? 1 : -1;
        acc.add_tilted(rho, dir);
      }
    }
    const std::string name = "gamma" + std::to_string(j + 1);
    BottData d = acc.finish(2 * n, name);
    if (exact_mode) {
      auto it = opts.local_homology.find(name);
      if (it != opts.local_homology.end()) d.local_homology = it->second;
    }
    validate_bott(d);
    const BottData twin = exact_twin.finish(2 * n, name);

    for (long k = 1; k <= opts.verify_up_to; ++k) {
      const Integer expected = cz_lower(iterate_path(model.generators[j], k)) + 2 * k;
      const Integer got = iterated_index(d, k);
      const int nu = iterated_nullity(twin, k);
      if (nu == 0) {
        require(got == expected, ErrorKind::construction,
                "orbit " + name + " iterate " + std::to_string(k) +
                    " disagrees with the path oracle");
      } else {
        require(got >= expected && got <= expected + nu, ErrorKind::construction,
                "orbit " + name + " iterate " + std::to_string(k) +
                    " leaves the oracle window of a degenerate iterate");
      }
    }
    model.catalog.orbits.push_back(std::move(d));
  }
  validate_catalog(model.catalog);
  return model;
}

/// Generator paths only, without any catalog claims.
inline std::vector<SymplecticPath> ellipsoid_paths(const EllipsoidSpec& spec) {
  validate_ellipsoid(spec);
  std::vector<SymplecticPath> out;
  for (size_t j = 0; j < spec.aspects.size(); ++j) {
    std::vector<Block> blocks;
    for (size_t i = 0; i < spec.aspects.size(); ++i)
      if (i != j) blocks.push_back(Block{2 * spec.aspects[j] / spec.aspects[i], Rational(1)});
    require(!blocks.empty(), ErrorKind::domain, "a generator needs at least two aspects");
    out.push_back(make_path(block_sum(std::move(blocks)), "gamma" + std::to_string(j + 1)));
  }
  return out;
}

} // namespace reebidx
