#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "reebidx/bott.hpp"
#include "reebidx/cijt.hpp"
#include "reebidx/errors.hpp"
#include "reebidx/rational.hpp"

namespace reebidx {

/// Homological profile of a prequantization-type contact manifold: the betti
/// numbers of the 2n-dimensional base in degrees 0..2n, the even recurrence
/// index_period of the ambient grading, and the positive twisting degree c_b
/// with index_period >= 2 c_b. The threshold index_period - n is derived,
/// not stored.
struct PrequantProfile {
  int n = 1;
  std::vector<long> betti;
  Integer index_period{0};
  Integer c_b{1};
};

inline void validate_profile(const PrequantProfile& p) {
  require(p.n >= 1, ErrorKind::structural, "base dimension parameter must be at least 1");
  require(p.betti.size() == size_t(2 * p.n + 1), ErrorKind::structural,
          "betti table must list degrees 0 through 2n");
  for (long b : p.betti)
    require(b >= 0, ErrorKind::structural, "betti numbers are non-negative");
  require(p.index_period > 0 && p.index_period % 2 == 0, ErrorKind::structural,
          "recurrence index must be a positive even integer");
  require(p.c_b >= 1, ErrorKind::structural, "twisting degree must be positive");
  require(p.index_period >= 2 * p.c_b, ErrorKind::structural,
          "recurrence index must be at least twice the twisting degree");
}

/// Total rank of the base homology.
inline long r_b(const PrequantProfile& p) {
  validate_profile(p);
  long total = 0;
  for (long b : p.betti) total += b;
  return total;
}

/// Euler characteristic of the base.
inline long euler_characteristic(const PrequantProfile& p) {
  validate_profile(p);
  long total = 0;
  for (size_t i = 0; i < p.betti.size(); ++i)
    total += i % 2 == 0 ? p.betti[i] : -p.betti[i];
  return total;
}

/// Mean Euler characteristic of the ambient complex,
/// (-1)^n chi(base) / index_period.
inline Rational chi0(const PrequantProfile& p) {
  Rational v = Rational(euler_characteristic(p)) / Rational(p.index_period);
  return p.n % 2 == 0 ? v : -v;
}

/// Convexity threshold derived from the profile.
inline Integer k_minus(const PrequantProfile& p) {
  validate_profile(p);
  return p.index_period - p.n;
}

/// Rank of the ambient complex in one degree: the base homology reappears
/// shifted by every positive multiple of the recurrence index, and ranks of
/// overlapping copies add up.
inline long prequant_rank(const PrequantProfile& p, const Integer& degree) {
  validate_profile(p);
  Integer kmin = rat_ceil(Rational(degree - p.n) / Rational(p.index_period));
  if (kmin < 1) kmin = 1;
  Integer kmax = rat_floor(Rational(degree + p.n) / Rational(p.index_period));
  long total = 0;
  for (Integer k = kmin; k <= kmax; ++k) {
    Integer idx = degree - k * p.index_period + p.n;
    total += p.betti[idx.convert_to<size_t>()];
  }
  return total;
}

/// A named collection of closed-orbit index data over one profile.
/// claimed_complete records whether the catalog asserts that it lists every
/// contractible closed orbit.
struct OrbitCatalog {
  PrequantProfile profile;
  std::vector<BottData> orbits;
  bool claimed_complete = false;
};

inline void validate_catalog(const OrbitCatalog& c) {
  validate_profile(c.profile);
  std::set<std::string> names;
  for (const BottData& d : c.orbits) {
    validate_bott(d);
    require(d.dim2n == 2 * c.profile.n, ErrorKind::structural,
            "orbit dimension disagrees with the profile");
    require(!d.name.empty(), ErrorKind::structural, "catalog orbits must be named");
    require(names.insert(d.name).second, ErrorKind::structural,
            "duplicate orbit name '" + d.name + "'");
  }
}

namespace detail {

/// Which jumps meet a k-th root of unity; the pattern determines whether the
/// stored local homology applies to iterate k unchanged.
inline std::vector<char> degeneracy_signature(const BottData& d, long k) {
  std::vector<char> sig;
  sig.reserve(d.jumps.size());
  const Rational c = Rational(k) / 2;
  for (const BottJump& j : d.jumps)
    sig.push_back(
        j.angle.scaled_is_integer(c, "root-of-unity membership of a jump") ? 1 : 0);
  return sig;
}

inline bool good_iterate_raw(const BottData& d, long k) {
  return (iterated_index_raw(d, k) - d.b_at_one) % 2 == 0;
}

/// Whether no iterate of any orbit is ever degenerate. Enclosure angles
/// count as possibly degenerate.
inline bool nondegenerate_catalog(const std::vector<BottData>& orbits) {
  for (const BottData& d : orbits) {
    if (d.jump_at_one) return false;
    for (const BottJump& j : d.jumps) {
      if (j.angle.exact_rational()) return false;
      if (!(j.angle.lo() == j.angle.hi())) return false;
    }
  }
  return true;
}

} // namespace detail

/// Euler characteristic of the local homology of the k-th iterate: zero for
/// a bad iterate, a signed unit for a nondegenerate good one, and the
/// alternating rank sum of the stored table for a degenerate good one. The
/// stored table must describe the same degeneracy pattern as iterate k.
inline long local_chi(const BottData& d, long k) {
  validate_bott(d);
  require(k >= 1, ErrorKind::domain, "iteration count must be at least 1");
  if (!good_iterate(d, k)) return 0;
  if (iterated_nullity(d, k) == 0)
    return iterated_index(d, k) % 2 == 0 ? 1 : -1;
  require(d.local_homology.has_value(), ErrorKind::data_required,
          "local homology of orbit '" + d.name + "' is required at iterate " +
              std::to_string(k));
  const long k0 = detail::data_iterate(d);
  require(iterated_nullity(d, k) == detail::iterated_nullity_raw(d, k0) &&
              detail::degeneracy_signature(d, k) == detail::degeneracy_signature(d, k0),
          ErrorKind::data_required,
          "stored local homology of orbit '" + d.name + "' describes iterate " +
              std::to_string(k0) + ", whose degeneracy differs from iterate " +
              std::to_string(k));
  long sum = 0;
  for (const auto& [deg, rank] : *d.local_homology)
    sum += deg % 2 == 0 ? rank : -rank;
  return sum;
}

struct MeanChi {
  Rational value{0};
  long period = 1;
};

/// Average of local_chi over one structural period: the least common multiple
/// of the root-of-unity hit periods of the exact angles and of the index
/// parity period. The averaged sequence is verified to repeat.
inline MeanChi mean_chi(const BottData& d) {
  validate_bott(d);
  Integer p{1};
  for (const BottJump& j : d.jumps)
    if (auto r = j.angle.exact_rational())
      p = int_lcm(p, denominator(*r) * (numerator(*r) % 2 == 0 ? 1 : 2));
  if ((iterated_index(d, 2) - iterated_index(d, 1)) % 2 != 0)
    p = int_lcm(p, Integer(2));
  const long period = p.convert_to<long>();
  std::vector<long> chi(size_t(2 * period));
  for (long k = 1; k <= 2 * period; ++k) chi[size_t(k - 1)] = local_chi(d, k);
  for (long k = 1; k <= period; ++k)
    require(chi[size_t(k - 1)] == chi[size_t(k - 1 + period)], ErrorKind::inference,
            "iterate Euler characteristics of orbit '" + d.name +
                "' fail to repeat with the structural period");
  Rational sum{0};
  for (long k = 1; k <= period; ++k) sum += chi[size_t(k - 1)];
  return {sum / period, period};
}

struct ResonanceReport {
  RatInterval sum{Rational(0)};
  Rational expected{0};
  bool exact = true;
  bool pass = false;
  Rational defect{0};
};

/// Resonance identity: the chi-hat weighted sum of reciprocal mean indices
/// must equal the mean Euler characteristic of the ambient complex, with the
/// sign of the common mean-index orientation. Enclosure data downgrades the
/// test to interval containment.
inline ResonanceReport resonance_check(const OrbitCatalog& c) {
  validate_catalog(c);
  require(!c.orbits.empty(), ErrorKind::precondition,
          "resonance identity needs at least one orbit");
  std::vector<RatInterval> deltas;
  bool all_pos = true, all_neg = true;
  for (const BottData& d : c.orbits) {
    deltas.push_back(mean_index(d));
    all_pos = all_pos && deltas.back().lo > 0;
    all_neg = all_neg && deltas.back().hi < 0;
  }
  require(all_pos || all_neg, ErrorKind::precondition,
          "resonance identity needs all mean indices on one side of zero");
  ResonanceReport rep;
  RatInterval sum{Rational(0)};
  for (size_t i = 0; i < c.orbits.size(); ++i) {
    MeanChi mc = mean_chi(c.orbits[i]);
    RatInterval recip{Rational(1) / deltas[i].hi, Rational(1) / deltas[i].lo};
    sum = sum + recip * mc.value;
  }
  rep.sum = sum;
  Rational e = chi0(c.profile);
  rep.expected = all_pos ? e : -e;
  rep.exact = sum.exact();
  rep.pass = rep.exact ? sum.lo == rep.expected : sum.contains(rep.expected);
  if (rep.exact) rep.defect = sum.lo - rep.expected;
  return rep;
}

enum class ConvexityMode { positive, negative };

struct ConvexityReport {
  bool pass = true;
  bool vacuous = false;
  Integer threshold{0};
  ConvexityMode mode = ConvexityMode::positive;
  std::string offender;
  long iterate = 0;
  Integer value{0};
};

/// Index convexity scan. In positive mode every relevant iterate must have
/// index at least the threshold; in negative mode index plus nullity must be
/// at most minus the threshold. The scan per orbit stops once the mean-index
/// growth bound guarantees all later iterates clear the threshold, and runs
/// to a provable violation when the mean index has the wrong sign. Catalogs
/// without any degenerate iterate are scanned over good iterates only.
inline ConvexityReport convexity_check(const OrbitCatalog& c,
                                       ConvexityMode mode = ConvexityMode::positive,
                                       std::optional<Integer> threshold_override = {}) {
  validate_catalog(c);
  ConvexityReport rep;
  rep.mode = mode;
  rep.threshold = threshold_override ? *threshold_override : k_minus(c.profile);
  rep.vacuous = c.orbits.empty();
  const int n = c.profile.n;
  const Rational thr{rep.threshold};
  const bool good_only = detail::nondegenerate_catalog(c.orbits);
  for (const BottData& d : c.orbits) {
    RatInterval delta = mean_index(d);
    const bool pos = delta.lo > 0;
    const bool neg = delta.hi < 0;
    if (!pos && !neg) {
      if (delta.exact()) {
        bool ok = mode == ConvexityMode::positive ? !(Rational(-n) < thr)
                                                  : !(Rational(n) > -thr);
        if (ok) continue;
        fail(ErrorKind::bounded_search,
             "orbit '" + d.name + "' has vanishing mean index; the iterate scan cannot close");
      }
      fail(ErrorKind::precision,
           "mean index enclosure of orbit '" + d.name + "' straddles zero");
    }
    for (long k = 1;; ++k) {
      if (mode == ConvexityMode::positive && pos && Rational(k) * delta.lo - n > thr)
        break;
      if (mode == ConvexityMode::negative && neg && Rational(k) * delta.hi + n < -thr)
        break;
      if (good_only && !good_iterate(d, k)) continue;
      Integer v = iterated_index(d, k);
      if (mode == ConvexityMode::negative) v += iterated_nullity(d, k);
      bool ok = mode == ConvexityMode::positive ? v >= rep.threshold
                                                : v <= -rep.threshold;
      if (!ok) {
        rep.pass = false;
        rep.offender = d.name;
        rep.iterate = k;
        rep.value = v;
        return rep;
      }
    }
  }
  return rep;
}

namespace detail {

/// Homology contribution of the k-th iterate as degree -> rank: a single
/// generator at the iterate index for a nondegenerate good iterate, the
/// stored local table shifted along with the iterate index for a degenerate
/// good one, nothing for a bad one.
inline std::map<long, long> iterate_contribution(const BottData& d, long k) {
  if (!good_iterate_raw(d, k)) return {};
  if (iterated_nullity_raw(d, k) == 0)
    return {{iterated_index_raw(d, k).convert_to<long>(), 1L}};
  require(d.local_homology.has_value(), ErrorKind::data_required,
          "local homology of orbit '" + d.name + "' is required at iterate " +
              std::to_string(k));
  const long k0 = data_iterate(d);
  require(iterated_nullity_raw(d, k) == iterated_nullity_raw(d, k0) &&
              degeneracy_signature(d, k) == degeneracy_signature(d, k0),
          ErrorKind::data_required,
          "stored local homology of orbit '" + d.name + "' describes iterate " +
              std::to_string(k0) + ", whose degeneracy differs from iterate " +
              std::to_string(k));
  const long shift = (iterated_index_raw(d, k) - iterated_index_raw(d, k0)).convert_to<long>();
  std::map<long, long> out;
  for (const auto& [deg, rank] : *d.local_homology)
    if (rank > 0) out[deg + shift] = rank;
  return out;
}

struct WindowHit {
  std::string orbit;
  long iterate = 0;
  long degree = 0;
  long rank = 0;
};

struct DegreeTable {
  std::map<long, long> counts;
  std::vector<WindowHit> window_hits;
};

/// Accumulates iterate contributions of all orbits into a degree table.
/// Degrees in [keep_from, cutoff] are counted; hits with degree in
/// [window_lo, window_hi] are additionally recorded one entry per orbit
/// iterate. Every orbit must have positive mean index so the scan closes.
inline DegreeTable tabulate(const std::vector<BottData>& orbits, long keep_from,
                            long cutoff, long window_lo, long window_hi) {
  DegreeTable t;
  for (const BottData& d : orbits) {
    validate_bott(d);
    RatInterval delta = mean_index(d);
    require(delta.lo > 0, ErrorKind::bounded_search,
            "orbit '" + d.name + "' has non-positive mean index; the degree scan cannot close");
    const int n = d.dim2n / 2;
    for (long k = 1; !(Rational(k) * delta.lo - n > cutoff); ++k)
      for (const auto& [deg, rank] : iterate_contribution(d, k)) {
        if (deg >= keep_from && deg <= cutoff) t.counts[deg] += rank;
        if (deg >= window_lo && deg <= window_hi)
          t.window_hits.push_back({d.name, k, deg, rank});
      }
  }
  return t;
}

} // namespace detail

struct MorseRow {
  long degree = 0;
  long count = 0;
  long rank0 = 0;
  long partial = 0;
};

struct MorseReport {
  std::vector<MorseRow> rows;
  bool alternating_ok = true;
  bool pointwise_ok = true;
  bool vacuous = false;
};

namespace detail {

/// Morse comparison rows for degrees lo..hi: count against ambient rank,
/// with the backward alternating partial sums that must stay non-negative.
inline MorseReport morse_from_counts(const std::map<long, long>& counts,
                                     const PrequantProfile& p, long lo, long hi) {
  MorseReport rep;
  if (hi < lo) {
    rep.vacuous = true;
    return rep;
  }
  long partial = 0;
  for (long deg = lo; deg <= hi; ++deg) {
    auto it = counts.find(deg);
    const long cdeg = it == counts.end() ? 0 : it->second;
    const long bdeg = prequant_rank(p, Integer(deg));
    partial = (cdeg - bdeg) - partial;
    rep.rows.push_back({deg, cdeg, bdeg, partial});
    if (partial < 0) rep.alternating_ok = false;
    if (cdeg < bdeg) rep.pointwise_ok = false;
  }
  return rep;
}

} // namespace detail

/// Morse comparison of a complete catalog against the ambient ranks on
/// degrees n..cutoff. Totals below degree n are dropped; a cutoff below n is
/// vacuous.
inline MorseReport morse_check(const OrbitCatalog& c, const Integer& cutoff) {
  validate_catalog(c);
  require(c.claimed_complete, ErrorKind::precondition,
          "Morse comparison applies to catalogs claimed complete");
  const long n = c.profile.n;
  if (cutoff < n) {
    MorseReport rep;
    rep.vacuous = true;
    return rep;
  }
  const long hi = cutoff.convert_to<long>();
  detail::DegreeTable t = detail::tabulate(c.orbits, n, hi, 1, 0);
  return detail::morse_from_counts(t.counts, c.profile, n, hi);
}

/// Whether the stored data is compatible with a degenerate maximum germ:
/// eigenvalue one present, exact even integer mean index, and local homology
/// attaining the top of its support window. Requires local homology and
/// checks its support explicitly.
inline bool sdm_candidate(const BottData& d) {
  validate_bott(d);
  if (!d.jump_at_one) return false;
  require(d.local_homology.has_value(), ErrorKind::data_required,
          "degeneracy-type test for orbit '" + d.name + "' needs local homology");
  const int n = d.dim2n / 2;
  Rational delta = mean_index(d).as_exact("mean index of orbit '" + d.name + "'");
  for (const auto& [deg, rank] : *d.local_homology) {
    if (rank == 0) continue;
    require(!(Rational(deg) < delta - n) && !(Rational(deg) > delta + n),
            ErrorKind::structural,
            "local homology of orbit '" + d.name + "' violates its support window");
  }
  if (!is_integer(delta)) return false;
  Integer di = rat_floor(delta);
  if (di % 2 != 0) return false;
  auto it = d.local_homology->find((di + n).convert_to<long>());
  return it != d.local_homology->end() && it->second > 0;
}

/// Mirror of sdm_candidate at the bottom of the support window.
inline bool sdmin_candidate(const BottData& d) {
  validate_bott(d);
  if (!d.jump_at_one) return false;
  require(d.local_homology.has_value(), ErrorKind::data_required,
          "degeneracy-type test for orbit '" + d.name + "' needs local homology");
  const int n = d.dim2n / 2;
  Rational delta = mean_index(d).as_exact("mean index of orbit '" + d.name + "'");
  for (const auto& [deg, rank] : *d.local_homology) {
    if (rank == 0) continue;
    require(!(Rational(deg) < delta - n) && !(Rational(deg) > delta + n),
            ErrorKind::structural,
            "local homology of orbit '" + d.name + "' violates its support window");
  }
  if (!is_integer(delta)) return false;
  Integer di = rat_floor(delta);
  if (di % 2 != 0) return false;
  auto it = d.local_homology->find((di - n).convert_to<long>());
  return it != d.local_homology->end() && it->second > 0;
}

/// Degenerate limit of tilted angle data. Each tilted interior angle lands
/// on its rational value, a tilt just below pi becomes a symmetric jump at
/// pi, and a tilt just above zero merges into the eigenvalue one while the
/// base value absorbs the vanished clockwise splitting. Coincident angles
/// merge additively. Local homology does not survive the limit.
inline BottData tilt_collapse(const BottData& d) {
  validate_bott(d);
  BottData out;
  out.dim2n = d.dim2n;
  out.b_at_one = d.b_at_one;
  out.elliptic_height = d.elliptic_height;
  out.name = d.name;
  int s1 = d.jump_at_one ? d.jump_at_one->s : 0;
  int nu1 = d.jump_at_one ? d.jump_at_one->nu : 0;
  std::map<Rational, BottJump> merged;
  auto add = [&merged](const Rational& a, int sp, int sm, int nu) {
    auto [it, fresh] = merged.try_emplace(a);
    BottJump& j = it->second;
    if (fresh) {
      j.angle = Angle::exact(a);
      j.s_plus = 0;
      j.s_minus = 0;
      j.nu = 0;
    }
    j.s_plus += sp;
    j.s_minus += sm;
    j.nu += nu;
  };
  for (const BottJump& j : d.jumps) {
    if (auto r = j.angle.exact_rational()) {
      add(*r, j.s_plus, j.s_minus, j.nu);
      continue;
    }
    require(j.angle.lo() == j.angle.hi(), ErrorKind::precision,
            "enclosure angles cannot be collapsed");
    const Tilted t = j.angle.lo();
    if (t.value == 1) {
      add(Rational(1), j.nu, j.nu, 2 * j.nu);
    } else if (t.value == 0) {
      s1 += j.nu;
      nu1 += 2 * j.nu;
      out.b_at_one -= 2 * j.s_minus;
    } else {
      add(t.value, j.s_plus, j.s_minus, j.nu);
    }
  }
  if (nu1 > 0) out.jump_at_one = JumpAtOne{s1, nu1};
  for (const auto& [angle, j] : merged) out.jumps.push_back(j);
  validate_bott(out);
  return out;
}

enum class AuditVerdict { consistent, contradiction, inconclusive };

inline std::string verdict_name(AuditVerdict v) {
  switch (v) {
    case AuditVerdict::consistent: return "consistent";
    case AuditVerdict::contradiction: return "contradiction";
    default: return "inconclusive";
  }
}

struct CountingIdentity {
  Integer count_alternating_lhs{0};
  Integer count_alternating_rhs{0};
  bool count_alternating_pass = false;
  Integer rank_alternating_lhs{0};
  Integer rank_alternating_rhs{0};
  bool rank_alternating_pass = false;
  Integer top_comparison_lhs{0};
  Integer top_comparison_rhs{0};
  bool top_comparison_pass = false;
  std::string note;
};

struct WitnessReport {
  std::vector<std::string> elliptic;
  std::vector<std::string> sdm_candidates;
  std::vector<std::string> non_hyperbolic;
  std::vector<std::string> degree_n;
  std::string top_contributor;
  std::string gap_note;
};

struct AuditOptions {
  ConvexityMode mode = ConvexityMode::positive;
  std::optional<Integer> threshold_override;
  Integer search_bound{1000000};
  std::optional<Integer> n0_multiple;
};

struct AuditReport {
  AuditVerdict verdict = AuditVerdict::inconclusive;
  std::string reason;
  ConvexityReport convexity;
  std::optional<CijtCertificate> certificate;
  Rational mean_euler_lhs{0};
  Rational mean_euler_rhs{0};
  bool mean_euler_pass = false;
  std::map<long, std::vector<std::string>> window;
  long window_distinct = 0;
  long window_required = 0;
  CountingIdentity counting;
  MorseReport morse;
  WitnessReport witnesses;
  bool perfect = false;
  long even_orbit_count = 0;
  long expected_orbit_count = 0;
  Integer n_value{0};
  Integer s_value{0};
};

/// Consistency audit of a catalog claimed complete. The pipeline runs index
/// convexity, a certified common index jump on the collapsed catalog, the
/// alignment of the certified iterates with the mean Euler characteristic,
/// occupancy of the certified degree window, the alternating counting
/// identities at the top of the window, Morse partial sums below it, and the
/// perfection count. A failed gate refutes the completeness claim; missing
/// local data or an exhausted certificate search leaves the audit
/// inconclusive. Negative-orientation catalogs are audited through orbit
/// inversion, which forgets local homology.
inline AuditReport audit(const OrbitCatalog& cat, const AuditOptions& opts = {}) {
  validate_catalog(cat);
  require(cat.claimed_complete, ErrorKind::precondition,
          "audit applies to catalogs claimed complete");
  const PrequantProfile& p = cat.profile;
  const int n = p.n;
  AuditReport rep;
  rep.expected_orbit_count = r_b(p);

  std::vector<BottData> active;
  for (const BottData& d : cat.orbits) {
    BottData w = opts.mode == ConvexityMode::negative ? bott_invert(d) : d;
    RatInterval delta = mean_index(w);
    if (delta.lo > 0) {
      active.push_back(std::move(w));
      continue;
    }
    require(delta.hi < 0 || (delta.exact() && delta.lo == 0), ErrorKind::precision,
            "mean index enclosure of orbit '" + d.name + "' straddles zero");
    bool visible = false;
    if (d.local_homology)
      for (const auto& [deg, rank] : *d.local_homology) visible = visible || rank > 0;
    require(!visible, ErrorKind::precondition,
            "orbit '" + d.name + "' carries local homology but its mean index is not positive");
  }

  rep.convexity = convexity_check(cat, opts.mode, opts.threshold_override);
  if (!rep.convexity.pass) {
    rep.verdict = AuditVerdict::contradiction;
    rep.reason = "convexity: orbit '" + rep.convexity.offender + "' iterate " +
                 std::to_string(rep.convexity.iterate) + " has index " +
                 format_integer(rep.convexity.value) + " against threshold " +
                 format_integer(rep.convexity.threshold);
    return rep;
  }
  const bool binding = !(rep.convexity.threshold < Integer(n));
  if (!binding)
    rep.counting.note = "threshold below the base degree; counting checks are advisory";

  if (active.empty()) {
    if (rep.expected_orbit_count > 0) {
      rep.verdict = AuditVerdict::contradiction;
      rep.reason =
          "counting: no orbit has positive mean index but the ambient complex has positive rank";
    } else {
      rep.verdict = AuditVerdict::consistent;
      rep.reason = "catalog and ambient complex are both trivial";
    }
    return rep;
  }

  // Identities and window checks below presume that an undecided alternative
  // of a degenerate maximum germ has been excluded. For a one-orbit catalog
  // that exclusion needs input this audit does not have when the base Euler
  // characteristic vanishes, or on a four-dimensional germ whose data is
  // compatible with a totally degenerate maximum.
  auto conclude = [&](const std::string& reason) {
    if (cat.orbits.size() == 1) {
      if (euler_characteristic(p) == 0) {
        rep.verdict = AuditVerdict::inconclusive;
        rep.reason =
            "a degenerate maximum cannot be excluded with vanishing base Euler "
            "characteristic; " +
            reason;
        return rep;
      }
      const BottData& solo = active.front();
      bool totally_degenerate =
          solo.jump_at_one && solo.jump_at_one->nu == solo.dim2n;
      if (n == 2 && totally_degenerate && solo.local_homology) {
        bool candidate = false;
        try {
          candidate = sdm_candidate(solo);
        } catch (const Error&) {
          candidate = true;
        }
        if (candidate) {
          rep.verdict = AuditVerdict::inconclusive;
          rep.reason =
              "a totally degenerate maximum on a four-dimensional germ needs an "
              "exclusion beyond this audit; " +
              reason;
          return rep;
        }
      }
    }
    rep.verdict = AuditVerdict::contradiction;
    rep.reason = reason;
    return rep;
  };

  std::vector<Rational> chihat(active.size());
  Integer struct_period{1};
  try {
    for (size_t j = 0; j < active.size(); ++j) {
      MeanChi mc = mean_chi(active[j]);
      chihat[j] = mc.value;
      struct_period = int_lcm(struct_period, Integer(mc.period));
    }
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::data_required) {
      rep.verdict = AuditVerdict::inconclusive;
      rep.reason = std::string("data: ") + e.what();
      return rep;
    }
    throw;
  }

  std::vector<BottData> collapsed;
  collapsed.reserve(active.size());
  for (const BottData& d : active) collapsed.push_back(tilt_collapse(d));
  const Integer q_full = int_lcm(choose_q(collapsed), struct_period);
  Rational spread{0};
  for (const Rational& ch : chihat) spread += Rational(q_full) * (ch < 0 ? -ch : ch);
  Rational eps{1, 4};
  if (spread != 0 && Rational(1) / (2 * spread) < eps)
    eps = Rational(1) / (2 * spread);
  Integer n0 = opts.n0_multiple ? *opts.n0_multiple : p.index_period;
  require(n0 > 0 && n0 % p.index_period == 0, ErrorKind::domain,
          "the initial jump scale must be a positive multiple of the recurrence index");

  CijtCertificate cert;
  try {
    cert = find_jump(collapsed, n0, eps, opts.search_bound, q_full, {});
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::bounded_search) {
      rep.verdict = AuditVerdict::inconclusive;
      rep.reason = "search: no certified index jump within the bound; not a refutation";
      return rep;
    }
    throw;
  }
  rep.certificate = cert;
  rep.n_value = cert.n_value;
  const Integer N = cert.n_value;
  rep.s_value = N / p.index_period;

  Rational align{0};
  for (size_t j = 0; j < active.size(); ++j) align += Rational(cert.m[j]) * chihat[j];
  rep.mean_euler_lhs = align;
  rep.mean_euler_rhs = Rational(N) * chi0(p);
  rep.mean_euler_pass = rep.mean_euler_lhs == rep.mean_euler_rhs;
  if (!rep.mean_euler_pass)
    return conclude("resonance: certified iterates sum to " +
                    format_rational(rep.mean_euler_lhs) + " against the expected " +
                    format_rational(rep.mean_euler_rhs) +
                    "; the catalog misses mean Euler mass");

  const long topdeg = (2 * N + n).convert_to<long>();
  const long wlo = topdeg - 2 * n;
  detail::DegreeTable table;
  try {
    table = detail::tabulate(active, n, topdeg, wlo, topdeg);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::data_required) {
      rep.verdict = AuditVerdict::inconclusive;
      rep.reason = std::string("data: ") + e.what();
      return rep;
    }
    throw;
  }

  std::map<std::string, long> twice_m;
  for (size_t j = 0; j < active.size(); ++j)
    twice_m[active[j].name] = (2 * cert.m[j]).convert_to<long>();

  for (const detail::WindowHit& h : table.window_hits)
    rep.window[h.degree].push_back(h.orbit + "^" + std::to_string(h.iterate));

  std::vector<std::string> advisory;
  std::set<std::string> distinct;
  for (const detail::WindowHit& h : table.window_hits) {
    if (h.degree <= wlo || h.degree >= topdeg) continue;
    if (h.iterate != twice_m[h.orbit]) {
      std::string reason = "window: iterate " + h.orbit + "^" +
                           std::to_string(h.iterate) +
                           " occupies the certified window unexpectedly";
      if (binding) return conclude(reason);
      advisory.push_back(reason);
      continue;
    }
    distinct.insert(h.orbit);
  }
  rep.window_distinct = long(distinct.size());
  rep.window_required = std::max(0L, rep.expected_orbit_count - 2);
  if (rep.window_distinct < rep.window_required) {
    std::string reason = "window: only " + std::to_string(rep.window_distinct) +
                         " distinct orbits meet the certified window; completeness "
                         "requires at least " +
                         std::to_string(rep.window_required);
    if (binding) return conclude(reason);
    advisory.push_back(reason);
  }

  long top_rank = 0;
  for (const detail::WindowHit& h : table.window_hits)
    if (h.degree == topdeg && h.iterate == twice_m[h.orbit]) {
      if (top_rank == 0) rep.witnesses.top_contributor = h.orbit;
      top_rank += h.rank;
      const BottData* src = nullptr;
      for (const BottData& d : active)
        if (d.name == h.orbit) src = &d;
      if (src && !elliptic_flags(*src).elliptic) {
        std::string reason = "counting: top-degree contributor '" + h.orbit +
                             "' is not elliptic";
        if (binding) return conclude(reason);
        advisory.push_back(reason);
      }
    }
  const long chi_b = euler_characteristic(p);
  if (top_rank == 0) {
    std::string reason =
        "counting: top certified degree " + std::to_string(topdeg) +
        " is unoccupied, forcing -2s*chi(B) >= -2s*chi(B)+1 with s=" +
        format_integer(rep.s_value) + ", chi(B)=" + std::to_string(chi_b);
    if (binding) return conclude(reason);
    advisory.push_back(reason);
  }

  const Integer two_s_chi = 2 * rep.s_value * chi_b;
  const int sign_n = n % 2 == 0 ? 1 : -1;
  Integer c_alt{0}, b_alt{0}, c_top{0}, b_top{0};
  for (long deg = n; deg <= topdeg - 1; ++deg) {
    auto it = table.counts.find(deg);
    const long cdeg = it == table.counts.end() ? 0 : it->second;
    const long bdeg = prequant_rank(p, Integer(deg));
    const int sk = deg % 2 == 0 ? 1 : -1;
    const int st = (topdeg - 1 - deg) % 2 == 0 ? 1 : -1;
    c_alt += sk * cdeg;
    b_alt += sk * bdeg;
    c_top += st * cdeg;
    b_top += st * bdeg;
  }
  rep.counting.count_alternating_lhs = c_alt;
  rep.counting.count_alternating_rhs = sign_n * (two_s_chi - top_rank);
  rep.counting.count_alternating_pass =
      rep.counting.count_alternating_lhs == rep.counting.count_alternating_rhs;
  rep.counting.rank_alternating_lhs = b_alt;
  rep.counting.rank_alternating_rhs = sign_n * (two_s_chi - p.betti.back());
  rep.counting.rank_alternating_pass =
      rep.counting.rank_alternating_lhs == rep.counting.rank_alternating_rhs;
  rep.counting.top_comparison_lhs = c_top;
  rep.counting.top_comparison_rhs = b_top;
  rep.counting.top_comparison_pass = c_top >= b_top;
  if (!(rep.counting.count_alternating_pass && rep.counting.rank_alternating_pass &&
        rep.counting.top_comparison_pass)) {
    std::string reason = "counting: alternating sums disagree at the certified window";
    if (binding) return conclude(reason);
    advisory.push_back(reason);
  }

  rep.morse = detail::morse_from_counts(table.counts, p, n, topdeg - 1);
  if (!(rep.morse.alternating_ok && rep.morse.pointwise_ok)) {
    std::string reason =
        "morse: partial alternating sums or pointwise ranks fail below the top degree";
    if (binding) return conclude(reason);
    advisory.push_back(reason);
  }

  for (const BottData& d : active) {
    if (elliptic_flags(d).elliptic) rep.witnesses.elliptic.push_back(d.name);
    if (d.jump_at_one && d.local_homology) {
      bool candidate = false;
      try {
        candidate = sdm_candidate(d);
      } catch (const Error&) {
        candidate = false;
      }
      if (candidate) rep.witnesses.sdm_candidates.push_back(d.name);
    }
    if (iterated_index(d, 1) == Integer(n)) rep.witnesses.degree_n.push_back(d.name);
  }
  bool odd_betti_vanish = true;
  for (size_t i = 1; i < p.betti.size(); i += 2)
    odd_betti_vanish = odd_betti_vanish && p.betti[i] == 0;
  if (odd_betti_vanish && n % 2 == 1) {
    std::set<std::string> seen;
    for (const detail::WindowHit& h : table.window_hits)
      if (h.iterate == twice_m[h.orbit] && h.degree % 2 != 0 && seen.insert(h.orbit).second)
        rep.witnesses.non_hyperbolic.push_back(h.orbit);
  }
  if (rep.witnesses.degree_n.empty()) {
    rep.witnesses.gap_note = "no orbit of minimal degree";
  } else if (rep.witnesses.degree_n.size() == 1) {
    const std::string& who = rep.witnesses.degree_n.front();
    size_t who_idx = 0;
    long mj = 0;
    for (size_t j = 0; j < active.size(); ++j)
      if (active[j].name == who) {
        who_idx = j;
        mj = cert.m[j].convert_to<long>();
      }
    if (mj >= 2) {
      bool gap = false;
      try {
        gap = index_gap_check(active[who_idx], mj);
      } catch (const Error&) {
        gap = false;
      }
      rep.witnesses.gap_note = "unique minimal-degree orbit '" + who +
                               "': index gap below its certified iterate " +
                               (gap ? "holds" : "fails");
    } else {
      rep.witnesses.gap_note =
          "unique minimal-degree orbit '" + who + "': certified iterate too small for a gap";
    }
  } else {
    rep.witnesses.gap_note =
        "several minimal-degree orbits; parity places a companion one degree higher";
  }

  std::set<int> parities;
  for (const BottData& d : active) parities.insert(d.b_at_one % 2 != 0 ? 1 : 0);
  rep.perfect = parities.size() == 1;
  for (const BottData& d : active)
    if (good_iterate(d, 2)) ++rep.even_orbit_count;
  if (rep.perfect && detail::nondegenerate_catalog(active) &&
      rep.even_orbit_count != rep.expected_orbit_count) {
    std::string reason = "perfection: " + std::to_string(rep.even_orbit_count) +
                         " orbits stay good at even iterates; a perfect complete "
                         "catalog must show exactly " +
                         std::to_string(rep.expected_orbit_count);
    if (binding) return conclude(reason);
    advisory.push_back(reason);
  }

  if (!advisory.empty()) {
    rep.verdict = AuditVerdict::inconclusive;
    std::string joined;
    for (const std::string& a : advisory) {
      if (!joined.empty()) joined += "; ";
      joined += a;
    }
    rep.reason = "advisory threshold: " + joined;
    return rep;
  }
  rep.verdict = AuditVerdict::consistent;
  rep.reason = "all checks pass at jump scale " + format_integer(N);
  return rep;
}

} // namespace reebidx
