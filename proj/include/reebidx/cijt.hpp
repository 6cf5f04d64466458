#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <reebidx/bott.hpp>

namespace reebidx {

/// One verified conclusion: pass flag plus the two computed sides, formatted
/// per orbit so a failure names the offending comparison.
struct CheckEntry {
  bool pass = true;
  std::string lhs;
  std::string rhs;
};

/// Certified common-index-jump data for a collection of orbits.
struct CijtCertificate {
  Integer n_value{0};
  Integer k_factor{0};
  Integer n0{0};
  std::vector<Integer> m;
  std::vector<int> delta;
  Integer q_param{1};
  Rational epsilon{0};
  std::optional<Rational> frac_delta;
  std::map<std::string, CheckEntry> checks;
};

inline bool all_checks_pass(const std::map<std::string, CheckEntry>& checks) {
  for (const auto& [id, entry] : checks)
    if (!entry.pass) return false;
  return true;
}

/// Least q such that q times every exactly-known jump angle (in units of pi)
/// is an integer. Enclosure-only angles impose no constraint.
inline Integer choose_q(const std::vector<BottData>& orbits) {
  Integer q{1};
  for (const BottData& d : orbits)
    for (const BottJump& j : d.jumps)
      if (auto a = j.angle.exact_rational()) q = int_lcm(q, denominator(*a));
  return q;
}

namespace detail {

struct OrbitJumpData {
  RatInterval delta;
  Integer s_plus_one{0};
  int e = 0;
  std::string name;
};

inline std::vector<OrbitJumpData> prepare_orbits(const std::vector<BottData>& orbits) {
  require(!orbits.empty(), ErrorKind::precondition, "need at least one orbit");
  std::vector<OrbitJumpData> out;
  for (size_t j = 0; j < orbits.size(); ++j) {
    const BottData& d = orbits[j];
    validate_bott(d);
    OrbitJumpData o;
    o.delta = mean_index(d);
    o.name = d.name.empty() ? "orbit " + std::to_string(j + 1) : d.name;
    require(o.delta.hi > 0, ErrorKind::precondition,
            o.name + " has nonpositive mean index");
    require(o.delta.lo > 0, ErrorKind::precision,
            o.name + ": mean index enclosure straddles zero");
    o.s_plus_one = d.jump_at_one ? d.jump_at_one->s : 0;
    o.e = d.elliptic_height;
    out.push_back(std::move(o));
  }
  return out;
}

inline Integer interval_floor(const RatInterval& x, const std::string& what) {
  Integer lo = rat_floor(x.lo);
  require(lo == rat_floor(x.hi), ErrorKind::precision,
          what + ": floor is undecidable within the enclosure");
  return lo;
}

/// N/(q*delta) as an interval; delta is strictly positive.
inline RatInterval iterate_ratio(const Integer& n, const Integer& q,
                                 const RatInterval& delta) {
  Rational scale = Rational(n) / Rational(q);
  return {scale / delta.hi, scale / delta.lo};
}

enum class Decision { pass, fail };

/// Strict comparison |frac - delta_j| < eps on an interval; an enclosure that
/// straddles the threshold is refused rather than guessed.
inline Decision decide_eps(const RatInterval& frac, int delta_j, const Rational& eps,
                           const std::string& what) {
  Rational lo = delta_j == 0 ? frac.lo : 1 - frac.hi;
  Rational hi = delta_j == 0 ? frac.hi : 1 - frac.lo;
  if (hi < eps) return Decision::pass;
  if (lo >= eps) return Decision::fail;
  require(frac.exact(), ErrorKind::precision,
          what + ": distance to the nearest integer is undecidable");
  return Decision::fail;
}

inline void join(std::string& acc, const std::string& piece) {
  if (!acc.empty()) acc += "; ";
  acc += piece;
}

inline void record(std::map<std::string, CheckEntry>& checks, const std::string& id,
                   bool pass, const std::string& lhs, const std::string& rhs) {
  CheckEntry& e = checks[id];
  e.pass = e.pass && pass;
  join(e.lhs, lhs);
  join(e.rhs, rhs);
}

/// Recompute every conclusion of the certificate from the orbit data alone.
inline std::map<std::string, CheckEntry> evaluate_checks(
    const std::vector<BottData>& orbits, const std::vector<OrbitJumpData>& prep,
    const CijtCertificate& cert) {
  std::map<std::string, CheckEntry> checks;
  const Integer& n = cert.n_value;
  const Integer two_n = 2 * n;
  for (size_t j = 0; j < orbits.size(); ++j) {
    const BottData& d = orbits[j];
    const OrbitJumpData& o = prep[j];
    const Integer& mj = cert.m[j];
    const int dj = cert.delta[j];
    RatInterval x = iterate_ratio(n, cert.q_param, o.delta);
    Integer fl = interval_floor(x, o.name);

    Integer expect_m = (fl + dj) * cert.q_param;
    record(checks, "m-form", mj == expect_m, format_integer(mj),
           format_integer(expect_m));

    RatInterval frac{x.lo - Rational(fl), x.hi - Rational(fl)};
    bool eps_ok = decide_eps(frac, dj, cert.epsilon, o.name) == Decision::pass;
    record(checks, "eps-bound", eps_ok,
           (dj == 0 ? frac.str() : RatInterval{1 - frac.hi, 1 - frac.lo}.str()),
           "< " + format_rational(cert.epsilon));

    long m_long = to_long(mj);
    int nu1 = iterated_nullity(d, 1);
    int nu_lo = iterated_nullity(d, 2 * m_long - 1);
    int nu_hi = iterated_nullity(d, 2 * m_long + 1);
    record(checks, "4.1", nu1 == nu_lo && nu1 == nu_hi, std::to_string(nu1),
           std::to_string(nu_lo) + "," + std::to_string(nu_hi));

    Integer mu1 = iterated_index(d, 1);
    Integer mu_below = iterated_index(d, 2 * m_long - 1);
    Integer rhs2 = two_n - mu1 - 2 * o.s_plus_one;
    record(checks, "4.2", mu_below == rhs2, format_integer(mu_below),
           format_integer(rhs2));

    Integer mu_above = iterated_index(d, 2 * m_long + 1);
    Integer rhs3 = two_n + mu1;
    record(checks, "4.3", mu_above == rhs3, format_integer(mu_above),
           format_integer(rhs3));

    Integer mu_even = iterated_index(d, 2 * m_long);
    Integer half_e{o.e / 2};
    record(checks, "4.4", mu_even >= two_n - half_e, format_integer(mu_even),
           ">= " + format_integer(two_n - half_e));

    Integer topped = mu_even + iterated_nullity(d, 2 * m_long);
    record(checks, "4.5", topped <= two_n + half_e, format_integer(topped),
           "<= " + format_integer(two_n + half_e));

    if (cert.frac_delta) {
      const Rational& fd = *cert.frac_delta;
      bool all_close = true;
      std::string worst;
      for (const BottJump& jump : d.jumps) {
        RatInterval scaled{jump.angle.lo().value * Rational(mj),
                           jump.angle.hi().value * Rational(mj)};
        Integer sf = interval_floor(scaled, o.name + " phase");
        RatInterval f{scaled.lo - Rational(sf), scaled.hi - Rational(sf)};
        bool close;
        if (f.hi < fd || f.lo > 1 - fd) {
          close = true;
        } else if (f.lo >= fd && f.hi <= 1 - fd) {
          close = false;
        } else {
          require(f.exact(), ErrorKind::precision,
                  o.name + ": phase closeness is undecidable");
          close = false;
        }
        if (!close && worst.empty()) worst = f.str();
        all_close = all_close && close;
      }
      record(checks, "frac-closeness", all_close, all_close ? "all phases" : worst,
             "< " + format_rational(fd) + " of an integer");
    }
  }
  return checks;
}

} // namespace detail

/// Searches N = k_factor*N0 in increasing k_factor, delta vectors in binary
/// lexicographic order, and returns the first certificate whose conclusions
/// all verify. The epsilon default is 1/(4*q*q_param).
inline CijtCertificate find_jump(const std::vector<BottData>& orbits,
                                 const Integer& n0,
                                 std::optional<Rational> epsilon,
                                 const Integer& search_bound,
                                 std::optional<Integer> extra_q_multiple = {},
                                 std::optional<Rational> frac_delta = {}) {
  require(n0 >= 1, ErrorKind::domain, "N0 must be a positive integer");
  require(search_bound >= 1, ErrorKind::domain, "search bound must be positive");
  std::vector<detail::OrbitJumpData> prep = detail::prepare_orbits(orbits);

  Integer q_param = choose_q(orbits);
  if (extra_q_multiple) {
    require(*extra_q_multiple >= 1, ErrorKind::domain,
            "q multiple must be a positive integer");
    q_param = int_lcm(q_param, *extra_q_multiple);
  }
  Rational eps = epsilon ? *epsilon
                         : Rational(1) / (4 * Rational(orbits.size()) * Rational(q_param));
  require(eps > 0, ErrorKind::domain, "epsilon must be positive");
  if (frac_delta)
    require(*frac_delta > 0, ErrorKind::domain, "frac delta must be positive");

  const size_t q = orbits.size();
  for (Integer k = 1; k <= search_bound; ++k) {
    Integer n = k * n0;
    std::vector<Integer> floors(q);
    std::vector<RatInterval> fracs;
    for (size_t j = 0; j < q; ++j) {
      RatInterval x = detail::iterate_ratio(n, q_param, prep[j].delta);
      floors[j] = detail::interval_floor(x, prep[j].name);
      fracs.push_back({x.lo - Rational(floors[j]), x.hi - Rational(floors[j])});
    }

    for (unsigned long v = 0; v < (1UL << q); ++v) {
      CijtCertificate cert;
      cert.n_value = n;
      cert.k_factor = k;
      cert.n0 = n0;
      cert.q_param = q_param;
      cert.epsilon = eps;
      cert.frac_delta = frac_delta;
      bool feasible = true;
      for (size_t j = 0; j < q && feasible; ++j) {
        int dj = int((v >> (q - 1 - j)) & 1UL);
        cert.delta.push_back(dj);
        cert.m.push_back((floors[j] + dj) * q_param);
        if (cert.m.back() < 1) feasible = false;
        if (feasible &&
            detail::decide_eps(fracs[j], dj, eps, prep[j].name) != detail::Decision::pass)
          feasible = false;
      }
      if (!feasible) continue;
      std::map<std::string, CheckEntry> checks =
          detail::evaluate_checks(orbits, prep, cert);
      if (all_checks_pass(checks)) {
        cert.checks = std::move(checks);
        return cert;
      }
    }
  }
  fail(ErrorKind::bounded_search,
       "no common index jump found with k_factor <= " + format_integer(search_bound) +
           " (bound exhausted, not a refutation)");
}

/// Recomputes every conclusion of a certificate from scratch. The result map
/// reports pass/fail with computed sides; it does not throw on failures.
inline std::map<std::string, CheckEntry> verify_certificate(
    const std::vector<BottData>& orbits, const CijtCertificate& cert) {
  std::vector<detail::OrbitJumpData> prep = detail::prepare_orbits(orbits);
  require(cert.m.size() == orbits.size() && cert.delta.size() == orbits.size(),
          ErrorKind::structural, "certificate arity does not match the orbit list");
  require(cert.n_value >= 1 && cert.k_factor >= 1 && cert.n0 >= 1,
          ErrorKind::structural, "certificate integers must be positive");
  require(cert.n_value == cert.k_factor * cert.n0, ErrorKind::structural,
          "N must equal k_factor * N0");
  require(cert.q_param >= 1, ErrorKind::structural, "q parameter must be positive");
  require(cert.epsilon > 0, ErrorKind::structural, "epsilon must be positive");
  for (int dj : cert.delta)
    require(dj == 0 || dj == 1, ErrorKind::structural, "delta entries must be 0 or 1");
  for (const Integer& mj : cert.m)
    require(mj >= 1, ErrorKind::structural, "iterate counts must be positive");
  return detail::evaluate_checks(orbits, prep, cert);
}

} // namespace reebidx
