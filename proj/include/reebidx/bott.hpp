#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "reebidx/angle.hpp"
#include "reebidx/errors.hpp"
#include "reebidx/index.hpp"

namespace reebidx {

/// Discontinuity of the circle index function at the eigenvalue e^{i pi a},
/// where a is the angle in units of pi on the upper semicircle (0, 1].
/// s_plus / s_minus are the increments picked up when leaving the eigenvalue
/// counterclockwise / clockwise; nu is its geometric multiplicity.
struct BottJump {
  Angle angle;
  int s_plus = 0;
  int s_minus = 0;
  int nu = 1;
};

/// Jump data at the eigenvalue one, where the two one-sided increments agree.
struct JumpAtOne {
  int s = 0;
  int nu = 0;
};

/// Piecewise-constant index function on the unit circle. b_at_one is the
/// value at angle zero, i.e. the index of the underlying path against the
/// lower perturbation. Values on the lower semicircle mirror the upper one.
/// local_homology, when supplied, maps degree to rank for the local homology
/// at the first degenerate iterate; it is validated against that iterate's
/// index support window but never computed here.
struct BottData {
  int dim2n = 2;
  Integer b_at_one{0};
  std::optional<JumpAtOne> jump_at_one;
  std::vector<BottJump> jumps;
  int elliptic_height = 0;
  std::optional<std::map<long, long>> local_homology;
  std::string name;
};

namespace detail {

/// Whether a jump sits exactly at pi. Tilted or strictly smaller angles are
/// interior; an enclosure reaching 1 without being exactly 1 cannot be
/// classified.
inline bool jump_at_pi(const BottJump& j) {
  if (auto r = j.angle.exact_rational(); r && *r == 1) return true;
  if (j.angle.hi() < Tilted{Rational(1)}) return false;
  fail(ErrorKind::precision, "jump enclosure cannot decide whether it sits at pi");
}

/// Iterate index core without input validation; see iterated_index.
inline Integer iterated_index_raw(const BottData& d, long k) {
  const Rational c = Rational(k) / 2;
  Integer value = d.b_at_one + (d.jump_at_one ? d.jump_at_one->s : 0);
  Integer doubled{0};
  Integer prev_count{0};
  std::optional<Integer> at_pi;
  for (const BottJump& j : d.jumps) {
    if (jump_at_pi(j)) {
      at_pi = value - j.s_minus;
      break;
    }
    const std::string what = "root-of-unity count at a jump";
    Integer f = j.angle.scaled_floor(c, what);
    bool hit = j.angle.scaled_is_integer(c, what);
    doubled += (f - (hit ? 1 : 0) - prev_count) * value;
    if (hit) doubled += value - j.s_minus;
    prev_count = f;
    value += j.s_plus - j.s_minus;
  }
  doubled += (Integer((k - 1) / 2) - prev_count) * value;
  Integer total = d.b_at_one + 2 * doubled;
  if (k % 2 == 0) total += at_pi ? *at_pi : value;
  return total;
}

/// Iterate nullity core without input validation; see iterated_nullity.
inline int iterated_nullity_raw(const BottData& d, long k) {
  const Rational c = Rational(k) / 2;
  long total = d.jump_at_one ? d.jump_at_one->nu : 0;
  for (const BottJump& j : d.jumps) {
    if (j.angle.scaled_is_integer(c, "root-of-unity membership of a jump"))
      total += jump_at_pi(j) ? j.nu : 2L * j.nu;
  }
  return int(total);
}

/// Smallest iterate with a degenerate linearization, i.e. the iterate whose
/// local homology a stored table describes: 1 when the eigenvalue one is
/// present or when no exact elliptic angle exists, otherwise the first
/// iterate at which an exact angle meets a root of unity.
inline long data_iterate(const BottData& d) {
  if (d.jump_at_one) return 1;
  std::optional<Integer> best;
  for (const BottJump& j : d.jumps)
    if (auto r = j.angle.exact_rational()) {
      Integer h = denominator(*r) * (numerator(*r) % 2 == 0 ? 1 : 2);
      if (!best || h < *best) best = h;
    }
  return best ? best->convert_to<long>() : 1;
}

} // namespace detail

/// Integral of the index function over the circle divided by its length,
/// in exact arithmetic; enclosure angles widen the result to an interval.
inline RatInterval mean_index(const BottData& d) {
  RatInterval total{Rational(0)};
  RatInterval prev{Rational(0)};
  Integer value = d.b_at_one + (d.jump_at_one ? d.jump_at_one->s : 0);
  for (const BottJump& j : d.jumps) {
    if (detail::jump_at_pi(j)) break;
    RatInterval pos{j.angle.lo().value, j.angle.hi().value};
    total = total + (pos + prev * Rational(-1)) * Rational(value);
    prev = pos;
    value += j.s_plus - j.s_minus;
  }
  total = total + (RatInterval{Rational(1)} + prev * Rational(-1)) * Rational(value);
  return total;
}

inline void validate_bott(const BottData& d) {
  require(d.dim2n >= 2 && d.dim2n % 2 == 0, ErrorKind::structural,
          "phase-space dimension must be a positive even integer");
  const int n = d.dim2n / 2;
  require(d.elliptic_height >= 0 && d.elliptic_height <= d.dim2n &&
              d.elliptic_height % 2 == 0,
          ErrorKind::structural,
          "elliptic height must be an even integer between 0 and the dimension");
  long mass = 0;
  if (d.jump_at_one) {
    require(d.jump_at_one->nu >= 1 && d.jump_at_one->nu <= d.dim2n,
            ErrorKind::structural, "multiplicity at one is out of range");
    require(d.jump_at_one->s >= 0 && d.jump_at_one->s <= d.jump_at_one->nu,
            ErrorKind::structural,
            "splitting numbers are bounded by the eigenvalue multiplicity");
    mass += d.jump_at_one->nu;
  }
  const Tilted zero{Rational(0)};
  const Tilted one{Rational(1)};
  for (size_t i = 0; i < d.jumps.size(); ++i) {
    const BottJump& j = d.jumps[i];
    require(j.nu >= 1, ErrorKind::structural, "jump multiplicity must be positive");
    require(j.s_plus >= 0 && j.s_plus <= j.nu && j.s_minus >= 0 && j.s_minus <= j.nu,
            ErrorKind::structural,
            "splitting numbers are bounded by the eigenvalue multiplicity");
    require(zero < j.angle.lo(), ErrorKind::structural,
            "jump angles live on the upper semicircle");
    require(!(one < j.angle.hi()), ErrorKind::structural,
            "jump angles live on the upper semicircle");
    if (i + 1 < d.jumps.size())
      require(j.angle.entirely_below(d.jumps[i + 1].angle), ErrorKind::structural,
              "jump angles must be strictly increasing");
    if (auto r = j.angle.exact_rational(); r && *r == 1)
      require(j.s_plus == j.s_minus, ErrorKind::structural,
              "a jump at pi must have symmetric splitting numbers");
    mass += (j.angle.hi() < one) ? 2L * j.nu : long(j.nu);
  }
  require(mass <= d.elliptic_height, ErrorKind::structural,
          "eigenvalue multiplicities exceed the elliptic height");
  if (d.local_homology) {
    const long k0 = detail::data_iterate(d);
    const Integer floor_deg = detail::iterated_index_raw(d, k0);
    const long nu0 = detail::iterated_nullity_raw(d, k0);
    RatInterval delta = mean_index(d) * Rational(k0);
    for (const auto& [deg, rank] : *d.local_homology) {
      require(rank >= 0, ErrorKind::structural, "local homology ranks are non-negative");
      if (rank == 0) continue;
      bool in_index = Integer(deg) >= floor_deg && Integer(deg) <= floor_deg + nu0;
      bool in_mean = !(Rational(deg) < delta.lo - n) && !(Rational(deg) > delta.hi + n);
      require(in_index && in_mean, ErrorKind::structural,
              "local homology is supported outside the admissible degree window");
    }
  }
}

/// Value of the index function at e^{i pi phi} for phi in [0, 2) given in
/// units of pi.
inline Integer bott_value(const BottData& d, Rational phi) {
  validate_bott(d);
  require(phi >= 0 && phi < 2, ErrorKind::domain,
          "circle position must lie in [0, 2) in units of pi");
  if (phi > 1) phi = 2 - phi;
  if (phi == 0) return d.b_at_one;
  Integer value = d.b_at_one + (d.jump_at_one ? d.jump_at_one->s : 0);
  for (const BottJump& j : d.jumps) {
    int cmp = j.angle.compare(phi, "position of " + format_rational(phi) +
                                       " relative to a jump");
    if (cmp < 0) {
      value += j.s_plus - j.s_minus;
      continue;
    }
    if (cmp == 0) return value - j.s_minus;
    break;
  }
  return value;
}

/// Index of the k-th iterate: the sum of the index function over the k-th
/// roots of unity, evaluated by exact root counting per arc.
inline Integer iterated_index(const BottData& d, long k) {
  validate_bott(d);
  require(k >= 1, ErrorKind::domain, "iteration count must be at least 1");
  return detail::iterated_index_raw(d, k);
}

/// Nullity of the k-th iterate: total multiplicity of the eigenvalues that
/// are k-th roots of unity, conjugate pairs counted twice.
inline int iterated_nullity(const BottData& d, long k) {
  validate_bott(d);
  require(k >= 1, ErrorKind::domain, "iteration count must be at least 1");
  return detail::iterated_nullity_raw(d, k);
}

/// Whether the k-th iterate has the index parity of the underlying orbit.
inline bool good_iterate(const BottData& d, long k) {
  Integer diff = iterated_index(d, k) - d.b_at_one;
  return diff % 2 == 0;
}

struct EllipticFlags {
  bool elliptic = false;
  bool hyperbolic = false;
  int e = 0;
};

inline EllipticFlags elliptic_flags(const BottData& d) {
  validate_bott(d);
  return {d.elliptic_height == d.dim2n, d.elliptic_height == 0, d.elliptic_height};
}

/// Index data of the inverse orbit: the index function maps to
/// z -> -B(z) - nu(z), which fixes the jump angles and complements the
/// splitting numbers. Local homology is not carried over.
inline BottData bott_invert(const BottData& d) {
  validate_bott(d);
  BottData out = d;
  out.local_homology.reset();
  const int nu1 = d.jump_at_one ? d.jump_at_one->nu : 0;
  out.b_at_one = -d.b_at_one - nu1;
  if (d.jump_at_one)
    out.jump_at_one = JumpAtOne{d.jump_at_one->nu - d.jump_at_one->s, d.jump_at_one->nu};
  for (BottJump& j : out.jumps) {
    j.s_plus = j.nu - j.s_plus;
    j.s_minus = j.nu - j.s_minus;
  }
  out.name = d.name.empty() ? "" : d.name + "^-1";
  return out;
}

namespace detail {

struct UnitEigenvalue {
  Angle angle;  // units of pi, in (0, 1]
  int nu = 0;
};

struct UnitSpectrum {
  int nu_one = 0;
  std::vector<UnitEigenvalue> jumps;
  int elliptic_height = 0;
};

inline std::optional<Rational> recognize_rational(double x, long max_den, double tol) {
  Integer p0{0}, q0{1}, p1{1}, q1{0};
  double v = x;
  for (int it = 0; it < 64; ++it) {
    double fl = std::floor(v);
    if (std::abs(fl) > 1e17) break;
    Integer a{static_cast<long long>(fl)};
    Integer p2 = a * p1 + p0;
    Integer q2 = a * q1 + q0;
    if (q2 > max_den) break;
    p0 = p1; q0 = q1; p1 = p2; q1 = q2;
    Rational cand(p1, q1);
    if (std::abs(to_double(cand) - x) < tol) return cand;
    double rem = v - fl;
    if (rem < 1e-15) break;
    v = 1.0 / rem;
  }
  return std::nullopt;
}

inline int complex_kernel_dim(const Eigen::MatrixXd& m, std::complex<double> z,
                              double tol_rank) {
  const int n = int(m.rows());
  Eigen::MatrixXcd a = m.cast<std::complex<double>>() -
                       z * Eigen::MatrixXcd::Identity(n, n);
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(a);
  const auto& sv = svd.singularValues();
  double cut = tol_rank * std::max(sv(0), 1.0);
  int dim = 0;
  for (int i = n - 1; i >= 0 && sv(i) < cut; --i) ++dim;
  return dim;
}

/// Unit-circle spectrum of the end matrix: exact from block generators,
/// otherwise clustered from numeric eigenphases with rational recognition.
inline UnitSpectrum end_unit_spectrum(const SymplecticPath& p, const RunConfig& cfg) {
  UnitSpectrum out;
  const bool exact_blocks =
      p.gen && (p.gen->kind == Generator::Kind::block_sum ||
                (p.gen->kind == Generator::Kind::loop_product &&
                 p.gen->base_kind == Generator::Kind::block_sum));
  if (exact_blocks) {
    std::map<Rational, int> at;
    for (const Block& b : p.gen->blocks) {
      if (b.lam != 1) continue;
      out.elliptic_height += 2;
      Rational u = b.r - 2 * Rational(rat_floor(b.r / 2));
      if (u == 0) {
        out.nu_one += 2;
      } else if (u == 1) {
        at[Rational(1)] += 2;
      } else {
        at[u < 1 ? u : 2 - u] += 1;
      }
    }
    for (const auto& [ang, nu] : at)
      out.jumps.push_back({Angle::exact(ang), nu});
    return out;
  }

  Eigen::MatrixXd end = path_eval(p, 1.0);
  Eigen::EigenSolver<Eigen::MatrixXd> es(end);
  std::vector<double> phases;
  for (int i = 0; i < end.rows(); ++i) {
    std::complex<double> lam = es.eigenvalues()(i);
    if (std::abs(std::abs(lam) - 1.0) > 1e-6) continue;
    ++out.elliptic_height;
    if (std::abs(lam - std::complex<double>(1, 0)) < 1e-6) continue;
    if (std::abs(lam + std::complex<double>(1, 0)) < 1e-6) {
      if (lam.imag() >= 0) phases.push_back(M_PI);
      continue;
    }
    if (lam.imag() > 0) phases.push_back(std::arg(lam));
  }
  out.nu_one = int(kernel_basis(end, cfg.tol_rank).cols());
  std::sort(phases.begin(), phases.end());
  size_t i = 0;
  while (i < phases.size()) {
    size_t jj = i;
    while (jj + 1 < phases.size() && phases[jj + 1] - phases[i] < 1e-6) ++jj;
    double phase = phases[(i + jj) / 2];
    std::complex<double> z = std::polar(1.0, phase);
    int nu = complex_kernel_dim(end, z, cfg.tol_rank);
    Angle ang = Angle::exact(Rational(1));
    if (std::abs(phase - M_PI) > 1e-9) {
      double u = phase / M_PI;
      if (auto r = recognize_rational(u, 512, 1e-9)) {
        ang = Angle::exact(*r);
      } else {
        Rational mid(u);
        ang = Angle::enclosure(mid - Rational(1, 1000000000), mid + Rational(1, 1000000000));
      }
    }
    out.jumps.push_back({ang, nu});
    i = jj + 1;
  }
  return out;
}

} // namespace detail

/// Reconstructs the full index-function data of a path: jump positions and
/// multiplicities come from the end matrix, the splitting numbers are solved
/// exactly from the measured indices of the first K iterates, and the result
/// is checked against five further iterates.
inline BottData infer_bott(const SymplecticPath& p, int K, const RunConfig& cfg = {}) {
  ValidationReport rep = validate_path(p, cfg);
  require(rep.ok, ErrorKind::structural, "path failed validation: " + rep.message);
  detail::UnitSpectrum spec = detail::end_unit_spectrum(p, cfg);

  BottData base;
  base.dim2n = p.dim2n;
  base.elliptic_height = spec.elliptic_height;
  base.name = p.name;
  if (spec.nu_one > 0) base.jump_at_one = JumpAtOne{0, spec.nu_one};
  for (const auto& ev : spec.jumps) base.jumps.push_back({ev.angle, 0, 0, ev.nu});

  struct Slot {
    int jump = -1;         // -1: the jump at one
    bool both = false;     // symmetric pair at pi
    bool plus = false;
    std::string label;
    int bound = 0;
  };
  std::vector<Slot> slots;
  if (spec.nu_one > 0) slots.push_back({-1, true, false, "splitting at angle 0", spec.nu_one});
  for (size_t j = 0; j < base.jumps.size(); ++j) {
    std::string at = " at angle " + base.jumps[j].angle.str();
    if (detail::jump_at_pi(base.jumps[j])) {
      slots.push_back({int(j), true, false, "splitting" + at, base.jumps[j].nu});
    } else {
      slots.push_back({int(j), false, true, "upper splitting" + at, base.jumps[j].nu});
      slots.push_back({int(j), false, false, "lower splitting" + at, base.jumps[j].nu});
    }
  }
  require(K >= int(slots.size()) + 2, ErrorKind::precondition,
          "need at least " + std::to_string(slots.size() + 2) +
              " iterates to determine the jump data");

  base.b_at_one = cz_lower(p, cfg);
  auto assign = [&](BottData& d, size_t u, int v) {
    const Slot& s = slots[u];
    if (s.jump < 0) {
      d.jump_at_one->s = v;
    } else if (s.both) {
      d.jumps[s.jump].s_plus = v;
      d.jumps[s.jump].s_minus = v;
    } else if (s.plus) {
      d.jumps[s.jump].s_plus = v;
    } else {
      d.jumps[s.jump].s_minus = v;
    }
  };

  RatMatrix a(K - 1, int(slots.size()));
  std::vector<Rational> rhs;
  for (int k = 2; k <= K; ++k) {
    Integer c0 = iterated_index(base, k);
    for (size_t u = 0; u < slots.size(); ++u) {
      BottData probe = base;
      assign(probe, u, 1);
      a(k - 2, int(u)) = Rational(iterated_index(probe, k) - c0);
    }
    rhs.push_back(Rational(cz_lower(iterate_path(p, k), cfg) - c0));
  }

  LinearSolveResult sol = solve_exact(a, rhs);
  require(sol.consistent, ErrorKind::inference,
          "iterated indices are inconsistent with every splitting assignment");
  if (!sol.free_columns.empty()) {
    std::string msg = "iterates do not determine:";
    for (int c : sol.free_columns) msg += " " + slots[c].label + ";";
    fail(ErrorKind::ambiguity, msg);
  }
  for (size_t u = 0; u < slots.size(); ++u) {
    const Rational& v = sol.solution[u];
    require(is_integer(v) && v >= 0 && v <= slots[u].bound, ErrorKind::inference,
            "solved splitting numbers violate the multiplicity bounds");
    assign(base, u, int(to_long(numerator(v))));
  }
  validate_bott(base);
  for (int k = K + 1; k <= K + 5; ++k)
    require(iterated_index(base, k) == cz_lower(iterate_path(p, k), cfg),
            ErrorKind::inference, "inferred data fails on the validation iterates");
  return base;
}

/// Closed-form iteration parameters (a, b, angles): the index of the m-th
/// nondegenerate iterate equals m*a + sum_i 2*floor(m*angle_i/2) + b with
/// angles in units of pi. Requires every jump to match a generically
/// elliptic splitting pattern.
struct IterationParams {
  Integer a{0};
  Integer b{0};
  std::vector<Angle> angles;
};

inline IterationParams nondeg_iteration_params(const BottData& d) {
  validate_bott(d);
  require(!d.jump_at_one, ErrorKind::not_representable,
          "the base iterate is degenerate; no closed iteration formula applies");
  IterationParams out;
  for (const BottJump& j : d.jumps) {
    if (detail::jump_at_pi(j)) {
      require(j.s_plus == j.s_minus && j.nu == 2 * j.s_plus,
              ErrorKind::not_representable,
              "jump at pi does not match the elliptic splitting pattern");
      for (int c = 0; c < j.s_plus; ++c) out.angles.push_back(Angle::exact(Rational(1)));
    } else if (j.s_plus == 0 && j.s_minus == j.nu) {
      for (int c = 0; c < j.nu; ++c) out.angles.push_back(j.angle);
    } else if (j.s_minus == 0 && j.s_plus == j.nu) {
      Angle mirrored = Angle::from_bounds(-j.angle.hi() + Rational(2),
                                          -j.angle.lo() + Rational(2));
      for (int c = 0; c < j.nu; ++c) out.angles.push_back(mirrored);
    } else {
      fail(ErrorKind::not_representable,
           "jump at angle " + j.angle.str() + " does not match the elliptic splitting pattern");
    }
  }
  out.b = Integer(out.angles.size());
  out.a = d.b_at_one - out.b;
  for (long m = 1; m <= 20; ++m) {
    if (iterated_nullity(d, m) != 0) continue;
    Integer pred = out.a * m + out.b;
    for (const Angle& th : out.angles)
      pred += 2 * th.scaled_floor(Rational(m) / 2, "iteration formula floor");
    require(pred == iterated_index(d, m), ErrorKind::not_representable,
            "jump pattern does not reproduce the iterated indices");
  }
  return out;
}

/// Whether the index strictly increases from iterate 2m-2 to 2m-1.
inline bool index_gap_check(const BottData& d, long m) {
  require(m >= 2, ErrorKind::domain, "gap check needs m at least 2");
  return iterated_index(d, 2 * m - 2) < iterated_index(d, 2 * m - 1);
}

} // namespace reebidx
