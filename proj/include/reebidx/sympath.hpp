#pragma once

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "reebidx/angle.hpp"
#include "reebidx/config.hpp"
#include "reebidx/errors.hpp"
#include "reebidx/linalg.hpp"
#include "reebidx/rational.hpp"

namespace reebidx {

/// Primitive 2x2 path t -> R(r*pi*t) * diag(lam^t, lam^{-t}) on [0, 1].
/// Paths with lam != 1 must rotate an integer multiple of pi so the endpoint
/// stays conjugate to a real hyperbolic map, and the dilation must be slow
/// enough that no interior eigenvalue returns to 1.
struct Block {
  Rational r{0};
  Rational lam{1};
};

/// Conservative rational lower bound for e^pi used in block validation.
inline const Rational& exp_pi_lower_bound() {
  static const Rational b(2314, 100);
  return b;
}

inline void validate_block(const Block& b) {
  require(b.lam > 0, ErrorKind::structural, "block dilation must be positive");
  if (b.lam == 1) return;
  require(is_integer(b.r), ErrorKind::structural,
          "dilating block needs an integer half-turn count");
  if (b.r == 0) return;
  Integer turns = boost::multiprecision::abs(numerator(b.r));
  Rational cap = rat_pow(exp_pi_lower_bound(), unsigned(to_long(turns)));
  require(b.lam < cap && b.lam > 1 / cap, ErrorKind::structural,
          "block dilation too fast for its rotation");
}

struct Generator {
  enum class Kind { block_sum, exp_symmetric, loop_product };

  Kind kind = Kind::block_sum;
  std::vector<Block> blocks;          // block_sum payload, also loop_product base
  RatMatrix sym;                      // exp_symmetric payload, also loop_product base
  Kind base_kind = Kind::block_sum;   // which payload a loop_product wraps
  std::vector<Integer> loop_turns;    // full turns per 2-plane, loop_product only

  int dim2n() const {
    switch (kind) {
      case Kind::block_sum: return int(blocks.size()) * 2;
      case Kind::exp_symmetric: return sym.rows();
      case Kind::loop_product:
        return base_kind == Kind::block_sum ? int(blocks.size()) * 2 : sym.rows();
    }
    return 0;
  }
};

inline Generator block_sum(std::vector<Block> blocks) {
  Generator g;
  g.kind = Generator::Kind::block_sum;
  g.blocks = std::move(blocks);
  return g;
}

inline Generator exp_symmetric(RatMatrix a) {
  Generator g;
  g.kind = Generator::Kind::exp_symmetric;
  g.sym = std::move(a);
  return g;
}

inline Generator loop_product(std::vector<Integer> turns, Generator base) {
  require(base.kind != Generator::Kind::loop_product, ErrorKind::structural,
          "loop products do not nest");
  Generator g = std::move(base);
  g.base_kind = g.kind;
  g.kind = Generator::Kind::loop_product;
  g.loop_turns = std::move(turns);
  return g;
}

struct PathSample {
  Rational t{0};
  RatMatrix m;
  bool entries_exact = false;
};

/// A path of symplectic matrices on [0, 1] starting at the identity, given
/// either by a generator in closed form or by a sample list.
struct SymplecticPath {
  int dim2n = 0;
  std::optional<Generator> gen;
  std::vector<PathSample> samples;
  std::string name;
};

inline SymplecticPath make_path(Generator g, std::string name = "") {
  SymplecticPath p;
  p.dim2n = g.dim2n();
  p.gen = std::move(g);
  p.name = std::move(name);
  return p;
}

struct ValidationReport {
  bool ok = true;
  double max_symplectic_dev = 0.0;
  double max_sample_jump = 0.0;
  std::string message;
};

inline void validate_generator(const Generator& g) {
  switch (g.kind) {
    case Generator::Kind::block_sum:
      require(!g.blocks.empty(), ErrorKind::structural, "empty block sum");
      for (const Block& b : g.blocks) validate_block(b);
      break;
    case Generator::Kind::exp_symmetric:
      require(g.sym.is_square() && g.sym.rows() > 0 && g.sym.rows() % 2 == 0,
              ErrorKind::structural, "quadratic generator must be even-dimensional");
      require(g.sym.is_symmetric(), ErrorKind::structural,
              "quadratic generator matrix must be symmetric");
      break;
    case Generator::Kind::loop_product: {
      int planes = (g.base_kind == Generator::Kind::block_sum ? int(g.blocks.size())
                                                              : g.sym.rows() / 2);
      require(int(g.loop_turns.size()) == planes, ErrorKind::structural,
              "loop turn count must match the number of 2-planes");
      if (g.base_kind == Generator::Kind::block_sum) {
        require(!g.blocks.empty(), ErrorKind::structural, "empty block sum");
        for (const Block& b : g.blocks) validate_block(b);
      } else {
        require(g.sym.is_square() && g.sym.is_symmetric() && g.sym.rows() % 2 == 0,
                ErrorKind::structural, "quadratic generator matrix must be symmetric");
      }
      break;
    }
  }
}

inline ValidationReport validate_path(const SymplecticPath& p, const RunConfig& cfg = {}) {
  ValidationReport rep;
  require(p.dim2n > 0 && p.dim2n % 2 == 0, ErrorKind::structural,
          "path dimension must be a positive even number");
  if (p.gen) {
    validate_generator(*p.gen);
    require(p.gen->dim2n() == p.dim2n, ErrorKind::structural,
            "generator dimension disagrees with path dimension");
    return rep;
  }
  require(p.samples.size() >= 2, ErrorKind::structural,
          "sampled path needs at least two samples");
  require(p.samples.front().t == 0, ErrorKind::structural, "first sample must sit at t=0");
  require(p.samples.back().t == 1, ErrorKind::structural, "last sample must sit at t=1");
  RatMatrix j = standard_J(p.dim2n);
  Eigen::MatrixXd jd = j.to_eigen();
  Eigen::MatrixXd prev;
  for (size_t k = 0; k < p.samples.size(); ++k) {
    const PathSample& s = p.samples[k];
    require(s.m.rows() == p.dim2n && s.m.cols() == p.dim2n, ErrorKind::structural,
            "sample matrix has wrong shape");
    if (k > 0)
      require(p.samples[k - 1].t < s.t, ErrorKind::structural,
              "sample times must increase strictly");
    if (s.entries_exact) {
      if (!is_symplectic_exact(s.m)) {
        RatMatrix dev = s.m.transpose() * j * s.m - j;
        Rational worst = 0;
        for (int a = 0; a < dev.rows(); ++a)
          for (int b = 0; b < dev.cols(); ++b)
            if (rat_abs(dev(a, b)) > worst) worst = rat_abs(dev(a, b));
        rep.ok = false;
        rep.max_symplectic_dev = std::max(rep.max_symplectic_dev, to_double(worst));
      }
    } else {
      Eigen::MatrixXd md = s.m.to_eigen();
      // The deviation of a rounded symplectic matrix grows like the square
      // of its norm, so the tolerance applies on that scale.
      double scale = std::max(1.0, md.cwiseAbs().maxCoeff());
      double dev = (md.transpose() * jd * md - jd).cwiseAbs().maxCoeff() /
                   (scale * scale);
      rep.max_symplectic_dev = std::max(rep.max_symplectic_dev, dev);
      if (dev > cfg.tol_symplectic) rep.ok = false;
    }
    Eigen::MatrixXd md = s.m.to_eigen();
    if (k == 0) {
      double dev = (md - Eigen::MatrixXd::Identity(p.dim2n, p.dim2n)).cwiseAbs().maxCoeff();
      if (dev > (s.entries_exact ? 0.0 : cfg.tol_symplectic)) {
        rep.ok = false;
        rep.message = "path must start at the identity";
      }
    } else {
      // Relative to the local matrix scale so hyperbolic growth does not
      // penalize a perfectly adequate time grid.
      double jump = (md - prev).cwiseAbs().maxCoeff() /
                    std::max(1.0, prev.cwiseAbs().maxCoeff());
      rep.max_sample_jump = std::max(rep.max_sample_jump, jump);
      if (jump > cfg.max_sample_jump) {
        rep.ok = false;
        rep.message = "sample spacing too coarse";
      }
    }
    prev = md;
  }
  if (!rep.ok && rep.message.empty()) rep.message = "symplectic deviation above tolerance";
  return rep;
}

// ---------------------------------------------------------------------------
// Numeric evaluation

inline Eigen::Matrix2d rot2(double theta) {
  Eigen::Matrix2d r;
  r << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
  return r;
}

inline Eigen::Matrix2d block_eval(const Block& b, double t) {
  double theta = to_double(b.r) * M_PI * t;
  double a = std::log(to_double(b.lam));
  Eigen::Matrix2d d = Eigen::Matrix2d::Identity();
  d(0, 0) = std::exp(a * t);
  d(1, 1) = std::exp(-a * t);
  return rot2(theta) * d;
}

inline Eigen::Matrix2d block_derivative(const Block& b, double t) {
  double w = to_double(b.r) * M_PI;
  double a = std::log(to_double(b.lam));
  Eigen::Matrix2d j2;
  j2 << 0, -1, 1, 0;
  Eigen::Matrix2d m = block_eval(b, t);
  Eigen::Matrix2d l = Eigen::Matrix2d::Zero();
  l(0, 0) = a;
  l(1, 1) = -a;
  return w * j2 * m + m * l;
}

inline Eigen::MatrixXd generator_eval(const Generator& g, double t);

inline Eigen::MatrixXd block_sum_eval(const std::vector<Block>& blocks, double t) {
  int n = int(blocks.size());
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  for (int i = 0; i < n; ++i) m.block<2, 2>(2 * i, 2 * i) = block_eval(blocks[i], t);
  return m;
}

inline Eigen::MatrixXd exp_symmetric_eval(const RatMatrix& a, double t) {
  Eigen::MatrixXd jd = standard_J(a.rows()).to_eigen();
  Eigen::MatrixXd ja = jd * a.to_eigen();
  return (t * ja).exp();
}

inline Eigen::MatrixXd loop_eval(const std::vector<Integer>& turns, double t) {
  int n = int(turns.size());
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  for (int i = 0; i < n; ++i)
    m.block<2, 2>(2 * i, 2 * i) = rot2(2.0 * M_PI * to_double(turns[i]) * t);
  return m;
}

inline Eigen::MatrixXd generator_eval(const Generator& g, double t) {
  switch (g.kind) {
    case Generator::Kind::block_sum:
      return block_sum_eval(g.blocks, t);
    case Generator::Kind::exp_symmetric:
      return exp_symmetric_eval(g.sym, t);
    case Generator::Kind::loop_product: {
      Eigen::MatrixXd base = (g.base_kind == Generator::Kind::block_sum)
                                 ? block_sum_eval(g.blocks, t)
                                 : exp_symmetric_eval(g.sym, t);
      return loop_eval(g.loop_turns, t) * base;
    }
  }
  fail(ErrorKind::structural, "unknown generator kind");
}

inline Eigen::MatrixXd generator_derivative(const Generator& g, double t) {
  switch (g.kind) {
    case Generator::Kind::block_sum: {
      int n = int(g.blocks.size());
      Eigen::MatrixXd m = Eigen::MatrixXd::Zero(2 * n, 2 * n);
      for (int i = 0; i < n; ++i)
        m.block<2, 2>(2 * i, 2 * i) = block_derivative(g.blocks[i], t);
      return m;
    }
    case Generator::Kind::exp_symmetric: {
      Eigen::MatrixXd jd = standard_J(g.sym.rows()).to_eigen();
      Eigen::MatrixXd ja = jd * g.sym.to_eigen();
      return ja * exp_symmetric_eval(g.sym, t);
    }
    case Generator::Kind::loop_product: {
      int n = int(g.loop_turns.size());
      Eigen::MatrixXd phi = loop_eval(g.loop_turns, t);
      Eigen::MatrixXd dphi = Eigen::MatrixXd::Zero(2 * n, 2 * n);
      Eigen::Matrix2d j2;
      j2 << 0, -1, 1, 0;
      for (int i = 0; i < n; ++i)
        dphi.block<2, 2>(2 * i, 2 * i) =
            2.0 * M_PI * to_double(g.loop_turns[i]) * j2 *
            rot2(2.0 * M_PI * to_double(g.loop_turns[i]) * t);
      Generator base = g;
      base.kind = g.base_kind;
      return dphi * generator_eval(base, t) + phi * generator_derivative(base, t);
    }
  }
  fail(ErrorKind::structural, "unknown generator kind");
}

inline Eigen::MatrixXd sample_eval(const SymplecticPath& p, double t) {
  const auto& s = p.samples;
  if (t <= to_double(s.front().t)) return s.front().m.to_eigen();
  if (t >= to_double(s.back().t)) return s.back().m.to_eigen();
  size_t lo = 0, hi = s.size() - 1;
  while (hi - lo > 1) {
    size_t mid = (lo + hi) / 2;
    if (to_double(s[mid].t) <= t) lo = mid; else hi = mid;
  }
  double t0 = to_double(s[lo].t), t1 = to_double(s[hi].t);
  double w = (t - t0) / (t1 - t0);
  return (1.0 - w) * s[lo].m.to_eigen() + w * s[hi].m.to_eigen();
}

inline Eigen::MatrixXd path_eval(const SymplecticPath& p, double t) {
  if (p.gen) return generator_eval(*p.gen, t);
  return sample_eval(p, t);
}

inline Eigen::MatrixXd path_derivative(const SymplecticPath& p, double t) {
  if (p.gen) return generator_derivative(*p.gen, t);
  const auto& s = p.samples;
  size_t lo = 0, hi = s.size() - 1;
  if (t <= to_double(s.front().t)) { lo = 0; hi = 1; }
  else if (t >= to_double(s.back().t)) { lo = s.size() - 2; hi = s.size() - 1; }
  else {
    while (hi - lo > 1) {
      size_t mid = (lo + hi) / 2;
      if (to_double(s[mid].t) <= t) lo = mid; else hi = mid;
    }
  }
  double dt = to_double(s[hi].t) - to_double(s[lo].t);
  return (s[hi].m.to_eigen() - s[lo].m.to_eigen()) / dt;
}

/// Upper bound for how fast eigenvalue angles can move, used to size grids.
inline double path_speed_bound(const SymplecticPath& p) {
  if (!p.gen) {
    double worst = 0;
    for (size_t k = 1; k < p.samples.size(); ++k) {
      double dt = to_double(p.samples[k].t) - to_double(p.samples[k - 1].t);
      double scale =
          std::max(1.0, p.samples[k - 1].m.to_eigen().cwiseAbs().maxCoeff());
      double jump = (p.samples[k].m.to_eigen() - p.samples[k - 1].m.to_eigen())
                        .cwiseAbs()
                        .maxCoeff();
      worst = std::max(worst, jump / (dt * scale));
    }
    return std::max(worst, 2.0 * M_PI);
  }
  const Generator& g = *p.gen;
  double speed = 0;
  if (g.kind != Generator::Kind::exp_symmetric) {
    for (const Block& b : g.blocks)
      speed = std::max(speed, std::abs(to_double(b.r)) * M_PI +
                                  std::abs(std::log(to_double(b.lam))));
  }
  if (g.kind != Generator::Kind::block_sum && g.sym.rows() > 0) {
    speed = std::max(speed, (standard_J(g.sym.rows()).to_eigen() * g.sym.to_eigen()).norm());
  }
  if (g.kind == Generator::Kind::loop_product) {
    double top = 0;
    for (const Integer& m : g.loop_turns)
      top = std::max(top, std::abs(to_double(m)));
    speed += 2.0 * M_PI * top;
  }
  return std::max(speed, 1.0);
}

// ---------------------------------------------------------------------------
// Path algebra

/// End matrix of a sampled path, or of a generator path evaluated exactly
/// when the closed form lands on rational entries.
inline RatMatrix exact_end_matrix_of_samples(const SymplecticPath& p) {
  require(!p.samples.empty() && p.samples.back().entries_exact, ErrorKind::precondition,
          "exact end matrix needs exact samples");
  return p.samples.back().m;
}

/// k-fold iterate: the path covering the original k times, reaching the k-th
/// power of the end matrix.
inline SymplecticPath iterate_path(const SymplecticPath& p, long k) {
  require(k >= 1, ErrorKind::domain, "iteration count must be at least 1");
  SymplecticPath out;
  out.dim2n = p.dim2n;
  out.name = p.name.empty() ? "" : p.name + "^" + std::to_string(k);
  if (p.gen) {
    Generator g = *p.gen;
    for (Block& b : g.blocks) {
      b.r *= k;
      b.lam = rat_pow(b.lam, unsigned(k));
    }
    if (g.sym.rows() > 0) g.sym = g.sym * Rational(k);
    for (Integer& m : g.loop_turns) m *= k;
    out.gen = std::move(g);
    return out;
  }
  RatMatrix pend = p.samples.back().m;
  bool exact = true;
  for (const auto& s : p.samples) exact = exact && s.entries_exact;
  RatMatrix power = RatMatrix::identity(p.dim2n);
  for (long j = 0; j < k; ++j) {
    for (size_t i = (j == 0 ? 0 : 1); i < p.samples.size(); ++i) {
      PathSample s;
      s.t = (p.samples[i].t + j) / k;
      s.m = p.samples[i].m * power;
      s.entries_exact = exact;
      out.samples.push_back(std::move(s));
    }
    power = pend * power;
  }
  return out;
}

/// Pointwise inverse path, homotopic rel endpoints to the algebraic inverse.
inline SymplecticPath invert_path(const SymplecticPath& p) {
  SymplecticPath out;
  out.dim2n = p.dim2n;
  out.name = p.name.empty() ? "" : p.name + "^-1";
  if (p.gen) {
    Generator g = *p.gen;
    for (Block& b : g.blocks) {
      b.r = -b.r;
      b.lam = 1 / b.lam;
    }
    if (g.sym.rows() > 0) g.sym = g.sym * Rational(-1);
    for (Integer& m : g.loop_turns) m = -m;
    out.gen = std::move(g);
    return out;
  }
  for (const auto& s : p.samples) {
    PathSample inv;
    inv.t = s.t;
    inv.m = symplectic_inverse(s.m);
    inv.entries_exact = s.entries_exact;
    out.samples.push_back(std::move(inv));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Exact index route for block sums

/// Index of the primitive block path against the lower perturbation, i.e.
/// the index of the path composed with a small clockwise rotation.
inline Integer block_mu_minus(const Block& b) {
  if (b.lam == 1) {
    Rational x = b.r / 2;
    if (is_integer(x)) return 2 * numerator(x) - 1;
    return 2 * rat_floor(x) + 1;
  }
  return numerator(b.r);
}

inline int block_nullity(const Block& b) {
  if (b.lam == 1 && is_integer(b.r / 2)) return 2;
  return 0;
}

inline bool exact_route_available(const SymplecticPath& p) {
  if (!p.gen) return false;
  const Generator& g = *p.gen;
  if (g.kind == Generator::Kind::block_sum) return true;
  return g.kind == Generator::Kind::loop_product &&
         g.base_kind == Generator::Kind::block_sum;
}

inline Integer exact_mu_minus(const SymplecticPath& p) {
  require(exact_route_available(p), ErrorKind::precondition,
          "exact index route needs a block-sum generator");
  validate_generator(*p.gen);
  Integer total = 0;
  for (const Block& b : p.gen->blocks) total += block_mu_minus(b);
  for (const Integer& m : p.gen->loop_turns) total += 2 * m;
  return total;
}

inline int exact_nullity(const SymplecticPath& p) {
  require(exact_route_available(p), ErrorKind::precondition,
          "exact nullity needs a block-sum generator");
  int total = 0;
  for (const Block& b : p.gen->blocks) total += block_nullity(b);
  return total;
}

} // namespace reebidx
