#pragma once

#include "reebidx/crossing.hpp"
#include "reebidx/sympath.hpp"

namespace reebidx {

/// Dimension of the fixed space of the end matrix.
inline int path_nullity(const SymplecticPath& p, const RunConfig& cfg = {}) {
  if (exact_route_available(p)) return exact_nullity(p);
  return numeric_nullity(p, cfg);
}

/// Index against the lower perturbation. Block-sum generators go through the
/// exact per-block formulas; everything else goes through crossing counting.
inline Integer cz_lower(const SymplecticPath& p, const RunConfig& cfg = {}) {
  if (exact_route_available(p)) return exact_mu_minus(p);
  return numeric_mu_minus(p, cfg);
}

inline Integer cz_upper(const SymplecticPath& p, const RunConfig& cfg = {}) {
  return cz_lower(p, cfg) + path_nullity(p, cfg);
}

/// Index of a path with nondegenerate endpoint.
inline Integer cz_index(const SymplecticPath& p, const RunConfig& cfg = {}) {
  require(path_nullity(p, cfg) == 0, ErrorKind::precondition,
          "index of a degenerate path is only defined against a perturbation");
  return cz_lower(p, cfg);
}

struct IndexTriple {
  Integer mu_minus;
  Integer mu_plus;
  int nullity = 0;

  Rational rs() const { return Rational(mu_minus + mu_plus) / 2; }
};

inline IndexTriple index_triple(const SymplecticPath& p, const RunConfig& cfg = {}) {
  IndexTriple out;
  out.mu_minus = cz_lower(p, cfg);
  out.nullity = path_nullity(p, cfg);
  out.mu_plus = out.mu_minus + out.nullity;
  return out;
}

/// Half-integer index: the average of the two one-sided perturbed indices.
inline Rational rs_index(const SymplecticPath& p, const RunConfig& cfg = {}) {
  IndexTriple t = index_triple(p, cfg);
  return t.rs();
}

} // namespace reebidx
