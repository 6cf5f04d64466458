#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "reebidx/config.hpp"
#include "reebidx/errors.hpp"
#include "reebidx/sympath.hpp"

namespace reebidx {
namespace detail {

inline Eigen::MatrixXd j0_dense(int dim2n) { return standard_J(dim2n).to_eigen(); }

/// Global clockwise perturbation e^{-eps t J0}, block diagonal rotations.
inline Eigen::MatrixXd clockwise(int dim2n, double eps, double t) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dim2n, dim2n);
  for (int b = 0; b < dim2n / 2; ++b) m.block<2, 2>(2 * b, 2 * b) = rot2(-eps * t);
  return m;
}

/// Kernel basis of (M - I) from an SVD with a relative cutoff plus an
/// absolute floor for paths that are only known up to interpolation error.
inline Eigen::MatrixXd kernel_basis(const Eigen::MatrixXd& m, double tol_rank,
                                    double abs_floor = 0.0) {
  int n = int(m.rows());
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m - Eigen::MatrixXd::Identity(n, n),
                                        Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  double top = std::max(sv(0), 1.0);
  double cut = std::max(tol_rank * top, abs_floor);
  int dim = 0;
  for (int i = n - 1; i >= 0 && sv(i) < cut; --i) ++dim;
  return svd.matrixV().rightCols(dim);
}

/// Worst-case deviation of the piecewise-linear interpolant from the path it
/// samples, estimated from second differences.
inline double sample_interp_error(const SymplecticPath& p) {
  if (p.gen) return 0.0;
  double worst = 0;
  for (size_t k = 1; k + 1 < p.samples.size(); ++k) {
    Eigen::MatrixXd second = p.samples[k + 1].m.to_eigen() -
                             2.0 * p.samples[k].m.to_eigen() +
                             p.samples[k - 1].m.to_eigen();
    worst = std::max(worst, second.cwiseAbs().maxCoeff() / 8.0);
  }
  return worst;
}

/// Smallest nonzero angular distance of a unit-circle eigenvalue of M from 1.
struct EndSpectrum {
  double min_phase = M_PI;
  int nullity = 0;
};

inline EndSpectrum end_spectrum(const Eigen::MatrixXd& m, double tol_rank) {
  EndSpectrum out;
  Eigen::EigenSolver<Eigen::MatrixXd> es(m);
  for (int i = 0; i < m.rows(); ++i) {
    std::complex<double> lam = es.eigenvalues()(i);
    double phase = std::abs(std::arg(lam));
    double dist = std::abs(lam - std::complex<double>(1.0, 0.0));
    if (dist < 1e-6) continue;
    if (std::abs(std::abs(lam) - 1.0) < 1e-6)
      out.min_phase = std::min(out.min_phase, phase);
  }
  out.nullity = int(kernel_basis(m, tol_rank).cols());
  return out;
}

struct SymSpectrum {
  int positive = 0;
  int negative = 0;
  double min_abs = 0;
  bool regular(double tol) const { return min_abs > tol; }
};

inline SymSpectrum sym_spectrum(const Eigen::MatrixXd& f, double scale_floor) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(f);
  SymSpectrum out;
  double scale = std::max(es.eigenvalues().cwiseAbs().maxCoeff(), scale_floor);
  out.min_abs = es.eigenvalues().cwiseAbs().minCoeff() / scale;
  for (int i = 0; i < f.rows(); ++i) {
    if (es.eigenvalues()(i) > 0) ++out.positive;
    if (es.eigenvalues()(i) < 0) ++out.negative;
  }
  return out;
}

/// One attempt to count the perturbed path's crossings at a fixed eps.
/// Crossings are located as zeros of the smallest singular value of
/// Gamma_eps(t) - I; the determinant cannot serve because conjugate
/// eigenvalue pairs reach 1 together and leave its sign unchanged.
/// Returns nothing when the picture looks non-regular; the caller then moves
/// down the perturbation ladder or refines the grid.
inline std::optional<Integer> try_crossings(const SymplecticPath& p, double eps,
                                            const RunConfig& cfg, int grid_mult) {
  const int n2 = p.dim2n;
  const Eigen::MatrixXd j0 = j0_dense(n2);
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n2, n2);
  const double speed = path_speed_bound(p) + eps;

  auto eval_pert = [&](double t) -> Eigen::MatrixXd {
    return path_eval(p, t) * clockwise(n2, eps, t);
  };
  auto deriv_pert = [&](double t) -> Eigen::MatrixXd {
    Eigen::MatrixXd g = path_eval(p, t);
    Eigen::MatrixXd gd = path_derivative(p, t);
    return (gd - eps * g * j0) * clockwise(n2, eps, t);
  };
  auto sigma_min = [&](double t) -> double {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(eval_pert(t) - id);
    return svd.singularValues().minCoeff();
  };
  auto crossing_form = [&](const Eigen::MatrixXd& kernel, double t) -> Eigen::MatrixXd {
    Eigen::MatrixXd w = j0.transpose() * deriv_pert(t);
    Eigen::MatrixXd f = kernel.transpose() * w * kernel;
    return 0.5 * (f + f.transpose());
  };

  // Start form: the whole space is the kernel at t=0.
  Eigen::MatrixXd q0 = j0.transpose() * path_derivative(p, 0.0);
  q0 = 0.5 * (q0 + q0.transpose()) - eps * id;
  SymSpectrum start = sym_spectrum(q0, 1e-3);
  if (!start.regular(cfg.tol_form)) return std::nullopt;

  // Endpoint analysis: degenerate directions whose unperturbed crossing form
  // is negative produce one crossing each just before t=1 once the clockwise
  // perturbation is on. Count them analytically and keep the scan away from
  // that zone.
  Eigen::MatrixXd end = path_eval(p, 1.0);
  Eigen::MatrixXd end_kernel = kernel_basis(end, cfg.tol_rank);
  int end_negative = 0;
  double min_regular_form = 0.0;
  if (end_kernel.cols() > 0) {
    Eigen::MatrixXd w = j0.transpose() * path_derivative(p, 1.0);
    Eigen::MatrixXd f = end_kernel.transpose() * w * end_kernel;
    f = 0.5 * (f + f.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(f);
    double scale = std::max(solver.eigenvalues().cwiseAbs().maxCoeff(), 1e-3);
    for (int i = 0; i < solver.eigenvalues().size(); ++i) {
      double lam = solver.eigenvalues()(i);
      if (std::abs(lam) > cfg.tol_form * scale) {
        if (lam < 0) ++end_negative;
        double m = std::abs(lam);
        min_regular_form = min_regular_form == 0.0 ? m : std::min(min_regular_form, m);
      } else {
        // A kernel direction with vanishing crossing form contributes no
        // endpoint crossing only if the path is actually flat there; slow
        // tangencies show up as ordinary dips in the interior scan instead.
        Eigen::VectorXd v = end_kernel * solver.eigenvectors().col(i);
        double h = 0.02;
        double rate = ((path_eval(p, 1.0 - h) - end) * v).norm() / (h * v.norm());
        if (rate > 1e-3) return std::nullopt;
      }
    }
  }
  EndSpectrum spectrum = end_spectrum(end, cfg.tol_rank);

  double delta = 0.0;
  if (min_regular_form > 0.0) {
    if (eps > 0.2 * min_regular_form) return std::nullopt;
    delta = std::min(0.2, 4.0 * eps / min_regular_form);
    double crowding = (spectrum.min_phase - eps) / (2.0 * speed);
    if (crowding < delta) return std::nullopt;
  }
  const double t_end = 1.0 - delta;

  long grid = std::lround(std::max(double(cfg.min_grid), speed / cfg.max_cell_travel));
  grid *= grid_mult;
  if (grid > cfg.max_grid) return std::nullopt;

  std::vector<double> ts(size_t(grid) + 1), f(size_t(grid) + 1);
  for (long k = 0; k <= grid; ++k) {
    double t = t_end * double(k) / double(grid);
    ts[size_t(k)] = t;
    f[size_t(k)] = sigma_min(t);
  }

  // A dip of sigma_min counts as a crossing candidate once the path has
  // escaped the near-identity zone at least once before it. Sampled paths
  // cannot push sigma_min below their interpolation error.
  const double rep_err = sample_interp_error(p);
  const double detect = std::min(0.8, 2.0 * std::sin(0.75 * cfg.max_cell_travel));
  const double zero_tol = std::max(1e-8, 3.0 * rep_err);
  const double miss_tol = std::max(1e-5, 30.0 * rep_err);

  Integer interior = 0;
  bool armed = false;
  const double cell = t_end / double(grid);
  double last_counted = -1.0;
  for (size_t k = 1; k + 1 <= size_t(grid); ++k) {
    if (!armed) {
      armed = f[k] > detect;
      continue;
    }
    if (!(f[k] < detect && f[k] <= f[k - 1] && f[k] <= f[k + 1])) continue;

    double a = ts[k - 1], b = ts[k + 1];
    for (int it = 0; it < 200 && b - a > cfg.tol_time; ++it) {
      double m1 = a + (b - a) / 3.0, m2 = b - (b - a) / 3.0;
      if (sigma_min(m1) < sigma_min(m2)) b = m2; else a = m1;
    }
    double tc = 0.5 * (a + b);
    if (tc - last_counted < 3.0 * cell) continue;
    double fc = sigma_min(tc);
    if (fc > miss_tol) continue;
    if (fc > zero_tol) return std::nullopt;

    Eigen::MatrixXd kernel = kernel_basis(eval_pert(tc), cfg.tol_rank, 2.0 * zero_tol);
    if (kernel.cols() == 0) return std::nullopt;
    SymSpectrum form = sym_spectrum(crossing_form(kernel, tc), 1e-3);
    if (!form.regular(cfg.tol_form)) return std::nullopt;
    interior += form.positive - form.negative;
    last_counted = tc;
  }

  Integer start_sig = start.positive - start.negative;
  Integer twice = start_sig + 2 * interior - 2 * end_negative;
  if (twice % 2 != 0) return std::nullopt;
  return twice / 2;
}

} // namespace detail

/// Index of the path against the lower perturbation, by crossing counting
/// over a ladder of clockwise perturbations. Two consecutive ladder rungs
/// must agree before the value is accepted.
inline Integer numeric_mu_minus(const SymplecticPath& p, const RunConfig& cfg = {}) {
  ValidationReport rep = validate_path(p, cfg);
  require(rep.ok, ErrorKind::structural, "path failed validation: " + rep.message);

  Eigen::MatrixXd end = path_eval(p, 1.0);
  detail::EndSpectrum spec = detail::end_spectrum(end, cfg.tol_rank);
  double eps0 = std::min(spec.min_phase / 2.0, 0.25);

  std::optional<Integer> last;
  for (int j = 1; j <= cfg.max_eps_tries; ++j) {
    double eps = eps0 * std::pow(2.0, -j);
    std::optional<Integer> r;
    for (int mult : {1, 4}) {
      r = detail::try_crossings(p, eps, cfg, mult);
      if (r) break;
    }
    if (!r) { last.reset(); continue; }
    if (last && *last == *r) return *r;
    last = r;
  }
  fail(ErrorKind::resolution,
       "perturbation ladder failed to stabilize the crossing count");
}

inline int numeric_nullity(const SymplecticPath& p, const RunConfig& cfg = {}) {
  return int(detail::kernel_basis(path_eval(p, 1.0), cfg.tol_rank).cols());
}

} // namespace reebidx
