#pragma once

namespace reebidx {

/// Tolerances and limits for the numeric crossing route. Exact routes ignore
/// all of these. Defaults are pinned here and echoed in CLI reports.
struct RunConfig {
  double tol_symplectic = 1e-9;  ///< max allowed deviation of S^T J S - J per sample
  double tol_rank = 1e-7;        ///< relative singular-value cutoff for kernels
  double tol_form = 1e-6;        ///< relative cutoff for crossing-form eigenvalues
  double tol_time = 1e-12;       ///< bisection width for crossing instants
  double max_sample_jump = 0.5;  ///< max allowed ||S_{k+1} - S_k||_inf for sampled paths
  double max_cell_travel = 0.4;  ///< max eigenvalue-angle travel per grid cell (radians)
  int min_grid = 800;            ///< minimum scan grid size
  int max_grid = 200000;         ///< refusal point for grid refinement
  int max_eps_tries = 8;         ///< perturbation ladder length
  unsigned seed = 12345;         ///< seed for the randomized self-test driver
};

} // namespace reebidx
