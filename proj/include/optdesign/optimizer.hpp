#pragma once

#include "optdesign/infomat.hpp"

namespace optdesign {

struct OptimizerConfig {
  Grid candidate_grid;
  Criterion criterion = Criterion::D;
  int max_iters = 50000;
  double tol = 1e-5;             // stop when max sensitivity excess falls below
  double prune_threshold = 1e-8; // weights below this are dropped each iteration
};

// Multiplicative weight algorithm on the candidate grid: D update
// w_i <- w_i psi_D(x_i)/p, A update w_i <- w_i sqrt(psi_A(x_i)/tr(M^{-1})).
// Uniform start, deterministic, monotone in the D criterion (checked every
// iteration). Convergence is the equivalence-theorem excess over the whole
// grid.
Design optimize(const ModelSpec& m, const ParamPoint& beta, const OptimizerConfig& cfg);

// Merges support points within `radius` (max-norm) into their weight-weighted
// centroid.
Design cluster(const Design& xi, double radius);

}  // namespace optdesign
