#pragma once

#include <Eigen/Dense>
#include <optional>
#include <utility>
#include <vector>

#include "optdesign/region.hpp"

namespace optdesign {

// Two support points closer than this (max-norm) are the same point.
inline constexpr double kMergeTol = 1e-9;

struct DesignPoint {
  Eigen::VectorXd x;
  double w = 0.0;
};

// Approximate design: mutually distinct support points with positive weights
// summing to 1. Construct through new_design so the invariants hold.
struct Design {
  std::vector<DesignPoint> points;
  ExperimentalRegion region;

  double weight_sum() const;
  // Index of the origin among support points (max-norm within kMergeTol).
  std::optional<std::size_t> origin_index() const;
};

// Local parameter point beta = (beta0, slope). For the GLM families the slope
// is the regression slope (dimension = region dimension); for the nonlinear
// families it holds the non-intercept model parameters (beta1, beta2).
struct ParamPoint {
  std::optional<double> intercept;
  Eigen::VectorXd slope;
};

// Validates, coalesces points within kMergeTol (weights summed, first point's
// coordinates kept), renormalizes weights to sum exactly 1.
Design new_design(std::vector<DesignPoint> points, ExperimentalRegion region);

// Conditional design given x != 0: removes the origin, divides the remaining
// weights by (1 - origin weight).
Design strip_origin(const Design& xi);

// xi = omega * delta_0 + (1 - omega) * xi_m0. Exact inverse of strip_origin.
Design augment_origin(const Design& xi_m0, double omega);

}  // namespace optdesign
