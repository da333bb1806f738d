#pragma once

#include <Eigen/Dense>
#include <vector>

namespace optdesign {

enum class RegionKind { Box, Simplex, BoxWithTruncation };

// Experimental region: a box, the unit simplex, or a box standing in for an
// unbounded region (the truncated axes are recorded so downstream reports can
// flag that pass/fail is relative to the truncation).
struct ExperimentalRegion {
  int dim = 0;
  RegionKind kind = RegionKind::Box;
  Eigen::VectorXd lower;  // box kinds only
  Eigen::VectorXd upper;  // box kinds only
  std::vector<int> unbounded_axes;

  static ExperimentalRegion box(const Eigen::VectorXd& lower,
                                const Eigen::VectorXd& upper);
  static ExperimentalRegion unit_box(int dim);
  static ExperimentalRegion simplex(int dim);
  static ExperimentalRegion truncated_box(const Eigen::VectorXd& lower,
                                          const Eigen::VectorXd& upper,
                                          std::vector<int> unbounded_axes);

  bool truncated() const { return kind == RegionKind::BoxWithTruncation; }
  bool contains(const Eigen::VectorXd& x, double tol = 1e-9) const;
};

struct Grid {
  std::vector<Eigen::VectorXd> points;
  int resolution = 0;
  ExperimentalRegion provenance;
};

// Deterministic lattice over the region: boxes get `resolution` points per
// axis (endpoints included), the simplex gets all compositions k/(resolution-1)
// summing to 1. Points are in lexicographic order.
Grid make_grid(const ExperimentalRegion& region, int resolution);

}  // namespace optdesign
