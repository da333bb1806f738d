#include "optdesign/region.hpp"

#include <cmath>

#include "optdesign/errors.hpp"

namespace optdesign {

namespace {

void check_bounds(const Eigen::VectorXd& lower, const Eigen::VectorXd& upper) {
  if (lower.size() != upper.size() || lower.size() == 0)
    throw Error(Errc::WrongDimension, "region bounds must share a positive dimension");
  for (int i = 0; i < lower.size(); ++i)
    if (!(lower[i] <= upper[i]))
      throw Error(Errc::NonpositiveInput,
                  "region lower bound exceeds upper bound on axis " + std::to_string(i));
}

}  // namespace

ExperimentalRegion ExperimentalRegion::box(const Eigen::VectorXd& lower,
                                           const Eigen::VectorXd& upper) {
  check_bounds(lower, upper);
  ExperimentalRegion r;
  r.dim = static_cast<int>(lower.size());
  r.kind = RegionKind::Box;
  r.lower = lower;
  r.upper = upper;
  return r;
}

ExperimentalRegion ExperimentalRegion::unit_box(int dim) {
  return box(Eigen::VectorXd::Zero(dim), Eigen::VectorXd::Ones(dim));
}

ExperimentalRegion ExperimentalRegion::simplex(int dim) {
  if (dim < 1) throw Error(Errc::WrongDimension, "simplex dimension must be positive");
  ExperimentalRegion r;
  r.dim = dim;
  r.kind = RegionKind::Simplex;
  return r;
}

ExperimentalRegion ExperimentalRegion::truncated_box(const Eigen::VectorXd& lower,
                                                     const Eigen::VectorXd& upper,
                                                     std::vector<int> unbounded_axes) {
  ExperimentalRegion r = box(lower, upper);
  r.kind = RegionKind::BoxWithTruncation;
  for (int a : unbounded_axes)
    if (a < 0 || a >= r.dim)
      throw Error(Errc::WrongDimension, "unbounded axis index out of range");
  r.unbounded_axes = std::move(unbounded_axes);
  return r;
}

bool ExperimentalRegion::contains(const Eigen::VectorXd& x, double tol) const {
  if (x.size() != dim) return false;
  if (kind == RegionKind::Simplex) {
    double sum = 0.0;
    for (int i = 0; i < dim; ++i) {
      if (x[i] < -tol) return false;
      sum += x[i];
    }
    return std::abs(sum - 1.0) <= tol;
  }
  for (int i = 0; i < dim; ++i)
    if (x[i] < lower[i] - tol || x[i] > upper[i] + tol) return false;
  return true;
}

namespace {

// All length-`dim` tuples of nonnegative integers summing to `total`,
// emitted in lexicographic order, scaled by 1/total.
void simplex_lattice(int dim, int total, int axis, Eigen::VectorXd& work,
                     int remaining, std::vector<Eigen::VectorXd>& out) {
  if (axis == dim - 1) {
    work[axis] = static_cast<double>(remaining) / total;
    out.push_back(work);
    return;
  }
  for (int k = 0; k <= remaining; ++k) {
    work[axis] = static_cast<double>(k) / total;
    simplex_lattice(dim, total, axis + 1, work, remaining - k, out);
  }
}

}  // namespace

Grid make_grid(const ExperimentalRegion& region, int resolution) {
  if (resolution < 2)
    throw Error(Errc::ResolutionTooSmall,
                "grid resolution must be at least 2, got " + std::to_string(resolution));
  Grid g;
  g.resolution = resolution;
  g.provenance = region;
  if (region.kind == RegionKind::Simplex) {
    Eigen::VectorXd work(region.dim);
    simplex_lattice(region.dim, resolution - 1, 0, work, resolution - 1, g.points);
    return g;
  }
  std::size_t count = 1;
  for (int i = 0; i < region.dim; ++i) count *= resolution;
  g.points.reserve(count);
  Eigen::VectorXd x(region.dim);
  std::vector<int> idx(region.dim, 0);
  for (;;) {
    for (int i = 0; i < region.dim; ++i) {
      double t = static_cast<double>(idx[i]) / (resolution - 1);
      x[i] = region.lower[i] + t * (region.upper[i] - region.lower[i]);
    }
    g.points.push_back(x);
    int axis = region.dim - 1;
    while (axis >= 0 && ++idx[axis] == resolution) idx[axis--] = 0;
    if (axis < 0) break;
  }
  return g;
}

}  // namespace optdesign
