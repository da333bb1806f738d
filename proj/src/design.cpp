#include "optdesign/design.hpp"

#include <cmath>

#include "optdesign/errors.hpp"

namespace optdesign {

namespace {

double maxnorm_dist(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return (a - b).lpNorm<Eigen::Infinity>();
}

}  // namespace

double Design::weight_sum() const {
  double s = 0.0;
  for (const auto& p : points) s += p.w;
  return s;
}

std::optional<std::size_t> Design::origin_index() const {
  for (std::size_t i = 0; i < points.size(); ++i)
    if (points[i].x.lpNorm<Eigen::Infinity>() <= kMergeTol) return i;
  return std::nullopt;
}

Design new_design(std::vector<DesignPoint> points, ExperimentalRegion region) {
  if (points.empty()) throw Error(Errc::EmptyDesign, "design needs at least one point");
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i].x.size() != region.dim)
      throw Error(Errc::WrongDimension,
                  "point " + std::to_string(i) + " has dimension " +
                      std::to_string(points[i].x.size()) + ", region has " +
                      std::to_string(region.dim));
    if (!(points[i].w > 0.0))
      throw Error(Errc::NonpositiveWeight,
                  "point " + std::to_string(i) + " has nonpositive weight", points[i].w);
    if (!region.contains(points[i].x))
      throw Error(Errc::PointOutsideRegion,
                  "point " + std::to_string(i) + " lies outside the region");
  }
  Design d;
  d.region = std::move(region);
  for (auto& p : points) {
    bool merged = false;
    for (auto& q : d.points) {
      if (maxnorm_dist(p.x, q.x) <= kMergeTol) {
        q.w += p.w;
        merged = true;
        break;
      }
    }
    if (!merged) d.points.push_back(std::move(p));
  }
  double s = d.weight_sum();
  for (auto& q : d.points) q.w /= s;
  return d;
}

Design strip_origin(const Design& xi) {
  auto oi = xi.origin_index();
  if (!oi) throw Error(Errc::OriginNotInSupport, "origin is not a support point");
  if (xi.points.size() < 2)
    throw Error(Errc::OnlyOriginSupported, "no non-origin support points to keep");
  double omega = xi.points[*oi].w;
  Design d;
  d.region = xi.region;
  d.points.reserve(xi.points.size() - 1);
  for (std::size_t i = 0; i < xi.points.size(); ++i) {
    if (i == *oi) continue;
    d.points.push_back({xi.points[i].x, xi.points[i].w / (1.0 - omega)});
  }
  return d;
}

Design augment_origin(const Design& xi_m0, double omega) {
  if (!(omega > 0.0 && omega < 1.0))
    throw Error(Errc::WeightOutOfRange,
                "origin weight must lie strictly between 0 and 1", omega);
  if (xi_m0.origin_index())
    throw Error(Errc::OriginAlreadyPresent, "design already has the origin in its support");
  Eigen::VectorXd origin = Eigen::VectorXd::Zero(xi_m0.region.dim);
  if (!xi_m0.region.contains(origin))
    throw Error(Errc::PointOutsideRegion, "origin lies outside the region");
  Design d;
  d.region = xi_m0.region;
  d.points.reserve(xi_m0.points.size() + 1);
  d.points.push_back({origin, omega});
  for (const auto& p : xi_m0.points) d.points.push_back({p.x, (1.0 - omega) * p.w});
  return d;
}

}  // namespace optdesign
