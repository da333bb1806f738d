#include "optdesign/optimizer.hpp"

#include <cmath>
#include <numeric>
#include <vector>

#include "optdesign/errors.hpp"
#include "optdesign/parallel.hpp"

namespace optdesign {

namespace {

// Candidate features, one row per grid point.
Eigen::MatrixXd candidate_matrix(const ModelSpec& m, const ParamPoint& beta,
                                 const Grid& grid) {
  const std::size_t n = grid.points.size();
  Eigen::MatrixXd V(n, param_dim(m));
  parallel_for(n, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i)
      V.row(i) = info_vector(m, beta, grid.points[i]).transpose();
  });
  return V;
}

}  // namespace

Design optimize(const ModelSpec& m, const ParamPoint& beta, const OptimizerConfig& cfg) {
  const std::size_t n = cfg.candidate_grid.points.size();
  if (n == 0) throw Error(Errc::ResolutionTooSmall, "candidate grid is empty");
  if (!(cfg.tol > 0.0)) throw Error(Errc::NonpositiveInput, "tol must be positive");
  if (!(cfg.prune_threshold < 1.0 / static_cast<double>(n)))
    throw Error(Errc::NonpositiveInput,
                "prune threshold must stay below 1/(number of candidates)");

  const int p = param_dim(m);
  Eigen::MatrixXd V = candidate_matrix(m, beta, cfg.candidate_grid);
  Eigen::VectorXd w = Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
  std::vector<std::size_t> active(n);
  std::iota(active.begin(), active.end(), std::size_t{0});

  double last_det = 0.0;
  double excess = std::numeric_limits<double>::infinity();
  for (int iter = 1; iter <= cfg.max_iters; ++iter) {
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(p, p);
    for (std::size_t i : active) {
      M.noalias() += w[i] * (V.row(i).transpose() * V.row(i));
    }
    M = ((M + M.transpose()) / 2.0).eval();

    Eigen::MatrixXd kernel;
    double threshold;
    double det_now;
    try {
      SymSolve solve(M);
      det_now = solve.det();
      if (cfg.criterion == Criterion::D) {
        kernel = solve.inverse();
        threshold = p;
      } else {
        kernel = solve.inverse_squared();
        threshold = solve.trace_inverse();
      }
    } catch (const Error& e) {
      if (e.code == Errc::SingularInformation)
        throw Error(Errc::SingularCandidates,
                    "candidate grid cannot support a nonsingular information matrix "
                    "(condition number " + std::to_string(e.num_a) + " at iteration " +
                        std::to_string(iter) + ")",
                    e.num_a);
      throw;
    }
    if (iter == 10 && !(det_now > 0.0))
      throw Error(Errc::SingularCandidates,
                  "information matrix still singular after 10 iterations");

    // Multiplicative ascent is monotone in det for the D criterion; a drop
    // beyond rounding (plus the tiny pruning loss) means a defect.
    if (cfg.criterion == Criterion::D && iter > 1 && det_now < last_det * (1.0 - 1e-7))
      throw std::logic_error("multiplicative update lost D-criterion monotonicity");
    last_det = det_now;

    // Sensitivity over the whole grid; the update only needs the active part
    // but the stopping rule is the global excess.
    Eigen::VectorXd psi = ((V * kernel).cwiseProduct(V)).rowwise().sum();
    std::size_t best = 0;
    for (std::size_t i = 1; i < n; ++i)
      if (psi[i] > psi[best]) best = i;
    excess = psi[best] - threshold;
    if (excess <= cfg.tol) break;

    if (cfg.criterion == Criterion::D) {
      for (std::size_t i : active) w[i] *= psi[i] / threshold;
    } else {
      for (std::size_t i : active) w[i] *= std::sqrt(psi[i] / threshold);
    }
    double sum = 0.0;
    for (std::size_t i : active) sum += w[i];
    for (std::size_t i : active) w[i] /= sum;

    std::vector<std::size_t> kept;
    kept.reserve(active.size());
    double kept_sum = 0.0;
    for (std::size_t i : active) {
      if (w[i] >= cfg.prune_threshold) {
        kept.push_back(i);
        kept_sum += w[i];
      } else {
        w[i] = 0.0;
      }
    }
    if (kept.size() < active.size())
      for (std::size_t i : kept) w[i] /= kept_sum;
    active.swap(kept);
  }

  if (excess > cfg.tol)
    throw Error(Errc::NoConvergence,
                "max sensitivity excess " + std::to_string(excess) + " after " +
                    std::to_string(cfg.max_iters) + " iterations",
                excess);

  std::vector<DesignPoint> pts;
  pts.reserve(active.size());
  for (std::size_t i : active) pts.push_back({cfg.candidate_grid.points[i], w[i]});
  return new_design(std::move(pts), cfg.candidate_grid.provenance);
}

Design cluster(const Design& xi, double radius) {
  if (!(radius > 0.0)) throw Error(Errc::NonpositiveInput, "cluster radius must be positive");
  struct Blob {
    Eigen::VectorXd weighted_sum;
    double weight;
  };
  std::vector<Blob> blobs;
  for (const auto& pt : xi.points) {
    bool merged = false;
    for (auto& b : blobs) {
      Eigen::VectorXd centroid = b.weighted_sum / b.weight;
      if ((pt.x - centroid).lpNorm<Eigen::Infinity>() <= radius) {
        b.weighted_sum += pt.w * pt.x;
        b.weight += pt.w;
        merged = true;
        break;
      }
    }
    if (!merged) blobs.push_back({pt.w * pt.x, pt.w});
  }
  std::vector<DesignPoint> pts;
  pts.reserve(blobs.size());
  for (const auto& b : blobs) pts.push_back({b.weighted_sum / b.weight, b.weight});
  return new_design(std::move(pts), xi.region);
}

}  // namespace optdesign
