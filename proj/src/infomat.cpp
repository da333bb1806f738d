#include "optdesign/infomat.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "optdesign/errors.hpp"

namespace optdesign {

SymSolve::SymSolve(const Eigen::MatrixXd& M) {
  eig_.compute(M);
  if (eig_.info() != Eigen::Success)
    throw Error(Errc::SingularInformation, "eigendecomposition failed",
                std::numeric_limits<double>::infinity());
  double lmin = eig_.eigenvalues().minCoeff();
  double lmax = eig_.eigenvalues().maxCoeff();
  cond_ = lmin > 0.0 ? lmax / lmin : std::numeric_limits<double>::infinity();
  if (!(cond_ < kConditionLimit))
    throw Error(Errc::SingularInformation,
                "information matrix is singular (condition number " +
                    std::to_string(cond_) + ")",
                cond_);
}

double SymSolve::det() const { return eig_.eigenvalues().prod(); }

double SymSolve::det_inverse() const { return 1.0 / det(); }

double SymSolve::trace_inverse() const { return eig_.eigenvalues().cwiseInverse().sum(); }

double SymSolve::condition() const { return cond_; }

Eigen::MatrixXd SymSolve::inverse() const {
  return eig_.eigenvectors() *
         eig_.eigenvalues().cwiseInverse().asDiagonal() *
         eig_.eigenvectors().transpose();
}

Eigen::MatrixXd SymSolve::inverse_squared() const {
  return eig_.eigenvectors() *
         eig_.eigenvalues().array().square().inverse().matrix().asDiagonal() *
         eig_.eigenvectors().transpose();
}

InfoMatrix info_matrix(const Design& xi, const ModelSpec& m, const ParamPoint& beta) {
  if (xi.region.dim != m.dim)
    throw Error(Errc::DimensionMismatch, "design region and model disagree on dimension");
  int p = param_dim(m);
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(p, p);
  for (const auto& pt : xi.points) {
    Eigen::VectorXd g = info_vector(m, beta, pt.x);
    M.noalias() += pt.w * (g * g.transpose());
  }
  // The rank-1 sum is symmetric up to rounding; make it exact.
  M = ((M + M.transpose()) / 2.0).eval();
  return {M, p};
}

double criterion_value(const InfoMatrix& M, Criterion which) {
  SymSolve s(M.entries);
  return which == Criterion::D ? s.det_inverse() : s.trace_inverse();
}

namespace {

// Shared premise checks for the closed-form inverse. Returns (origin index,
// origin weight, u0).
struct Xi0Context {
  std::size_t origin;
  double omega;
  double u0;
};

Xi0Context check_xi0_premises(const Design& xi, const ModelSpec& m,
                              const ParamPoint& beta, const Eigen::VectorXd& c) {
  if (!m.with_intercept)
    throw Error(Errc::PremiseViolated, "closed-form inverse concerns the intercept model");
  auto oi = xi.origin_index();
  if (!oi)
    throw Error(Errc::PremiseViolated, "origin is not a support point");
  if (xi.points.size() < 2)
    throw Error(Errc::PremiseViolated, "no non-origin support points");
  if (c.size() != feature_dim(m))
    throw Error(Errc::DimensionMismatch, "hyperplane vector has wrong dimension");

  // Intensity must not depend on the intercept: beta0 = 0 for Poisson and
  // logistic (the Poisson transfer with beta0 != 0 goes through the
  // factorization reduction, not through this formula).
  if ((m.family == Family::Poisson || m.family == Family::Logistic) &&
      beta.intercept && std::abs(*beta.intercept) > 1e-12)
    throw Error(Errc::PremiseViolated,
                "intensity factorization premise needs beta0 = 0 for this family");

  ModelSpec bare = m;
  bare.with_intercept = false;
  // f_beta(0) = 0: automatic for GLMs, fails for the exponential family.
  Eigen::VectorXd x0 = Eigen::VectorXd::Zero(m.dim);
  if (weighted_regressor(bare, beta, x0).lpNorm<Eigen::Infinity>() > 1e-12)
    throw Error(Errc::PremiseViolated,
                "no-intercept weighted regressor does not vanish at the origin");

  double resid = 0.0;
  for (std::size_t i = 0; i < xi.points.size(); ++i) {
    if (i == *oi) continue;
    double v = c.dot(hyperplane_feature(m, beta, xi.points[i].x));
    resid = std::max(resid, std::abs(v - 1.0));
  }
  if (resid >= 1e-8)
    throw Error(Errc::PremiseViolated,
                "support does not lie on the hyperplane c^T f(x) = 1 (residual " +
                    std::to_string(resid) + ")",
                resid);

  double u0 = 1.0;
  if (!is_nonlinear(m.family)) {
    ParamPoint slope_only{std::nullopt, beta.slope};
    u0 = intensity(bare, slope_only, x0);
  }
  return {*oi, xi.points[*oi].w, u0};
}

// Inverse of the no-intercept information matrix of the conditional design.
Eigen::MatrixXd stripped_inverse(const Design& xi, const ModelSpec& m,
                                 const ParamPoint& beta) {
  ModelSpec bare = m;
  bare.with_intercept = false;
  Design xi_m0 = strip_origin(xi);
  return SymSolve(info_matrix(xi_m0, bare, beta).entries).inverse();
}

}  // namespace

Eigen::MatrixXd block_inverse(const Design& xi, const ModelSpec& m,
                              const ParamPoint& beta, const Eigen::VectorXd& c) {
  Xi0Context ctx = check_xi0_premises(xi, m, beta, c);
  Eigen::MatrixXd Minv_t = stripped_inverse(xi, m, beta);
  int nu = feature_dim(m);
  double a = 1.0 / (ctx.omega * ctx.u0);
  Eigen::MatrixXd out(nu + 1, nu + 1);
  out(0, 0) = a;
  out.block(0, 1, 1, nu) = -a * c.transpose();
  out.block(1, 0, nu, 1) = -a * c;
  out.block(1, 1, nu, nu) =
      Minv_t / (1.0 - ctx.omega) + a * (c * c.transpose());
  return out;
}

Eigen::MatrixXd squared_inverse(const Design& xi, const ModelSpec& m,
                                const ParamPoint& beta, const Eigen::VectorXd& c) {
  Xi0Context ctx = check_xi0_premises(xi, m, beta, c);
  Eigen::MatrixXd B = stripped_inverse(xi, m, beta) / (1.0 - ctx.omega);
  int nu = feature_dim(m);
  double a = 1.0 / (ctx.omega * ctx.u0);
  double ctc1 = c.squaredNorm() + 1.0;
  Eigen::VectorXd Bc = B * c;
  Eigen::MatrixXd out(nu + 1, nu + 1);
  out(0, 0) = a * a * ctc1;
  Eigen::VectorXd cross = -a * (a * ctc1 * c + Bc);
  out.block(0, 1, 1, nu) = cross.transpose();
  out.block(1, 0, nu, 1) = cross;
  // Symmetric lower-right block: B^2 + a (B c c^T + c c^T B) + a^2 (c^Tc+1) c c^T.
  out.block(1, 1, nu, nu) = B * B + a * (Bc * c.transpose() + c * Bc.transpose()) +
                            a * a * ctc1 * (c * c.transpose());
  return out;
}

double a_trace_at_optimal_origin_weight(const Eigen::VectorXd& c, double u0, double tau) {
  if (!(u0 > 0.0) || !(tau > 0.0))
    throw Error(Errc::NonpositiveInput, "u0 and tau must be positive");
  double k = std::sqrt(c.squaredNorm() + 1.0) + std::sqrt(u0 * tau);
  return k * k / u0;
}

}  // namespace optdesign
