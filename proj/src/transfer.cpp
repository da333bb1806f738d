#include "optdesign/transfer.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "optdesign/errors.hpp"
#include "optdesign/parallel.hpp"

namespace optdesign {

namespace {

ModelSpec no_intercept(const ModelSpec& m) {
  ModelSpec bare = m;
  bare.with_intercept = false;
  return bare;
}

// Intensity of the no-intercept model at the slope; 1 for the nonlinear
// corollaries where all u-terms drop out.
double u_tilde(const ModelSpec& m, const ParamPoint& beta, const Eigen::VectorXd& x) {
  if (is_nonlinear(m.family)) return 1.0;
  ParamPoint slope_only{std::nullopt, beta.slope};
  return intensity(no_intercept(m), slope_only, x);
}

double u_tilde_origin(const ModelSpec& m, const ParamPoint& beta) {
  return u_tilde(m, beta, Eigen::VectorXd::Zero(m.dim));
}

// Per-point pieces shared by both theorem conditions: the weighted regressor
// f_b, s = c^T f_b and w = u^{1/2} (1 for nonlinear families).
struct ConditionPoint {
  Eigen::VectorXd fb;
  double s;
  double w;
};

ConditionPoint condition_point(const ModelSpec& m, const ParamPoint& beta,
                               const Eigen::VectorXd& c, const Eigen::VectorXd& x) {
  ModelSpec bare = no_intercept(m);
  ConditionPoint out;
  out.fb = weighted_regressor(bare, beta, x);
  out.s = c.dot(out.fb);
  out.w = std::sqrt(u_tilde(m, beta, x));
  return out;
}

void check_family_premises(const ModelSpec& m, const ParamPoint& beta,
                           bool* factorization_route) {
  if (m.family == Family::ExpRegression)
    throw Error(Errc::PremiseViolated,
                "exponential-regression gradient does not vanish at the origin; "
                "the transfer class excludes this family");
  bool beta0_nonzero = beta.intercept && std::abs(*beta.intercept) > 1e-12;
  if (m.family == Family::Logistic && beta0_nonzero)
    throw Error(Errc::PremiseViolated,
                "logistic transfer needs beta0 = 0 so that u matches the "
                "no-intercept intensity");
  if (m.family == Family::Poisson && beta0_nonzero && factorization_route)
    *factorization_route = true;  // optimality is beta0-free; reduce to beta0 = 0
}

}  // namespace

HyperplaneCertificate find_hyperplane_c(const Design& xi, const ModelSpec& m,
                                        const ParamPoint& beta) {
  auto oi = xi.origin_index();
  std::vector<const DesignPoint*> pts;
  for (std::size_t i = 0; i < xi.points.size(); ++i)
    if (!oi || i != *oi) pts.push_back(&xi.points[i]);
  if (pts.empty())
    throw Error(Errc::NoNonOriginPoints, "design has no non-origin support points");

  int nu = feature_dim(m);
  Eigen::MatrixXd A(pts.size(), nu);
  for (std::size_t i = 0; i < pts.size(); ++i)
    A.row(i) = hyperplane_feature(m, beta, pts[i]->x).transpose();
  Eigen::VectorXd rhs = Eigen::VectorXd::Ones(pts.size());

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  svd.setThreshold(1e-10);
  HyperplaneCertificate cert;
  cert.c = svd.solve(rhs);
  cert.rank_deficient = svd.rank() < nu;
  cert.residual = (A * cert.c - rhs).lpNorm<Eigen::Infinity>();
  return cert;
}

double origin_weight(Criterion which, int nu, const Eigen::VectorXd& c, double u0,
                     double tau) {
  if (which == Criterion::D) {
    if (nu < 1) throw Error(Errc::NonpositiveInput, "dimension must be at least 1");
    return 1.0 / (nu + 1.0);
  }
  if (!(u0 > 0.0) || !(tau > 0.0))
    throw Error(Errc::NonpositiveInput, "u0 and tau must be positive");
  double root = std::sqrt(c.squaredNorm() + 1.0);
  return root / (root + std::sqrt(u0 * tau));
}

double check_condition_d(const Design& xi_m0, const ModelSpec& m, const ParamPoint& beta,
                         const Eigen::VectorXd& c, const Grid& grid,
                         Eigen::VectorXd* argmin) {
  ModelSpec bare = no_intercept(m);
  SymSolve solve(info_matrix(xi_m0, bare, beta).entries);
  Eigen::MatrixXd Minv = solve.inverse();
  double u0 = u_tilde_origin(m, beta);
  double nu = feature_dim(m);

  const std::size_t n = grid.points.size();
  std::vector<double> margin(n);
  parallel_for(n, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      ConditionPoint cp = condition_point(m, beta, c, grid.points[i]);
      double lhs = cp.fb.dot(Minv * cp.fb);
      double pen = (cp.s - cp.w) * (cp.s - cp.w) / u0;
      margin[i] = nu * (1.0 - pen) - lhs;
    }
  });
  std::size_t best = 0;
  for (std::size_t i = 1; i < n; ++i)
    if (margin[i] < margin[best]) best = i;
  if (argmin) *argmin = grid.points[best];
  return margin[best];
}

namespace {

struct ATerms {
  double margin;  // tau - P - T1
  double t1;
};

ATerms a_terms(const Eigen::MatrixXd& Minv, const Eigen::MatrixXd& Minv2,
               double tau, double u0, const Eigen::VectorXd& c, double t2_scale,
               const ConditionPoint& cp) {
  double P = cp.fb.dot(Minv2 * cp.fb);
  double dev = cp.s - cp.w;
  double t2 = t2_scale * c.dot(Minv * cp.fb) * dev;
  double t1 = tau * dev * dev / u0 + t2;
  return {tau - P - t1, t1};
}

}  // namespace

AConditionResult check_condition_a(const Design& xi_m0, const ModelSpec& m,
                                   const ParamPoint& beta, const Eigen::VectorXd& c,
                                   const Grid& grid) {
  ModelSpec bare = no_intercept(m);
  SymSolve solve(info_matrix(xi_m0, bare, beta).entries);
  Eigen::MatrixXd Minv = solve.inverse();
  Eigen::MatrixXd Minv2 = solve.inverse_squared();
  double tau = solve.trace_inverse();
  double u0 = u_tilde_origin(m, beta);
  double t2_scale = 2.0 * std::sqrt(tau / (u0 * (c.squaredNorm() + 1.0)));

  const std::size_t n = grid.points.size();
  std::vector<double> margin(n), t1(n);
  parallel_for(n, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      ConditionPoint cp = condition_point(m, beta, c, grid.points[i]);
      ATerms t = a_terms(Minv, Minv2, tau, u0, c, t2_scale, cp);
      margin[i] = t.margin;
      t1[i] = t.t1;
    }
  });
  AConditionResult res;
  std::size_t bm = 0, bt = 0;
  for (std::size_t i = 1; i < n; ++i) {
    if (margin[i] < margin[bm]) bm = i;
    if (t1[i] < t1[bt]) bt = i;
  }
  res.margin = margin[bm];
  res.margin_argmin = grid.points[bm];
  res.t1_min = t1[bt];
  res.t1_argmin = grid.points[bt];
  return res;
}

double compute_T1(const Eigen::VectorXd& x, const Design& xi_m0, const ModelSpec& m,
                  const ParamPoint& beta, const Eigen::VectorXd& c, double tau) {
  ConditionPoint cp = condition_point(m, beta, c, x);
  double u0 = u_tilde_origin(m, beta);
  double dev = cp.s - cp.w;
  return tau * dev * dev / u0 +
         compute_T2(x, xi_m0, m, beta, c, tau);
}

double compute_T2(const Eigen::VectorXd& x, const Design& xi_m0, const ModelSpec& m,
                  const ParamPoint& beta, const Eigen::VectorXd& c, double tau) {
  ModelSpec bare = no_intercept(m);
  SymSolve solve(info_matrix(xi_m0, bare, beta).entries);
  Eigen::MatrixXd Minv = solve.inverse();
  double u0 = u_tilde_origin(m, beta);
  ConditionPoint cp = condition_point(m, beta, c, x);
  double scale = 2.0 * std::sqrt(tau / (u0 * (c.squaredNorm() + 1.0)));
  return scale * c.dot(Minv * cp.fb) * (cp.s - cp.w);
}

namespace {

// Fills the certificate-independent report fields shared by both directions.
void fill_condition_fields(TransferReport& rep, const Design& xi_m0, const ModelSpec& m,
                           const ParamPoint& beta, const Eigen::VectorXd& c,
                           const Grid& grid) {
  ModelSpec bare = no_intercept(m);
  SymSolve solve(info_matrix(xi_m0, bare, beta).entries);
  rep.tau_tilde = solve.trace_inverse();

  if (rep.criterion == Criterion::D) {
    rep.condition_margin = check_condition_d(xi_m0, m, beta, c, grid, &rep.condition_argmin);
    rep.t1_min = 0.0;
  } else {
    AConditionResult a = check_condition_a(xi_m0, m, beta, c, grid);
    rep.condition_margin = a.margin;
    rep.condition_argmin = a.margin_argmin;
    rep.t1_min = a.t1_min;
    rep.t1_argmin = a.t1_argmin;
  }

  rep.t2_support_max = 0.0;
  Eigen::VectorXd origin = Eigen::VectorXd::Zero(m.dim);
  rep.t2_support_max = std::abs(compute_T2(origin, xi_m0, m, beta, c, rep.tau_tilde));
  for (const auto& pt : xi_m0.points)
    rep.t2_support_max = std::max(
        rep.t2_support_max,
        std::abs(compute_T2(pt.x, xi_m0, m, beta, c, rep.tau_tilde)));
}

double expected_origin_weight(Criterion which, const ModelSpec& m, const ParamPoint& beta,
                              const Design& xi_m0, const Eigen::VectorXd& c) {
  double u0 = u_tilde_origin(m, beta);
  if (which == Criterion::D) return origin_weight(which, feature_dim(m), c, u0, 1.0);
  ModelSpec bare = no_intercept(m);
  double tau = SymSolve(info_matrix(xi_m0, bare, beta).entries).trace_inverse();
  return origin_weight(which, feature_dim(m), c, u0, tau);
}

}  // namespace

TransferReport transfer_to_no_intercept(const Design& xi, const ModelSpec& m,
                                        const ParamPoint& beta, Criterion which,
                                        const Grid& grid, double slack) {
  if (!m.with_intercept)
    throw Error(Errc::PremiseViolated, "input design must belong to the intercept model");

  TransferReport rep;
  rep.direction = TransferDirection::ToNoIntercept;
  rep.criterion = which;
  rep.grid_resolution = grid.resolution;
  rep.truncated = grid.provenance.truncated();
  check_family_premises(m, beta, &rep.factorization_route);

  if (!xi.origin_index())
    throw Error(Errc::NotInXi0, "origin is not in the support");
  rep.certificate = find_hyperplane_c(xi, m, beta);
  if (rep.certificate.residual >= kXi0Residual)
    throw Error(Errc::NotInXi0,
                "support does not lie on a hyperplane c^T f(x) = 1 (residual " +
                    std::to_string(rep.certificate.residual) + ")",
                rep.certificate.residual);

  Design xi_m0 = strip_origin(xi);
  double omega = xi.points[*xi.origin_index()].w;
  double expected = expected_origin_weight(which, m, beta, xi_m0, rep.certificate.c);
  if (std::abs(omega - expected) >= 1e-8)
    throw Error(Errc::WrongOriginWeight,
                "origin weight " + std::to_string(omega) + " differs from the closed-form value " +
                    std::to_string(expected),
                expected, omega);
  rep.origin_weight = omega;

  fill_condition_fields(rep, xi_m0, m, beta, rep.certificate.c, grid);
  if (which == Criterion::A && rep.t1_min < -slack)
    throw Error(Errc::T1Negative,
                "T1 dips to " + std::to_string(rep.t1_min) + " on the grid",
                rep.t1_min);

  rep.result = xi_m0;
  ParamPoint slope_only{std::nullopt, beta.slope};
  rep.verified =
      verify_local_optimality(xi_m0, no_intercept(m), slope_only, which, grid, slack).pass;
  return rep;
}

TransferReport transfer_to_intercept(const Design& xi_m0, const ModelSpec& m,
                                     const ParamPoint& beta, Criterion which,
                                     const Grid& grid, double slack) {
  if (!m.with_intercept)
    throw Error(Errc::PremiseViolated, "target model must carry an intercept");

  TransferReport rep;
  rep.direction = TransferDirection::ToIntercept;
  rep.criterion = which;
  rep.grid_resolution = grid.resolution;
  rep.truncated = grid.provenance.truncated();
  check_family_premises(m, beta, &rep.factorization_route);

  ParamPoint slope_only{std::nullopt, beta.slope};
  SensitivityReport input_check =
      verify_local_optimality(xi_m0, no_intercept(m), slope_only, which, grid, slack);
  if (!input_check.pass)
    throw Error(Errc::NotOptimalInput,
                "input design fails the no-intercept equivalence check (max excess " +
                    std::to_string(input_check.max_value - input_check.threshold) + ")",
                input_check.max_value - input_check.threshold);

  rep.certificate = find_hyperplane_c(xi_m0, m, beta);
  if (rep.certificate.residual >= kXi0Residual)
    throw Error(Errc::PremiseViolated,
                "support does not lie on a hyperplane c^T f(x) = 1 (residual " +
                    std::to_string(rep.certificate.residual) + ")",
                rep.certificate.residual);

  fill_condition_fields(rep, xi_m0, m, beta, rep.certificate.c, grid);
  if (rep.condition_margin < -slack) {
    std::string where = "(";
    for (int i = 0; i < rep.condition_argmin.size(); ++i)
      where += (i ? ", " : "") + std::to_string(rep.condition_argmin[i]);
    where += ")";
    throw Error(Errc::ConditionViolated,
                "transfer condition fails: margin " + std::to_string(rep.condition_margin) +
                    " at " + where,
                rep.condition_margin);
  }

  rep.origin_weight = expected_origin_weight(which, m, beta, xi_m0, rep.certificate.c);
  rep.result = augment_origin(xi_m0, rep.origin_weight);
  rep.verified = verify_local_optimality(rep.result, m, beta, which, grid, slack).pass;
  return rep;
}

}  // namespace optdesign
