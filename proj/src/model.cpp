#include "optdesign/model.hpp"

#include <algorithm>
#include <cmath>

#include "optdesign/errors.hpp"

namespace optdesign {

bool is_nonlinear(Family f) { return f == Family::Emax || f == Family::ExpRegression; }

int feature_dim(const ModelSpec& m) { return is_nonlinear(m.family) ? 2 : m.dim; }

int param_dim(const ModelSpec& m) { return feature_dim(m) + (m.with_intercept ? 1 : 0); }

namespace {

void check_x_dim(const ModelSpec& m, const Eigen::VectorXd& x) {
  if (x.size() != m.dim)
    throw Error(Errc::WrongDimension, "point has dimension " + std::to_string(x.size()) +
                                          ", model expects " + std::to_string(m.dim));
}

void check_slope_dim(const ModelSpec& m, const ParamPoint& beta) {
  int want = is_nonlinear(m.family) ? 2 : m.dim;
  if (beta.slope.size() != want)
    throw Error(Errc::DimensionMismatch,
                "slope has dimension " + std::to_string(beta.slope.size()) +
                    ", model expects " + std::to_string(want));
}

const Eigen::VectorXd& nonlinear_params(const ModelSpec& m) {
  if (!m.nonlinear_params || m.nonlinear_params->size() != 2)
    throw Error(Errc::SingularNonlinearParam,
                "nonlinear family needs parameters (beta1, beta2)");
  return *m.nonlinear_params;
}

double clamp_eta(double eta) { return std::clamp(eta, -700.0, 700.0); }

// e^eta / (1 + e^eta)^2 through cosh: stays positive and finite over the
// whole clamp range.
double logistic_u(double eta) {
  double half = 0.5 / std::cosh(0.5 * eta);
  return half * half;
}

// Gradient of h for the nonlinear families, without the intercept component.
Eigen::Vector2d nonlinear_gradient(const ModelSpec& m, const Eigen::VectorXd& x) {
  const Eigen::VectorXd& th = nonlinear_params(m);
  double b1 = th[0], b2 = th[1];
  double t = x[0];
  if (m.family == Family::Emax) {
    double den = t + b2;
    if (den == 0.0)
      throw Error(Errc::SingularNonlinearParam, "E-max gradient undefined at x + beta2 = 0");
    return {t / den, -b1 * t / (den * den)};
  }
  if (b2 == 0.0)
    throw Error(Errc::SingularNonlinearParam, "exponential gradient undefined at beta2 = 0");
  double e = std::exp(t / b2);
  return {e, -b1 * t * e / (b2 * b2)};
}

}  // namespace

Eigen::VectorXd regression_vector(const ModelSpec& m, const Eigen::VectorXd& x) {
  if (is_nonlinear(m.family))
    throw Error(Errc::NonlinearFamily, "nonlinear families have no regression vector");
  check_x_dim(m, x);
  if (!m.with_intercept) return x;
  Eigen::VectorXd f(m.dim + 1);
  f[0] = 1.0;
  f.tail(m.dim) = x;
  return f;
}

double intensity(const ModelSpec& m, const ParamPoint& beta, const Eigen::VectorXd& x) {
  if (is_nonlinear(m.family))
    throw Error(Errc::NonlinearFamily, "nonlinear families have no GLM intensity");
  check_x_dim(m, x);
  check_slope_dim(m, beta);
  if (m.family == Family::LinearGaussian) return 1.0;
  double eta = beta.slope.dot(x);
  if (m.with_intercept && beta.intercept) eta += *beta.intercept;
  eta = clamp_eta(eta);
  if (m.family == Family::Poisson) return std::exp(eta);
  return logistic_u(eta);
}

Eigen::VectorXd weighted_regressor(const ModelSpec& m, const ParamPoint& beta,
                                   const Eigen::VectorXd& x) {
  check_x_dim(m, x);
  if (is_nonlinear(m.family)) {
    Eigen::Vector2d g = nonlinear_gradient(m, x);
    if (!m.with_intercept) return g;
    Eigen::VectorXd full(3);
    full << 1.0, g[0], g[1];
    return full;
  }
  check_slope_dim(m, beta);
  // Intensity of the no-intercept model at the same slope.
  double u = 1.0;
  if (m.family != Family::LinearGaussian) {
    double eta = clamp_eta(beta.slope.dot(x));
    u = m.family == Family::Poisson ? std::exp(eta) : logistic_u(eta);
  }
  return std::sqrt(u) * x;
}

Eigen::VectorXd info_vector(const ModelSpec& m, const ParamPoint& beta,
                            const Eigen::VectorXd& x) {
  if (is_nonlinear(m.family)) return weighted_regressor(m, beta, x);
  Eigen::VectorXd f = regression_vector(m, x);
  return std::sqrt(intensity(m, beta, x)) * f;
}

Eigen::VectorXd hyperplane_feature(const ModelSpec& m, const ParamPoint& beta,
                                   const Eigen::VectorXd& x) {
  if (is_nonlinear(m.family)) {
    ModelSpec bare = m;
    bare.with_intercept = false;
    return weighted_regressor(bare, beta, x);
  }
  check_x_dim(m, x);
  return x;
}

double logistic_ustar_residual(double u) { return 2.0 + u + (2.0 - u) * std::exp(u); }

double solve_logistic_ustar() {
  double lo = 2.0 + 1e-9, hi = 10.0;
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lo + hi);
    if (logistic_ustar_residual(mid) > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  double u = 0.5 * (lo + hi);
  for (int i = 0; i < 4; ++i) {
    double g = logistic_ustar_residual(u);
    double dg = 1.0 + (1.0 - u) * std::exp(u);
    u -= g / dg;
  }
  return u;
}

}  // namespace optdesign
