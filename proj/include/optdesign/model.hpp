#pragma once

#include <Eigen/Dense>
#include <optional>

#include "optdesign/design.hpp"

namespace optdesign {

enum class Family { Poisson, Logistic, LinearGaussian, Emax, ExpRegression };

bool is_nonlinear(Family f);

// Model structure: family, intercept presence, and the design-space dimension
// (1 for the nonlinear families). For E-max/exponential regression,
// nonlinear_params holds (beta1, beta2); the GLM families ignore it.
struct ModelSpec {
  Family family = Family::LinearGaussian;
  bool with_intercept = true;
  int dim = 1;
  std::optional<Eigen::VectorXd> nonlinear_params;
};

// Dimension of the no-intercept regression/gradient vector: dim for GLMs,
// 2 for the nonlinear families.
int feature_dim(const ModelSpec& m);

// Full parameter count p = feature_dim + 1 when the intercept is present.
int param_dim(const ModelSpec& m);

// GLM regression vector: x, or (1, x) with intercept. Nonlinear families
// have no linear predictor and are rejected.
Eigen::VectorXd regression_vector(const ModelSpec& m, const Eigen::VectorXd& x);

// GLM intensity u(x, beta): exp(eta) for Poisson, e^eta/(1+e^eta)^2 for
// logistic, 1 for linear-Gaussian. eta uses the intercept iff the model has
// one and is clamped to [-700, 700] before exponentiation.
double intensity(const ModelSpec& m, const ParamPoint& beta, const Eigen::VectorXd& x);

// The no-intercept weighted regressor f_beta(x): u^{1/2}(x, slope) * x for
// GLMs; the gradient of h(x, beta) for the nonlinear families, with the
// leading 1 (the intercept derivative) dropped when with_intercept is false.
Eigen::VectorXd weighted_regressor(const ModelSpec& m, const ParamPoint& beta,
                                   const Eigen::VectorXd& x);

// Vector g with M(x, beta) = g g^T: sqrt(u) times the intercept-extended
// regression vector for GLMs, the model gradient for nonlinear families.
Eigen::VectorXd info_vector(const ModelSpec& m, const ParamPoint& beta,
                            const Eigen::VectorXd& x);

// Feature used by the hyperplane condition c^T f(x) = 1 of the design class:
// the raw regression vector x for GLMs, the no-intercept gradient for the
// nonlinear families.
Eigen::VectorXd hyperplane_feature(const ModelSpec& m, const ParamPoint& beta,
                                   const Eigen::VectorXd& x);

// Root of 2 + u + 2 e^u - u e^u = 0 on (2, 10): bisection then Newton
// polish, residual below 1e-12.
double solve_logistic_ustar();

// Residual g(u) = 2 + u + (2 - u) e^u of the equation above.
double logistic_ustar_residual(double u);

}  // namespace optdesign
