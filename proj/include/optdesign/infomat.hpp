#pragma once

#include <Eigen/Dense>

#include "optdesign/design.hpp"
#include "optdesign/model.hpp"

namespace optdesign {

enum class Criterion { D, A };

// Condition numbers at or above this are treated as singular.
inline constexpr double kConditionLimit = 1e12;

struct InfoMatrix {
  Eigen::MatrixXd entries;
  int param_dim = 0;
};

// One symmetric eigendecomposition serving every downstream quantity:
// determinant, condition number, inverse, trace of the inverse, and the
// squared inverse all come from the same factorization.
class SymSolve {
 public:
  // Throws SingularInformation when the condition number reaches 1e12
  // (the reported payload is the condition number).
  explicit SymSolve(const Eigen::MatrixXd& M);

  double det() const;
  double det_inverse() const;
  double trace_inverse() const;
  double condition() const;
  Eigen::MatrixXd inverse() const;
  Eigen::MatrixXd inverse_squared() const;

 private:
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig_;
  double cond_ = 0.0;
};

// M(xi, beta) = sum_i w_i u(x_i) g(x_i) g(x_i)^T with g the intercept-extended
// regression vector (or model gradient for the nonlinear families).
InfoMatrix info_matrix(const Design& xi, const ModelSpec& m, const ParamPoint& beta);

// D: det(M^{-1}); A: tr(M^{-1}).
double criterion_value(const InfoMatrix& M, Criterion which);

// Closed-form inverse of the intercept-model information matrix for designs
// in the transfer class: origin weight omega, remaining support on the
// hyperplane c^T f(x) = 1. Blocks: 1/(omega u0), -c^T/(omega u0),
// Mtilde^{-1}/(1-omega) + c c^T/(omega u0). Checked premises: intercept
// model; origin in support; hyperplane residual < 1e-8; f_beta(0) = 0;
// intensity factorization-free (beta0 = 0 where it matters).
Eigen::MatrixXd block_inverse(const Design& xi, const ModelSpec& m,
                              const ParamPoint& beta, const Eigen::VectorXd& c);

// Closed-form square of the inverse above, entrywise symmetric form.
Eigen::MatrixXd squared_inverse(const Design& xi, const ModelSpec& m,
                                const ParamPoint& beta, const Eigen::VectorXd& c);

// Minimized trace of the block inverse over the origin weight:
// (1/u0) * (sqrt(c^T c + 1) + sqrt(u0 * tau))^2, attained at the A-optimal
// origin weight.
double a_trace_at_optimal_origin_weight(const Eigen::VectorXd& c, double u0, double tau);

}  // namespace optdesign
