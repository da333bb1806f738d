#pragma once

#include "optdesign/equivalence.hpp"

namespace optdesign {

// Designs whose non-origin support lies on c^T f(x) = 1 need residuals below
// this to count as members of the transfer class.
inline constexpr double kXi0Residual = 1e-8;

struct HyperplaneCertificate {
  Eigen::VectorXd c;
  double residual = 0.0;  // max |c^T f(x_i) - 1| over non-origin support
  bool rank_deficient = false;
};

enum class TransferDirection { ToNoIntercept, ToIntercept };

struct TransferReport {
  TransferDirection direction = TransferDirection::ToNoIntercept;
  Criterion criterion = Criterion::D;
  double origin_weight = 0.0;
  HyperplaneCertificate certificate;
  double tau_tilde = 0.0;        // tr(Mtilde^{-1}) of the conditional design
  double condition_margin = 0.0; // min over grid of RHS - LHS of the transfer condition
  Eigen::VectorXd condition_argmin;
  double t1_min = 0.0;           // A-criterion only; 0 for D
  Eigen::VectorXd t1_argmin;
  double t2_support_max = 0.0;   // max |T2| over the conditional support
  Design result;
  bool verified = false;         // result passed the equivalence check on the grid
  bool factorization_route = false;  // Poisson with beta0 != 0 reduced to beta0 = 0
  int grid_resolution = 0;
  bool truncated = false;
};

// Least-squares hyperplane through the non-origin support: solves
// c^T f(x_i) = 1 (minimum-norm solution when the system is rank-deficient).
// f is the raw regression vector x for GLMs and the no-intercept gradient
// for the nonlinear families.
HyperplaneCertificate find_hyperplane_c(const Design& xi, const ModelSpec& m,
                                        const ParamPoint& beta);

// Origin weight of the transferred intercept design: 1/(nu+1) for D; for A,
// sqrt(c^Tc+1) / (sqrt(c^Tc+1) + sqrt(u0 tau)). Nonlinear corollaries pass
// u0 = 1.
double origin_weight(Criterion which, int nu, const Eigen::VectorXd& c, double u0,
                     double tau);

// D-transfer condition: min over the grid of
//   nu (1 - (c^T f_b(x) - u^{1/2}(x))^2 / u0)  -  f_b^T Mtilde^{-1} f_b.
// Nonnegative margin certifies the to-intercept direction.
double check_condition_d(const Design& xi_m0, const ModelSpec& m, const ParamPoint& beta,
                         const Eigen::VectorXd& c, const Grid& grid,
                         Eigen::VectorXd* argmin = nullptr);

struct AConditionResult {
  double margin = 0.0;  // min over grid of tau - f_b^T Mtilde^{-2} f_b - T1
  Eigen::VectorXd margin_argmin;
  double t1_min = 0.0;
  Eigen::VectorXd t1_argmin;
};

// A-transfer condition and the T1 hypothesis scan in one pass over the grid.
AConditionResult check_condition_a(const Design& xi_m0, const ModelSpec& m,
                                   const ParamPoint& beta, const Eigen::VectorXd& c,
                                   const Grid& grid);

// T1(x) = tau (c^T f_b(x) - u^{1/2}(x))^2 / u0 + T2(x).
double compute_T1(const Eigen::VectorXd& x, const Design& xi_m0, const ModelSpec& m,
                  const ParamPoint& beta, const Eigen::VectorXd& c, double tau);

// T2(x) = 2 sqrt(tau / (u0 (c^Tc+1))) (c^T Mtilde^{-1} f_b(x)) (c^T f_b(x) - u^{1/2}(x)).
// Vanishes at the origin and at every point of the conditional support.
double compute_T2(const Eigen::VectorXd& x, const Design& xi_m0, const ModelSpec& m,
                  const ParamPoint& beta, const Eigen::VectorXd& c, double tau);

// Strips the origin off a locally optimal intercept design and certifies the
// conditional design for the no-intercept model. m is the intercept model.
TransferReport transfer_to_no_intercept(const Design& xi, const ModelSpec& m,
                                        const ParamPoint& beta, Criterion which,
                                        const Grid& grid, double slack = kDefaultSlack);

// Augments a locally optimal no-intercept design with the origin at the
// closed-form weight and certifies the result for the intercept model. m is
// the intercept model.
TransferReport transfer_to_intercept(const Design& xi_m0, const ModelSpec& m,
                                     const ParamPoint& beta, Criterion which,
                                     const Grid& grid, double slack = kDefaultSlack);

}  // namespace optdesign
