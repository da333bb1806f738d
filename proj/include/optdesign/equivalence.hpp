#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "optdesign/infomat.hpp"

namespace optdesign {

inline constexpr double kDefaultSlack = 1e-6;
inline constexpr int kDefaultGridResolution = 101;

struct SensitivityReport {
  Criterion criterion = Criterion::D;
  double threshold = 0.0;  // p for D, tr(M^{-1}) for A
  double max_value = 0.0;
  Eigen::VectorXd argmax;
  std::vector<std::pair<Eigen::VectorXd, double>> support_values;
  std::vector<std::pair<Eigen::VectorXd, double>> violations;  // (point, psi - threshold)
  int grid_resolution = 0;
  bool truncated = false;
  double slack = kDefaultSlack;
  bool pass = false;
  // psi at every grid point, in grid order (support points excluded).
  std::vector<double> grid_values;
};

// Equivalence-theorem sensitivity at one point: u f^T M^{-1} f for D,
// u f^T M^{-2} f for A, with f the intercept-extended regressor (model
// gradient for the nonlinear families).
double sensitivity(const Design& xi, const ModelSpec& m, const ParamPoint& beta,
                   const Eigen::VectorXd& x, Criterion which);

// Grid certificate: evaluates psi over grid + support. Passes iff the global
// max stays within threshold + slack and every support point reaches the
// threshold within slack. Grid evaluation is parallel with results identical
// to a sequential scan.
SensitivityReport verify_local_optimality(const Design& xi, const ModelSpec& m,
                                          const ParamPoint& beta, Criterion which,
                                          const Grid& grid, double slack = kDefaultSlack);

// CSV surface: header x1,...,xnu,psi,threshold; one row per grid point.
void write_sensitivity_csv(std::ostream& os, const Grid& grid,
                           const SensitivityReport& report);
void write_sensitivity_csv(const std::string& path, const Grid& grid,
                           const SensitivityReport& report);

}  // namespace optdesign
