#include "optdesign/equivalence.hpp"

#include <cmath>
#include <fstream>
#include <ostream>

#include "optdesign/errors.hpp"
#include "optdesign/parallel.hpp"

namespace optdesign {

namespace {

double psi_value(const Eigen::MatrixXd& kernel, const ModelSpec& m,
                 const ParamPoint& beta, const Eigen::VectorXd& x) {
  Eigen::VectorXd g = info_vector(m, beta, x);
  return g.dot(kernel * g);
}

}  // namespace

double sensitivity(const Design& xi, const ModelSpec& m, const ParamPoint& beta,
                   const Eigen::VectorXd& x, Criterion which) {
  SymSolve s(info_matrix(xi, m, beta).entries);
  Eigen::MatrixXd kernel = which == Criterion::D ? s.inverse() : s.inverse_squared();
  return psi_value(kernel, m, beta, x);
}

SensitivityReport verify_local_optimality(const Design& xi, const ModelSpec& m,
                                          const ParamPoint& beta, Criterion which,
                                          const Grid& grid, double slack) {
  if (grid.points.empty())
    throw Error(Errc::ResolutionTooSmall, "verification grid is empty");
  SymSolve s(info_matrix(xi, m, beta).entries);
  Eigen::MatrixXd kernel = which == Criterion::D ? s.inverse() : s.inverse_squared();

  SensitivityReport rep;
  rep.criterion = which;
  rep.threshold = which == Criterion::D ? static_cast<double>(param_dim(m))
                                        : s.trace_inverse();
  rep.grid_resolution = grid.resolution;
  rep.truncated = grid.provenance.truncated();
  rep.slack = slack;

  const std::size_t n = grid.points.size();
  rep.grid_values.resize(n);
  parallel_for(n, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i)
      rep.grid_values[i] = psi_value(kernel, m, beta, grid.points[i]);
  });

  // Sequential reduction; strict comparison keeps the lowest-index argmax.
  std::size_t best = 0;
  for (std::size_t i = 1; i < n; ++i)
    if (rep.grid_values[i] > rep.grid_values[best]) best = i;
  rep.max_value = rep.grid_values[best];
  rep.argmax = grid.points[best];

  for (const auto& pt : xi.points) {
    double v = psi_value(kernel, m, beta, pt.x);
    rep.support_values.emplace_back(pt.x, v);
    if (v > rep.max_value) {
      rep.max_value = v;
      rep.argmax = pt.x;
    }
  }

  for (std::size_t i = 0; i < n; ++i)
    if (rep.grid_values[i] > rep.threshold + slack)
      rep.violations.emplace_back(grid.points[i], rep.grid_values[i] - rep.threshold);
  for (const auto& [x, v] : rep.support_values)
    if (v > rep.threshold + slack) rep.violations.emplace_back(x, v - rep.threshold);

  bool support_reaches = true;
  for (const auto& [x, v] : rep.support_values)
    if (v < rep.threshold - slack) support_reaches = false;
  rep.pass = rep.violations.empty() && support_reaches &&
             rep.max_value <= rep.threshold + slack;
  return rep;
}

void write_sensitivity_csv(std::ostream& os, const Grid& grid,
                           const SensitivityReport& report) {
  int nu = grid.provenance.dim;
  for (int i = 1; i <= nu; ++i) os << "x" << i << ",";
  os << "psi,threshold\n";
  char buf[64];
  for (std::size_t i = 0; i < grid.points.size(); ++i) {
    for (int j = 0; j < nu; ++j) {
      std::snprintf(buf, sizeof buf, "%.17g,", grid.points[i][j]);
      os << buf;
    }
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", report.grid_values[i],
                  report.threshold);
    os << buf;
  }
}

void write_sensitivity_csv(const std::string& path, const Grid& grid,
                           const SensitivityReport& report) {
  std::ofstream f(path);
  if (!f) throw Error(Errc::ParseError, "cannot open " + path + " for writing");
  write_sensitivity_csv(f, grid, report);
}

}  // namespace optdesign
