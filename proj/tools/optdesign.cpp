// Command-line front end: evaluate, verify, transfer, and compute optimal
// designs, all sharing one JSON design-file format so outputs chain into
// inputs.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "optdesign/equivalence.hpp"
#include "optdesign/errors.hpp"
#include "optdesign/io.hpp"
#include "optdesign/optimizer.hpp"
#include "optdesign/transfer.hpp"

namespace od = optdesign;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitInputError = 2;
constexpr int kExitSingular = 3;
constexpr int kExitNoConvergence = 4;

od::Criterion parse_criterion(const std::string& s) {
  if (s == "d" || s == "D") return od::Criterion::D;
  if (s == "a" || s == "A") return od::Criterion::A;
  throw od::Error(od::Errc::ParseError, "criterion must be d or a");
}

// Default truncation bound 10 * max(1/|slope_i|, 1); explicit --truncate wins.
void apply_truncation(od::ExperimentalRegion& region, const od::ParamPoint& beta,
                      std::optional<double> bound) {
  if (!region.truncated() || region.unbounded_axes.empty()) return;
  double b;
  if (bound) {
    b = *bound;
  } else {
    b = 1.0;
    for (int i = 0; i < beta.slope.size(); ++i) {
      double s = std::abs(beta.slope[i]);
      b = std::max(b, s > 0 ? 1.0 / s : 1.0);
    }
    b *= 10.0;
  }
  for (int axis : region.unbounded_axes) region.upper[axis] = b;
}

int exit_code_for(const od::Error& e) {
  switch (e.code) {
    case od::Errc::SingularInformation:
      return kExitSingular;
    case od::Errc::SingularCandidates:
      return kExitSingular;
    case od::Errc::NoConvergence:
      return kExitNoConvergence;
    // Certificate failures: the transfer ran but could not be certified.
    case od::Errc::NotInXi0:
    case od::Errc::WrongOriginWeight:
    case od::Errc::PremiseViolated:
    case od::Errc::T1Negative:
    case od::Errc::NotOptimalInput:
    case od::Errc::ConditionViolated:
      return kExitCheckFailed;
    default:
      return kExitInputError;
  }
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) throw od::Error(od::Errc::ParseError, "cannot open " + path + " for writing");
  f << text;
}

struct CommonOpts {
  std::string input;
  std::string criterion = "d";
  int grid_res = od::kDefaultGridResolution;
  double slack = od::kDefaultSlack;
  std::optional<double> truncate;
  std::string report_path;
  std::string emit_sensitivity;
  std::string out_path;
};

int run_eval(const CommonOpts& opt) {
  od::DesignFile df = od::load_design_file(opt.input);
  double value =
      od::criterion_value(od::info_matrix(df.design, df.model, df.beta),
                          parse_criterion(opt.criterion));
  std::printf("%s-criterion value: %.12g\n",
              parse_criterion(opt.criterion) == od::Criterion::D ? "D" : "A", value);
  return kExitOk;
}

int run_verify(const CommonOpts& opt) {
  od::DesignFile df = od::load_design_file(opt.input);
  apply_truncation(df.design.region, df.beta, opt.truncate);
  od::Criterion which = parse_criterion(opt.criterion);
  od::Grid grid = od::make_grid(df.design.region, opt.grid_res);
  od::SensitivityReport rep =
      od::verify_local_optimality(df.design, df.model, df.beta, which, grid, opt.slack);

  std::printf("criterion: %s\nthreshold: %.12g\nmax sensitivity: %.12g\n",
              which == od::Criterion::D ? "D" : "A", rep.threshold, rep.max_value);
  if (rep.truncated)
    std::printf("note: region is a truncation of an unbounded region; "
                "the certificate is relative to the truncated box\n");
  if (!rep.violations.empty()) {
    std::printf("violations (%zu):\n", rep.violations.size());
    std::size_t shown = 0;
    for (const auto& [x, excess] : rep.violations) {
      if (shown++ == 10) {
        std::printf("  ...\n");
        break;
      }
      std::string coords;
      for (int i = 0; i < x.size(); ++i) coords += (i ? ", " : "") + std::to_string(x[i]);
      std::printf("  (%s): excess %.6g\n", coords.c_str(), excess);
    }
  }
  std::printf("verdict: %s\n", rep.pass ? "optimal within slack" : "not certified");
  if (!opt.emit_sensitivity.empty()) od::write_sensitivity_csv(opt.emit_sensitivity, grid, rep);
  if (!opt.report_path.empty()) write_text(opt.report_path, od::report_to_json(rep));
  return rep.pass ? kExitOk : kExitCheckFailed;
}

int run_transfer(const CommonOpts& opt, const std::string& direction) {
  od::DesignFile df = od::load_design_file(opt.input);
  apply_truncation(df.design.region, df.beta, opt.truncate);
  od::Criterion which = parse_criterion(opt.criterion);
  od::Grid grid = od::make_grid(df.design.region, opt.grid_res);

  od::ModelSpec intercept_model = df.model;
  intercept_model.with_intercept = true;

  od::TransferReport rep;
  od::ModelSpec out_model = intercept_model;
  if (direction == "to-no-intercept") {
    rep = od::transfer_to_no_intercept(df.design, intercept_model, df.beta, which, grid,
                                       opt.slack);
    out_model.with_intercept = false;
  } else {
    rep = od::transfer_to_intercept(df.design, intercept_model, df.beta, which, grid,
                                    opt.slack);
  }

  od::ParamPoint out_beta = df.beta;
  if (!out_model.with_intercept) out_beta.intercept.reset();

  std::printf("direction: %s\norigin weight: %.12g\nhyperplane residual: %.3g\n"
              "condition margin: %.6g\nresult verified: %s\n",
              direction.c_str(), rep.origin_weight, rep.certificate.residual,
              rep.condition_margin, rep.verified ? "yes" : "no");
  std::string design_json = od::design_file_to_json(rep.result, out_model, out_beta);
  if (!opt.out_path.empty())
    write_text(opt.out_path, design_json);
  else
    std::fputs(design_json.c_str(), stdout);
  if (!opt.report_path.empty()) write_text(opt.report_path, od::report_to_json(rep));
  return rep.verified ? kExitOk : kExitCheckFailed;
}

struct OptimizeOpts {
  std::string family = "linear_gaussian";
  bool no_intercept = false;
  std::vector<double> beta;
  std::vector<double> nonlinear_params;
  std::vector<double> lower;
  std::vector<double> upper;
  int dim = 1;
  int max_iters = 50000;
  double tol = 1e-5;
  double prune = 1e-8;
};

int run_optimize(const CommonOpts& opt, const OptimizeOpts& oo) {
  od::ModelSpec m;
  m.family = od::family_from_name(oo.family);
  m.with_intercept = !oo.no_intercept;
  m.dim = od::is_nonlinear(m.family) ? 1 : oo.dim;

  od::ParamPoint beta;
  if (od::is_nonlinear(m.family)) {
    if (oo.nonlinear_params.size() != 2)
      throw od::Error(od::Errc::ParseError, "--nonlinear-params needs beta1,beta2");
    Eigen::VectorXd th(2);
    th << oo.nonlinear_params[0], oo.nonlinear_params[1];
    m.nonlinear_params = th;
    beta.slope = th;
    if (m.with_intercept) beta.intercept = oo.beta.size() == 1 ? oo.beta[0] : 0.0;
  } else {
    int expect = m.dim + (m.with_intercept ? 1 : 0);
    if (static_cast<int>(oo.beta.size()) != expect)
      throw od::Error(od::Errc::ParseError,
                      "--beta needs " + std::to_string(expect) + " values");
    Eigen::VectorXd full(expect);
    for (int i = 0; i < expect; ++i) full[i] = oo.beta[i];
    if (m.with_intercept) {
      beta.intercept = full[0];
      beta.slope = full.tail(m.dim);
    } else {
      beta.slope = full;
    }
  }

  Eigen::VectorXd lower = Eigen::VectorXd::Zero(m.dim);
  Eigen::VectorXd upper = Eigen::VectorXd::Ones(m.dim);
  if (!oo.lower.empty()) {
    if (static_cast<int>(oo.lower.size()) != m.dim)
      throw od::Error(od::Errc::ParseError, "--lower needs one value per axis");
    for (int i = 0; i < m.dim; ++i) lower[i] = oo.lower[i];
  }
  if (!oo.upper.empty()) {
    if (static_cast<int>(oo.upper.size()) != m.dim)
      throw od::Error(od::Errc::ParseError, "--upper needs one value per axis");
    for (int i = 0; i < m.dim; ++i) upper[i] = oo.upper[i];
  }

  od::OptimizerConfig cfg;
  cfg.candidate_grid = od::make_grid(od::ExperimentalRegion::box(lower, upper), opt.grid_res);
  cfg.criterion = parse_criterion(opt.criterion);
  cfg.max_iters = oo.max_iters;
  cfg.tol = oo.tol;
  cfg.prune_threshold = oo.prune;

  od::Design xi = od::optimize(m, beta, cfg);
  std::printf("support points: %zu\ncriterion value: %.12g\n", xi.points.size(),
              od::criterion_value(od::info_matrix(xi, m, beta), cfg.criterion));
  std::string design_json = od::design_file_to_json(xi, m, beta);
  if (!opt.out_path.empty())
    write_text(opt.out_path, design_json);
  else
    std::fputs(design_json.c_str(), stdout);
  return kExitOk;
}

int run_ustar() {
  double u = od::solve_logistic_ustar();
  std::printf("ustar: %.12g\nresidual: %.6g\n", u,
              std::abs(od::logistic_ustar_residual(u)));
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Locally optimal design toolkit: evaluation, equivalence-theorem "
               "verification, intercept transfer, and grid optimization"};
  app.require_subcommand(1);

  CommonOpts opt;
  OptimizeOpts oo;
  std::string direction;

  auto add_common = [&](CLI::App* cmd, bool with_input) {
    if (with_input)
      cmd->add_option("design-file", opt.input, "design JSON file")->required();
    cmd->add_option("--criterion", opt.criterion, "d or a")->default_val("d");
    return cmd;
  };
  auto add_grid = [&](CLI::App* cmd) {
    cmd->add_option("--grid-res", opt.grid_res, "grid points per axis")->default_val(101);
    cmd->add_option("--slack", opt.slack, "certification slack")->default_val(1e-6);
    cmd->add_option("--truncate", opt.truncate, "upper bound for truncated axes");
  };

  CLI::App* eval = add_common(app.add_subcommand("eval", "print the criterion value"), true);
  (void)eval;

  CLI::App* verify =
      add_common(app.add_subcommand("verify", "equivalence-theorem grid check"), true);
  add_grid(verify);
  verify->add_option("--emit-sensitivity", opt.emit_sensitivity, "CSV surface path");
  verify->add_option("--report", opt.report_path, "JSON report path");

  CLI::App* transfer = add_common(
      app.add_subcommand("transfer", "move a design between intercept and no-intercept"),
      true);
  add_grid(transfer);
  transfer->add_option("--direction", direction, "to-intercept or to-no-intercept")
      ->required()
      ->check(CLI::IsMember({"to-intercept", "to-no-intercept"}));
  transfer->add_option("--report", opt.report_path, "JSON report path");
  transfer->add_option("--out", opt.out_path, "output design file (stdout when absent)");

  CLI::App* optimize =
      add_common(app.add_subcommand("optimize", "grid multiplicative-weight optimizer"), false);
  add_grid(optimize);
  optimize->add_option("--family", oo.family,
                       "poisson|logistic|linear_gaussian|emax|exp_regression");
  optimize->add_flag("--no-intercept", oo.no_intercept, "model without intercept");
  optimize->add_option("--beta", oo.beta, "parameter vector (intercept first when present)");
  optimize->add_option("--nonlinear-params", oo.nonlinear_params, "beta1,beta2");
  optimize->add_option("--dim", oo.dim, "design-space dimension")->default_val(1);
  optimize->add_option("--lower", oo.lower, "region lower bounds (default 0)");
  optimize->add_option("--upper", oo.upper, "region upper bounds (default 1)");
  optimize->add_option("--max-iters", oo.max_iters)->default_val(50000);
  optimize->add_option("--tol", oo.tol, "sensitivity-excess tolerance")->default_val(1e-5);
  optimize->add_option("--prune", oo.prune, "weight pruning threshold")->default_val(1e-8);
  optimize->add_option("--out", opt.out_path, "output design file (stdout when absent)");

  CLI::App* ustar = app.add_subcommand("ustar", "logistic boundary equation root");
  (void)ustar;

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : kExitInputError;
  }

  try {
    if (app.got_subcommand("eval")) return run_eval(opt);
    if (app.got_subcommand("verify")) return run_verify(opt);
    if (app.got_subcommand("transfer")) return run_transfer(opt, direction);
    if (app.got_subcommand("optimize")) return run_optimize(opt, oo);
    if (app.got_subcommand("ustar")) return run_ustar();
  } catch (const od::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitInputError;
  }
  return kExitInputError;
}
