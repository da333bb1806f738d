// Acceptance gate: one line per criterion, nonzero exit when any fails.
// Criteria 1-3 drive the installed CLI binary end to end; 4-8 exercise the
// library against independent extended-precision oracles.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "optdesign/equivalence.hpp"
#include "optdesign/errors.hpp"
#include "optdesign/io.hpp"
#include "optdesign/optimizer.hpp"
#include "optdesign/transfer.hpp"
#include "oracles.hpp"

using namespace optdesign;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd x(v.size());
  int i = 0;
  for (double d : v) x[i++] = d;
  return x;
}

struct RunResult {
  int code = -1;
  std::string out;
};

RunResult run_cli(const std::string& args) {
  const std::string capture = "acc_capture.txt";
  std::string cmd = std::string(OPTDESIGN_CLI_PATH) + " " + args + " > " + capture + " 2>&1";
  int rc = std::system(cmd.c_str());
  RunResult res;
  res.code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  std::ifstream f(capture);
  std::stringstream ss;
  ss << f.rdbuf();
  res.out = ss.str();
  return res;
}

// First failed expectation wins; later checks in the criterion still run.
struct Gate {
  bool ok = true;
  std::string why;
  bool req(bool cond, const std::string& msg) {
    if (!cond && ok) {
      ok = false;
      why = msg;
    }
    return cond;
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

// Nearest design point to x; large sentinel when nothing is close.
const DesignPoint* nearest(const Design& d, const Eigen::VectorXd& x) {
  const DesignPoint* best = nullptr;
  double bd = std::numeric_limits<double>::infinity();
  for (const auto& p : d.points) {
    double dist = (p.x - x).lpNorm<Eigen::Infinity>();
    if (dist < bd) {
      bd = dist;
      best = &p;
    }
  }
  return best;
}

Design poisson_simplex_corners(int nu) {
  std::vector<DesignPoint> pts;
  double w = 1.0 / (nu + 1);
  pts.push_back({Eigen::VectorXd::Zero(nu), w});
  for (int i = 0; i < nu; ++i) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(nu);
    e[i] = 1.0;
    pts.push_back({e, w});
  }
  return new_design(pts, ExperimentalRegion::unit_box(nu));
}

// ---------------------------------------------------------------------------
// criterion 1: Poisson house design, CLI verify + transfer, under 5 seconds.
// ---------------------------------------------------------------------------
void criterion1(Gate& g) {
  for (int nu : {2, 3}) {
    ModelSpec m{Family::Poisson, true, nu, std::nullopt};
    ParamPoint beta{0.0, Eigen::VectorXd::Constant(nu, -2.0)};
    std::string file = "acc_poisson" + std::to_string(nu) + ".json";
    save_design_file(file, poisson_simplex_corners(nu), m, beta);

    auto t0 = std::chrono::steady_clock::now();
    RunResult v = run_cli("verify " + file);
    if (!g.req(v.code == 0, "nu=" + std::to_string(nu) + " verify exited " +
                                std::to_string(v.code)))
      return;

    std::string stripped = "acc_poisson" + std::to_string(nu) + "_m0.json";
    RunResult t = run_cli("transfer --direction to-no-intercept --out " + stripped + " " + file);
    double elapsed = seconds_since(t0);
    if (!g.req(t.code == 0, "nu=" + std::to_string(nu) + " transfer exited " +
                                std::to_string(t.code)))
      return;
    if (!g.req(t.out.find("result verified: yes") != std::string::npos,
               "nu=" + std::to_string(nu) + " transfer not verified"))
      return;
    g.req(elapsed < 5.0, "nu=" + std::to_string(nu) + " verify+transfer took " +
                             fmt(elapsed) + "s (budget 5s)");

    DesignFile out = load_design_file(stripped);
    g.req(static_cast<int>(out.design.points.size()) == nu,
          "stripped design should have nu support points");
    double want = 1.0 / nu;  // 1/3 -> 1/2 for nu=2, 1/4 -> 1/3 for nu=3
    for (const auto& p : out.design.points)
      g.req(std::abs(p.w - want) < 1e-9,
            "stripped weight " + fmt(p.w) + " != " + fmt(want));
    for (int i = 0; i < nu; ++i) {
      Eigen::VectorXd e = Eigen::VectorXd::Zero(nu);
      e[i] = 1.0;
      const DesignPoint* p = nearest(out.design, e);
      g.req(p && (p->x - e).lpNorm<Eigen::Infinity>() < 1e-12,
            "stripped support misses a unit vector");
    }
  }
}

// ---------------------------------------------------------------------------
// criterion 2: logistic boundary root, truncated-square verify, both transfer
// directions with a nonnegative condition margin, under 10 seconds.
// ---------------------------------------------------------------------------
void criterion2(Gate& g) {
  double us = solve_logistic_ustar();
  if (!g.req(std::abs(logistic_ustar_residual(us)) < 1e-12,
             "u* residual " + fmt(logistic_ustar_residual(us))))
    return;

  ModelSpec m{Family::Logistic, true, 2, std::nullopt};
  ParamPoint beta{0.0, vec({1, 1})};
  ExperimentalRegion region =
      ExperimentalRegion::truncated_box(vec({0, 0}), vec({10, 10}), {0, 1});
  Design xi = new_design(
      {{vec({0, 0}), 1.0 / 3}, {vec({us, 0}), 1.0 / 3}, {vec({0, us}), 1.0 / 3}}, region);
  save_design_file("acc_logistic.json", xi, m, beta);

  auto t0 = std::chrono::steady_clock::now();
  RunResult v = run_cli("verify --slack 1e-6 acc_logistic.json");
  if (!g.req(v.code == 0, "verify exited " + std::to_string(v.code))) return;

  RunResult down = run_cli(
      "transfer --direction to-no-intercept --out acc_logistic_m0.json acc_logistic.json");
  if (!g.req(down.code == 0, "strip transfer exited " + std::to_string(down.code))) return;
  DesignFile strip = load_design_file("acc_logistic_m0.json");
  g.req(strip.design.points.size() == 2, "stripped design should be two-point");
  for (const auto& p : strip.design.points)
    g.req(std::abs(p.w - 0.5) < 1e-9, "stripped weight " + fmt(p.w) + " != 1/2");

  RunResult up = run_cli(
      "transfer --direction to-intercept --report acc_logistic_rep.json --out "
      "acc_logistic_back.json acc_logistic_m0.json");
  double elapsed = seconds_since(t0);
  if (!g.req(up.code == 0, "reverse transfer exited " + std::to_string(up.code))) return;
  g.req(elapsed < 10.0, "logistic pipeline took " + fmt(elapsed) + "s (budget 10s)");

  std::ifstream repf("acc_logistic_rep.json");
  auto rep = nlohmann::json::parse(repf);
  double margin = rep["condition_margin"].get<double>();
  g.req(margin >= -1e-6, "condition margin " + fmt(margin) + " below -1e-6");
  g.req(rep["verified"].get<bool>(), "reverse transfer not verified");

  DesignFile back = load_design_file("acc_logistic_back.json");
  g.req(back.design.points.size() == 3, "restored design should be three-point");
  for (const auto& p : back.design.points)
    g.req(std::abs(p.w - 1.0 / 3) < 1e-9, "restored weight " + fmt(p.w) + " != 1/3");
}

// ---------------------------------------------------------------------------
// criterion 3: the grid optimizer recovers both textbook designs through the
// CLI; support within 1e-2 and weights within 1e-3 after clustering, and the
// stripped clustered design keeps D-efficiency >= 0.999 against the exact
// conditional design.
// ---------------------------------------------------------------------------
void criterion3(Gate& g) {
  struct Setting {
    std::string name;
    std::string args;
    double cluster_radius;
    ModelSpec model;
    ParamPoint beta;
    std::vector<Eigen::VectorXd> support;
  };
  double us = solve_logistic_ustar();
  std::vector<Setting> settings;
  settings.push_back({"poisson",
                      "optimize --family poisson --dim 2 --beta=0 --beta=-2 --beta=-2 "
                      "--grid-res 101 --tol 1e-5 --out acc_opt_poisson.json",
                      0.05,
                      ModelSpec{Family::Poisson, true, 2, std::nullopt},
                      ParamPoint{0.0, vec({-2, -2})},
                      {vec({0, 0}), vec({1, 0}), vec({0, 1})}});
  settings.push_back({"logistic",
                      "optimize --family logistic --dim 2 --beta=0 --beta=1 --beta=1 "
                      "--upper 10 10 --grid-res 101 --tol 1e-5 --out acc_opt_logistic.json",
                      0.3,
                      ModelSpec{Family::Logistic, true, 2, std::nullopt},
                      ParamPoint{0.0, vec({1, 1})},
                      {vec({0, 0}), vec({us, 0}), vec({0, us})}});

  for (const auto& s : settings) {
    RunResult r = run_cli(s.args);
    if (!g.req(r.code == 0, s.name + " optimize exited " + std::to_string(r.code))) return;
    Design got = cluster(load_design_file("acc_opt_" + s.name + ".json").design,
                         s.cluster_radius);
    if (!g.req(got.points.size() == s.support.size(),
               s.name + " clustered to " + std::to_string(got.points.size()) + " points"))
      return;
    for (const auto& target : s.support) {
      const DesignPoint* p = nearest(got, target);
      double derr = (p->x - target).lpNorm<Eigen::Infinity>();
      g.req(derr < 1e-2, s.name + " support error " + fmt(derr) + " >= 1e-2");
      g.req(std::abs(p->w - 1.0 / 3) < 1e-3,
            s.name + " weight error " + fmt(std::abs(p->w - 1.0 / 3)) + " >= 1e-3");
    }

    // D-efficiency of the transferred design against the exact conditional
    // design: (det/det_exact)^(1/p) with p = nu. The clustered centroid sits
    // near but not exactly at the origin, so the conditional design is built
    // by dropping the near-origin cluster and renormalizing by hand.
    ModelSpec bare = s.model;
    bare.with_intercept = false;
    ParamPoint slope_only{std::nullopt, s.beta.slope};
    const DesignPoint* origin_pt = nearest(got, Eigen::VectorXd::Zero(2));
    std::vector<DesignPoint> cond_pts;
    for (const auto& p : got.points)
      if (&p != origin_pt) cond_pts.push_back({p.x, p.w / (1.0 - origin_pt->w)});
    Design stripped = new_design(cond_pts, got.region);
    std::vector<DesignPoint> exact_pts;
    for (std::size_t i = 1; i < s.support.size(); ++i)
      exact_pts.push_back({s.support[i], 1.0 / (s.support.size() - 1)});
    Design exact = new_design(exact_pts, got.region);
    double det_got =
        SymSolve(info_matrix(stripped, bare, slope_only).entries).det();
    double det_exact =
        SymSolve(info_matrix(exact, bare, slope_only).entries).det();
    double eff = std::pow(det_got / det_exact, 1.0 / param_dim(bare));
    g.req(eff >= 0.999, s.name + " transferred D-efficiency " + fmt(eff) + " < 0.999");
  }
}

// ---------------------------------------------------------------------------
// criterion 4 suite: randomized members of the transfer class, reused by
// criterion 8.
// ---------------------------------------------------------------------------
struct SuiteEntry {
  oracles::Xi0Instance inst;
  double omega;
};

const std::vector<SuiteEntry>& xi0_suite() {
  static std::vector<SuiteEntry> suite = [] {
    std::mt19937 rng(101);
    std::uniform_real_distribution<double> od(0.15, 0.85);
    std::vector<SuiteEntry> out;
    for (int i = 0; i < 50; ++i) {
      int nu = 1 + i % 3;
      Family fam = i % 2 ? Family::LinearGaussian : Family::Logistic;
      out.push_back({oracles::random_xi0(rng, nu, fam), od(rng)});
    }
    return out;
  }();
  return suite;
}

// criterion 4: closed-form block inverse and its square against generic
// extended-precision inversion; minimized A-trace against a 1-D search.
void criterion4(Gate& g) {
  for (const auto& entry : xi0_suite()) {
    const auto& inst = entry.inst;
    Design xi = augment_origin(inst.xi_m0, entry.omega);

    Eigen::MatrixXd closed = block_inverse(xi, inst.model, inst.beta, inst.c);
    Eigen::MatrixXd generic =
        oracles::info_matrix_ld(xi, inst.model, inst.beta).inverse().cast<double>();
    double rel = (closed - generic).norm() / generic.norm();
    if (!g.req(rel < 1e-8, "block inverse off by " + fmt(rel))) return;

    Eigen::MatrixXd closed2 = squared_inverse(xi, inst.model, inst.beta, inst.c);
    Eigen::MatrixXd generic2 = generic * generic;
    double rel2 = (closed2 - generic2).norm() / generic2.norm();
    if (!g.req(rel2 < 1e-8, "squared inverse off by " + fmt(rel2))) return;

    ModelSpec bare = inst.model;
    bare.with_intercept = false;
    double tau = SymSolve(info_matrix(inst.xi_m0, bare, inst.beta).entries).trace_inverse();
    double u0 = inst.model.family == Family::Logistic ? 0.25 : 1.0;
    auto trace_at = [&](double omega) {
      return static_cast<double>(oracles::trace_inverse_ld(
          oracles::info_matrix_ld(augment_origin(inst.xi_m0, omega), inst.model, inst.beta)));
    };
    double searched = trace_at(oracles::golden_min(trace_at, 1e-4, 1 - 1e-4));
    double closed_trace = a_trace_at_optimal_origin_weight(inst.c, u0, tau);
    if (!g.req(std::abs(searched - closed_trace) < 1e-9,
               "A-trace closed form off by " + fmt(searched - closed_trace)))
      return;
  }
}

// criterion 5: closed-form origin weights against golden-section argmins.
void criterion5(Gate& g) {
  std::mt19937 rng(102);
  for (int i = 0; i < 20; ++i) {
    int nu = 1 + i % 3;
    Family fam = i % 2 ? Family::LinearGaussian : Family::Logistic;
    oracles::Xi0Instance inst = oracles::random_xi0(rng, nu, fam);
    ModelSpec bare = inst.model;
    bare.with_intercept = false;
    double tau = SymSolve(info_matrix(inst.xi_m0, bare, inst.beta).entries).trace_inverse();
    double u0 = fam == Family::Logistic ? 0.25 : 1.0;

    auto dinv_at = [&](double omega) {
      return static_cast<double>(
          1.0L / oracles::det_ld(oracles::info_matrix_ld(
                     augment_origin(inst.xi_m0, omega), inst.model, inst.beta)));
    };
    auto trace_at = [&](double omega) {
      return static_cast<double>(oracles::trace_inverse_ld(
          oracles::info_matrix_ld(augment_origin(inst.xi_m0, omega), inst.model, inst.beta)));
    };
    double d_argmin = oracles::golden_min(dinv_at, 1e-4, 1 - 1e-4);
    double a_argmin = oracles::golden_min(trace_at, 1e-4, 1 - 1e-4);
    double d_closed = origin_weight(Criterion::D, nu, inst.c, u0, tau);
    double a_closed = origin_weight(Criterion::A, nu, inst.c, u0, tau);
    if (!g.req(std::abs(d_argmin - d_closed) < 1e-8,
               "D origin weight off by " + fmt(d_argmin - d_closed)))
      return;
    if (!g.req(std::abs(a_argmin - a_closed) < 1e-8,
               "A origin weight off by " + fmt(a_argmin - a_closed)))
      return;
  }
}

// criterion 6: weighted support sensitivities sum to the threshold on 100
// random designs spanning every family.
void criterion6(Gate& g) {
  std::mt19937 rng(103);
  std::uniform_real_distribution<double> u01(0.0, 1.0), wd(0.1, 1.0);
  std::uniform_real_distribution<double> slope(-1.5, 1.5), b2tame(2.0, 5.0), bpos(0.5, 2.0);
  int designs = 0;

  auto check = [&](const Design& d, const ModelSpec& m, const ParamPoint& beta) {
    double sd = 0.0, sa = 0.0;
    for (const auto& pt : d.points) {
      sd += pt.w * sensitivity(d, m, beta, pt.x, Criterion::D);
      sa += pt.w * sensitivity(d, m, beta, pt.x, Criterion::A);
    }
    double tr = SymSolve(info_matrix(d, m, beta).entries).trace_inverse();
    ++designs;
    return g.req(std::abs(sd - param_dim(m)) < 1e-10 * std::max(1.0, std::abs(sd)),
                 "D trace identity off by " + fmt(sd - param_dim(m))) &&
           g.req(std::abs(sa - tr) < 1e-10 * std::max(1.0, std::abs(tr)),
                 "A trace identity off by " + fmt(sa - tr));
  };

  for (int i = 0; i < 20; ++i) {
    bool intercept = i % 2 == 0;
    // GLMs and the linear model on the unit square.
    for (Family fam : {Family::LinearGaussian, Family::Poisson, Family::Logistic}) {
      ModelSpec m{fam, intercept, 2, std::nullopt};
      ParamPoint beta{intercept ? std::optional<double>(u01(rng) - 0.5) : std::nullopt,
                      vec({slope(rng), slope(rng)})};
      std::vector<DesignPoint> pts;
      for (int k = 0; k < 6; ++k) pts.push_back({vec({u01(rng), u01(rng)}), wd(rng)});
      if (!check(new_design(pts, ExperimentalRegion::unit_box(2)), m, beta)) return;
    }
    // Dose-response families on a short interval; beta2 kept away from zero so
    // the information stays well conditioned.
    for (Family fam : {Family::Emax, Family::ExpRegression}) {
      Eigen::VectorXd params = vec({bpos(rng), b2tame(rng)});
      ModelSpec m{fam, intercept, 1, params};
      ParamPoint beta{intercept ? std::optional<double>(u01(rng)) : std::nullopt, params};
      std::vector<DesignPoint> pts;
      for (int k = 0; k < (intercept ? 5 : 4); ++k)
        pts.push_back({vec({0.2 + 7.8 * u01(rng)}), wd(rng)});
      if (!check(new_design(pts, ExperimentalRegion::box(vec({0}), vec({8}))), m, beta)) return;
    }
  }
  g.req(designs == 100, "expected 100 designs, ran " + std::to_string(designs));
}

// criterion 7: finite-difference gradients, then the two dose-response
// optimal designs on [0, 150]: support {0, x*, 150} at equal weights with x*
// strictly interior.
void criterion7(Gate& g) {
  std::mt19937 rng(104);
  std::uniform_real_distribution<double> b2d(0.5, 5.0), b1d(0.5, 2.0), td(0.0, 2.0),
      signd(0.0, 1.0);
  const double h = 1e-6;
  for (Family fam : {Family::Emax, Family::ExpRegression}) {
    for (int i = 0; i < 20; ++i) {
      double b2 = b2d(rng);
      double b1 = b1d(rng) * (signd(rng) < 0.5 ? -1.0 : 1.0);
      double x = fam == Family::Emax ? 75.0 * td(rng) : b2 * td(rng);
      Eigen::VectorXd params = vec({b1, b2});
      ModelSpec m{fam, true, 1, params};
      ParamPoint beta{0.5, params};
      auto mean = [&](double p0, double p1, double p2) {
        return fam == Family::Emax ? p0 + p1 * x / (x + p2)
                                   : p0 + p1 * std::exp(x / p2);
      };
      Eigen::VectorXd grad = weighted_regressor(m, beta, vec({x}));
      double d0 = (mean(0.5 + h, b1, b2) - mean(0.5 - h, b1, b2)) / (2 * h);
      double d1 = (mean(0.5, b1 + h, b2) - mean(0.5, b1 - h, b2)) / (2 * h);
      double d2 = (mean(0.5, b1, b2 + h) - mean(0.5, b1, b2 - h)) / (2 * h);
      if (!g.req(std::abs(grad[0] - d0) < 1e-6 && std::abs(grad[1] - d1) < 1e-6 &&
                     std::abs(grad[2] - d2) < 1e-6,
                 family_name(fam) + " finite-difference gradient mismatch"))
        return;
    }
  }

  struct DoseSetting {
    Family fam;
    Eigen::VectorXd params;
    double tol;
    double radius;
    double xstar;   // expected interior dose
    double window;  // allowed deviation (half a grid step plus centroid drift)
  };
  for (const DoseSetting& s :
       {DoseSetting{Family::Emax, vec({1, 25}), 1e-5, 1.5, 18.75, 0.25},
        DoseSetting{Family::ExpRegression, vec({1, 50}), 1e-4, 2.0, 107.86, 0.5}}) {
    ModelSpec m{s.fam, true, 1, s.params};
    ParamPoint beta{0.0, s.params};
    OptimizerConfig cfg;
    cfg.candidate_grid = make_grid(ExperimentalRegion::box(vec({0}), vec({150})), 301);
    cfg.tol = s.tol;
    Design got = cluster(optimize(m, beta, cfg), s.radius);
    std::sort(got.points.begin(), got.points.end(),
              [](const DesignPoint& a, const DesignPoint& b) { return a.x[0] < b.x[0]; });
    if (!g.req(got.points.size() == 3,
               family_name(s.fam) + " clustered to " + std::to_string(got.points.size()) +
                   " points"))
      return;
    for (const auto& p : got.points)
      g.req(std::abs(p.w - 1.0 / 3) < 1e-3,
            family_name(s.fam) + " weight error " + fmt(std::abs(p.w - 1.0 / 3)));
    g.req(std::abs(got.points[0].x[0]) < 0.75, family_name(s.fam) + " low dose not at 0");
    g.req(std::abs(got.points[2].x[0] - 150.0) < 0.75,
          family_name(s.fam) + " high dose not at 150");
    double mid = got.points[1].x[0];
    g.req(mid > 1.0 && mid < 149.0, family_name(s.fam) + " interior dose at boundary");
    g.req(std::abs(mid - s.xstar) < s.window,
          family_name(s.fam) + " interior dose " + fmt(mid) + " far from " + fmt(s.xstar));
  }
}

// criterion 8: T2 vanishes at the origin and on the support of every suite
// design.
void criterion8(Gate& g) {
  for (const auto& entry : xi0_suite()) {
    const auto& inst = entry.inst;
    ModelSpec bare = inst.model;
    bare.with_intercept = false;
    double tau = SymSolve(info_matrix(inst.xi_m0, bare, inst.beta).entries).trace_inverse();
    Eigen::VectorXd origin = Eigen::VectorXd::Zero(inst.model.dim);
    double at_origin =
        std::abs(compute_T2(origin, inst.xi_m0, inst.model, inst.beta, inst.c, tau));
    if (!g.req(at_origin < 1e-10, "T2 at origin is " + fmt(at_origin))) return;
    for (const auto& pt : inst.xi_m0.points) {
      double at_support =
          std::abs(compute_T2(pt.x, inst.xi_m0, inst.model, inst.beta, inst.c, tau));
      if (!g.req(at_support < 1e-10, "T2 on support is " + fmt(at_support))) return;
    }
  }
}

}  // namespace

int main() {
  using CriterionFn = void (*)(Gate&);
  const CriterionFn criteria[] = {criterion1, criterion2, criterion3, criterion4,
                                  criterion5, criterion6, criterion7, criterion8};
  bool all_ok = true;
  for (std::size_t i = 0; i < sizeof criteria / sizeof criteria[0]; ++i) {
    Gate gate;
    try {
      criteria[i](gate);
    } catch (const std::exception& e) {
      gate.ok = false;
      gate.why = std::string("exception: ") + e.what();
    }
    if (gate.ok)
      std::printf("criterion %zu: PASS\n", i + 1);
    else
      std::printf("criterion %zu: FAIL (%s)\n", i + 1, gate.why.c_str());
    all_ok = all_ok && gate.ok;
  }
  return all_ok ? 0 : 1;
}
