#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "optdesign/errors.hpp"
#include "optdesign/model.hpp"

using namespace optdesign;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd x(v.size());
  int i = 0;
  for (double d : v) x[i++] = d;
  return x;
}

ModelSpec glm(Family f, bool intercept, int dim) { return {f, intercept, dim, std::nullopt}; }

ModelSpec nonlinear(Family f, double b1, double b2, bool intercept = true) {
  ModelSpec m{f, intercept, 1, std::nullopt};
  m.nonlinear_params = vec({b1, b2});
  return m;
}

// Mean response h(x, beta) evaluated directly; the finite-difference oracle
// for the gradient check.
double mean_response(const ModelSpec& m, double beta0, double b1, double b2, double x) {
  if (m.family == Family::Emax) return beta0 + b1 * x / (x + b2);
  return beta0 + b1 * std::exp(x / b2);
}

}  // namespace

TEST_CASE("regression_vector with and without intercept") {
  CHECK(regression_vector(glm(Family::Poisson, false, 2), vec({1, 0})) == vec({1, 0}));
  CHECK(regression_vector(glm(Family::Poisson, true, 2), vec({1, 0})) == vec({1, 1, 0}));
  try {
    regression_vector(nonlinear(Family::Emax, 1, 1), vec({1}));
    FAIL("expected NonlinearFamily");
  } catch (const Error& e) {
    CHECK(e.code == Errc::NonlinearFamily);
  }
}

TEST_CASE("intensity closed forms") {
  ParamPoint b2{0.0, vec({1, 1})};
  CHECK(intensity(glm(Family::Logistic, true, 2), b2, vec({0, 0})) == doctest::Approx(0.25).epsilon(1e-15));

  ParamPoint bp{0.0, vec({-2, -2})};
  CHECK(intensity(glm(Family::Poisson, true, 2), bp, vec({1, 0})) ==
        doctest::Approx(std::exp(-2.0)).epsilon(1e-15));

  ParamPoint bl{std::nullopt, vec({3, -4})};
  CHECK(intensity(glm(Family::LinearGaussian, false, 2), bl, vec({0.3, 0.7})) == 1.0);
}

TEST_CASE("intensity stays positive over the clamp range") {
  ModelSpec m = glm(Family::Logistic, false, 1);
  for (double slope : {-700.0, -100.0, 100.0, 700.0, 1e6}) {
    ParamPoint b{std::nullopt, vec({slope})};
    double u = intensity(m, b, vec({1}));
    CHECK(u > 0.0);
    CHECK(std::isfinite(u));
  }
  ModelSpec mp = glm(Family::Poisson, false, 1);
  ParamPoint bBig{std::nullopt, vec({1e6})};
  CHECK(std::isfinite(intensity(mp, bBig, vec({1}))));  // eta clamped at 700
}

TEST_CASE("Poisson intensity factorizes through the intercept") {
  ModelSpec with = glm(Family::Poisson, true, 2);
  ModelSpec without = glm(Family::Poisson, false, 2);
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> d(-2.0, 2.0);
  for (int i = 0; i < 50; ++i) {
    double beta0 = d(rng);
    Eigen::VectorXd slope = vec({d(rng), d(rng)});
    Eigen::VectorXd x = vec({d(rng), d(rng)});
    double lhs = intensity(with, ParamPoint{beta0, slope}, x);
    double rhs = std::exp(beta0) * intensity(without, ParamPoint{std::nullopt, slope}, x);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-14));
  }
}

TEST_CASE("logistic intensity at beta0 = 0 equals the no-intercept intensity") {
  ModelSpec with = glm(Family::Logistic, true, 2);
  ModelSpec without = glm(Family::Logistic, false, 2);
  std::mt19937 rng(4);
  std::uniform_real_distribution<double> d(-3.0, 3.0);
  for (int i = 0; i < 50; ++i) {
    Eigen::VectorXd slope = vec({d(rng), d(rng)});
    Eigen::VectorXd x = vec({d(rng), d(rng)});
    CHECK(intensity(with, ParamPoint{0.0, slope}, x) ==
          intensity(without, ParamPoint{std::nullopt, slope}, x));
  }
}

TEST_CASE("weighted_regressor vanishes at the origin for GLMs") {
  ModelSpec m = glm(Family::Poisson, false, 2);
  ParamPoint b{std::nullopt, vec({-2, -2})};
  CHECK(weighted_regressor(m, b, vec({0, 0})).lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("nonlinear gradients match the hand values") {
  ParamPoint dummy{std::nullopt, vec({1, 1})};
  Eigen::VectorXd ge = weighted_regressor(nonlinear(Family::Emax, 1, 1, false), dummy, vec({1}));
  CHECK(ge[0] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(ge[1] == doctest::Approx(-0.25).epsilon(1e-15));

  Eigen::VectorXd gx =
      weighted_regressor(nonlinear(Family::ExpRegression, 1, 1, false), dummy, vec({0}));
  CHECK(gx[0] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(gx[1] == 0.0);

  Eigen::VectorXd full = weighted_regressor(nonlinear(Family::Emax, 1, 1, true), dummy, vec({1}));
  REQUIRE(full.size() == 3);
  CHECK(full[0] == 1.0);
}

TEST_CASE("nonlinear gradient singularities are rejected") {
  ParamPoint dummy{std::nullopt, vec({1, 1})};
  try {
    weighted_regressor(nonlinear(Family::Emax, 1.0, -1.0, false), dummy, vec({1}));
    FAIL("expected SingularNonlinearParam");
  } catch (const Error& e) {
    CHECK(e.code == Errc::SingularNonlinearParam);
  }
  try {
    weighted_regressor(nonlinear(Family::ExpRegression, 1.0, 0.0, false), dummy, vec({1}));
    FAIL("expected SingularNonlinearParam");
  } catch (const Error& e) {
    CHECK(e.code == Errc::SingularNonlinearParam);
  }
}

TEST_CASE("nonlinear gradients agree with central finite differences") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> b2d(0.5, 5.0), b1d(-2.0, 2.0), xd(0.0, 150.0);
  std::uniform_real_distribution<double> td(0.0, 2.0);
  const double h = 1e-6;
  for (Family f : {Family::Emax, Family::ExpRegression}) {
    for (int i = 0; i < 20; ++i) {
      // Exponential growth keeps x/b2 <= 2 so cancellation stays inside the
      // finite-difference tolerance.
      double b1 = b1d(rng), b2 = b2d(rng), x = f == Family::Emax ? xd(rng) : b2 * td(rng);
      ModelSpec m = nonlinear(f, b1, b2, true);
      ParamPoint beta{0.5, vec({b1, b2})};
      Eigen::VectorXd g = weighted_regressor(m, beta, vec({x}));
      double d0 = (mean_response(m, 0.5 + h, b1, b2, x) - mean_response(m, 0.5 - h, b1, b2, x)) / (2 * h);
      double d1 = (mean_response(m, 0.5, b1 + h, b2, x) - mean_response(m, 0.5, b1 - h, b2, x)) / (2 * h);
      double d2 = (mean_response(m, 0.5, b1, b2 + h, x) - mean_response(m, 0.5, b1, b2 - h, x)) / (2 * h);
      CHECK(std::abs(g[0] - d0) < 1e-6);
      CHECK(std::abs(g[1] - d1) < 1e-6);
      CHECK(std::abs(g[2] - d2) < 1e-6);
    }
  }
}

TEST_CASE("hyperplane feature: raw point for GLMs, gradient for nonlinear") {
  ParamPoint b{std::nullopt, vec({-2, -2})};
  CHECK(hyperplane_feature(glm(Family::Poisson, true, 2), b, vec({0.25, 0.75})) ==
        vec({0.25, 0.75}));
  ParamPoint dummy{std::nullopt, vec({1, 1})};
  Eigen::VectorXd hf = hyperplane_feature(nonlinear(Family::Emax, 1, 1), dummy, vec({1}));
  CHECK(hf == vec({0.5, -0.25}));
}

TEST_CASE("logistic boundary equation root") {
  double u = solve_logistic_ustar();
  CHECK(std::abs(logistic_ustar_residual(u)) < 1e-12);
  CHECK(u == doctest::Approx(2.3994).epsilon(1e-4));
  // Bisection oracle on the bracket, fully independent of the Newton polish.
  double lo = 2.0 + 1e-9, hi = 10.0;
  for (int i = 0; i < 120; ++i) {
    double mid = 0.5 * (lo + hi);
    if (logistic_ustar_residual(mid) > 0)
      lo = mid;
    else
      hi = mid;
  }
  CHECK(u == doctest::Approx(0.5 * (lo + hi)).epsilon(1e-13));
  CHECK(logistic_ustar_residual(0.0) == doctest::Approx(4.0));
}
