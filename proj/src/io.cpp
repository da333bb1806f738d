#include "optdesign/io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "optdesign/errors.hpp"

namespace optdesign {

using ordered_json = nlohmann::ordered_json;

std::string family_name(Family f) {
  switch (f) {
    case Family::Poisson: return "poisson";
    case Family::Logistic: return "logistic";
    case Family::LinearGaussian: return "linear_gaussian";
    case Family::Emax: return "emax";
    case Family::ExpRegression: return "exp_regression";
  }
  return "unknown";
}

Family family_from_name(const std::string& name) {
  if (name == "poisson") return Family::Poisson;
  if (name == "logistic") return Family::Logistic;
  if (name == "linear_gaussian") return Family::LinearGaussian;
  if (name == "emax") return Family::Emax;
  if (name == "exp_regression") return Family::ExpRegression;
  throw Error(Errc::ParseError, "unknown model family \"" + name + "\"");
}

namespace {

Eigen::VectorXd to_vector(const ordered_json& arr, const char* what) {
  if (!arr.is_array()) throw Error(Errc::ParseError, std::string(what) + " must be an array");
  Eigen::VectorXd v(arr.size());
  for (std::size_t i = 0; i < arr.size(); ++i) {
    if (!arr[i].is_number())
      throw Error(Errc::ParseError, std::string(what) + " must contain numbers");
    v[i] = arr[i].get<double>();
  }
  return v;
}

ordered_json from_vector(const Eigen::VectorXd& v) {
  ordered_json arr = ordered_json::array();
  for (int i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

ExperimentalRegion parse_region(const ordered_json& j) {
  if (!j.contains("dim") || !j["dim"].is_number_integer())
    throw Error(Errc::ParseError, "region.dim must be an integer");
  int dim = j["dim"].get<int>();
  std::string kind = j.value("kind", "box");
  if (kind == "simplex") return ExperimentalRegion::simplex(dim);
  if (!j.contains("lower") || !j.contains("upper"))
    throw Error(Errc::ParseError, "box region needs lower and upper bounds");
  Eigen::VectorXd lower = to_vector(j["lower"], "region.lower");
  Eigen::VectorXd upper = to_vector(j["upper"], "region.upper");
  if (lower.size() != dim || upper.size() != dim)
    throw Error(Errc::ParseError, "region bounds disagree with region.dim");
  if (kind == "box") return ExperimentalRegion::box(lower, upper);
  if (kind == "box-with-truncation") {
    std::vector<int> axes;
    if (j.contains("unbounded_axes"))
      for (const auto& a : j["unbounded_axes"]) axes.push_back(a.get<int>());
    return ExperimentalRegion::truncated_box(lower, upper, std::move(axes));
  }
  throw Error(Errc::ParseError, "unknown region kind \"" + kind + "\"");
}

ordered_json region_to_json(const ExperimentalRegion& r) {
  ordered_json j;
  j["dim"] = r.dim;
  switch (r.kind) {
    case RegionKind::Box: j["kind"] = "box"; break;
    case RegionKind::Simplex: j["kind"] = "simplex"; break;
    case RegionKind::BoxWithTruncation: j["kind"] = "box-with-truncation"; break;
  }
  if (r.kind != RegionKind::Simplex) {
    j["lower"] = from_vector(r.lower);
    j["upper"] = from_vector(r.upper);
  }
  if (!r.unbounded_axes.empty()) j["unbounded_axes"] = r.unbounded_axes;
  return j;
}

}  // namespace

DesignFile parse_design_file(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::ParseError, std::string("design file is not valid JSON: ") + e.what());
  }
  try {
    if (!j.contains("region") || !j.contains("points") || !j.contains("model"))
      throw Error(Errc::ParseError, "design file needs region, points, and model blocks");

    DesignFile out;
    ExperimentalRegion region = parse_region(j["region"]);

    double sum = 0.0;
    std::vector<DesignPoint> pts;
    for (const auto& p : j["points"]) {
      if (!p.contains("x") || !p.contains("w"))
        throw Error(Errc::ParseError, "each design point needs x and w");
      DesignPoint dp{to_vector(p["x"], "point.x"), p["w"].get<double>()};
      sum += dp.w;
      pts.push_back(std::move(dp));
    }
    if (std::abs(sum - 1.0) > 1e-6)
      throw Error(Errc::ParseError,
                  "design weights sum to " + std::to_string(sum) + ", expected 1 within 1e-6");

    const auto& jm = j["model"];
    if (!jm.contains("family"))
      throw Error(Errc::ParseError, "model block needs a family");
    out.model.family = family_from_name(jm["family"].get<std::string>());
    out.model.with_intercept = jm.value("with_intercept", true);
    out.model.dim = region.dim;

    Eigen::VectorXd beta =
        jm.contains("beta") ? to_vector(jm["beta"], "model.beta") : Eigen::VectorXd();
    if (is_nonlinear(out.model.family)) {
      if (!jm.contains("nonlinear_params"))
        throw Error(Errc::ParseError, "nonlinear model needs nonlinear_params");
      Eigen::VectorXd th = to_vector(jm["nonlinear_params"], "model.nonlinear_params");
      if (th.size() != 2)
        throw Error(Errc::ParseError, "nonlinear_params must be (beta1, beta2)");
      out.model.nonlinear_params = th;
      out.beta.slope = th;
      if (out.model.with_intercept) {
        if (beta.size() != 1)
          throw Error(Errc::ParseError,
                      "nonlinear model with intercept expects beta = [beta0]");
        out.beta.intercept = beta[0];
      } else if (beta.size() != 0) {
        throw Error(Errc::ParseError, "no-intercept nonlinear model takes no beta block");
      }
    } else {
      int expect = region.dim + (out.model.with_intercept ? 1 : 0);
      if (beta.size() != expect)
        throw Error(Errc::ParseError,
                    "model.beta has length " + std::to_string(beta.size()) + ", expected " +
                        std::to_string(expect));
      if (out.model.with_intercept) {
        out.beta.intercept = beta[0];
        out.beta.slope = beta.tail(region.dim);
      } else {
        out.beta.slope = beta;
      }
    }

    out.design = new_design(std::move(pts), std::move(region));
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::ParseError, std::string("malformed design file: ") + e.what());
  }
}

DesignFile load_design_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error(Errc::ParseError, "cannot open " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_design_file(ss.str());
}

std::string design_file_to_json(const Design& d, const ModelSpec& m, const ParamPoint& beta) {
  ordered_json j;
  j["region"] = region_to_json(d.region);
  ordered_json pts = ordered_json::array();
  for (const auto& p : d.points) {
    ordered_json e;
    e["x"] = from_vector(p.x);
    e["w"] = p.w;
    pts.push_back(e);
  }
  j["points"] = pts;
  ordered_json jm;
  jm["family"] = family_name(m.family);
  jm["with_intercept"] = m.with_intercept;
  if (is_nonlinear(m.family)) {
    if (beta.intercept) jm["beta"] = ordered_json::array({*beta.intercept});
    if (m.nonlinear_params) jm["nonlinear_params"] = from_vector(*m.nonlinear_params);
  } else {
    Eigen::VectorXd full(beta.slope.size() + (m.with_intercept ? 1 : 0));
    if (m.with_intercept) {
      full[0] = beta.intercept.value_or(0.0);
      full.tail(beta.slope.size()) = beta.slope;
    } else {
      full = beta.slope;
    }
    jm["beta"] = from_vector(full);
  }
  j["model"] = jm;
  return j.dump(2) + "\n";
}

void save_design_file(const std::string& path, const Design& d, const ModelSpec& m,
                      const ParamPoint& beta) {
  std::ofstream f(path);
  if (!f) throw Error(Errc::ParseError, "cannot open " + path + " for writing");
  f << design_file_to_json(d, m, beta);
}

namespace {

ordered_json vector_to_json(const Eigen::VectorXd& v) { return from_vector(v); }

}  // namespace

std::string report_to_json(const TransferReport& rep) {
  ordered_json j;
  j["direction"] = rep.direction == TransferDirection::ToNoIntercept ? "to-no-intercept"
                                                                     : "to-intercept";
  j["criterion"] = rep.criterion == Criterion::D ? "d" : "a";
  j["origin_weight"] = rep.origin_weight;
  j["hyperplane"] = {{"c", vector_to_json(rep.certificate.c)},
                     {"residual", rep.certificate.residual},
                     {"rank_deficient", rep.certificate.rank_deficient}};
  j["tau_tilde"] = rep.tau_tilde;
  j["condition_margin"] = rep.condition_margin;
  if (rep.condition_argmin.size()) j["condition_argmin"] = vector_to_json(rep.condition_argmin);
  if (rep.criterion == Criterion::A) {
    j["t1_min"] = rep.t1_min;
    if (rep.t1_argmin.size()) j["t1_argmin"] = vector_to_json(rep.t1_argmin);
  }
  j["t2_support_max"] = rep.t2_support_max;
  j["verified"] = rep.verified;
  j["factorization_route"] = rep.factorization_route;
  j["grid_resolution"] = rep.grid_resolution;
  j["truncated"] = rep.truncated;
  return j.dump(2) + "\n";
}

std::string report_to_json(const SensitivityReport& rep) {
  ordered_json j;
  j["criterion"] = rep.criterion == Criterion::D ? "d" : "a";
  j["threshold"] = rep.threshold;
  j["max_value"] = rep.max_value;
  j["argmax"] = vector_to_json(rep.argmax);
  j["slack"] = rep.slack;
  j["pass"] = rep.pass;
  ordered_json sup = ordered_json::array();
  for (const auto& [x, v] : rep.support_values)
    sup.push_back({{"x", vector_to_json(x)}, {"psi", v}});
  j["support"] = sup;
  ordered_json vio = ordered_json::array();
  for (const auto& [x, v] : rep.violations)
    vio.push_back({{"x", vector_to_json(x)}, {"excess", v}});
  j["violations"] = vio;
  j["grid_resolution"] = rep.grid_resolution;
  j["truncated"] = rep.truncated;
  return j.dump(2) + "\n";
}

}  // namespace optdesign
