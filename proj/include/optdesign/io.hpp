#pragma once

#include <string>

#include "optdesign/equivalence.hpp"
#include "optdesign/transfer.hpp"

namespace optdesign {

// A design file bundles the design with the model it is meant for.
struct DesignFile {
  Design design;
  ModelSpec model;
  ParamPoint beta;
};

// JSON design file:
//   region {dim, kind: "box"|"simplex"|"box-with-truncation", lower[], upper[],
//           unbounded_axes[]}
//   points [{x: [...], w: number}]
//   model {family, with_intercept, beta: [...], nonlinear_params: [...]}
// Weights must sum to 1 within 1e-6 on load and are renormalized exactly.
DesignFile load_design_file(const std::string& path);
DesignFile parse_design_file(const std::string& text);

std::string design_file_to_json(const Design& d, const ModelSpec& m, const ParamPoint& beta);
void save_design_file(const std::string& path, const Design& d, const ModelSpec& m,
                      const ParamPoint& beta);

std::string report_to_json(const TransferReport& rep);
std::string report_to_json(const SensitivityReport& rep);

std::string family_name(Family f);
Family family_from_name(const std::string& name);

}  // namespace optdesign
