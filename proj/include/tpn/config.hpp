#pragma once

#include <optional>
#include <string>

#include "tpn/dataset.hpp"
#include "tpn/mcmc.hpp"

namespace tpn {

/// Everything a fit or score run needs beyond the data itself. Prior and
/// proposal fields that default to dimension-dependent values stay unset
/// until the data dimension is known (resolve_priors / resolve_mcmc).
struct RunConfig {
  ModelKind model = ModelKind::kTpn;
  AngleUnit angle_unit = AngleUnit::kRadians;
  double holdout_fraction = 0.1;
  std::optional<std::string> data_path;  // CLI flag overrides
  std::optional<std::string> out_dir;    // CLI flag / env override
  double kappa_mean = 0.0;
  double kappa_var = 1e5;
  std::optional<double> tiw_df;     // default d + 2
  std::optional<Matrix> tiw_scale;  // default identity
  McmcConfig mcmc;                  // seed supplied by the CLI, never here
};

/// Parses and validates a JSON config. Unknown keys and out-of-range values
/// are rejected with messages naming the offending field path. Every field
/// is optional; an empty object yields the documented defaults.
RunConfig read_config(const std::string& path);

/// As read_config but from an already-parsed JSON text (used by tests).
RunConfig parse_config(const std::string& json_text);

/// Fills dimension-dependent prior defaults.
PriorSpec resolve_priors(const RunConfig& config, int d);

/// Parameter triple read from a params JSON file: {"mu": [...],
/// "kappa"|"lambda": [...], "sigma": [[...], ...]}. The concentration key
/// must match the model kind.
struct ModelParams {
  ModelKind model;
  Vector mu;
  Vector concentration;
  Matrix sigma;
};

ModelParams read_params(const std::string& path, ModelKind model);
ModelParams parse_params(const std::string& json_text, ModelKind model);

}  // namespace tpn
