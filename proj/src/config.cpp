#include "tpn/config.hpp"

#include <fstream>
#include <set>
#include <stdexcept>

#include <json.hpp>

namespace tpn {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw std::invalid_argument("config: " + path + ": " + what);
}

void reject_unknown(const json& obj, const std::set<std::string>& known,
                    const std::string& prefix) {
  for (const auto& [key, value] : obj.items()) {
    (void)value;
    if (!known.contains(key)) fail(prefix + key, "unknown field");
  }
}

double require_number(const json& obj, const std::string& path) {
  if (!obj.is_number()) fail(path, "expected a number");
  return obj.get<double>();
}

long require_integer(const json& obj, const std::string& path) {
  if (!obj.is_number_integer()) fail(path, "expected an integer");
  return obj.get<long>();
}

Matrix parse_matrix(const json& obj, const std::string& path) {
  if (!obj.is_array() || obj.empty()) fail(path, "expected a non-empty array of rows");
  const auto rows = static_cast<Eigen::Index>(obj.size());
  Matrix out;
  for (Eigen::Index i = 0; i < rows; ++i) {
    const json& row = obj[static_cast<std::size_t>(i)];
    if (!row.is_array()) fail(path, "row " + std::to_string(i + 1) + " is not an array");
    if (i == 0) out.resize(rows, static_cast<Eigen::Index>(row.size()));
    if (static_cast<Eigen::Index>(row.size()) != out.cols()) {
      fail(path, "rows have unequal lengths");
    }
    for (Eigen::Index j = 0; j < out.cols(); ++j) {
      out(i, j) = require_number(row[static_cast<std::size_t>(j)],
                                 path + "[" + std::to_string(i + 1) + "]");
    }
  }
  return out;
}

RunConfig from_json(const json& root) {
  if (!root.is_object()) throw std::invalid_argument("config: top level must be a JSON object");
  RunConfig config;
  reject_unknown(root,
                 {"model", "angle_unit", "holdout_fraction", "data", "out_dir",
                  "prior", "mcmc"},
                 "");

  if (root.contains("model")) {
    const json& m = root["model"];
    if (!m.is_string()) fail("model", "expected \"tpn\" or \"ctpn\"");
    const auto s = m.get<std::string>();
    if (s == "tpn") {
      config.model = ModelKind::kTpn;
    } else if (s == "ctpn") {
      config.model = ModelKind::kCtpn;
    } else {
      fail("model", "expected \"tpn\" or \"ctpn\", got \"" + s + "\"");
    }
  }
  if (root.contains("angle_unit")) {
    const json& u = root["angle_unit"];
    if (!u.is_string()) fail("angle_unit", "expected \"radians\" or \"degrees\"");
    const auto s = u.get<std::string>();
    if (s == "radians") {
      config.angle_unit = AngleUnit::kRadians;
    } else if (s == "degrees") {
      config.angle_unit = AngleUnit::kDegrees;
    } else {
      fail("angle_unit", "expected \"radians\" or \"degrees\", got \"" + s + "\"");
    }
  }
  if (root.contains("holdout_fraction")) {
    config.holdout_fraction = require_number(root["holdout_fraction"], "holdout_fraction");
    if (!(config.holdout_fraction >= 0.0 && config.holdout_fraction < 1.0)) {
      fail("holdout_fraction", "must lie in [0, 1)");
    }
  }
  if (root.contains("data")) {
    if (!root["data"].is_string()) fail("data", "expected a path string");
    config.data_path = root["data"].get<std::string>();
    if (config.data_path->empty()) fail("data", "path must be non-empty");
  }
  if (root.contains("out_dir")) {
    if (!root["out_dir"].is_string()) fail("out_dir", "expected a path string");
    config.out_dir = root["out_dir"].get<std::string>();
    if (config.out_dir->empty()) fail("out_dir", "path must be non-empty");
  }

  if (root.contains("prior")) {
    const json& p = root["prior"];
    if (!p.is_object()) fail("prior", "expected an object");
    reject_unknown(p, {"kappa_mean", "kappa_var", "tiw_df", "tiw_scale"}, "prior.");
    if (p.contains("kappa_mean")) {
      config.kappa_mean = require_number(p["kappa_mean"], "prior.kappa_mean");
    }
    if (p.contains("kappa_var")) {
      config.kappa_var = require_number(p["kappa_var"], "prior.kappa_var");
      if (!(config.kappa_var > 0.0)) fail("prior.kappa_var", "must be positive");
    }
    if (p.contains("tiw_df")) {
      config.tiw_df = require_number(p["tiw_df"], "prior.tiw_df");
    }
    if (p.contains("tiw_scale")) {
      config.tiw_scale = parse_matrix(p["tiw_scale"], "prior.tiw_scale");
      if (config.tiw_scale->rows() != config.tiw_scale->cols()) {
        fail("prior.tiw_scale", "must be square");
      }
    }
  }

  if (root.contains("mcmc")) {
    const json& m = root["mcmc"];
    if (!m.is_object()) fail("mcmc", "expected an object");
    reject_unknown(m,
                   {"iterations", "burn_in", "thin", "sigma_proposal_df", "mu_step",
                    "lambda_step", "adapt"},
                   "mcmc.");
    if (m.contains("iterations")) {
      config.mcmc.iterations = require_integer(m["iterations"], "mcmc.iterations");
      if (config.mcmc.iterations < 1) fail("mcmc.iterations", "must be >= 1");
    }
    if (m.contains("burn_in")) {
      config.mcmc.burn_in = require_integer(m["burn_in"], "mcmc.burn_in");
      if (config.mcmc.burn_in < 0) fail("mcmc.burn_in", "must be >= 0");
    }
    if (m.contains("thin")) {
      config.mcmc.thin = require_integer(m["thin"], "mcmc.thin");
      if (config.mcmc.thin < 1) fail("mcmc.thin", "must be >= 1");
    }
    if (m.contains("sigma_proposal_df")) {
      config.mcmc.sigma_proposal_df =
          require_number(m["sigma_proposal_df"], "mcmc.sigma_proposal_df");
    }
    if (m.contains("mu_step")) {
      config.mcmc.mu_step = require_number(m["mu_step"], "mcmc.mu_step");
      if (!(config.mcmc.mu_step > 0.0)) fail("mcmc.mu_step", "must be positive");
    }
    if (m.contains("lambda_step")) {
      config.mcmc.lambda_step = require_number(m["lambda_step"], "mcmc.lambda_step");
      if (!(config.mcmc.lambda_step > 0.0)) fail("mcmc.lambda_step", "must be positive");
    }
    if (m.contains("adapt")) {
      if (!m["adapt"].is_boolean()) fail("mcmc.adapt", "expected a boolean");
      config.mcmc.adapt = m["adapt"].get<bool>();
    }
    if (config.mcmc.burn_in >= config.mcmc.iterations) {
      fail("mcmc.burn_in", "must be smaller than mcmc.iterations");
    }
  }
  return config;
}

}  // namespace

RunConfig parse_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config: invalid JSON: ") + e.what());
  }
  return from_json(root);
}

RunConfig read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config: cannot open " + path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_config(text);
}

ModelParams parse_params(const std::string& json_text, ModelKind model) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("params: invalid JSON: ") + e.what());
  }
  if (!root.is_object()) throw std::invalid_argument("params: top level must be a JSON object");
  const std::string conc_key = model == ModelKind::kTpn ? "kappa" : "lambda";
  for (const auto& [key, value] : root.items()) {
    (void)value;
    if (key != "mu" && key != conc_key && key != "sigma") {
      throw std::invalid_argument("params: " + key + ": unknown field (model expects mu, " +
                                  conc_key + ", sigma)");
    }
  }
  for (const char* key : {"mu", conc_key.c_str(), "sigma"}) {
    if (!root.contains(key)) {
      throw std::invalid_argument(std::string("params: ") + key + ": missing field");
    }
  }

  const auto parse_vector = [](const json& arr, const std::string& path) {
    if (!arr.is_array() || arr.empty()) fail(path, "expected a non-empty array");
    Vector out(static_cast<Eigen::Index>(arr.size()));
    for (Eigen::Index i = 0; i < out.size(); ++i) {
      out[i] = require_number(arr[static_cast<std::size_t>(i)],
                              path + "[" + std::to_string(i + 1) + "]");
    }
    return out;
  };

  ModelParams params;
  params.model = model;
  params.mu = parse_vector(root["mu"], "mu");
  params.concentration = parse_vector(root[conc_key], conc_key);
  params.sigma = parse_matrix(root["sigma"], "sigma");
  const Eigen::Index d = params.mu.size();
  if (params.concentration.size() != d || params.sigma.rows() != d ||
      params.sigma.cols() != d) {
    throw std::invalid_argument("params: mu, " + conc_key +
                                ", sigma must share one dimension");
  }
  return params;
}

ModelParams read_params(const std::string& path, ModelKind model) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("params: cannot open " + path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_params(text, model);
}

PriorSpec resolve_priors(const RunConfig& config, int d) {
  const double df = config.tiw_df.value_or(static_cast<double>(d) + 2.0);
  Matrix scale = config.tiw_scale.value_or(Matrix::Identity(d, d));
  if (scale.rows() != d || scale.cols() != d) {
    throw std::invalid_argument("config: prior.tiw_scale: expected a " + std::to_string(d) +
                                "x" + std::to_string(d) + " matrix");
  }
  try {
    return PriorSpec(config.kappa_mean, config.kappa_var, TiwPrior(df, std::move(scale)));
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(std::string("config: prior: ") + e.what());
  }
}

}  // namespace tpn
