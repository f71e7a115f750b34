#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>

#include "tpn/config.hpp"

using namespace tpn;
using Catch::Approx;
using Catch::Matchers::ContainsSubstring;

TEST_CASE("empty config yields the documented defaults") {
  const RunConfig c = parse_config("{}");
  CHECK(c.model == ModelKind::kTpn);
  CHECK(c.angle_unit == AngleUnit::kRadians);
  CHECK(c.holdout_fraction == 0.1);
  CHECK_FALSE(c.data_path.has_value());
  CHECK_FALSE(c.out_dir.has_value());
  CHECK(c.kappa_mean == 0.0);
  CHECK(c.kappa_var == 1e5);
  CHECK_FALSE(c.tiw_df.has_value());
  CHECK_FALSE(c.tiw_scale.has_value());
  CHECK(c.mcmc.iterations == 30000);
  CHECK(c.mcmc.burn_in == 10000);
  CHECK(c.mcmc.thin == 10);
  CHECK_FALSE(c.mcmc.sigma_proposal_df.has_value());
  CHECK(c.mcmc.mu_step == 0.3);
  CHECK(c.mcmc.lambda_step == 0.2);
  CHECK(c.mcmc.adapt);
  CHECK(c.mcmc.seed == 0);  // seed comes from the CLI, never from the file
}

TEST_CASE("full config round trip") {
  const RunConfig c = parse_config(R"({
    "model": "ctpn",
    "angle_unit": "degrees",
    "holdout_fraction": 0.25,
    "data": "wind.csv",
    "out_dir": "runs/today",
    "prior": {"kappa_mean": 0.5, "kappa_var": 10.0, "tiw_df": 9,
              "tiw_scale": [[2.0, 0.0], [0.0, 2.0]]},
    "mcmc": {"iterations": 5000, "burn_in": 1000, "thin": 4,
             "sigma_proposal_df": 30, "mu_step": 0.1, "lambda_step": 0.05,
             "adapt": false}
  })");
  CHECK(c.model == ModelKind::kCtpn);
  CHECK(c.angle_unit == AngleUnit::kDegrees);
  CHECK(c.holdout_fraction == 0.25);
  CHECK(c.data_path == "wind.csv");
  CHECK(c.out_dir == "runs/today");
  CHECK(c.kappa_mean == 0.5);
  CHECK(c.kappa_var == 10.0);
  CHECK(c.tiw_df == 9.0);
  REQUIRE(c.tiw_scale.has_value());
  CHECK((*c.tiw_scale)(0, 0) == 2.0);
  CHECK(c.mcmc.iterations == 5000);
  CHECK(c.mcmc.burn_in == 1000);
  CHECK(c.mcmc.thin == 4);
  CHECK(c.mcmc.sigma_proposal_df == 30.0);
  CHECK(c.mcmc.mu_step == 0.1);
  CHECK(c.mcmc.lambda_step == 0.05);
  CHECK_FALSE(c.mcmc.adapt);
}

TEST_CASE("config rejections name the offending field") {
  CHECK_THROWS_WITH(parse_config("[1, 2]"), ContainsSubstring("object"));
  CHECK_THROWS_WITH(parse_config("{\"speed\": 3}"), ContainsSubstring("speed"));
  CHECK_THROWS_WITH(parse_config("{\"model\": \"vm\"}"), ContainsSubstring("model"));
  CHECK_THROWS_WITH(parse_config("{\"holdout_fraction\": 1.0}"),
                    ContainsSubstring("holdout_fraction"));
  CHECK_THROWS_WITH(parse_config("{\"mcmc\": {\"thin\": 0}}"),
                    ContainsSubstring("mcmc.thin"));
  CHECK_THROWS_WITH(parse_config("{\"mcmc\": {\"iterations\": 100, \"burn_in\": 100}}"),
                    ContainsSubstring("burn_in"));
  CHECK_THROWS_WITH(parse_config("{\"mcmc\": {\"iterations\": 2.5}}"),
                    ContainsSubstring("iterations"));
  CHECK_THROWS_WITH(parse_config("{\"prior\": {\"kappa_var\": 0}}"),
                    ContainsSubstring("kappa_var"));
  CHECK_THROWS_WITH(parse_config("{\"prior\": {\"tiw_scale\": [[1, 0]]}}"),
                    ContainsSubstring("tiw_scale"));
  // A seed inside the file would silently collide across chains; the CLI
  // owns it, so the key is unknown here.
  CHECK_THROWS_WITH(parse_config("{\"mcmc\": {\"seed\": 7}}"),
                    ContainsSubstring("seed"));
  CHECK_THROWS_WITH(parse_config("{invalid"), ContainsSubstring("invalid JSON"));
}

TEST_CASE("reading a config file") {
  const auto path = std::filesystem::temp_directory_path() / "tpn_test_config.json";
  {
    std::ofstream out(path);
    out << R"({"model": "tpn", "mcmc": {"iterations": 400, "burn_in": 100}})";
  }
  const RunConfig c = read_config(path.string());
  CHECK(c.mcmc.iterations == 400);
  CHECK_THROWS_AS(read_config("/nonexistent/config.json"), std::invalid_argument);
  std::filesystem::remove(path);
}

TEST_CASE("prior resolution fills dimension defaults") {
  const RunConfig c = parse_config("{}");
  const PriorSpec p3 = resolve_priors(c, 3);
  CHECK(p3.kappa_mean == 0.0);
  CHECK(p3.kappa_var == 1e5);
  CHECK(p3.tiw.df == 5.0);  // d + 2
  CHECK(p3.tiw.scale == Matrix::Identity(3, 3));

  const RunConfig custom = parse_config(
      R"({"prior": {"tiw_df": 12, "tiw_scale": [[1.0, 0.1], [0.1, 1.0]]}})");
  const PriorSpec p2 = resolve_priors(custom, 2);
  CHECK(p2.tiw.df == 12.0);
  CHECK(p2.tiw.scale(0, 1) == 0.1);

  // Mismatched explicit scale is caught at resolution time.
  CHECK_THROWS_WITH(resolve_priors(custom, 3), ContainsSubstring("tiw_scale"));
  // Too-small df violates the restricted inverse Wishart requirement.
  const RunConfig shallow = parse_config(R"({"prior": {"tiw_df": 3}})");
  CHECK_THROWS_AS(resolve_priors(shallow, 3), std::invalid_argument);
}

TEST_CASE("parameter files") {
  const ModelParams p = parse_params(
      R"({"mu": [0.4, -1.0], "kappa": [1.2, 0.7],
          "sigma": [[1.0, 0.4], [0.4, 1.0]]})",
      ModelKind::kTpn);
  CHECK(p.model == ModelKind::kTpn);
  CHECK(p.mu.size() == 2);
  CHECK(p.mu[1] == -1.0);
  CHECK(p.concentration[0] == 1.2);
  CHECK(p.sigma(0, 1) == 0.4);

  const ModelParams c = parse_params(
      R"({"mu": [0.0], "lambda": [0.6], "sigma": [[1.0]]})", ModelKind::kCtpn);
  CHECK(c.concentration[0] == 0.6);

  // The concentration key must match the model.
  CHECK_THROWS_WITH(
      parse_params(R"({"mu": [0.0], "lambda": [0.6], "sigma": [[1.0]]})",
                   ModelKind::kTpn),
      ContainsSubstring("lambda"));
  CHECK_THROWS_WITH(
      parse_params(R"({"mu": [0.0], "kappa": [1.0], "sigma": [[1.0]]})",
                   ModelKind::kCtpn),
      ContainsSubstring("kappa"));
  CHECK_THROWS_WITH(parse_params(R"({"mu": [0.0], "kappa": [1.0]})", ModelKind::kTpn),
                    ContainsSubstring("sigma"));
  CHECK_THROWS_WITH(
      parse_params(R"({"mu": [0.0, 1.0], "kappa": [1.0],
                       "sigma": [[1.0, 0.0], [0.0, 1.0]]})",
                   ModelKind::kTpn),
      ContainsSubstring("dimension"));
  CHECK_THROWS_AS(read_params("/nonexistent/params.json", ModelKind::kTpn),
                  std::invalid_argument);
}
