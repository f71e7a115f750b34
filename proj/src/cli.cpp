#include "tpn/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "tpn/config.hpp"
#include "tpn/copula.hpp"
#include "tpn/dataset.hpp"
#include "tpn/diagnostics.hpp"
#include "tpn/draws_io.hpp"
#include "tpn/mcmc.hpp"
#include "tpn/projected_normal.hpp"

namespace tpn {

namespace {

namespace fs = std::filesystem;

constexpr std::uint64_t kHoldoutStream = 0x484f4c44;     // split choice
constexpr std::uint64_t kPredictiveStream = 0x50524544;  // predictive draws

ModelKind parse_model(const std::string& s) {
  if (s == "tpn") return ModelKind::kTpn;
  if (s == "ctpn") return ModelKind::kCtpn;
  throw std::invalid_argument("--model: expected tpn or ctpn, got \"" + s + "\"");
}

std::string default_out_dir() {
  if (const char* env = std::getenv("TPN_OUT_DIR"); env != nullptr && *env != '\0') {
    return env;
  }
  return "tpn_output";
}

TpnParams tpn_params_from(const ModelParams& p) {
  return TpnParams(p.mu, p.concentration, p.sigma);
}

CtpnParams ctpn_params_from(const ModelParams& p) {
  return CtpnParams(p.mu, p.concentration, p.sigma);
}

Matrix simulate_angles(const ModelParams& params, int n, Rng& rng) {
  if (params.model == ModelKind::kTpn) {
    return tpn_sample(tpn_params_from(params), n, rng).angles;
  }
  return ctpn_sample(ctpn_params_from(params), n, rng);
}

std::vector<std::string> default_column_names(int d) {
  std::vector<std::string> names;
  names.reserve(static_cast<std::size_t>(d));
  for (int j = 1; j <= d; ++j) names.push_back("theta_" + std::to_string(j));
  return names;
}

void run_simulate(const std::string& model_str, const std::string& params_path, int n,
                  std::uint64_t seed, const std::string& out_path) {
  const ModelKind model = parse_model(model_str);
  const ModelParams params = read_params(params_path, model);
  Rng rng = make_rng(seed);
  const Matrix angles = simulate_angles(params, n, rng);
  const Dataset dataset(angles, MissingMask::Constant(n, angles.cols(), false),
                        default_column_names(static_cast<int>(angles.cols())));
  write_csv(dataset, out_path);
}

struct ChainPlan {
  std::string dir;
  McmcConfig config;
};

void run_one_chain(const Dataset& data, ModelKind model, const PriorSpec& priors,
                   const ChainPlan& plan, bool resume) {
  fs::create_directories(plan.dir);
  const std::string cp_path = plan.dir + "/checkpoint.json";
  Sampler sampler(data, model, priors, plan.config);
  bool append = false;
  if (resume && fs::exists(cp_path)) {
    sampler.restore(read_checkpoint(cp_path));
    append = true;
  }
  DrawsWriter writer(plan.dir, model, imputed_cell_names(data), append);
  const auto sink = [&](long idx, const RetainedDraw& draw) {
    writer.add(idx, draw);
    if ((idx + 1) % 200 == 0) {
      writer.flush();
      write_checkpoint(sampler.checkpoint(), cp_path);
    }
  };
  sampler.run(sink);
  writer.flush();
  write_checkpoint(sampler.checkpoint(), cp_path);
  write_acceptance(sampler.acceptance_report(), plan.dir + "/acceptance.json");
}

int run_fit(const std::string& data_flag, const std::string& config_path,
            const std::string& out_flag, int chains, std::uint64_t seed, bool resume) {
  RunConfig config = config_path.empty() ? RunConfig{} : read_config(config_path);
  const std::string data_path = !data_flag.empty() ? data_flag : config.data_path.value_or("");
  if (data_path.empty()) {
    throw std::invalid_argument("fit: no data file (--data flag or config \"data\" field)");
  }
  const std::string out_dir =
      !out_flag.empty() ? out_flag : config.out_dir.value_or(default_out_dir());

  const Dataset data = read_csv(data_path, config.angle_unit);
  const PriorSpec priors = resolve_priors(config, data.dim());
  check_config(config.mcmc, data.dim());

  std::vector<ChainPlan> plans;
  for (int c = 0; c < chains; ++c) {
    ChainPlan plan;
    plan.dir = chains == 1 ? out_dir : out_dir + "/chain_" + std::to_string(c + 1);
    plan.config = config.mcmc;
    plan.config.seed = c == 0 ? seed : derive_seed(seed, static_cast<std::uint64_t>(c));
    plans.push_back(std::move(plan));
  }

  fs::create_directories(out_dir);
  std::vector<std::thread> workers;
  std::vector<std::exception_ptr> errors(plans.size());
  for (std::size_t c = 0; c < plans.size(); ++c) {
    workers.emplace_back([&, c] {
      try {
        run_one_chain(data, config.model, priors, plans[c], resume);
      } catch (...) {
        errors[c] = std::current_exception();
      }
    });
  }
  for (auto& w : workers) w.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  PosteriorDraws merged;
  if (chains == 1) {
    merged = read_draws(out_dir);
  } else {
    std::vector<PosteriorDraws> parts;
    parts.reserve(plans.size());
    for (const auto& plan : plans) parts.push_back(read_draws(plan.dir));
    merged = merge_draws(parts);
    write_draws(merged, out_dir);
  }
  write_summary(summarize(merged, std::nullopt), out_dir + "/summary.csv");
  std::cout << "fit: " << merged.num_retained() << " retained draws in " << out_dir
            << "\n";
  return 0;
}

void run_density(const std::string& model_str, const std::string& params_path, int grid,
                 const std::string& pair_str, const std::string& out_path) {
  const ModelKind model = parse_model(model_str);
  const ModelParams params = read_params(params_path, model);
  const int d = static_cast<int>(params.mu.size());

  int pj = 1, pk = 2;
  {
    std::istringstream ss(pair_str);
    char comma = 0;
    if (!(ss >> pj >> comma >> pk) || comma != ',' || !ss.eof()) {
      throw std::invalid_argument("--pair: expected \"j,k\", got \"" + pair_str + "\"");
    }
  }
  if (pj < 1 || pk < 1 || pj > d || pk > d || pj == pk) {
    throw std::invalid_argument("--pair: indices must be distinct and within 1.." +
                                std::to_string(d));
  }
  if (grid < 2) throw std::invalid_argument("--grid: needs at least 2 points");

  // Validate the full parameter set up front; the constructors own the
  // correlation and domain checks.
  if (model == ModelKind::kTpn) {
    (void)tpn_params_from(params);
  } else {
    (void)ctpn_params_from(params);
  }

  // The coordinate pair keeps its own law under marginalization, so the
  // slice is an exact bivariate density, not a conditional.
  const int a = pj - 1, b = pk - 1;
  Vector mu2(2), conc2(2);
  mu2 << params.mu[a], params.mu[b];
  conc2 << params.concentration[a], params.concentration[b];
  Matrix sigma2(2, 2);
  sigma2 << 1.0, params.sigma(a, b), params.sigma(a, b), 1.0;

  std::ofstream out(out_path);
  if (!out) throw std::runtime_error("density: cannot open " + out_path);
  const auto put = [&out](double x) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), x);
    out << std::string_view(buf, static_cast<std::size_t>(res.ptr - buf));
  };
  out << "theta_" << pj << ",theta_" << pk << ",density\n";
  Rng rng = make_rng(0);
  const auto eval = [&](double tj, double tk) -> double {
    Vector theta(2);
    theta << tj, tk;
    std::optional<double> logpdf;
    if (model == ModelKind::kTpn) {
      logpdf = tpn_logpdf(theta, TpnParams(mu2, conc2, sigma2), 10000, rng);
    } else {
      logpdf = ctpn_logpdf(theta, CtpnParams(mu2, conc2, sigma2), 10000, rng);
    }
    if (!logpdf) throw std::runtime_error("density: unevaluable grid point");
    return std::exp(*logpdf);
  };
  for (int i = 0; i < grid; ++i) {
    const double tj = -kPi + (2.0 * kPi * i) / grid;
    for (int k = 0; k < grid; ++k) {
      const double tk = -kPi + (2.0 * kPi * k) / grid;
      put(tj);
      out << ',';
      put(tk);
      out << ',';
      put(eval(tj, tk));
      out << '\n';
    }
  }
}

int run_score(const std::string& data_flag, const std::string& config_path,
              double holdout_flag, std::uint64_t seed, const std::string& out_path) {
  RunConfig config = config_path.empty() ? RunConfig{} : read_config(config_path);
  const std::string data_path = !data_flag.empty() ? data_flag : config.data_path.value_or("");
  if (data_path.empty()) {
    throw std::invalid_argument("score: no data file (--data flag or config \"data\" field)");
  }
  const double fraction = holdout_flag >= 0.0 ? holdout_flag : config.holdout_fraction;
  if (!(fraction > 0.0 && fraction < 1.0)) {
    throw std::invalid_argument("score: holdout fraction must lie in (0, 1)");
  }

  const Dataset data = read_csv(data_path, config.angle_unit);
  const std::vector<int> held = holdout_rows(seed, data.n(), fraction);
  if (held.empty()) {
    throw std::invalid_argument("score: holdout fraction selects no rows");
  }
  std::vector<bool> is_held(static_cast<std::size_t>(data.n()), false);
  for (int h : held) is_held[static_cast<std::size_t>(h)] = true;

  const int train_n = data.n() - static_cast<int>(held.size());
  Matrix train_angles(train_n, data.dim());
  MissingMask train_mask(train_n, data.dim());
  int at = 0;
  for (int i = 0; i < data.n(); ++i) {
    if (is_held[static_cast<std::size_t>(i)]) continue;
    train_angles.row(at) = data.angles.row(i);
    train_mask.row(at) = data.mask.row(i);
    ++at;
  }
  const Dataset train(train_angles, train_mask, data.column_names);

  const PriorSpec priors = resolve_priors(config, data.dim());
  McmcConfig mcmc = config.mcmc;
  mcmc.seed = seed;
  check_config(mcmc, data.dim());
  const PosteriorDraws draws = run_chain(train, config.model, priors, mcmc);

  // One predictive draw per retained draw; the observation-free predictive
  // law is shared by every held-out row.
  const int t = draws.num_retained();
  Matrix pred(t, data.dim());
  Rng rng = make_rng(seed, kPredictiveStream);
  for (int s = 0; s < t; ++s) {
    ModelParams p;
    p.model = config.model;
    p.mu = draws.mu.row(s).transpose();
    p.concentration = draws.concentration.row(s).transpose();
    p.sigma = draws.sigma[static_cast<std::size_t>(s)];
    pred.row(s) = simulate_angles(p, 1, rng).row(0);
  }

  double total = 0.0;
  long cells = 0;
  for (int h : held) {
    for (int j = 0; j < data.dim(); ++j) {
      if (data.mask(h, j)) continue;
      std::vector<double> column(static_cast<std::size_t>(t));
      for (int s = 0; s < t; ++s) column[static_cast<std::size_t>(s)] = pred(s, j);
      total += crps_circular(column, wrap(data.angles(h, j)));
      ++cells;
    }
  }
  if (cells == 0) throw std::runtime_error("score: held-out rows contain no observed cells");
  const double mean_crps = total / static_cast<double>(cells);

  nlohmann::json result;
  result["model"] = config.model == ModelKind::kTpn ? "tpn" : "ctpn";
  result["mean_crps"] = mean_crps;
  result["cells"] = cells;
  result["holdout_rows"] = held.size();
  std::cout << result.dump(2) << "\n";
  if (!out_path.empty()) {
    std::ofstream out(out_path);
    if (!out) throw std::runtime_error("score: cannot open " + out_path);
    out << result.dump(2) << '\n';
  }
  return 0;
}

int run_summarize(const std::string& draws_dir, const std::string& truth_path) {
  const PosteriorDraws draws = read_draws(draws_dir);
  std::optional<ReferenceParams> reference;
  if (!truth_path.empty()) {
    const ModelKind model =
        draws.concentration_name == "kappa" ? ModelKind::kTpn : ModelKind::kCtpn;
    const ModelParams truth = read_params(truth_path, model);
    if (truth.mu.size() != draws.dim()) {
      throw std::invalid_argument("summarize: truth dimension does not match draws");
    }
    reference = ReferenceParams{truth.mu, truth.concentration, truth.sigma};
  }
  const auto rows = summarize(draws, reference);
  const auto put = [](double x) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), x);
    std::cout << std::string_view(buf, static_cast<std::size_t>(res.ptr - buf));
  };
  std::cout << "name,kind,mean,q025,q975,diff_q025,diff_q975\n";
  for (const auto& row : rows) {
    std::cout << row.name << ',' << (row.is_angle ? "angle" : "real") << ',';
    put(row.mean);
    std::cout << ',';
    put(row.q025);
    std::cout << ',';
    put(row.q975);
    std::cout << ',';
    if (row.diff_q025) put(*row.diff_q025);
    std::cout << ',';
    if (row.diff_q975) put(*row.diff_q975);
    std::cout << '\n';
  }
  return 0;
}

}  // namespace

std::vector<int> holdout_rows(std::uint64_t seed, int n, double fraction) {
  const int m = static_cast<int>(std::floor(static_cast<double>(n) * fraction));
  std::vector<int> rows(static_cast<std::size_t>(n));
  std::iota(rows.begin(), rows.end(), 0);
  Rng rng = make_rng(seed, kHoldoutStream);
  std::shuffle(rows.begin(), rows.end(), rng);
  rows.resize(static_cast<std::size_t>(std::clamp(m, 0, n)));
  std::sort(rows.begin(), rows.end());
  return rows;
}

int cli_main(std::vector<std::string> args) {
  CLI::App app{"Simulation, fitting, density evaluation, and predictive scoring "
               "for toroidal projected-normal models"};
  app.require_subcommand(1);

  std::string model_str, params_path, out_path, data_path, config_path, draws_dir,
      truth_path, pair_str = "1,2";
  std::string out_dir;
  int n = 0, grid = 64, chains = 1;
  std::uint64_t seed = 0;
  double holdout = -1.0;
  bool resume = false;

  auto* sim = app.add_subcommand("simulate", "Draw a synthetic dataset from a model");
  sim->add_option("--model", model_str, "tpn or ctpn")->required();
  sim->add_option("--params", params_path, "parameter JSON file")->required();
  sim->add_option("--n", n, "number of observations")->required()
      ->check(CLI::PositiveNumber);
  sim->add_option("--seed", seed, "rng seed")->required();
  sim->add_option("--out", out_path, "output CSV path")->required();

  auto* fit = app.add_subcommand("fit", "Run the MCMC sampler on a dataset");
  fit->add_option("--data", data_path, "input CSV (falls back to config \"data\")");
  fit->add_option("--config", config_path, "run configuration JSON");
  fit->add_option("--out-dir", out_dir, "output directory (default $TPN_OUT_DIR)");
  fit->add_option("--chains", chains, "independent chains")->check(CLI::PositiveNumber);
  fit->add_option("--seed", seed, "rng seed")->required();
  fit->add_flag("--resume", resume, "continue from checkpoint.json");

  auto* dens = app.add_subcommand("density", "Evaluate a bivariate density slice on a grid");
  dens->add_option("--model", model_str, "tpn or ctpn")->required();
  dens->add_option("--params", params_path, "parameter JSON file")->required();
  dens->add_option("--grid", grid, "points per axis")->check(CLI::PositiveNumber);
  dens->add_option("--pair", pair_str, "coordinate pair, 1-based, e.g. 1,2");
  dens->add_option("--out", out_path, "output CSV path")->required();

  auto* score = app.add_subcommand("score", "Fit on a training split, CRPS on the rest");
  score->add_option("--data", data_path, "input CSV (falls back to config \"data\")");
  score->add_option("--config", config_path, "run configuration JSON");
  score->add_option("--holdout", holdout, "held-out fraction of rows");
  score->add_option("--seed", seed, "rng seed")->required();
  score->add_option("--out", out_path, "also write the score JSON here");

  auto* summ = app.add_subcommand("summarize", "Posterior summary table from draw files");
  summ->add_option("--draws", draws_dir, "directory with draw CSVs")->required();
  summ->add_option("--truth", truth_path, "true parameter JSON for recovery checks");

  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*sim) {
      run_simulate(model_str, params_path, n, seed, out_path);
      return 0;
    }
    if (*fit) return run_fit(data_path, config_path, out_dir, chains, seed, resume);
    if (*dens) {
      run_density(model_str, params_path, grid, pair_str, out_path);
      return 0;
    }
    if (*score) return run_score(data_path, config_path, holdout, seed, out_path);
    if (*summ) return run_summarize(draws_dir, truth_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace tpn
