#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tpn/dataset.hpp"
#include "tpn/diagnostics.hpp"
#include "tpn/gaussian.hpp"

namespace tpn {

enum class ModelKind { kTpn, kCtpn };

/// Priors: Gaussian on each kappa truncated to (0, inf), restricted Inverse
/// Wishart on the covariance-scale sigma. Mean directions are uniform on
/// the circle and wrapped Cauchy concentrations uniform on [0, 1); neither
/// carries tunable hyperparameters.
struct PriorSpec {
  PriorSpec(double kappa_mean_in, double kappa_var_in, TiwPrior tiw_in);

  static PriorSpec defaults(int d);

  double kappa_mean;
  double kappa_var;  // > 0
  TiwPrior tiw;
};

struct McmcConfig {
  long iterations = 30000;
  long burn_in = 10000;
  long thin = 10;
  std::optional<double> sigma_proposal_df;  // defaults to d + 22
  double mu_step = 0.3;     // radians, uniform random walk half-width
  double lambda_step = 0.2;
  std::uint64_t seed = 0;
  bool adapt = true;
};

/// Throws std::invalid_argument on an invalid configuration for dimension d.
void check_config(const McmcConfig& config, int d);

/// Everything the chain moves: parameters on the unidentified
/// covariance scale, one latent radius per cell, and the current imputed
/// angles sitting inside theta at the masked positions.
struct ChainState {
  Vector mu;             // wrapped
  Vector concentration;  // kappa > 0 (TPN) or lambda in [0, 1) (CTPN)
  Matrix sigma;          // covariance scale; sigma and |sigma| positive definite
  Matrix r;              // n x d, positive
  Matrix theta;          // n x d, wrapped; masked cells hold imputations
};

/// One retained draw after the identifiability remap.
struct RetainedDraw {
  Vector mu;
  Vector concentration;  // kappa rescaled by sqrt(diag sigma); lambda as-is
  Matrix sigma;          // correlation matrix
  Vector imputed;        // masked-cell angles in row-major mask order
};

struct AcceptanceReport {
  double mu_rate = 0.0;
  double sigma_rate = 0.0;
  std::optional<double> lambda_rate;  // CTPN only
};

/// Rescales the covariance to a correlation matrix and kappa by the same
/// per-coordinate factors; the projected angular law is unchanged because
/// the projection is scale-free in each coordinate pair.
std::pair<Matrix, Vector> remap_identifiability(const Matrix& sigma_cov,
                                                const Vector& kappa);

/// Serializable snapshot for resuming a run: completed sweeps, full state,
/// rng stream, and the adapted proposal scales.
struct Checkpoint {
  long completed = 0;
  long retained = 0;
  ChainState state;
  std::string rng_state;
  std::vector<double> mu_steps;
  std::vector<double> lambda_steps;
  double sigma_df = 0.0;
};

/// Systematic-scan Gibbs/Metropolis sampler. Single-site kernels are public
/// so stationarity can be tested one conditional at a time; run() performs
/// the full schedule (radii, imputations, mu, kappa or lambda, sigma) with
/// burn-in-only adaptation and returns every thin-th post-burn-in state
/// after the identifiability remap.
class Sampler {
 public:
  Sampler(Dataset dataset, ModelKind model, PriorSpec priors, McmcConfig config);

  /// Deterministic core of the radius slice update: given A > 0, B, the
  /// realized slice level log(beta1) <= 0 and beta2 in [0, 1], returns the
  /// new radius sqrt((rho2^2 - rho1^2) beta2 + rho1^2).
  static double slice_radius(double a, double b, double log_beta1, double beta2);

  void update_latent_r(int i, int j);
  void update_kappa(int j);   // TPN only
  bool update_mu(int j);      // true = accepted
  bool update_lambda(int j);  // CTPN only; true = accepted
  bool update_sigma();        // true = accepted
  void impute_missing(int i, int j);

  /// One full systematic scan in the fixed order.
  void sweep();

  using DrawSink = std::function<void(long index, const RetainedDraw&)>;

  /// Runs the remaining sweeps of the configured schedule. `sink`, when
  /// given, observes each retained draw as it is produced.
  PosteriorDraws run(const DrawSink& sink = nullptr);

  [[nodiscard]] const ChainState& state() const { return state_; }
  /// Replaces the state (validated) and rebuilds internal caches.
  void set_state(ChainState next);
  [[nodiscard]] RetainedDraw current_draw() const;

  [[nodiscard]] Checkpoint checkpoint() const;
  void restore(const Checkpoint& cp);

  /// Post-burn-in acceptance rates (falls back to burn-in counts when no
  /// post-burn-in sweeps have run).
  [[nodiscard]] AcceptanceReport acceptance_report() const;

  [[nodiscard]] ModelKind model() const { return model_; }
  [[nodiscard]] int n() const { return n_; }
  [[nodiscard]] int dim() const { return d_; }
  [[nodiscard]] const Dataset& dataset() const { return dataset_; }
  Rng& rng() { return rng_; }

 private:
  struct CellConditional {
    double lambda_c, lambda_s;  // conditional precisions
    double eta_c, eta_s;        // conditional means
  };
  [[nodiscard]] CellConditional cell_conditional(int i, int j) const;

  void rebuild_caches();
  void refresh_column(int j);
  [[nodiscard]] double column_gauss_delta(int j, const Vector& new_xc,
                                          const Vector& new_xs) const;
  [[nodiscard]] double sigma_loglik(const Matrix& sigma_cov) const;
  [[nodiscard]] double work_angle(int i, int j) const;
  void adapt_batch(long batch_index);
  [[nodiscard]] double uniform_pos();

  Dataset dataset_;
  ModelKind model_;
  PriorSpec priors_;
  McmcConfig config_;
  int n_, d_;

  ChainState state_;
  Matrix lambda_c_;  // inverse of |sigma|
  Matrix lambda_s_;  // inverse of sigma
  Matrix work_;      // latent angle per cell
  Matrix xc_, xs_;   // latent coordinates, r * (cos, sin)(work)

  Rng rng_;
  std::vector<double> mu_steps_, lambda_steps_;
  double sigma_df_ = 0.0;

  long completed_ = 0;
  long retained_ = 0;

  struct Counter {
    long accepted = 0, proposed = 0;
  };
  Counter mu_burn_, mu_post_, lam_burn_, lam_post_, sig_burn_, sig_post_;
  std::vector<Counter> mu_batch_, lam_batch_;
  Counter sig_batch_;
  bool in_burn_in_ = true;
};

/// Convenience wrapper: construct a Sampler and run the whole schedule.
PosteriorDraws run_chain(const Dataset& dataset, ModelKind model,
                         const PriorSpec& priors, const McmcConfig& config);

/// Names of the masked cells in row-major order, "theta[row,col]" 1-based.
std::vector<std::string> imputed_cell_names(const Dataset& dataset);

/// Concatenates chains (same dimension, model, and missing cells) into one
/// draw set; pure post-processing.
PosteriorDraws merge_draws(const std::vector<PosteriorDraws>& parts);

}  // namespace tpn
