#include "tpn/mcmc.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "tpn/angles.hpp"
#include "tpn/copula.hpp"
#include "tpn/projected_normal.hpp"

namespace tpn {

namespace {

Matrix spd_inverse(const Matrix& m) {
  Eigen::LLT<Matrix> llt(m);
  if (llt.info() != Eigen::Success) {
    throw std::invalid_argument("spd_inverse: matrix is not positive definite");
  }
  return llt.solve(Matrix::Identity(m.rows(), m.cols()));
}

double log_det_spd(const Matrix& m) {
  const Matrix l = Eigen::LLT<Matrix>(m).matrixL();
  double acc = 0.0;
  for (Eigen::Index i = 0; i < l.rows(); ++i) acc += std::log(l(i, i));
  return 2.0 * acc;
}

double reflect_into(double x, double lo, double hi) {
  while (x < lo || x > hi) {
    if (x < lo) x = 2.0 * lo - x;
    if (x > hi) x = 2.0 * hi - x;
  }
  return x;
}

constexpr double kLambdaHi = 1.0 - 1e-9;

}  // namespace

PriorSpec::PriorSpec(double kappa_mean_in, double kappa_var_in, TiwPrior tiw_in)
    : kappa_mean(kappa_mean_in), kappa_var(kappa_var_in), tiw(std::move(tiw_in)) {
  if (!(kappa_var > 0.0)) {
    throw std::invalid_argument("PriorSpec: kappa_var must be positive");
  }
}

PriorSpec PriorSpec::defaults(int d) {
  return PriorSpec(0.0, 1e5,
                   TiwPrior(static_cast<double>(d) + 2.0, Matrix::Identity(d, d)));
}

void check_config(const McmcConfig& config, int d) {
  if (config.iterations < 1) {
    throw std::invalid_argument("McmcConfig: iterations must be >= 1");
  }
  if (config.burn_in < 0 || config.burn_in >= config.iterations) {
    throw std::invalid_argument("McmcConfig: burn_in must lie in [0, iterations)");
  }
  if (config.thin < 1) throw std::invalid_argument("McmcConfig: thin must be >= 1");
  if (!(config.mu_step > 0.0)) {
    throw std::invalid_argument("McmcConfig: mu_step must be positive");
  }
  if (!(config.lambda_step > 0.0)) {
    throw std::invalid_argument("McmcConfig: lambda_step must be positive");
  }
  if (config.sigma_proposal_df &&
      !(*config.sigma_proposal_df > static_cast<double>(d) + 1.0)) {
    throw std::invalid_argument("McmcConfig: sigma_proposal_df must exceed d + 1");
  }
}

std::pair<Matrix, Vector> remap_identifiability(const Matrix& sigma_cov,
                                                const Vector& kappa) {
  if (sigma_cov.rows() != sigma_cov.cols() || sigma_cov.rows() != kappa.size()) {
    throw std::invalid_argument("remap_identifiability: dimension mismatch");
  }
  if (!is_positive_definite(sigma_cov)) {
    throw std::invalid_argument("remap_identifiability: sigma is not positive definite");
  }
  const Eigen::Index d = sigma_cov.rows();
  Vector inv_s(d);
  for (Eigen::Index j = 0; j < d; ++j) inv_s[j] = 1.0 / std::sqrt(sigma_cov(j, j));
  Matrix corr = inv_s.asDiagonal() * sigma_cov * inv_s.asDiagonal();
  for (Eigen::Index j = 0; j < d; ++j) corr(j, j) = 1.0;
  corr = 0.5 * (corr + corr.transpose()).eval();
  return {std::move(corr), kappa.cwiseProduct(inv_s)};
}

Sampler::Sampler(Dataset dataset, ModelKind model, PriorSpec priors,
                 McmcConfig config)
    : dataset_(std::move(dataset)),
      model_(model),
      priors_(std::move(priors)),
      config_(config),
      n_(dataset_.n()),
      d_(dataset_.dim()),
      rng_(make_rng(config.seed)) {
  check_config(config_, d_);
  if (priors_.tiw.scale.rows() != d_) {
    throw std::invalid_argument("Sampler: prior scale dimension does not match data");
  }
  sigma_df_ = config_.sigma_proposal_df.value_or(static_cast<double>(d_) + 22.0);
  mu_steps_.assign(static_cast<std::size_t>(d_), config_.mu_step);
  lambda_steps_.assign(static_cast<std::size_t>(d_), config_.lambda_step);
  mu_batch_.assign(static_cast<std::size_t>(d_), Counter{});
  lam_batch_.assign(static_cast<std::size_t>(d_), Counter{});

  state_.mu = Vector::Zero(d_);
  state_.concentration = Vector::Zero(d_);
  state_.sigma = Matrix::Identity(d_, d_);
  state_.r = Matrix::Ones(n_, d_);
  state_.theta = dataset_.angles;

  for (int j = 0; j < d_; ++j) {
    std::vector<double> observed;
    for (int i = 0; i < n_; ++i) {
      if (!dataset_.mask(i, j)) observed.push_back(dataset_.angles(i, j));
    }
    double mean_dir = 0.0;
    double mrl = 0.0;
    if (!observed.empty()) {
      try {
        const auto [m, rl] = circ_mean_and_mrl(
            std::span<const double>(observed.data(), observed.size()));
        mean_dir = m.rad();
        mrl = rl;
      } catch (const std::domain_error&) {
        // Resultant at machine-noise scale; any starting direction works.
      }
    }
    state_.mu[j] = mean_dir;
    state_.concentration[j] =
        model_ == ModelKind::kTpn ? 1.0
                                  : (observed.empty() ? 0.5 : std::clamp(mrl, 0.01, 0.95));
    for (int i = 0; i < n_; ++i) {
      if (dataset_.mask(i, j)) state_.theta(i, j) = state_.mu[j];
    }
  }
  rebuild_caches();
}

double Sampler::uniform_pos() {
  const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng_);
  return std::max(u, 1e-300);
}

double Sampler::work_angle(int i, int j) const {
  const Angle centered = wrap(state_.theta(i, j) - state_.mu[j]);
  if (model_ == ModelKind::kTpn) return centered.rad();
  const WrappedCauchyParams p(Angle{}, state_.concentration[j]);
  return wrap(kTwoPi * wc_cdf(centered, p)).rad();
}

void Sampler::rebuild_caches() {
  lambda_c_ = spd_inverse(abs_transform(state_.sigma));
  lambda_s_ = spd_inverse(state_.sigma);
  work_.resize(n_, d_);
  xc_.resize(n_, d_);
  xs_.resize(n_, d_);
  for (int j = 0; j < d_; ++j) refresh_column(j);
}

void Sampler::refresh_column(int j) {
  for (int i = 0; i < n_; ++i) {
    const double w = work_angle(i, j);
    work_(i, j) = w;
    xc_(i, j) = state_.r(i, j) * std::cos(w);
    xs_(i, j) = state_.r(i, j) * std::sin(w);
  }
}

Sampler::CellConditional Sampler::cell_conditional(int i, int j) const {
  CellConditional out{};
  out.lambda_c = lambda_c_(j, j);
  out.lambda_s = lambda_s_(j, j);
  const bool tpn = model_ == ModelKind::kTpn;
  double dot_c = lambda_c_.row(j).dot(xc_.row(i));
  if (tpn) dot_c -= lambda_c_.row(j).dot(state_.concentration);
  const double kappa_j = tpn ? state_.concentration[j] : 0.0;
  const double cross_c = dot_c - out.lambda_c * (xc_(i, j) - kappa_j);
  out.eta_c = kappa_j - cross_c / out.lambda_c;
  const double cross_s = lambda_s_.row(j).dot(xs_.row(i)) - out.lambda_s * xs_(i, j);
  out.eta_s = -cross_s / out.lambda_s;
  return out;
}

double Sampler::slice_radius(double a, double b, double log_beta1, double beta2) {
  if (!(a > 0.0)) {
    throw std::logic_error("slice_radius: quadratic coefficient must be positive");
  }
  const double m = b / a;
  const double s = std::sqrt(std::max(0.0, -2.0 * log_beta1) / a);
  const double rho1 = std::max(0.0, m - s);
  const double rho2 = m + s;
  return std::sqrt((rho2 * rho2 - rho1 * rho1) * beta2 + rho1 * rho1);
}

void Sampler::update_latent_r(int i, int j) {
  const CellConditional cc = cell_conditional(i, j);
  const double w = work_(i, j);
  const double cw = std::cos(w);
  const double sw = std::sin(w);
  const double a = cc.lambda_c * cw * cw + cc.lambda_s * sw * sw;
  const double b = cc.lambda_c * cw * cc.eta_c + cc.lambda_s * sw * cc.eta_s;
  const double r = state_.r(i, j);
  const double log_beta1 =
      std::log(uniform_pos()) - 0.5 * a * (r - b / a) * (r - b / a);
  const double r_new = slice_radius(a, b, log_beta1, uniform_pos());
  state_.r(i, j) = r_new;
  xc_(i, j) = r_new * cw;
  xs_(i, j) = r_new * sw;
}

void Sampler::update_kappa(int j) {
  if (model_ != ModelKind::kTpn) {
    throw std::logic_error("update_kappa: kappa exists only in the projected-normal model");
  }
  const double lc = lambda_c_(j, j);
  double sum_z = static_cast<double>(n_) * state_.concentration[j];
  if (n_ > 0) {
    const Vector col_sums = xc_.colwise().sum().transpose();
    sum_z += lambda_c_.row(j).dot(col_sums - static_cast<double>(n_) * state_.concentration) / lc;
  }
  const double v_p = 1.0 / (1.0 / priors_.kappa_var + static_cast<double>(n_) * lc);
  const double m_p = v_p * (lc * sum_z + priors_.kappa_mean / priors_.kappa_var);
  state_.concentration[j] = trunc_normal_sample(m_p, std::sqrt(v_p), 0.0, rng_);
}

double Sampler::column_gauss_delta(int j, const Vector& new_xc,
                                   const Vector& new_xs) const {
  const double lc = lambda_c_(j, j);
  const double ls = lambda_s_(j, j);
  Vector gc;
  if (model_ == ModelKind::kTpn) {
    Matrix centered = xc_;
    centered.rowwise() -= state_.concentration.transpose();
    gc = centered * lambda_c_.col(j);
  } else {
    gc = xc_ * lambda_c_.col(j);
  }
  const Vector gs = xs_ * lambda_s_.col(j);
  const Vector dc = new_xc - xc_.col(j);
  const Vector ds = new_xs - xs_.col(j);
  const double quad_c = 2.0 * dc.dot(gc) + lc * dc.squaredNorm();
  const double quad_s = 2.0 * ds.dot(gs) + ls * ds.squaredNorm();
  return -0.5 * (quad_c + quad_s);
}

bool Sampler::update_mu(int j) {
  const double step = mu_steps_[static_cast<std::size_t>(j)];
  const double eps = std::uniform_real_distribution<double>(-step, step)(rng_);
  const double mu_new = wrap(state_.mu[j] + eps).rad();

  double log_ratio = 0.0;
  Vector new_work(n_), new_xc(n_), new_xs(n_);
  if (model_ == ModelKind::kTpn) {
    for (int i = 0; i < n_; ++i) {
      const double w = wrap(state_.theta(i, j) - mu_new).rad();
      new_work[i] = w;
      new_xc[i] = state_.r(i, j) * std::cos(w);
      new_xs[i] = state_.r(i, j) * std::sin(w);
    }
  } else {
    const WrappedCauchyParams wc(Angle{}, state_.concentration[j]);
    for (int i = 0; i < n_; ++i) {
      const Angle centered = wrap(state_.theta(i, j) - mu_new);
      const double w = wrap(kTwoPi * wc_cdf(centered, wc)).rad();
      const Angle old_centered = wrap(state_.theta(i, j) - state_.mu[j]);
      log_ratio += std::log(wc_pdf(centered, wc)) - std::log(wc_pdf(old_centered, wc));
      new_work[i] = w;
      new_xc[i] = state_.r(i, j) * std::cos(w);
      new_xs[i] = state_.r(i, j) * std::sin(w);
    }
  }
  log_ratio += column_gauss_delta(j, new_xc, new_xs);

  Counter& phase = in_burn_in_ ? mu_burn_ : mu_post_;
  ++phase.proposed;
  ++mu_batch_[static_cast<std::size_t>(j)].proposed;
  if (std::log(uniform_pos()) < log_ratio) {
    state_.mu[j] = mu_new;
    work_.col(j) = new_work;
    xc_.col(j) = new_xc;
    xs_.col(j) = new_xs;
    ++phase.accepted;
    ++mu_batch_[static_cast<std::size_t>(j)].accepted;
    return true;
  }
  return false;
}

bool Sampler::update_lambda(int j) {
  if (model_ != ModelKind::kCtpn) {
    throw std::logic_error("update_lambda: lambda exists only in the copula model");
  }
  const double step = lambda_steps_[static_cast<std::size_t>(j)];
  const double eps = std::uniform_real_distribution<double>(-step, step)(rng_);
  const double lam_new = reflect_into(state_.concentration[j] + eps, 0.0, kLambdaHi);

  const WrappedCauchyParams wc_old(Angle{}, state_.concentration[j]);
  const WrappedCauchyParams wc_new(Angle{}, lam_new);
  double log_ratio = 0.0;
  Vector new_work(n_), new_xc(n_), new_xs(n_);
  for (int i = 0; i < n_; ++i) {
    const Angle centered = wrap(state_.theta(i, j) - state_.mu[j]);
    const double w = wrap(kTwoPi * wc_cdf(centered, wc_new)).rad();
    new_work[i] = w;
    new_xc[i] = state_.r(i, j) * std::cos(w);
    new_xs[i] = state_.r(i, j) * std::sin(w);
    log_ratio += std::log(wc_pdf(centered, wc_new)) - std::log(wc_pdf(centered, wc_old));
  }
  log_ratio += column_gauss_delta(j, new_xc, new_xs);

  Counter& phase = in_burn_in_ ? lam_burn_ : lam_post_;
  ++phase.proposed;
  ++lam_batch_[static_cast<std::size_t>(j)].proposed;
  if (std::log(uniform_pos()) < log_ratio) {
    state_.concentration[j] = lam_new;
    work_.col(j) = new_work;
    xc_.col(j) = new_xc;
    xs_.col(j) = new_xs;
    ++phase.accepted;
    ++lam_batch_[static_cast<std::size_t>(j)].accepted;
    return true;
  }
  return false;
}

double Sampler::sigma_loglik(const Matrix& sigma_cov) const {
  if (n_ == 0) return 0.0;
  const Matrix sigma_c = abs_transform(sigma_cov);
  const Matrix prec_c = spd_inverse(sigma_c);
  const Matrix prec_s = spd_inverse(sigma_cov);
  Matrix centered_c = xc_;
  if (model_ == ModelKind::kTpn) {
    centered_c.rowwise() -= state_.concentration.transpose();
  }
  const Matrix scatter_c = centered_c.transpose() * centered_c;
  const Matrix scatter_s = xs_.transpose() * xs_;
  const double tr_c = prec_c.cwiseProduct(scatter_c).sum();
  const double tr_s = prec_s.cwiseProduct(scatter_s).sum();
  return -0.5 * static_cast<double>(n_) * (log_det_spd(sigma_c) + log_det_spd(sigma_cov)) -
         0.5 * (tr_c + tr_s);
}

bool Sampler::update_sigma() {
  Counter& phase = in_burn_in_ ? sig_burn_ : sig_post_;
  ++phase.proposed;
  ++sig_batch_.proposed;

  const double tau = sigma_df_;
  const double shrink = tau - static_cast<double>(d_) - 1.0;
  const Matrix proposal = iw_sample(tau, state_.sigma * shrink, rng_);

  const auto prior_new = tiw_unnorm_logpdf(proposal, priors_.tiw);
  if (!prior_new) return false;  // outside the restricted support
  const auto prior_cur = tiw_unnorm_logpdf(state_.sigma, priors_.tiw);
  if (!prior_cur) throw std::logic_error("update_sigma: current sigma left the support");

  double log_ratio = *prior_new - *prior_cur;
  log_ratio += sigma_loglik(proposal) - sigma_loglik(state_.sigma);
  log_ratio += iw_logpdf(state_.sigma, tau, proposal * shrink) -
               iw_logpdf(proposal, tau, state_.sigma * shrink);

  if (std::log(uniform_pos()) < log_ratio) {
    state_.sigma = proposal;
    lambda_c_ = spd_inverse(abs_transform(state_.sigma));
    lambda_s_ = spd_inverse(state_.sigma);
    ++phase.accepted;
    ++sig_batch_.accepted;
    return true;
  }
  return false;
}

void Sampler::impute_missing(int i, int j) {
  if (!dataset_.mask(i, j)) {
    throw std::logic_error("impute_missing: cell is observed");
  }
  std::normal_distribution<double> gauss(0.0, 1.0);
  double xc, xs;
  do {
    const CellConditional cc = cell_conditional(i, j);
    xc = cc.eta_c + gauss(rng_) / std::sqrt(cc.lambda_c);
    xs = cc.eta_s + gauss(rng_) / std::sqrt(cc.lambda_s);
  } while (std::hypot(xc, xs) < 1e-300);
  const double w = mod_atan(xs, xc).rad();
  state_.r(i, j) = std::hypot(xc, xs);
  work_(i, j) = w;
  xc_(i, j) = xc;
  xs_(i, j) = xs;
  if (model_ == ModelKind::kTpn) {
    state_.theta(i, j) = wrap(state_.mu[j] + w).rad();
  } else {
    const double u = (w < 0.0 ? w + kTwoPi : w) / kTwoPi;
    const WrappedCauchyParams wc(Angle{}, state_.concentration[j]);
    state_.theta(i, j) = wrap(state_.mu[j] + wc_quantile(u, wc).rad()).rad();
  }
}

void Sampler::sweep() {
  for (int i = 0; i < n_; ++i) {
    for (int j = 0; j < d_; ++j) update_latent_r(i, j);
  }
  for (int i = 0; i < n_; ++i) {
    for (int j = 0; j < d_; ++j) {
      if (dataset_.mask(i, j)) impute_missing(i, j);
    }
  }
  for (int j = 0; j < d_; ++j) update_mu(j);
  for (int j = 0; j < d_; ++j) {
    if (model_ == ModelKind::kTpn) {
      update_kappa(j);
    } else {
      update_lambda(j);
    }
  }
  update_sigma();
}

void Sampler::adapt_batch(long batch_index) {
  const double delta = std::min(0.25, 1.0 / std::sqrt(static_cast<double>(batch_index)));
  for (int j = 0; j < d_; ++j) {
    auto& mb = mu_batch_[static_cast<std::size_t>(j)];
    if (mb.proposed > 0) {
      const double rate = static_cast<double>(mb.accepted) / static_cast<double>(mb.proposed);
      double& step = mu_steps_[static_cast<std::size_t>(j)];
      step = std::clamp(step * std::exp(delta * (rate - 0.44)), 1e-3, kPi);
    }
    mb = Counter{};
    auto& lb = lam_batch_[static_cast<std::size_t>(j)];
    if (lb.proposed > 0) {
      const double rate = static_cast<double>(lb.accepted) / static_cast<double>(lb.proposed);
      double& step = lambda_steps_[static_cast<std::size_t>(j)];
      step = std::clamp(step * std::exp(delta * (rate - 0.44)), 1e-3, 0.999);
    }
    lb = Counter{};
  }
  if (sig_batch_.proposed > 0) {
    const double rate =
        static_cast<double>(sig_batch_.accepted) / static_cast<double>(sig_batch_.proposed);
    // Larger df concentrates the proposal and raises acceptance; steer the
    // concentration margin the opposite way from the rate error.
    double margin = sigma_df_ - static_cast<double>(d_) - 1.0;
    margin = std::clamp(margin * std::exp(-delta * (rate - 0.25)), 0.5, 1e7);
    sigma_df_ = static_cast<double>(d_) + 1.0 + margin;
  }
  sig_batch_ = Counter{};
}

RetainedDraw Sampler::current_draw() const {
  RetainedDraw draw;
  draw.mu = state_.mu;
  if (model_ == ModelKind::kTpn) {
    auto [corr, kappa_id] = remap_identifiability(state_.sigma, state_.concentration);
    draw.sigma = std::move(corr);
    draw.concentration = std::move(kappa_id);
  } else {
    auto remapped = remap_identifiability(state_.sigma, Vector::Zero(d_));
    draw.sigma = std::move(remapped.first);
    draw.concentration = state_.concentration;
  }
  draw.imputed = Vector(dataset_.num_missing());
  Eigen::Index k = 0;
  for (int i = 0; i < n_; ++i) {
    for (int j = 0; j < d_; ++j) {
      if (dataset_.mask(i, j)) draw.imputed[k++] = state_.theta(i, j);
    }
  }
  return draw;
}

PosteriorDraws Sampler::run(const DrawSink& sink) {
  std::vector<RetainedDraw> kept;
  for (long it = completed_; it < config_.iterations; ++it) {
    in_burn_in_ = it < config_.burn_in;
    sweep();
    completed_ = it + 1;
    if (config_.adapt && in_burn_in_ && completed_ % 50 == 0) {
      adapt_batch(completed_ / 50);
    }
    if (it >= config_.burn_in && (it - config_.burn_in) % config_.thin == config_.thin - 1) {
      RetainedDraw draw = current_draw();
      ++retained_;
      // retained_ counts this draw already, so a checkpoint taken inside
      // the sink resumes after it rather than re-emitting it.
      if (sink) sink(retained_ - 1, draw);
      kept.push_back(std::move(draw));
    }
  }

  PosteriorDraws draws;
  const auto m = static_cast<Eigen::Index>(kept.size());
  draws.mu.resize(m, d_);
  draws.concentration.resize(m, d_);
  draws.concentration_name = model_ == ModelKind::kTpn ? "kappa" : "lambda";
  draws.sigma.reserve(kept.size());
  draws.imputed.resize(m, dataset_.num_missing());
  for (Eigen::Index t = 0; t < m; ++t) {
    auto& k = kept[static_cast<std::size_t>(t)];
    draws.mu.row(t) = k.mu.transpose();
    draws.concentration.row(t) = k.concentration.transpose();
    draws.sigma.push_back(std::move(k.sigma));
    draws.imputed.row(t) = k.imputed.transpose();
  }
  for (int i = 0; i < n_; ++i) {
    for (int j = 0; j < d_; ++j) {
      if (dataset_.mask(i, j)) {
        draws.imputed_names.push_back("theta[" + std::to_string(i + 1) + "," +
                                      std::to_string(j + 1) + "]");
      }
    }
  }
  return draws;
}

void Sampler::set_state(ChainState next) {
  if (next.mu.size() != d_ || next.concentration.size() != d_ ||
      next.sigma.rows() != d_ || next.sigma.cols() != d_ || next.r.rows() != n_ ||
      next.r.cols() != d_ || next.theta.rows() != n_ || next.theta.cols() != d_) {
    throw std::invalid_argument("set_state: dimension mismatch");
  }
  for (int j = 0; j < d_; ++j) {
    next.mu[j] = wrap(next.mu[j]).rad();
    const double c = next.concentration[j];
    if (model_ == ModelKind::kTpn ? !(c > 0.0) : !(c >= 0.0 && c < 1.0)) {
      throw std::invalid_argument("set_state: concentration out of range");
    }
  }
  if (!in_dstar(next.sigma)) {
    throw std::invalid_argument("set_state: sigma outside the restricted support");
  }
  if (!(next.r.array() > 0.0).all()) {
    throw std::invalid_argument("set_state: radii must be positive");
  }
  for (int i = 0; i < n_; ++i) {
    for (int j = 0; j < d_; ++j) {
      next.theta(i, j) =
          dataset_.mask(i, j) ? wrap(next.theta(i, j)).rad() : dataset_.angles(i, j);
    }
  }
  state_ = std::move(next);
  rebuild_caches();
}

Checkpoint Sampler::checkpoint() const {
  Checkpoint cp;
  cp.completed = completed_;
  cp.retained = retained_;
  cp.state = state_;
  std::ostringstream os;
  os << rng_;
  cp.rng_state = os.str();
  cp.mu_steps = mu_steps_;
  cp.lambda_steps = lambda_steps_;
  cp.sigma_df = sigma_df_;
  return cp;
}

void Sampler::restore(const Checkpoint& cp) {
  if (cp.completed < 0 || cp.completed > config_.iterations ||
      cp.mu_steps.size() != static_cast<std::size_t>(d_) ||
      cp.lambda_steps.size() != static_cast<std::size_t>(d_)) {
    throw std::invalid_argument("restore: checkpoint does not match this run");
  }
  set_state(cp.state);
  std::istringstream is(cp.rng_state);
  is >> rng_;
  if (!is) throw std::invalid_argument("restore: malformed rng state");
  mu_steps_ = cp.mu_steps;
  lambda_steps_ = cp.lambda_steps;
  sigma_df_ = cp.sigma_df;
  completed_ = cp.completed;
  retained_ = cp.retained;
}

AcceptanceReport Sampler::acceptance_report() const {
  const auto rate = [](const Counter& c) {
    return c.proposed > 0 ? static_cast<double>(c.accepted) / static_cast<double>(c.proposed)
                          : 0.0;
  };
  AcceptanceReport report;
  report.mu_rate = rate(mu_post_.proposed > 0 ? mu_post_ : mu_burn_);
  report.sigma_rate = rate(sig_post_.proposed > 0 ? sig_post_ : sig_burn_);
  if (model_ == ModelKind::kCtpn) {
    report.lambda_rate = rate(lam_post_.proposed > 0 ? lam_post_ : lam_burn_);
  }
  return report;
}

PosteriorDraws run_chain(const Dataset& dataset, ModelKind model,
                         const PriorSpec& priors, const McmcConfig& config) {
  Sampler sampler(dataset, model, priors, config);
  return sampler.run();
}

std::vector<std::string> imputed_cell_names(const Dataset& dataset) {
  std::vector<std::string> names;
  for (int i = 0; i < dataset.n(); ++i) {
    for (int j = 0; j < dataset.dim(); ++j) {
      if (dataset.mask(i, j)) {
        names.push_back("theta[" + std::to_string(i + 1) + "," + std::to_string(j + 1) +
                        "]");
      }
    }
  }
  return names;
}

PosteriorDraws merge_draws(const std::vector<PosteriorDraws>& parts) {
  if (parts.empty()) throw std::invalid_argument("merge_draws: nothing to merge");
  const int d = parts.front().dim();
  Eigen::Index total = 0;
  for (const auto& p : parts) {
    if (p.dim() != d || p.concentration_name != parts.front().concentration_name ||
        p.imputed_names != parts.front().imputed_names) {
      throw std::invalid_argument("merge_draws: chains disagree on shape");
    }
    total += p.mu.rows();
  }
  PosteriorDraws merged;
  merged.concentration_name = parts.front().concentration_name;
  merged.imputed_names = parts.front().imputed_names;
  merged.mu.resize(total, d);
  merged.concentration.resize(total, d);
  merged.imputed.resize(total, parts.front().imputed.cols());
  merged.sigma.reserve(static_cast<std::size_t>(total));
  Eigen::Index at = 0;
  for (const auto& p : parts) {
    merged.mu.middleRows(at, p.mu.rows()) = p.mu;
    merged.concentration.middleRows(at, p.mu.rows()) = p.concentration;
    merged.imputed.middleRows(at, p.mu.rows()) = p.imputed;
    for (const auto& s : p.sigma) merged.sigma.push_back(s);
    at += p.mu.rows();
  }
  return merged;
}

}  // namespace tpn
