#include "footcast/sampler.hpp"

#include "footcast/numeric.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

namespace footcast {

void SamplerConfig::validate() const {
  if (n_chains < 1) throw std::invalid_argument("n_chains must be at least 1");
  if (n_warmup < 1) throw std::invalid_argument("n_warmup must be at least 1");
  if (n_samples < 1) throw std::invalid_argument("n_samples must be at least 1");
  if (!(target_accept > 0 && target_accept < 1)) throw std::invalid_argument("target_accept must lie in (0, 1)");
  if (max_tree_depth < 1 || max_tree_depth > 30) throw std::invalid_argument("max_tree_depth must lie in [1, 30]");
  if (!(init_jitter >= 0) || !std::isfinite(init_jitter)) throw std::invalid_argument("init_jitter must be finite and >= 0");
  if (!(max_energy_error > 0)) throw std::invalid_argument("max_energy_error must be positive");
  if (n_threads < 0) throw std::invalid_argument("n_threads must be >= 0");
}

int PosteriorDraws::total_divergences() const {
  int total = 0;
  for (const auto& c : chains) total += c.divergences;
  return total;
}

Eigen::MatrixXd PosteriorDraws::coordinate(Eigen::Index index) const {
  Eigen::MatrixXd out(n_samples(), n_chains());
  for (int c = 0; c < n_chains(); ++c) out.col(c) = chains[c].draws.col(index);
  return out;
}

Eigen::MatrixXd PosteriorDraws::stacked() const {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(n_chains()) * n_samples(), dim());
  for (int c = 0; c < n_chains(); ++c) out.middleRows(static_cast<Eigen::Index>(c) * n_samples(), n_samples()) = chains[c].draws;
  return out;
}

Rng chain_rng(std::uint64_t seed, int chain) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(chain), 0x666f6f74u};
  return Rng(seq);
}

void leapfrog(const Target& target, const Eigen::VectorXd& inv_metric, double step, PhasePoint& z) {
  z.p += 0.5 * step * z.grad;
  z.q += step * inv_metric.cwiseProduct(z.p);
  z.log_density = target.log_density(z.q, z.grad);
  z.p += 0.5 * step * z.grad;
}

double hamiltonian(const Eigen::VectorXd& inv_metric, const PhasePoint& z) {
  const double h = 0.5 * z.p.cwiseAbs2().dot(inv_metric) - z.log_density;
  return std::isnan(h) ? std::numeric_limits<double>::infinity() : h;
}

namespace {

struct DualAveraging {
  double delta = 0.8;
  double gamma = 0.05;
  double t0 = 10;
  double kappa = 0.75;
  double mu = 0;
  double counter = 0;
  double s_bar = 0;
  double x_bar = 0;

  void restart(double step) {
    mu = std::log(10 * step);
    counter = s_bar = x_bar = 0;
  }
  double learn(double accept_stat) {
    ++counter;
    accept_stat = std::min(1.0, accept_stat);
    const double eta = 1.0 / (counter + t0);
    s_bar = (1 - eta) * s_bar + eta * (delta - accept_stat);
    const double x = mu - s_bar * std::sqrt(counter) / gamma;
    const double x_eta = std::pow(counter, -kappa);
    x_bar = (1 - x_eta) * x_bar + x_eta * x;
    return std::exp(x);
  }
  double final_step() const { return std::exp(x_bar); }
};

// Doubling metric-estimation windows between an initial and a terminal buffer.
class MetricWindows {
 public:
  MetricWindows(int n_warmup, Eigen::Index dim) : n_warmup_(n_warmup), mean_(Eigen::VectorXd::Zero(dim)), m2_(Eigen::VectorXd::Zero(dim)) {
    if (n_warmup < 20) {
      init_buffer_ = n_warmup;
      term_buffer_ = 0;
      window_ = 0;
      next_ = -1;
      return;
    }
    init_buffer_ = static_cast<int>(0.15 * n_warmup);
    term_buffer_ = static_cast<int>(0.1 * n_warmup);
    const int span = n_warmup - init_buffer_ - term_buffer_;
    window_ = std::clamp(static_cast<int>(std::lround(0.025 * n_warmup)), 1, span);
    next_ = init_buffer_ + window_ - 1;
    if (next_ + 2 * window_ >= n_warmup - term_buffer_) next_ = n_warmup - term_buffer_ - 1;
  }

  // Feeds the post-transition position; returns true when a window closed and
  // `inv_metric` was refreshed.
  bool learn(const Eigen::VectorXd& q, Eigen::VectorXd& inv_metric) {
    bool updated = false;
    if (next_ >= 0 && counter_ >= init_buffer_ && counter_ < n_warmup_ - term_buffer_) {
      ++n_;
      const Eigen::VectorXd d = q - mean_;
      mean_ += d / static_cast<double>(n_);
      m2_ += d.cwiseProduct(q - mean_);
    }
    if (next_ >= 0 && counter_ == next_) {
      advance();
      const double n = static_cast<double>(n_);
      const Eigen::VectorXd var = n > 1 ? Eigen::VectorXd(m2_ / (n - 1)) : Eigen::VectorXd::Ones(m2_.size());
      inv_metric = (n / (n + 5.0)) * var.array() + 1e-3 * (5.0 / (n + 5.0));
      n_ = 0;
      mean_.setZero();
      m2_.setZero();
      updated = true;
    }
    ++counter_;
    return updated;
  }

 private:
  void advance() {
    const int last = n_warmup_ - term_buffer_ - 1;
    if (next_ == last) {
      next_ = -1;
      return;
    }
    window_ *= 2;
    next_ = counter_ + window_;
    if (next_ != last && next_ + 2 * window_ >= n_warmup_ - term_buffer_) next_ = last;
  }

  int n_warmup_;
  int init_buffer_ = 0;
  int term_buffer_ = 0;
  int window_ = 0;
  int next_ = -1;
  int counter_ = 0;
  long n_ = 0;
  Eigen::VectorXd mean_;
  Eigen::VectorXd m2_;
};

struct Transition {
  double accept_stat = 0;
  int depth = 0;
  int n_leapfrog = 0;
  bool divergent = false;
};

class Nuts {
 public:
  Nuts(const Target& target, const SamplerConfig& config, Rng& rng)
      : target_(target), config_(config), rng_(rng), mask_(Eigen::VectorXd::Ones(target.dim)) {
    for (Eigen::Index i : target.conditional_coords) mask_(i) = 0;
    inv_metric_ = mask_;
  }

  double step = 1;
  const Eigen::VectorXd& inv_metric() const { return inv_metric_; }
  void set_inv_metric(const Eigen::VectorXd& m) { inv_metric_ = m.cwiseProduct(mask_); }

  void refresh(PhasePoint& z) {
    for (Eigen::Index i = 0; i < z.p.size(); ++i) {
      z.p(i) = inv_metric_(i) > 0 ? normal_(rng_) / std::sqrt(inv_metric_(i)) : 0.0;
    }
  }

  void init_step(const PhasePoint& start) {
    PhasePoint z = start;
    refresh(z);
    double h0 = hamiltonian(inv_metric_, z);
    leapfrog(target_, inv_metric_, step, z);
    double delta = h0 - hamiltonian(inv_metric_, z);
    const double target_log = std::log(0.8);
    const int direction = delta > target_log ? 1 : -1;
    for (int it = 0; it < 100; ++it) {
      z = start;
      refresh(z);
      h0 = hamiltonian(inv_metric_, z);
      leapfrog(target_, inv_metric_, step, z);
      delta = h0 - hamiltonian(inv_metric_, z);
      if (direction == 1 && !(delta > target_log)) break;
      if (direction == -1 && !(delta < target_log)) break;
      step = direction == 1 ? 2 * step : 0.5 * step;
      if (step > 1e7 || step < 1e-12) break;
    }
    step = std::clamp(step, 1e-12, 1e7);
  }

  Transition transition(PhasePoint& z) {
    refresh(z);
    const double h0 = hamiltonian(inv_metric_, z);

    PhasePoint z_fwd = z, z_bck = z, z_sample = z, z_propose = z;
    Eigen::VectorXd p_sharp = inv_metric_.cwiseProduct(z.p);
    Eigen::VectorXd p_fwd_fwd = z.p, p_sharp_fwd_fwd = p_sharp, p_fwd_bck = z.p, p_sharp_fwd_bck = p_sharp;
    Eigen::VectorXd p_bck_fwd = z.p, p_sharp_bck_fwd = p_sharp, p_bck_bck = z.p, p_sharp_bck_bck = p_sharp;
    Eigen::VectorXd rho = z.p;
    const Eigen::Index n = z.q.size();

    double log_sum_weight = 0;
    Transition t;
    sum_metro_ = 0;
    n_leapfrog_ = 0;
    divergent_ = false;

    while (t.depth < config_.max_tree_depth) {
      Eigen::VectorXd rho_fwd = Eigen::VectorXd::Zero(n), rho_bck = Eigen::VectorXd::Zero(n);
      double log_sum_weight_subtree = neg_inf<double>;
      bool valid = false;
      if (uniform_(rng_) > 0.5) {
        rho_bck = rho;
        p_bck_fwd = p_fwd_bck;
        p_sharp_bck_fwd = p_sharp_fwd_bck;
        PhasePoint& cur = z_fwd;
        valid = build_tree(t.depth, cur, z_propose, p_sharp_fwd_bck, p_sharp_fwd_fwd, rho_fwd, p_fwd_bck, p_fwd_fwd,
                           h0, 1.0, log_sum_weight_subtree);
      } else {
        rho_fwd = rho;
        p_fwd_bck = p_bck_fwd;
        p_sharp_fwd_bck = p_sharp_bck_fwd;
        PhasePoint& cur = z_bck;
        valid = build_tree(t.depth, cur, z_propose, p_sharp_bck_fwd, p_sharp_bck_bck, rho_bck, p_bck_fwd, p_bck_bck,
                           h0, -1.0, log_sum_weight_subtree);
      }
      if (!valid) break;
      ++t.depth;

      if (log_sum_weight_subtree > log_sum_weight) {
        z_sample = z_propose;
      } else if (uniform_(rng_) < std::exp(log_sum_weight_subtree - log_sum_weight)) {
        z_sample = z_propose;
      }
      log_sum_weight = log_sum_exp(log_sum_weight, log_sum_weight_subtree);

      rho = rho_bck + rho_fwd;
      bool persist = no_u_turn(p_sharp_bck_bck, p_sharp_fwd_fwd, rho);
      persist = persist && no_u_turn(p_sharp_bck_bck, p_sharp_fwd_bck, rho_bck + p_fwd_bck);
      persist = persist && no_u_turn(p_sharp_bck_fwd, p_sharp_fwd_fwd, rho_fwd + p_bck_fwd);
      if (!persist) break;
    }

    t.n_leapfrog = n_leapfrog_;
    t.divergent = divergent_;
    t.accept_stat = n_leapfrog_ > 0 ? sum_metro_ / n_leapfrog_ : 0.0;
    z = z_sample;
    return t;
  }

 private:
  static bool no_u_turn(const Eigen::VectorXd& p_sharp_minus, const Eigen::VectorXd& p_sharp_plus,
                        const Eigen::VectorXd& rho) {
    return p_sharp_plus.dot(rho) > 0 && p_sharp_minus.dot(rho) > 0;
  }

  bool build_tree(int depth, PhasePoint& z, PhasePoint& z_propose, Eigen::VectorXd& p_sharp_beg,
                  Eigen::VectorXd& p_sharp_end, Eigen::VectorXd& rho, Eigen::VectorXd& p_beg, Eigen::VectorXd& p_end,
                  double h0, double sign, double& log_sum_weight) {
    if (depth == 0) {
      leapfrog(target_, inv_metric_, sign * step, z);
      ++n_leapfrog_;
      const double h = hamiltonian(inv_metric_, z);
      if (h - h0 > config_.max_energy_error) divergent_ = true;
      log_sum_weight = log_sum_exp(log_sum_weight, h0 - h);
      sum_metro_ += h0 - h > 0 ? 1.0 : std::exp(h0 - h);
      z_propose = z;
      p_sharp_beg = inv_metric_.cwiseProduct(z.p);
      p_sharp_end = p_sharp_beg;
      rho += z.p;
      p_beg = z.p;
      p_end = p_beg;
      return !divergent_;
    }
    const Eigen::Index n = z.q.size();

    Eigen::VectorXd p_sharp_init_end(n), p_init_end(n), rho_init = Eigen::VectorXd::Zero(n);
    double log_sum_weight_init = neg_inf<double>;
    if (!build_tree(depth - 1, z, z_propose, p_sharp_beg, p_sharp_init_end, rho_init, p_beg, p_init_end, h0, sign,
                    log_sum_weight_init)) {
      return false;
    }

    PhasePoint z_propose_final = z;
    Eigen::VectorXd p_final_beg(n), p_sharp_final_beg(n), rho_final = Eigen::VectorXd::Zero(n);
    double log_sum_weight_final = neg_inf<double>;
    if (!build_tree(depth - 1, z, z_propose_final, p_sharp_final_beg, p_sharp_end, rho_final, p_final_beg, p_end, h0,
                    sign, log_sum_weight_final)) {
      return false;
    }

    const double log_sum_weight_subtree = log_sum_exp(log_sum_weight_init, log_sum_weight_final);
    log_sum_weight = log_sum_exp(log_sum_weight, log_sum_weight_subtree);
    if (log_sum_weight_final > log_sum_weight_subtree) {
      z_propose = z_propose_final;
    } else if (uniform_(rng_) < std::exp(log_sum_weight_final - log_sum_weight_subtree)) {
      z_propose = z_propose_final;
    }

    const Eigen::VectorXd rho_subtree = rho_init + rho_final;
    bool persist = no_u_turn(p_sharp_beg, p_sharp_end, rho_subtree);
    persist = persist && no_u_turn(p_sharp_beg, p_sharp_final_beg, rho_init + p_final_beg);
    persist = persist && no_u_turn(p_sharp_init_end, p_sharp_end, rho_final + p_init_end);
    rho += rho_subtree;
    return persist;
  }

  const Target& target_;
  const SamplerConfig& config_;
  Rng& rng_;
  Eigen::VectorXd mask_;
  Eigen::VectorXd inv_metric_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
  double sum_metro_ = 0;
  int n_leapfrog_ = 0;
  bool divergent_ = false;
};

bool finite_point(const PhasePoint& z) { return std::isfinite(z.log_density) && z.grad.allFinite(); }

PhasePoint initial_point(const Target& target, const SamplerConfig& config, Rng& rng, int chain) {
  std::normal_distribution<double> normal(0.0, 1.0);
  PhasePoint z;
  z.q.resize(target.dim);
  z.p = Eigen::VectorXd::Zero(target.dim);
  z.grad.resize(target.dim);
  for (int attempt = 0; attempt < 100; ++attempt) {
    for (Eigen::Index i = 0; i < target.dim; ++i) z.q(i) = config.init_jitter * normal(rng);
    z.log_density = target.log_density(z.q, z.grad);
    if (finite_point(z)) return z;
  }
  throw NonFiniteInit("no finite log density found in 100 initialisation attempts", {chain});
}

ChainDraws run_chain(const Target& target, const SamplerConfig& config, int chain, const ProgressCallback& progress) {
  Rng rng = chain_rng(config.seed, chain);
  PhasePoint z = initial_point(target, config, rng, chain);
  Nuts nuts(target, config, rng);
  DualAveraging adapt;
  adapt.delta = config.target_accept;
  MetricWindows windows(config.n_warmup, target.dim);
  const bool conditional = !target.conditional_coords.empty() && target.conditional_update;

  nuts.init_step(z);
  adapt.restart(nuts.step);

  ChainDraws out;
  out.draws.resize(config.n_samples, target.dim);
  out.accept_stat.resize(config.n_samples);
  out.tree_depth.resize(config.n_samples);
  out.n_leapfrog.resize(config.n_samples);
  out.divergent.resize(config.n_samples);

  const int total = config.n_warmup + config.n_samples;
  for (int it = 0; it < total; ++it) {
    const bool warmup = it < config.n_warmup;
    if (conditional) {
      target.conditional_update(z.q, rng);
      z.log_density = target.log_density(z.q, z.grad);
    }
    const Transition t = nuts.transition(z);
    if (warmup) {
      if (t.divergent) ++out.warmup_divergences;
      nuts.step = adapt.learn(t.accept_stat);
      Eigen::VectorXd inv = nuts.inv_metric();
      if (windows.learn(z.q, inv)) {
        nuts.set_inv_metric(inv);
        nuts.init_step(z);
        adapt.restart(nuts.step);
      }
      if (it + 1 == config.n_warmup) nuts.step = adapt.final_step();
    } else {
      const int s = it - config.n_warmup;
      out.draws.row(s) = z.q.transpose();
      out.accept_stat(s) = t.accept_stat;
      out.tree_depth(s) = t.depth;
      out.n_leapfrog(s) = t.n_leapfrog;
      out.divergent(s) = t.divergent ? 1 : 0;
      if (t.divergent) ++out.divergences;
    }
    if (progress) progress({chain, it, total, warmup});
  }
  out.step_size = nuts.step;
  out.inv_metric = nuts.inv_metric();
  return out;
}

}  // namespace

PosteriorDraws sample(const Target& target, const SamplerConfig& config, const ProgressCallback& progress) {
  config.validate();
  if (target.dim < 1 || !target.log_density) throw std::invalid_argument("target has no dimensions or no density");
  for (Eigen::Index i : target.conditional_coords) {
    if (i < 0 || i >= target.dim) throw std::invalid_argument("conditional coordinate out of range");
  }

  std::mutex progress_mutex;
  ProgressCallback locked;
  if (progress) {
    locked = [&](const ProgressEvent& e) {
      std::lock_guard lock(progress_mutex);
      progress(e);
    };
  }

  PosteriorDraws result;
  result.chains.resize(config.n_chains);
  std::vector<std::exception_ptr> errors(config.n_chains);
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int c = next++; c < config.n_chains; c = next++) {
      try {
        result.chains[c] = run_chain(target, config, c, locked);
      } catch (...) {
        errors[c] = std::current_exception();
      }
    }
  };

  int n_threads = config.n_threads;
  if (n_threads == 0) n_threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  n_threads = std::min(n_threads, config.n_chains);
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
  }

  std::vector<int> failed_init;
  for (int c = 0; c < config.n_chains; ++c) {
    if (!errors[c]) continue;
    try {
      std::rethrow_exception(errors[c]);
    } catch (const NonFiniteInit&) {
      failed_init.push_back(c);
    }
  }
  if (!failed_init.empty()) throw NonFiniteInit("no finite log density found in 100 initialisation attempts", failed_init);

  std::vector<int> diverged;
  for (int c = 0; c < config.n_chains; ++c) {
    if (2 * result.chains[c].divergences > config.n_samples) diverged.push_back(c);
  }
  if (!diverged.empty()) throw AllChainsDiverged("more than half of the sampling iterations diverged", diverged);
  return result;
}

}  // namespace footcast
