#include "gacl/colony.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace gacl::colony {

namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw std::invalid_argument(msg);
}

double max_quality(const Environment& env) {
  return *std::max_element(env.qualities.begin(), env.qualities.end());
}

}  // namespace

Environment make_environment(std::vector<double> qualities,
                             std::vector<double> desirabilities,
                             double obs_noise_sigma) {
  Environment env{std::move(qualities), std::move(desirabilities),
                  obs_noise_sigma};
  validate(env);
  return env;
}

Environment make_environment(std::vector<double> qualities,
                             double obs_noise_sigma) {
  std::vector<double> ones(qualities.size(), 1.0);
  return make_environment(std::move(qualities), std::move(ones),
                          obs_noise_sigma);
}

void validate(const Environment& env) {
  require(!env.qualities.empty(), "environment: no sites");
  require(env.qualities.size() == env.desirabilities.size(),
          "environment: qualities/desirabilities size mismatch");
  for (double q : env.qualities) {
    require(std::isfinite(q) && q >= 0.0,
            "environment: qualities must be finite and >= 0");
  }
  for (double d : env.desirabilities) {
    require(std::isfinite(d) && d > 0.0,
            "environment: desirabilities must be finite and > 0");
  }
  require(std::isfinite(env.obs_noise_sigma) && env.obs_noise_sigma >= 0.0,
          "environment: obs_noise_sigma must be >= 0");
}

void validate(const ColonyConfig& cfg) {
  require(cfg.n_ants >= 1, "config: n_ants must be >= 1");
  require(cfg.waves_per_gen >= 1, "config: waves_per_gen must be >= 1");
  require(cfg.alpha >= 0.0, "config: alpha must be >= 0");
  require(cfg.beta >= 0.0, "config: beta must be >= 0");
  require(cfg.gamma > 0.0, "config: gamma must be > 0");
  require(cfg.rho_wave >= 0.0 && cfg.rho_wave <= 1.0,
          "config: rho_wave must be in [0, 1]");
  require(cfg.rho_gen >= 0.0 && cfg.rho_gen <= 1.0,
          "config: rho_gen must be in [0, 1]");
  require(cfg.explore_sigma >= 0.0, "config: explore_sigma must be >= 0");
  require(cfg.tau_min > 0.0, "config: tau_min must be > 0");
  if (cfg.anneal) {
    require(cfg.anneal->rho0 >= 0.0 && cfg.anneal->rho0 <= 1.0,
            "config: anneal rho0 must be in [0, 1]");
    require(cfg.anneal->tau_anneal > 0.0,
            "config: anneal tau_anneal must be > 0");
  }
}

std::vector<double> choice_probabilities(
    const PheromoneField& tau, const Environment& env, double alpha,
    double beta, const std::vector<std::uint8_t>* active) {
  const std::size_t k = tau.size();
  require(k == env.qualities.size(),
          "choice_probabilities: tau/environment size mismatch");
  require(alpha >= 0.0 && beta >= 0.0,
          "choice_probabilities: exponents must be >= 0");
  if (active) {
    require(active->size() == k, "choice_probabilities: mask size mismatch");
  }
  std::vector<double> p(k, 0.0);
  double sum = 0.0;
  for (std::size_t j = 0; j < k; ++j) {
    if (active && !(*active)[j]) continue;
    require(std::isfinite(tau[j]) && tau[j] > 0.0,
            "choice_probabilities: tau entries must be > 0");
    const double w =
        std::pow(tau[j], alpha) * std::pow(env.desirabilities[j], beta);
    p[j] = w;
    sum += w;
  }
  require(sum > 0.0 && std::isfinite(sum),
          "choice_probabilities: no active site with positive weight");
  for (double& v : p) v /= sum;
  return p;
}

std::vector<long long> sample_allocation(const std::vector<double>& probs,
                                         long long n, RandomStream& rng) {
  require(!probs.empty(), "sample_allocation: empty probability vector");
  require(n >= 0, "sample_allocation: n must be >= 0");
  double sum = 0.0;
  for (double p : probs) {
    require(std::isfinite(p) && p >= 0.0,
            "sample_allocation: probabilities must be >= 0");
    sum += p;
  }
  require(std::abs(sum - 1.0) <= 1e-9,
          "sample_allocation: probabilities must sum to 1");
  std::vector<long long> counts(probs.size(), 0);
  const std::size_t last = probs.size() - 1;
  for (long long a = 0; a < n; ++a) {
    const double u = rng.uniform();
    double acc = 0.0;
    std::size_t pick = last;  // absorb rounding residue in the last site
    for (std::size_t j = 0; j <= last; ++j) {
      acc += probs[j];
      if (u < acc) {
        pick = j;
        break;
      }
    }
    ++counts[pick];
  }
  return counts;
}

double observe_quality(const Environment& env, std::size_t site,
                       RandomStream& rng) {
  if (site >= env.qualities.size()) {
    throw std::out_of_range("observe_quality: site index out of range");
  }
  double q = env.qualities[site];
  if (env.obs_noise_sigma > 0.0) {
    q += rng.gaussian(0.0, env.obs_noise_sigma);
  }
  return std::max(0.0, q);
}

PheromoneField wave_update(const PheromoneField& tau,
                           const std::vector<double>& deposits,
                           const ColonyConfig& cfg) {
  require(tau.size() == deposits.size(), "wave_update: size mismatch");
  PheromoneField out(tau.size());
  for (std::size_t j = 0; j < tau.size(); ++j) {
    require(std::isfinite(deposits[j]), "wave_update: non-finite deposit");
    out[j] =
        std::max(cfg.tau_min, (1.0 - cfg.rho_wave) * tau[j] + deposits[j]);
  }
  return out;
}

GenerationOutcome run_generation(const Environment& env,
                                 const PheromoneField& tau_start,
                                 const ColonyConfig& cfg, RandomStream& rng,
                                 const std::vector<std::uint8_t>* active) {
  validate(env);
  validate(cfg);
  require(tau_start.size() == env.qualities.size(),
          "run_generation: tau/environment size mismatch");
  const std::size_t k = tau_start.size();
  const long long n = cfg.n_ants;

  GenerationOutcome out;
  out.contribution.assign(k, 0.0);
  out.visit_counts.assign(k, 0);
  PheromoneField tau = tau_start;
  double total_quality = 0.0;

  for (int w = 0; w < cfg.waves_per_gen; ++w) {
    const auto probs =
        choice_probabilities(tau, env, cfg.alpha, cfg.beta, active);
    const auto counts = sample_allocation(probs, n, rng);
    std::vector<double> deposits(k, 0.0);
    for (std::size_t j = 0; j < k; ++j) {
      for (long long c = 0; c < counts[j]; ++c) {
        const double qhat = observe_quality(env, j, rng);
        deposits[j] += cfg.gamma * qhat;
        out.contribution[j] += qhat;
        total_quality += qhat;
      }
      out.visit_counts[j] += counts[j];
    }
    tau = wave_update(tau, deposits, cfg);
  }

  const double acts =
      static_cast<double>(n) * static_cast<double>(cfg.waves_per_gen);
  out.fitness = total_quality / acts;
  for (double& u : out.contribution) u /= acts;
  out.tau_end = std::move(tau);
  return out;
}

double anneal_rho(double g, const AnnealSchedule& sched) {
  require(g >= 0.0, "anneal_rho: generation index must be >= 0");
  require(sched.tau_anneal > 0.0, "anneal_rho: tau_anneal must be > 0");
  return sched.rho0 * std::exp(-g / sched.tau_anneal);
}

PheromoneField generation_update(const GenerationOutcome& outcome,
                                 const ColonyConfig& cfg, int g,
                                 RandomStream& rng) {
  require(g >= 1, "generation_update: generation index must be >= 1");
  require(outcome.tau_end.size() == outcome.contribution.size(),
          "generation_update: outcome size mismatch");
  const double rho =
      cfg.anneal ? anneal_rho(static_cast<double>(g), *cfg.anneal)
                 : cfg.rho_gen;
  if (!(rho >= 0.0 && rho <= 1.0)) {
    throw std::domain_error("generation_update: rho_gen(g) outside [0, 1]");
  }
  PheromoneField next(outcome.tau_end.size());
  for (std::size_t j = 0; j < next.size(); ++j) {
    double v = (1.0 - rho) * outcome.tau_end[j] +
               cfg.gamma * outcome.contribution[j];
    if (cfg.explore_sigma > 0.0) v += rng.gaussian(0.0, cfg.explore_sigma);
    next[j] = std::max(cfg.tau_min, v);
  }
  return next;
}

std::vector<GenerationRecord> run_gacl(
    const Environment& env, const ColonyConfig& cfg, int generations,
    RandomStream& rng, const std::optional<PheromoneField>& tau_start) {
  validate(env);
  validate(cfg);
  require(generations >= 1, "run_gacl: generations must be >= 1");
  PheromoneField tau = tau_start
                           ? *tau_start
                           : PheromoneField(env.qualities.size(), 1.0);
  require(tau.size() == env.qualities.size(),
          "run_gacl: tau_start/environment size mismatch");
  std::vector<GenerationRecord> traj;
  traj.reserve(static_cast<std::size_t>(generations));
  for (int g = 1; g <= generations; ++g) {
    GenerationRecord rec;
    rec.outcome = run_generation(env, tau, cfg, rng);
    rec.tau_next = generation_update(rec.outcome, cfg, g, rng);
    tau = rec.tau_next;
    traj.push_back(std::move(rec));
  }
  return traj;
}

std::vector<double> fitness_series(const std::vector<GenerationRecord>& traj) {
  std::vector<double> out;
  out.reserve(traj.size());
  for (const auto& r : traj) out.push_back(r.outcome.fitness);
  return out;
}

std::vector<double> error_series(const std::vector<GenerationRecord>& traj,
                                 const Environment& env) {
  const double qmax = max_quality(env);
  require(qmax > 0.0, "error_series: max quality must be > 0");
  std::vector<double> out;
  out.reserve(traj.size());
  for (const auto& r : traj) out.push_back(1.0 - r.outcome.fitness / qmax);
  return out;
}

std::vector<double> allocation_quality_series(
    const std::vector<GenerationRecord>& traj, const Environment& env) {
  const double qmax = max_quality(env);
  require(qmax > 0.0, "allocation_quality_series: max quality must be > 0");
  std::vector<double> out;
  out.reserve(traj.size());
  for (const auto& r : traj) {
    double q = 0.0;
    long long total = 0;
    for (std::size_t j = 0; j < r.outcome.visit_counts.size(); ++j) {
      q += static_cast<double>(r.outcome.visit_counts[j]) * env.qualities[j];
      total += r.outcome.visit_counts[j];
    }
    out.push_back(q / (static_cast<double>(total) * qmax));
  }
  return out;
}

PruneResult prune_sites(const PheromoneField& tau, double threshold) {
  require(!tau.empty(), "prune_sites: empty field");
  PruneResult res;
  res.tau = tau;
  res.keep.assign(tau.size(), 0);
  bool any = false;
  for (std::size_t j = 0; j < tau.size(); ++j) {
    if (!(tau[j] < threshold)) {
      res.keep[j] = 1;
      any = true;
    }
  }
  if (!any) {
    // Never prune the whole colony: the strongest site survives.
    const std::size_t best = static_cast<std::size_t>(
        std::max_element(tau.begin(), tau.end()) - tau.begin());
    res.keep[best] = 1;
  }
  return res;
}

std::pair<Environment, PheromoneField> spawn_site(
    const Environment& env, const PheromoneField& tau, double new_quality,
    double new_desirability, double tau_init, double tau_min) {
  validate(env);
  require(tau.size() == env.qualities.size(), "spawn_site: size mismatch");
  require(std::isfinite(new_quality) && new_quality >= 0.0,
          "spawn_site: new_quality must be >= 0");
  require(std::isfinite(new_desirability) && new_desirability > 0.0,
          "spawn_site: new_desirability must be > 0");
  require(std::isfinite(tau_init) && tau_init >= tau_min,
          "spawn_site: tau_init must be >= tau_min");
  Environment env2 = env;
  env2.qualities.push_back(new_quality);
  env2.desirabilities.push_back(new_desirability);
  PheromoneField tau2 = tau;
  tau2.push_back(tau_init);
  return {std::move(env2), std::move(tau2)};
}

double expected_fitness(const PheromoneField& tau, const Environment& env,
                        double alpha, double beta) {
  const auto p = choice_probabilities(tau, env, alpha, beta);
  double f = 0.0;
  for (std::size_t j = 0; j < p.size(); ++j) f += p[j] * env.qualities[j];
  return f;
}

std::vector<double> expected_fitness_grad(const PheromoneField& tau,
                                          const Environment& env, double alpha,
                                          double beta) {
  const auto p = choice_probabilities(tau, env, alpha, beta);
  const double f = expected_fitness(tau, env, alpha, beta);
  std::vector<double> g(p.size());
  for (std::size_t j = 0; j < p.size(); ++j) {
    g[j] = alpha * p[j] / tau[j] * (env.qualities[j] - f);
  }
  return g;
}

GradientCheck fitness_gradient_mc(const Environment& env,
                                  const PheromoneField& tau,
                                  const ColonyConfig& cfg, long long n_samples,
                                  double fd_eps, RandomStream& rng) {
  validate(env);
  validate(cfg);
  require(n_samples >= 1, "fitness_gradient_mc: n_samples must be >= 1");
  require(fd_eps > 0.0, "fitness_gradient_mc: fd_eps must be > 0");
  for (double t : tau) {
    require(t > fd_eps, "fitness_gradient_mc: tau entries must exceed fd_eps");
  }
  const std::size_t k = tau.size();

  GradientCheck res;
  res.mc_delta.assign(k, 0.0);
  res.mc_se.assign(k, 0.0);
  std::vector<double> sumsq(k, 0.0);
  for (long long s = 0; s < n_samples; ++s) {
    const auto out = run_generation(env, tau, cfg, rng);
    for (std::size_t j = 0; j < k; ++j) {
      const double v = cfg.gamma * out.contribution[j];
      res.mc_delta[j] += v;
      sumsq[j] += v * v;
    }
  }
  const double n = static_cast<double>(n_samples);
  for (std::size_t j = 0; j < k; ++j) {
    res.mc_delta[j] /= n;
    const double var =
        std::max(0.0, (sumsq[j] - n * res.mc_delta[j] * res.mc_delta[j]) /
                          std::max(1.0, n - 1.0));
    res.mc_se[j] = std::sqrt(var / n);
  }

  res.fd_grad.assign(k, 0.0);
  for (std::size_t j = 0; j < k; ++j) {
    PheromoneField hi = tau, lo = tau;
    hi[j] += fd_eps;
    lo[j] -= fd_eps;
    res.fd_grad[j] = (expected_fitness(hi, env, cfg.alpha, cfg.beta) -
                      expected_fitness(lo, env, cfg.alpha, cfg.beta)) /
                     (2.0 * fd_eps);
  }

  // The reinforcement is all-positive; only its deviation from the uniform
  // direction carries gradient information, so compare after centering.
  const double mc_mean =
      std::accumulate(res.mc_delta.begin(), res.mc_delta.end(), 0.0) /
      static_cast<double>(k);
  double dot = 0.0, nc = 0.0, nf = 0.0, nse = 0.0, nmc = 0.0;
  for (std::size_t j = 0; j < k; ++j) {
    const double c = res.mc_delta[j] - mc_mean;
    dot += c * res.fd_grad[j];
    nc += c * c;
    nf += res.fd_grad[j] * res.fd_grad[j];
    nse += res.mc_se[j] * res.mc_se[j];
    nmc += res.mc_delta[j] * res.mc_delta[j];
  }
  res.cosine = (nc > 0.0 && nf > 0.0) ? dot / std::sqrt(nc * nf) : 0.0;
  res.se_unreliable = std::sqrt(nse) > 0.1 * std::sqrt(nmc);
  return res;
}

}  // namespace gacl::colony
