#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "gacl/rng.hpp"

namespace gacl::colony {

// Pheromone over K sites; every entry stays >= ColonyConfig::tau_min.
using PheromoneField = std::vector<double>;

// A foraging environment: per-site quality, per-site desirability prior,
// and the std-dev of the zero-mean Gaussian noise on quality observations.
struct Environment {
  std::vector<double> qualities;       // Q_j >= 0
  std::vector<double> desirabilities;  // d_j > 0
  double obs_noise_sigma = 0.0;        // sigma >= 0
};

Environment make_environment(std::vector<double> qualities,
                             std::vector<double> desirabilities,
                             double obs_noise_sigma);
// Uniform desirabilities (all 1).
Environment make_environment(std::vector<double> qualities,
                             double obs_noise_sigma);
void validate(const Environment& env);

struct AnnealSchedule {
  double rho0 = 0.1;
  double tau_anneal = 20.0;
};

struct ColonyConfig {
  int n_ants = 100;        // N
  int waves_per_gen = 5;   // T
  double alpha = 1.0;      // pheromone exponent
  double beta = 0.0;       // desirability exponent
  double gamma = 0.1;      // deposit / reinforcement gain
  double rho_wave = 0.1;   // within-generation evaporation
  double rho_gen = 0.1;    // between-generation evaporation
  double explore_sigma = 0.01;  // generational exploration noise
  double tau_min = 1e-6;
  std::optional<AnnealSchedule> anneal;  // if set, rho_gen(g) is annealed
};

void validate(const ColonyConfig& cfg);

// One generation's observables. `contribution` is the per-site share of the
// mean observed quality, so its entries sum to `fitness`. `visit_counts`
// sums to n_ants * waves_per_gen.
struct GenerationOutcome {
  PheromoneField tau_end;  // field after the last wave, before the
                           // generational update
  double fitness = 0.0;    // mean observed quality over all N*T acts
  std::vector<double> contribution;
  std::vector<long long> visit_counts;
};

// Site-choice distribution p_j = tau_j^alpha * d_j^beta / sum_k (...).
// Entries of `active` (if given) that are 0 get probability 0; at least one
// site must remain active.
std::vector<double> choice_probabilities(
    const PheromoneField& tau, const Environment& env, double alpha,
    double beta, const std::vector<std::uint8_t>* active = nullptr);

// Multinomial draw: allocate n ants over sites according to probs.
std::vector<long long> sample_allocation(const std::vector<double>& probs,
                                         long long n, RandomStream& rng);

// Noisy quality reading: Q_j + N(0, sigma^2), clamped below at 0.
double observe_quality(const Environment& env, std::size_t site,
                       RandomStream& rng);

// Within-generation wave update: tau' = max(tau_min, (1-rho_wave)*tau + dep).
PheromoneField wave_update(const PheromoneField& tau,
                           const std::vector<double>& deposits,
                           const ColonyConfig& cfg);

// Runs waves_per_gen waves of allocate/observe/deposit from tau_start.
GenerationOutcome run_generation(
    const Environment& env, const PheromoneField& tau_start,
    const ColonyConfig& cfg, RandomStream& rng,
    const std::vector<std::uint8_t>* active = nullptr);

// Annealed evaporation rate rho(g) = rho0 * exp(-g / tau_anneal), g >= 0.
double anneal_rho(double g, const AnnealSchedule& sched);

// Between-generation update for generation index g (1-based):
//   tau_{g+1} = max(tau_min, (1 - rho_gen(g)) * tau_end
//                           + gamma * contribution + eps),
// eps ~ N(0, explore_sigma^2) per site (no draws when explore_sigma == 0).
PheromoneField generation_update(const GenerationOutcome& outcome,
                                 const ColonyConfig& cfg, int g,
                                 RandomStream& rng);

struct GenerationRecord {
  GenerationOutcome outcome;
  PheromoneField tau_next;  // field entering the next generation
};

// Full run: `generations` rounds of run_generation + generation_update,
// starting from tau_start (all-ones if not given).
std::vector<GenerationRecord> run_gacl(
    const Environment& env, const ColonyConfig& cfg, int generations,
    RandomStream& rng,
    const std::optional<PheromoneField>& tau_start = std::nullopt);

// Convenience views over a trajectory.
std::vector<double> fitness_series(const std::vector<GenerationRecord>& traj);
// 1 - F_g / max quality.
std::vector<double> error_series(const std::vector<GenerationRecord>& traj,
                                 const Environment& env);
// Mean true quality of the visited sites, / max quality; unlike the fitness
// this is immune to observation-noise clamping bias.
std::vector<double> allocation_quality_series(
    const std::vector<GenerationRecord>& traj, const Environment& env);

struct PruneResult {
  PheromoneField tau;              // values unchanged
  std::vector<std::uint8_t> keep;  // 1 = active, 0 = pruned
};

// Marks sites with tau < threshold pruned. Refuses to prune everything: if
// all sites fall below the threshold, the argmax site (lowest index wins
// ties) stays active.
PruneResult prune_sites(const PheromoneField& tau, double threshold);

// Appends a site; returns the extended environment and field.
std::pair<Environment, PheromoneField> spawn_site(
    const Environment& env, const PheromoneField& tau, double new_quality,
    double new_desirability, double tau_init, double tau_min = 1e-6);

// Closed-form expected fitness E[F](tau) = sum_j p_j(tau) Q_j.
double expected_fitness(const PheromoneField& tau, const Environment& env,
                        double alpha, double beta);
// Its analytic gradient: dE[F]/dtau_j = (alpha * p_j / tau_j) * (Q_j - E[F]).
std::vector<double> expected_fitness_grad(const PheromoneField& tau,
                                          const Environment& env, double alpha,
                                          double beta);

struct GradientCheck {
  std::vector<double> mc_delta;  // Monte-Carlo estimate of E[gamma * u | tau]
  std::vector<double> mc_se;     // its per-site standard error
  std::vector<double> fd_grad;   // central differences on E[F](tau)
  double cosine = 0.0;  // cos(mc_delta - mean projection, fd_grad)
  bool se_unreliable = false;  // ||se|| > 10% of ||mc_delta||
};

// Monte-Carlo check that the generational reinforcement points along the
// fitness gradient: runs n_samples independent generations from tau,
// averages gamma * u, and compares the mean-centered estimate against the
// finite-difference gradient of the closed-form expected fitness.
GradientCheck fitness_gradient_mc(const Environment& env,
                                  const PheromoneField& tau,
                                  const ColonyConfig& cfg, long long n_samples,
                                  double fd_eps, RandomStream& rng);

}  // namespace gacl::colony
