#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bcfr/belief.hpp"
#include "bcfr/game.hpp"
#include "bcfr/regret.hpp"
#include "bcfr/rng.hpp"

namespace bcfr {

enum class Algorithm { cfr, cfr_plus, mccfr_external, bcfr, bcfr_plus, deep_bcfr };

std::string to_string(Algorithm algorithm);
/// Accepts "cfr", "cfr+", "mccfr-ext", "bcfr", "bcfr+", "deep-bcfr"; throws ConfigError otherwise.
Algorithm parse_algorithm(const std::string& name);
/// The classical baselines solve a single-type game.
bool is_type_free(Algorithm algorithm);

enum class PosteriorMode {
   exact_sum,  ///< traverse every θ, weighting increments by its posterior mass
   sampled,    ///< draw θ from the posterior for each traversal
};

enum class BeliefMode {
   posterior,  ///< learn from the competitor's hands
   frozen,     ///< keep the prior for the whole run
   pinned,     ///< point mass on the competitor's type (complete-information reference)
};

/// How a vanilla iteration orders the two players' regret updates.
enum class UpdateSchedule {
   simultaneous,  ///< both players update against the same σ^t
   alternating,   ///< player 2 updates against player 1's refreshed strategy
};

std::string to_string(PosteriorMode mode);
PosteriorMode parse_posterior_mode(const std::string& name);
std::string to_string(BeliefMode mode);
BeliefMode parse_belief_mode(const std::string& name);
std::string to_string(UpdateSchedule schedule);
UpdateSchedule parse_update_schedule(const std::string& name);

struct BeliefSettings {
   double w = 1.0;
   double w_prime = 0.5;
   bool standardize = true;  ///< scale features by 1/σ over the reference bank
   std::size_t references_per_type = 2000;
   std::size_t observation_capacity = 500;
   std::vector< double > prior;  ///< empty means uniform
   std::size_t observations_per_iteration = 1;
   /// Also append one self-play history of the traversed type to its reference queue per iteration.
   bool online_references = false;
};

struct DeepSettings {
   std::vector< std::size_t > hidden{64, 64};
   std::size_t type_layer = 1;  ///< layer receiving the type one-hot (0: with the rest of the input)
   double learning_rate = 1e-3;
   double clip_norm = 10.0;
   std::string optimizer = "adam";  ///< "sgd" or "adam"
   /// "constant", or "linear": the rate falls linearly to zero over each fit.
   std::string lr_schedule = "constant";
   std::size_t memory_capacity = 1u << 15;
   std::size_t train_steps = 200;
   std::size_t batch_size = 128;
   std::size_t strategy_train_steps = 2000;
   bool clamped_target = true;  ///< (R(ψ_old) + r̃)⁺ targets; false regresses on r̃ directly
   bool tabular_oracle = false;  ///< replace every network with an exact table
   bool linear_weighting = true;  ///< weight samples by their iteration in the losses
};

struct SolverConfig {
   Algorithm algorithm = Algorithm::bcfr;
   long iterations = 1000;  ///< T
   int traversals = 1;      ///< K, traversals per player and iteration
   std::uint64_t seed = 0;
   PosteriorMode posterior_mode = PosteriorMode::exact_sum;
   BeliefMode belief_mode = BeliefMode::posterior;
   /// Vanilla cfr and bcfr only; the plus variants always alternate.
   UpdateSchedule update = UpdateSchedule::simultaneous;
   /// Sample one chance outcome per chance node instead of enumerating (Bayesian solvers only).
   bool sample_chance = false;
   BeliefSettings belief;
   DeepSettings deep;

   /// Throws ConfigError unless T ≥ 1, K ≥ 1 and the nested settings are usable.
   void validate() const;
};

/// Mutable state of one tabular solver run.
struct SolverState {
   RegretTable regrets;
   StrategyTable strategy;
   BeliefState belief;
   std::optional< SampleBank > bank;
   KernelConfig kernel;
   /// The scripted opponent whose hands feed the posterior.
   std::optional< TypeId > competitor;
   long iteration = 0;
   Rng rng;
};

/// Fresh tables (mode and averaging follow the algorithm), prior belief and,
/// for Bayesian algorithms on typed games, the populated reference bank.
///
/// Throws ConfigError when the belief mode needs a competitor and none is
/// given, or when a classical baseline is asked to solve a typed game.
SolverState make_solver_state(const GameSpec& spec,
                              const SolverConfig& config,
                              std::optional< TypeId > competitor = std::nullopt);

/// One simultaneous full-tree iteration of vanilla CFR on a single-type game.
void cfr_iterate(SolverState& state, const GameSpec& spec);
void cfr_iterate(SolverState& state, const GameSpec& spec, UpdateSchedule schedule);
/// One alternating full-tree iteration of CFR+ (regret matching+, linear averaging).
void cfr_plus_iterate(SolverState& state, const GameSpec& spec);
/// One Bayesian iteration (schedule from the config) followed by the posterior refresh.
void bcfr_iterate(SolverState& state, const GameSpec& spec, const SolverConfig& config);
/// As `bcfr_iterate` with regret matching+, alternating updates and linear averaging.
void bcfr_plus_iterate(SolverState& state, const GameSpec& spec, const SolverConfig& config);
/// One external-sampling pass per player on a single-type game.
void mccfr_external_iterate(SolverState& state, const GameSpec& spec, const SolverConfig& config);

/// Dispatches on `config.algorithm` (tabular algorithms only).
void iterate(SolverState& state, const GameSpec& spec, const SolverConfig& config);

/// Average strategy of the run (type-free for the classical baselines).
StrategyProfile average_strategy_profile(const GameSpec& spec, const SolverState& state);

/// Simulates the competitor's hands for this iteration, stores them in Q and
/// updates the posterior. No-op unless the belief mode is `posterior`.
void observe_competitor(SolverState& state, const GameSpec& spec, const SolverConfig& config);

// ---------------------------------------------------------------------------
// Building blocks shared with the tests and the deep solver.

/// Source of sampled indices; the default draws from an Rng.
class Sampler {
  public:
   virtual ~Sampler() = default;
   /// Index drawn with probability `probs[k]`.
   virtual std::size_t pick(std::span< const double > probs) = 0;
};

class RngSampler : public Sampler {
  public:
   explicit RngSampler(Rng& rng) : rng_(&rng) {}
   std::size_t pick(std::span< const double > probs) override { return rng_->categorical(probs); }

  private:
   Rng* rng_;
};

/// One external-sampling traversal for `traverser` against the current
/// strategy `sigma` (type-free). Regret estimates are added to `regrets`
/// with weight 1; when `strategy` is given the sampled opponent infosets add
/// their current strategy to it. Returns the sampled value of the root.
double mccfr_external_traverse(const GameSpec& spec,
                               const StrategyProfile& sigma,
                               PlayerId traverser,
                               Sampler& sampler,
                               RegretTable& regrets,
                               StrategyTable* strategy,
                               int iteration);

// ---------------------------------------------------------------------------
// Checkpoints: the regret and strategy tables in the binary table format plus
// a JSON sidecar with the config echo, iteration, posterior and RNG state.

void save_solver_checkpoint(const std::string& directory,
                            const GameSpec& spec,
                            const SolverConfig& config,
                            const SolverState& state);
/// Restores a state written by `save_solver_checkpoint`; throws CheckpointError on mismatch.
SolverState load_solver_checkpoint(const std::string& directory, const GameSpec& spec, const SolverConfig& config);

}  // namespace bcfr
