#pragma once

#include <array>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "bcfr/approx_net.hpp"
#include "bcfr/solvers.hpp"

namespace bcfr {

/// Function approximator over (infoset, type) used by the deep solver: a
/// type-conditioned network or, in oracle mode, an exact table.
class ValueModel {
  public:
   virtual ~ValueModel() = default;
   /// Outputs for the infoset's legal actions.
   virtual std::vector< double > predict(int infoset, TypeId type) const = 0;
   /// Fits the stored records, weighting each by `weight(record)`. With
   /// `clamped` the regression target of a record r is (R_old(I, θ) + r)⁺,
   /// where R_old is this model frozen as it stood when the fit began;
   /// otherwise r itself.
   virtual void fit(const ReplayMemory& memory,
                    const std::function< double(const MemoryRecord&) >& weight,
                    std::size_t steps,
                    bool clamped,
                    Rng& rng) = 0;
   /// The underlying network; null in oracle mode.
   virtual const Mlp* network() const = 0;
   /// Mean loss of the most recent fit (0 for the table).
   virtual double last_loss() const = 0;
};

/// Network model: targets regressed with minibatch steps (warm-started).
std::unique_ptr< ValueModel > make_network_model(const GameSpec& spec,
                                                 const InfosetEncoder& encoder,
                                                 PlayerId player,
                                                 const DeepSettings& settings,
                                                 std::uint64_t seed);
/// Oracle model: each (type, infoset) maps to the weighted mean of its stored targets.
std::unique_ptr< ValueModel > make_table_model(const GameSpec& spec);

struct DeepMemories {
   std::array< ReplayMemory, 2 > regret;    ///< M_r per player
   std::array< ReplayMemory, 2 > strategy;  ///< M_π per player (recorded at the opponent's turn)

   DeepMemories(std::size_t capacity, MemoryPolicy policy);
};

/// Regret matching on each model's predictions for its own player's infosets.
StrategyProfile strategy_from_advantages(const GameSpec& spec, const std::array< const ValueModel*, 2 >& models);

/// Nonnegative part of the strategy model's predictions, normalised (uniform
/// when nothing is positive).
StrategyProfile strategy_from_policy(const GameSpec& spec, const std::array< const ValueModel*, 2 >& models);

/// One external-sampling traversal of type θ's game from node `h`.
///
/// At the traverser's nodes every action is expanded and the record
/// r(I,a) = weight·(u(a) − u_σ) is stored in the traverser's regret memory.
/// At the opponent's nodes σ(I) is stored in its strategy memory and one
/// action is sampled; chance is sampled. Returns the sampled value of `h`.
double deep_bcfr_traverse(const GameSpec& spec,
                          NodeId h,
                          PlayerId traverser,
                          TypeId type,
                          double weight,
                          const StrategyProfile& sigma,
                          DeepMemories& memories,
                          int iteration,
                          Sampler& sampler,
                          Rng& memory_rng);

struct DeepIterationMetrics {
   long iteration = 0;
   std::array< std::size_t, 2 > regret_memory{0, 0};
   std::array< double, 2 > advantage_loss{0.0, 0.0};
   std::size_t strategy_memory = 0;
   std::vector< double > posterior;
};

struct DeepCheckpoint {
   long iteration = 0;
   const StrategyProfile* average = nullptr;  ///< extracted from the freshly fitted strategy models
   const BeliefState* belief = nullptr;
};

struct DeepRunOptions {
   std::optional< TypeId > competitor;
   /// Iterations after which the strategy models are fitted and `on_checkpoint` runs; T is always included.
   std::vector< long > checkpoints;
   std::function< void(const DeepCheckpoint&) > on_checkpoint;
   std::function< void(const DeepIterationMetrics&) > on_iteration;
};

struct DeepResult {
   /// Strategy networks per player (empty in oracle mode).
   std::array< std::optional< Mlp >, 2 > strategy_networks;
   StrategyProfile average;
   BeliefState belief;
   std::vector< DeepIterationMetrics > history;
};

/// Runs `config.iterations` outer iterations of the deep solver and fits the
/// strategy models on M_π at every checkpoint.
///
/// Throws ConfigError before any work for an invalid config (including a zero
/// memory capacity) or a game without an infoset encoding.
DeepResult deep_bcfr_run(const GameSpec& spec, const SolverConfig& config, const DeepRunOptions& options = {});

}  // namespace bcfr
