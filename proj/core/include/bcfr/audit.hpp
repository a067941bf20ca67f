#pragma once

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "bcfr/game.hpp"
#include "bcfr/solvers.hpp"

namespace bcfr {

/// Regret quantities of one player after T recorded iterations. All regrets
/// are averages (divided by T).
struct PlayerAudit {
   /// Overall Bayesian regret with a separate pure deviation per type, by
   /// enumerating every pure strategy (NaN when enumeration was skipped).
   double overall_brute_force = 0.0;
   /// Same quantity from a max-backup over the accumulated terminal weights.
   double overall_backup = 0.0;
   /// Σ_{θ,I} max(max_a R_θ(I,a), 0): immediate regrets of the (type, infoset) pairs.
   double immediate_sum = 0.0;
   /// One deviation shared by every type.
   double overall_shared = 0.0;
   /// Σ_I max(max_a Σ_θ R_θ(I,a), 0).
   double immediate_sum_shared = 0.0;
   /// Overall regret with the weights fixed at the final posterior and pulled
   /// out of the time sum; equals `overall_backup` under a frozen belief.
   double overall_final_weights = 0.0;

   /// min over (θ,I) of bound − max_a R_θ(I,a), bound = range_θ·max_t Pr_t(θ)·√|A|/√T.
   double bound_margin = 0.0;
   /// min over I of Δ√|A|/√T − max_a Σ_θ R_θ(I,a) with Δ = Σ_θ Pr_T(θ)·range_θ.
   double posterior_weighted_bound_margin = 0.0;
   /// Overall bound Σ_θ range_θ·max_t Pr_t(θ)·|I_i|·√|A|/√T.
   double overall_bound = 0.0;

   /// Largest |solver regret table − recomputed immediate regret| (unscaled).
   double table_mismatch = 0.0;
};

struct AuditPoint {
   long iterations = 0;
   std::array< PlayerAudit, 2 > players;

   /// The decomposition inequality holds for both deviation readings.
   bool decomposition_holds(double tolerance) const;
   /// Every per-(type, infoset) immediate regret is within its bound.
   bool bound_holds(double tolerance) const;
};

struct AuditReport {
   std::vector< AuditPoint > points;
   std::vector< double > final_posterior;
};

/// Accumulates the quantities needed to check the regret decomposition
/// independently of the solver's tables.
///
/// `observe` is called once per iteration with the profile every player
/// faced and the type weights of that iteration.
class TheoremAuditor {
  public:
   /// Throws ConfigError when brute force is requested on a game with more
   /// than 2^24 pure strategies for some player.
   TheoremAuditor(const GameSpec& spec, bool brute_force);

   void observe(const StrategyProfile& sigma, std::span< const double > weights);

   /// Evaluates the recorded iterations. `tables` (same-shape vanilla regrets
   /// accumulated by the solver) are compared entry by entry when given.
   AuditPoint evaluate(std::span< const double > final_weights, const RegretTable* tables) const;

   long iterations() const { return iterations_; }

  private:
   const GameSpec& spec_;
   bool brute_force_;
   long iterations_ = 0;
   int num_types_;
   /// [player][type][terminal]: Σ_t w_t(θ)·π_{-i}(z)·u_{i,θ}(z), and the unweighted sum.
   std::array< std::vector< std::vector< double > >, 2 > weighted_terminal_;
   std::array< std::vector< std::vector< double > >, 2 > plain_terminal_;
   /// [player][type]: Σ_t w_t(θ)·u_{i,θ}(σ^t) and the unweighted sum.
   std::array< std::vector< double >, 2 > weighted_value_;
   std::array< std::vector< double >, 2 > plain_value_;
   /// [type]: Σ_t w_t(θ)·(v(I,a) − v(I)) in table layout, both players.
   std::vector< std::vector< double > > immediate_;
   std::vector< double > max_weight_;
};

/// Runs vanilla Bayesian CFR (exact-sum, simultaneous updates) and audits the
/// regret decomposition and the per-infoset bound at each checkpoint.
///
/// Throws ConfigError for any other algorithm, posterior mode or schedule.
AuditReport theorem_audit(const GameSpec& spec,
                          const SolverConfig& config,
                          std::optional< TypeId > competitor,
                          std::span< const long > checkpoints,
                          bool brute_force = true);

}  // namespace bcfr
