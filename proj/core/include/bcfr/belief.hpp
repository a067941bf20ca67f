#pragma once

#include <cstdint>
#include <deque>
#include <span>
#include <vector>

#include "bcfr/game.hpp"
#include "bcfr/rng.hpp"

namespace bcfr {

/// Fixed-length real encoding of an observed history (see GameRules::history_features).
using HistoryFeature = std::vector< double >;

enum class KernelShape { gaussian };

struct KernelConfig {
   double w = 1.0;        ///< history-kernel bandwidth
   double w_prime = 0.5;  ///< type-kernel bandwidth
   KernelShape shape = KernelShape::gaussian;
   /// Per-feature multipliers applied before the Euclidean distance; empty means 1.
   std::vector< double > scale;

   /// Throws ValidationError unless both bandwidths are positive and the scale is finite.
   void validate() const;
};

/// K(distance / bandwidth) with K(u) = exp(−u²/2)/√(2π).
double kernel_eval(const KernelConfig& config, double distance, double bandwidth);

/// Scaled Euclidean distance between two encodings of equal length.
double history_distance(std::span< const double > a, std::span< const double > b, const KernelConfig& config);

/// Discrete metric on the type space: 0 if equal, 1 otherwise.
double type_distance(TypeId a, TypeId b);

/// Reference points per type (Q_θ, capacity m each) and the competitor's
/// observations (Q, capacity n). Both evict oldest-first.
class SampleBank {
  public:
   SampleBank(int num_types, std::size_t reference_capacity, std::size_t observation_capacity);

   int num_types() const { return static_cast< int >(references_.size()); }
   std::size_t reference_capacity() const { return reference_capacity_; }
   std::size_t observation_capacity() const { return observation_capacity_; }

   void add_reference(HistoryFeature feature, TypeId type);
   void add_observation(HistoryFeature feature);

   const std::deque< HistoryFeature >& references(TypeId type) const;
   const std::deque< HistoryFeature >& observations() const { return observations_; }
   std::size_t num_references() const;

   /// Bumped on every reference insertion; lets callers cache likelihoods.
   std::uint64_t reference_version() const { return reference_version_; }

  private:
   std::size_t reference_capacity_;
   std::size_t observation_capacity_;
   std::vector< std::deque< HistoryFeature > > references_;
   std::deque< HistoryFeature > observations_;
   std::uint64_t reference_version_ = 0;
};

/// Σ_j K(d_s(h,h_j)/w) K′(d_r(θ,θ_j)/w′) / Σ_l K′(d_r(θ,θ_l)/w′) over every reference.
///
/// Throws EstimatorUnavailableError on an empty bank and DegenerateKernelError
/// when the type-kernel normaliser underflows (< 1e-300).
double ckde_likelihood(std::span< const double > h, TypeId type, const SampleBank& bank, const KernelConfig& config);

/// Likelihood for every type at once (the history kernel is evaluated once per reference).
std::vector< double > ckde_likelihoods(std::span< const double > h, const SampleBank& bank, const KernelConfig& config);

/// Scale vector of 1/σ per feature over all stored references (σ = 0 maps to 1).
std::vector< double > standardizing_scale(const SampleBank& bank);

struct BeliefState {
   std::vector< double > prior;
   std::vector< double > probs;
   std::vector< double > log_likelihood;  ///< Σ log L_θ over consumed observations
   std::size_t observations = 0;
   std::size_t stagnations = 0;  ///< observations skipped because every likelihood underflowed
   bool stagnated = false;       ///< the most recent update was skipped

   /// Uniform prior; every type has positive mass.
   static BeliefState uniform(int num_types);
   /// Explicit prior; throws ValidationError unless it is a distribution.
   static BeliefState from_prior(std::vector< double > prior);
};

/// Adds log L_θ(obs) to each type and renormalises with log-sum-exp.
/// When every likelihood is zero the previous posterior is kept and flagged.
BeliefState posterior_update(const BeliefState& state,
                             std::span< const double > observation,
                             const SampleBank& bank,
                             const KernelConfig& config);

/// One-shot posterior: prior × Π_o L_θ(o), normalised.
std::vector< double > posterior_batch(std::span< const double > prior,
                                      std::span< const HistoryFeature > observations,
                                      const SampleBank& bank,
                                      const KernelConfig& config);

/// θ drawn with probability equal to its posterior mass.
TypeId sample_type(const BeliefState& state, Rng& rng);

// ---------------------------------------------------------------------------
// Scripted rollouts that generate reference points and competitor observations.

/// One hand between the scripted player of `type` sitting in `seat` and the
/// neutral probe player. Chance is sampled from the rules.
History simulate_hand(const GameRules& rules, TypeId type, PlayerId seat, Rng& rng);

/// Features of one hand played by the scripted `type` from a uniformly drawn seat.
HistoryFeature scripted_observation(const GameRules& rules, TypeId type, Rng& rng);

/// Adds `per_type` rollouts of every type to the reference queues.
void populate_references(const GameRules& rules, SampleBank& bank, std::size_t per_type, Rng& rng);

}  // namespace bcfr
