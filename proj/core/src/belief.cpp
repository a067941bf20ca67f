#include "bcfr/belief.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "bcfr/error.hpp"

namespace bcfr {

void KernelConfig::validate() const
{
   if(! (w > 0.0) || ! (w_prime > 0.0) || ! std::isfinite(w) || ! std::isfinite(w_prime)) {
      throw ValidationError("kernel bandwidths must be positive and finite");
   }
   for(double s : scale) {
      if(! std::isfinite(s) || s < 0.0) {
         throw ValidationError("kernel feature scale must be finite and non-negative");
      }
   }
}

double kernel_eval(const KernelConfig& config, double distance, double bandwidth)
{
   if(! std::isfinite(distance)) {
      throw ValidationError("kernel_eval: non-finite distance");
   }
   if(! (bandwidth > 0.0)) {
      throw ValidationError("kernel_eval: bandwidth must be positive");
   }
   switch(config.shape) {
      case KernelShape::gaussian: {
         const double u = distance / bandwidth;
         return std::exp(-0.5 * u * u) * (0.5 * std::numbers::inv_sqrtpi * std::numbers::sqrt2);
      }
   }
   return 0.0;
}

double history_distance(std::span< const double > a, std::span< const double > b, const KernelConfig& config)
{
   if(a.size() != b.size()) {
      throw ValidationError("history_distance: feature lengths differ");
   }
   if(! config.scale.empty() && config.scale.size() != a.size()) {
      throw ValidationError("history_distance: scale length differs from the features");
   }
   double sum = 0.0;
   for(std::size_t k = 0; k < a.size(); ++k) {
      const double s = config.scale.empty() ? 1.0 : config.scale[k];
      const double d = s * (a[k] - b[k]);
      sum += d * d;
   }
   return std::sqrt(sum);
}

double type_distance(TypeId a, TypeId b)
{
   return a == b ? 0.0 : 1.0;
}

// ---------------------------------------------------------------------------

SampleBank::SampleBank(int num_types, std::size_t reference_capacity, std::size_t observation_capacity)
    : reference_capacity_(reference_capacity), observation_capacity_(observation_capacity),
      references_(static_cast< std::size_t >(num_types))
{
   if(num_types < 1 || reference_capacity == 0 || observation_capacity == 0) {
      throw ConfigError("SampleBank: capacities and type count must be positive");
   }
}

void SampleBank::add_reference(HistoryFeature feature, TypeId type)
{
   if(type.index < 0 || type.index >= num_types()) {
      throw ValidationError("SampleBank: type out of range");
   }
   auto& q = references_[static_cast< std::size_t >(type.index)];
   if(q.size() == reference_capacity_) {
      q.pop_front();
   }
   q.push_back(std::move(feature));
   ++reference_version_;
}

void SampleBank::add_observation(HistoryFeature feature)
{
   if(observations_.size() == observation_capacity_) {
      observations_.pop_front();
   }
   observations_.push_back(std::move(feature));
}

const std::deque< HistoryFeature >& SampleBank::references(TypeId type) const
{
   return references_.at(static_cast< std::size_t >(type.index));
}

std::size_t SampleBank::num_references() const
{
   std::size_t n = 0;
   for(const auto& q : references_) {
      n += q.size();
   }
   return n;
}

namespace {

/// Likelihoods for every type in [first, last).
std::vector< double > ckde_range(std::span< const double > h, const SampleBank& bank, const KernelConfig& config, int first, int last)
{
   config.validate();
   if(bank.num_references() == 0) {
      throw EstimatorUnavailableError("ckde: the sample bank holds no reference points");
   }
   const int n = bank.num_types();
   std::vector< double > history_kernel(static_cast< std::size_t >(n), 0.0);
   std::vector< double > counts(static_cast< std::size_t >(n), 0.0);
   for(int tau = 0; tau < n; ++tau) {
      double s = 0.0;
      for(const auto& ref : bank.references(TypeId{tau})) {
         s += kernel_eval(config, history_distance(h, ref, config), config.w);
      }
      history_kernel[static_cast< std::size_t >(tau)] = s;
      counts[static_cast< std::size_t >(tau)] = static_cast< double >(bank.references(TypeId{tau}).size());
   }
   std::vector< double > out;
   for(int theta = first; theta < last; ++theta) {
      double num = 0.0;
      double den = 0.0;
      for(int tau = 0; tau < n; ++tau) {
         const double kt = kernel_eval(config, type_distance(TypeId{theta}, TypeId{tau}), config.w_prime);
         num += kt * history_kernel[static_cast< std::size_t >(tau)];
         den += kt * counts[static_cast< std::size_t >(tau)];
      }
      if(den < 1e-300) {
         throw DegenerateKernelError("ckde: type-kernel normaliser underflowed");
      }
      out.push_back(num / den);
   }
   return out;
}

}  // namespace

std::vector< double > ckde_likelihoods(std::span< const double > h, const SampleBank& bank, const KernelConfig& config)
{
   return ckde_range(h, bank, config, 0, bank.num_types());
}

double ckde_likelihood(std::span< const double > h, TypeId type, const SampleBank& bank, const KernelConfig& config)
{
   if(type.index < 0 || type.index >= bank.num_types()) {
      throw ValidationError("ckde: type out of range");
   }
   return ckde_range(h, bank, config, type.index, type.index + 1).front();
}

std::vector< double > standardizing_scale(const SampleBank& bank)
{
   std::size_t dim = 0;
   double count = 0.0;
   for(int t = 0; t < bank.num_types(); ++t) {
      for(const auto& r : bank.references(TypeId{t})) {
         dim = r.size();
         count += 1.0;
      }
   }
   std::vector< double > mean(dim, 0.0);
   std::vector< double > sq(dim, 0.0);
   for(int t = 0; t < bank.num_types(); ++t) {
      for(const auto& r : bank.references(TypeId{t})) {
         for(std::size_t k = 0; k < dim; ++k) {
            mean[k] += r[k];
         }
      }
   }
   for(auto& m : mean) {
      m /= std::max(count, 1.0);
   }
   for(int t = 0; t < bank.num_types(); ++t) {
      for(const auto& r : bank.references(TypeId{t})) {
         for(std::size_t k = 0; k < dim; ++k) {
            sq[k] += (r[k] - mean[k]) * (r[k] - mean[k]);
         }
      }
   }
   std::vector< double > scale(dim, 1.0);
   for(std::size_t k = 0; k < dim; ++k) {
      const double sd = std::sqrt(sq[k] / std::max(count, 1.0));
      scale[k] = sd > 1e-12 ? 1.0 / sd : 1.0;
   }
   return scale;
}

// ---------------------------------------------------------------------------

namespace {

void check_distribution(std::span< const double > v, double tol, const char* what)
{
   double sum = 0.0;
   for(double x : v) {
      if(! (x >= 0.0)) {
         throw ValidationError(std::string(what) + ": negative or NaN entry");
      }
      sum += x;
   }
   if(v.empty() || std::abs(sum - 1.0) > tol) {
      throw ValidationError(std::string(what) + ": not normalised");
   }
}

/// exp-normalise log weights; entries at −∞ get exactly zero.
std::vector< double > softmax(std::span< const double > logw)
{
   double mx = -std::numeric_limits< double >::infinity();
   for(double l : logw) {
      mx = std::max(mx, l);
   }
   std::vector< double > p(logw.size(), 0.0);
   double sum = 0.0;
   for(std::size_t k = 0; k < logw.size(); ++k) {
      p[k] = std::isinf(logw[k]) ? 0.0 : std::exp(logw[k] - mx);
      sum += p[k];
   }
   for(auto& x : p) {
      x /= sum;
   }
   return p;
}

double safe_log(double x)
{
   return x > 0.0 ? std::log(x) : -std::numeric_limits< double >::infinity();
}

}  // namespace

BeliefState BeliefState::uniform(int num_types)
{
   if(num_types < 1) {
      throw ValidationError("BeliefState: needs at least one type");
   }
   BeliefState s = from_prior(std::vector< double >(static_cast< std::size_t >(num_types), 1.0 / num_types));
   for(double p : s.prior) {
      if(! (p > 0.0)) {
         throw ValidationError("BeliefState: the uniform prior must give every type positive mass");
      }
   }
   return s;
}

BeliefState BeliefState::from_prior(std::vector< double > prior)
{
   check_distribution(prior, 1e-12, "BeliefState prior");
   BeliefState s;
   s.probs = prior;
   s.prior = std::move(prior);
   s.log_likelihood.assign(s.prior.size(), 0.0);
   return s;
}

BeliefState posterior_update(const BeliefState& state,
                             std::span< const double > observation,
                             const SampleBank& bank,
                             const KernelConfig& config)
{
   check_distribution(state.probs, 1e-12, "posterior_update");
   const auto lik = ckde_likelihoods(observation, bank, config);
   if(lik.size() != state.probs.size()) {
      throw ValidationError("posterior_update: bank and belief disagree on the type count");
   }
   BeliefState next = state;
   std::vector< double > logpost(lik.size());
   bool any = false;
   for(std::size_t k = 0; k < lik.size(); ++k) {
      next.log_likelihood[k] += safe_log(lik[k]);
      logpost[k] = safe_log(state.prior[k]) + next.log_likelihood[k];
      any = any || std::isfinite(logpost[k]);
   }
   if(! any) {
      BeliefState kept = state;
      kept.stagnated = true;
      ++kept.stagnations;
      return kept;
   }
   next.probs = softmax(logpost);
   next.stagnated = false;
   ++next.observations;
   return next;
}

std::vector< double > posterior_batch(std::span< const double > prior,
                                      std::span< const HistoryFeature > observations,
                                      const SampleBank& bank,
                                      const KernelConfig& config)
{
   check_distribution(prior, 1e-12, "posterior_batch prior");
   std::vector< std::vector< double > > per_obs;
   per_obs.reserve(observations.size());
   for(const auto& o : observations) {
      per_obs.push_back(ckde_likelihoods(o, bank, config));
   }
   std::vector< double > logpost(prior.size());
   for(std::size_t k = 0; k < prior.size(); ++k) {
      double l = safe_log(prior[k]);
      for(const auto& lik : per_obs) {
         l += safe_log(lik[k]);
      }
      logpost[k] = l;
   }
   return softmax(logpost);
}

TypeId sample_type(const BeliefState& state, Rng& rng)
{
   return TypeId{static_cast< int >(rng.categorical(state.probs))};
}

// ---------------------------------------------------------------------------

History simulate_hand(const GameRules& rules, TypeId type, PlayerId seat, Rng& rng)
{
   if(rules.feature_length() == 0) {
      throw UnsupportedModeError("simulate_hand: the game has no observation encoding");
   }
   History h;
   while(! rules.is_terminal(h)) {
      const PlayerId actor = rules.current_player(h);
      const auto actions = rules.legal_actions(h);
      std::vector< double > probs;
      if(actor.is_chance()) {
         probs = rules.chance_probabilities(h);
      } else {
         probs = rules.reference_policy(h, actor == seat ? std::optional< TypeId >{type} : std::nullopt);
         if(probs.size() != actions.size()) {
            throw UnsupportedModeError("simulate_hand: the game has no scripted players");
         }
      }
      h.push_back({actor, actions[rng.categorical(probs)].id});
   }
   return h;
}

HistoryFeature scripted_observation(const GameRules& rules, TypeId type, Rng& rng)
{
   const PlayerId seat{static_cast< int >(rng.uniform_index(static_cast< std::size_t >(rules.num_players())))};
   return rules.history_features(simulate_hand(rules, type, seat, rng));
}

void populate_references(const GameRules& rules, SampleBank& bank, std::size_t per_type, Rng& rng)
{
   if(bank.num_types() != rules.num_types()) {
      throw ValidationError("populate_references: bank and game disagree on the type count");
   }
   for(std::size_t k = 0; k < per_type; ++k) {
      for(int t = 0; t < rules.num_types(); ++t) {
         bank.add_reference(scripted_observation(rules, TypeId{t}, rng), TypeId{t});
      }
   }
}

}  // namespace bcfr
