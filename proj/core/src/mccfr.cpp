#include <vector>

#include "bcfr/error.hpp"
#include "bcfr/solvers.hpp"

namespace bcfr {

namespace {

const TypeId kOnly{0};

class ExternalSampler {
  public:
   ExternalSampler(const GameSpec& spec,
                   const StrategyProfile& sigma,
                   PlayerId traverser,
                   Sampler& sampler,
                   RegretTable& regrets,
                   StrategyTable* strategy,
                   int iteration)
       : spec_(spec), sigma_(sigma), traverser_(traverser), sampler_(sampler), regrets_(regrets),
         strategy_(strategy), iteration_(iteration)
   {
   }

   double walk(NodeId id)
   {
      const Node& node = spec_.node(id);
      if(node.kind == NodeKind::terminal) {
         return spec_.utility(node, traverser_, kOnly);
      }
      if(node.kind == NodeKind::chance) {
         std::vector< double > probs(static_cast< std::size_t >(node.num_children));
         for(int c = 0; c < node.num_children; ++c) {
            probs[static_cast< std::size_t >(c)] = spec_.incoming_chance(node.first_child + c);
         }
         return walk(node.first_child + static_cast< NodeId >(sampler_.pick(probs)));
      }
      const auto sigma = sigma_.at(kOnly, node.infoset);
      if(node.player != traverser_) {
         if(strategy_) {
            strategy_->add_strategy_weight(kOnly, node.infoset, sigma, 1.0, iteration_);
         }
         return walk(node.first_child + static_cast< NodeId >(sampler_.pick(sigma)));
      }
      std::vector< double > values(static_cast< std::size_t >(node.num_children));
      double v = 0.0;
      for(int a = 0; a < node.num_children; ++a) {
         values[static_cast< std::size_t >(a)] = walk(node.first_child + a);
         v += sigma[static_cast< std::size_t >(a)] * values[static_cast< std::size_t >(a)];
      }
      for(auto& x : values) {
         x -= v;
      }
      regrets_.accumulate(kOnly, node.infoset, values, 1.0);
      return v;
   }

  private:
   const GameSpec& spec_;
   const StrategyProfile& sigma_;
   PlayerId traverser_;
   Sampler& sampler_;
   RegretTable& regrets_;
   StrategyTable* strategy_;
   int iteration_;
};

}  // namespace

double mccfr_external_traverse(const GameSpec& spec,
                               const StrategyProfile& sigma,
                               PlayerId traverser,
                               Sampler& sampler,
                               RegretTable& regrets,
                               StrategyTable* strategy,
                               int iteration)
{
   if(! sigma.type_free() || regrets.num_types() != 1) {
      throw ConfigError("mccfr: needs a single-type game");
   }
   ExternalSampler walker(spec, sigma, traverser, sampler, regrets, strategy, iteration);
   return walker.walk(spec.root());
}

void mccfr_external_iterate(SolverState& state, const GameSpec& spec, const SolverConfig& config)
{
   if(spec.num_types() != 1) {
      throw ConfigError("mccfr: needs a single-type game (collapse the type model first)");
   }
   const int t = static_cast< int >(state.iteration + 1);
   RngSampler sampler(state.rng);
   for(int p = 0; p < 2; ++p) {
      for(int k = 0; k < config.traversals; ++k) {
         const StrategyProfile sigma = current_profile(spec, state.regrets);
         mccfr_external_traverse(spec, sigma, PlayerId{p}, sampler, state.regrets, &state.strategy, t);
      }
   }
   ++state.iteration;
}

}  // namespace bcfr
