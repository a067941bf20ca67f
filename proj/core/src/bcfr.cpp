#include <array>
#include <vector>

#include "bcfr/error.hpp"
#include "bcfr/solvers.hpp"

namespace bcfr {

namespace {

/// Full-tree traversal of one type's game against the cached current strategy.
///
/// Collects the instantaneous counterfactual regret r^t_θ(I,·) summed over the
/// infoset's histories, and the owner's reach of every visited infoset.
class BayesianWalker {
  public:
   BayesianWalker(const GameSpec& spec, const StrategyProfile& sigma, TypeId type, Rng* chance_rng)
       : spec_(spec), sigma_(sigma), type_(type), layout_(spec.layout()), chance_rng_(chance_rng),
         regret_(layout_.total, 0.0), reach_(spec.num_infosets(), 0.0)
   {
      for(std::size_t i = 0; i < layout_.num_infosets(); ++i) {
         width_ = std::max(width_, layout_.num_actions[i]);
      }
      const auto depth = static_cast< std::size_t >(spec.max_depth() + 1);
      pair_.assign(depth * width_ * 2, 0.0);
      single_.assign(depth * width_, 0.0);
   }

   std::array< double, 2 > both(NodeId id, double r0, double r1, double rc)
   {
      check_depth(id);
      const Node& node = spec_.node(id);
      if(node.kind == NodeKind::terminal) {
         return {spec_.utility(node, PlayerId{0}, type_), spec_.utility(node, PlayerId{1}, type_)};
      }
      if(node.kind == NodeKind::chance) {
         if(chance_rng_) {
            return both(sample_chance(node), r0, r1, rc);
         }
         std::array< double, 2 > v{0.0, 0.0};
         for(int c = 0; c < node.num_children; ++c) {
            const NodeId child = node.first_child + c;
            const double p = spec_.incoming_chance(child);
            const auto cv = both(child, r0, r1, rc * p);
            v[0] += p * cv[0];
            v[1] += p * cv[1];
         }
         return v;
      }
      const int p = node.player.index;
      const auto sigma = sigma_.at(type_, node.infoset);
      double* child = &pair_[static_cast< std::size_t >(node.depth) * width_ * 2];
      std::array< double, 2 > v{0.0, 0.0};
      for(int a = 0; a < node.num_children; ++a) {
         const double s = sigma[static_cast< std::size_t >(a)];
         const auto cv = both(node.first_child + a, p == 0 ? r0 * s : r0, p == 1 ? r1 * s : r1, rc);
         child[2 * a] = cv[0];
         child[2 * a + 1] = cv[1];
         v[0] += s * cv[0];
         v[1] += s * cv[1];
      }
      const double opponent = rc * (p == 0 ? r1 : r0);
      const std::size_t off = layout_.offset[static_cast< std::size_t >(node.infoset)];
      for(int a = 0; a < node.num_children; ++a) {
         regret_[off + static_cast< std::size_t >(a)] += opponent * (child[2 * a + p] - v[static_cast< std::size_t >(p)]);
      }
      reach_[static_cast< std::size_t >(node.infoset)] = p == 0 ? r0 : r1;
      return v;
   }

   double single(NodeId id, int traverser, double own, double others)
   {
      check_depth(id);
      const Node& node = spec_.node(id);
      if(node.kind == NodeKind::terminal) {
         return spec_.utility(node, PlayerId{traverser}, type_);
      }
      if(node.kind == NodeKind::chance) {
         if(chance_rng_) {
            return single(sample_chance(node), traverser, own, others);
         }
         double v = 0.0;
         for(int c = 0; c < node.num_children; ++c) {
            const NodeId child = node.first_child + c;
            const double p = spec_.incoming_chance(child);
            v += p * single(child, traverser, own, others * p);
         }
         return v;
      }
      const auto sigma = sigma_.at(type_, node.infoset);
      if(node.player.index != traverser) {
         double v = 0.0;
         for(int a = 0; a < node.num_children; ++a) {
            const double s = sigma[static_cast< std::size_t >(a)];
            v += s * single(node.first_child + a, traverser, own, others * s);
         }
         return v;
      }
      double* child = &single_[static_cast< std::size_t >(node.depth) * width_];
      double v = 0.0;
      for(int a = 0; a < node.num_children; ++a) {
         const double s = sigma[static_cast< std::size_t >(a)];
         child[a] = single(node.first_child + a, traverser, own * s, others);
         v += s * child[a];
      }
      const std::size_t off = layout_.offset[static_cast< std::size_t >(node.infoset)];
      for(int a = 0; a < node.num_children; ++a) {
         regret_[off + static_cast< std::size_t >(a)] += others * (child[a] - v);
      }
      reach_[static_cast< std::size_t >(node.infoset)] = own;
      return v;
   }

   std::span< const double > regret(int infoset) const
   {
      return {regret_.data() + layout_.offset[static_cast< std::size_t >(infoset)],
              layout_.num_actions[static_cast< std::size_t >(infoset)]};
   }
   double reach(int infoset) const { return reach_[static_cast< std::size_t >(infoset)]; }

  private:
   void check_depth(NodeId id) const
   {
      if(spec_.node(id).depth > spec_.max_depth()) {
         throw StructuralError("bcfr traversal deeper than the game tree");
      }
   }

   NodeId sample_chance(const Node& node)
   {
      probs_.resize(static_cast< std::size_t >(node.num_children));
      for(int c = 0; c < node.num_children; ++c) {
         probs_[static_cast< std::size_t >(c)] = spec_.incoming_chance(node.first_child + c);
      }
      return node.first_child + static_cast< NodeId >(chance_rng_->categorical(probs_));
   }

   const GameSpec& spec_;
   const StrategyProfile& sigma_;
   TypeId type_;
   const TableLayout& layout_;
   Rng* chance_rng_;
   std::vector< double > regret_;
   std::vector< double > reach_;
   std::vector< double > pair_;
   std::vector< double > single_;
   std::vector< double > probs_;
   std::size_t width_ = 1;
};

void require_bayesian_tables(const GameSpec& spec, const SolverState& state, RegretMode mode, const char* who)
{
   if(state.regrets.num_types() != spec.num_types() || state.strategy.num_types() != spec.num_types()) {
      throw ConfigError(std::string(who) + ": tables do not match the game's type count");
   }
   if(state.regrets.mode() != mode) {
      throw ModeMismatchError(std::string(who) + ": regret table has the wrong mode");
   }
}

/// Types traversed this iteration with their regret weights Pr(θ | O^t).
std::vector< std::pair< TypeId, double > > iteration_types(SolverState& state, const SolverConfig& config)
{
   std::vector< std::pair< TypeId, double > > out;
   const auto& probs = state.belief.probs;
   if(config.posterior_mode == PosteriorMode::exact_sum) {
      for(int t = 0; t < static_cast< int >(probs.size()); ++t) {
         if(probs[static_cast< std::size_t >(t)] > 0.0) {
            out.emplace_back(TypeId{t}, probs[static_cast< std::size_t >(t)]);
         }
      }
      return out;
   }
   for(int k = 0; k < config.traversals; ++k) {
      const TypeId t = sample_type(state.belief, state.rng);
      out.emplace_back(t, probs[static_cast< std::size_t >(t.index)]);
   }
   return out;
}

/// One terminal history of self-play under σ_θ, added to Q_θ.
void add_online_reference(SolverState& state, const GameSpec& spec, const StrategyProfile& sigma, TypeId type)
{
   NodeId id = spec.root();
   std::vector< double > probs;
   while(spec.node(id).kind != NodeKind::terminal) {
      const Node& node = spec.node(id);
      probs.resize(static_cast< std::size_t >(node.num_children));
      for(int c = 0; c < node.num_children; ++c) {
         probs[static_cast< std::size_t >(c)] = node.kind == NodeKind::chance
                                                    ? spec.incoming_chance(node.first_child + c)
                                                    : sigma.at(type, node.infoset)[static_cast< std::size_t >(c)];
      }
      id = node.first_child + static_cast< NodeId >(state.rng.categorical(probs));
   }
   state.bank->add_reference(spec.rules().history_features(spec.history_of(id)), type);
}

void finish_iteration(SolverState& state,
                      const GameSpec& spec,
                      const SolverConfig& config,
                      const StrategyProfile& sigma,
                      const std::vector< std::pair< TypeId, double > >& types)
{
   if(config.belief.online_references && state.bank && spec.num_types() > 1) {
      for(const auto& [type, weight] : types) {
         add_online_reference(state, spec, sigma, type);
      }
   }
   observe_competitor(state, spec, config);
   ++state.iteration;
}

void alternating_iteration(SolverState& state, const GameSpec& spec, const SolverConfig& config)
{
   const int t = static_cast< int >(state.iteration + 1);
   const auto types = iteration_types(state, config);
   StrategyProfile sigma;
   for(int p = 0; p < 2; ++p) {
      sigma = current_profile(spec, state.regrets);
      for(const auto& [type, weight] : types) {
         BayesianWalker walker(spec, sigma, type, config.sample_chance ? &state.rng : nullptr);
         walker.single(spec.root(), p, 1.0, 1.0);
         for(int i : spec.infosets_of(PlayerId{p})) {
            state.regrets.accumulate(type, i, walker.regret(i), weight);
            state.strategy.add_strategy_weight(type, i, sigma.at(type, i), walker.reach(i), t);
         }
      }
   }
   finish_iteration(state, spec, config, sigma, types);
}

}  // namespace

void bcfr_iterate(SolverState& state, const GameSpec& spec, const SolverConfig& config)
{
   require_bayesian_tables(spec, state, RegretMode::vanilla, "bcfr");
   if(config.update == UpdateSchedule::alternating) {
      alternating_iteration(state, spec, config);
      return;
   }
   const int t = static_cast< int >(state.iteration + 1);
   const StrategyProfile sigma = current_profile(spec, state.regrets);
   const auto types = iteration_types(state, config);
   for(const auto& [type, weight] : types) {
      BayesianWalker walker(spec, sigma, type, config.sample_chance ? &state.rng : nullptr);
      walker.both(spec.root(), 1.0, 1.0, 1.0);
      for(int i = 0; i < static_cast< int >(spec.num_infosets()); ++i) {
         state.regrets.accumulate(type, i, walker.regret(i), weight);
         state.strategy.add_strategy_weight(type, i, sigma.at(type, i), walker.reach(i), t);
      }
   }
   finish_iteration(state, spec, config, sigma, types);
}

void bcfr_plus_iterate(SolverState& state, const GameSpec& spec, const SolverConfig& config)
{
   require_bayesian_tables(spec, state, RegretMode::plus, "bcfr+");
   alternating_iteration(state, spec, config);
}

}  // namespace bcfr
