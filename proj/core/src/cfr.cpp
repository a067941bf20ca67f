#include <array>
#include <vector>

#include "bcfr/error.hpp"
#include "bcfr/solvers.hpp"

// Classical full-tree CFR and CFR+ on a single-type game. Kept independent of
// the Bayesian traversal so the single-type reduction can be checked against it.

namespace bcfr {

namespace {

const TypeId kOnly{0};

class CfrWalker {
  public:
   CfrWalker(const GameSpec& spec, const StrategyProfile& sigma)
       : spec_(spec), sigma_(sigma), layout_(spec.layout()), regret_(layout_.total, 0.0),
         reach_(spec.num_infosets(), 0.0)
   {
      std::size_t width = 1;
      for(std::size_t i = 0; i < layout_.num_infosets(); ++i) {
         width = std::max(width, layout_.num_actions[i]);
      }
      width_ = width;
      values_.assign(static_cast< std::size_t >(spec.max_depth() + 1) * width_ * 2, 0.0);
      single_.assign(static_cast< std::size_t >(spec.max_depth() + 1) * width_, 0.0);
   }

   /// Both players' values; fills regret increments for both players.
   std::array< double, 2 > both(NodeId id, double r0, double r1, double rc)
   {
      const Node& node = spec_.node(id);
      if(node.kind == NodeKind::terminal) {
         return {spec_.utility(node, PlayerId{0}, kOnly), spec_.utility(node, PlayerId{1}, kOnly)};
      }
      if(node.kind == NodeKind::chance) {
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
      const auto sigma = sigma_.at(kOnly, node.infoset);
      double* child = &values_[static_cast< std::size_t >(node.depth) * width_ * 2];
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

   /// Value for `traverser`; fills regret increments for that player only.
   double single(NodeId id, int traverser, double own, double others)
   {
      const Node& node = spec_.node(id);
      if(node.kind == NodeKind::terminal) {
         return spec_.utility(node, PlayerId{traverser}, kOnly);
      }
      if(node.kind == NodeKind::chance) {
         double v = 0.0;
         for(int c = 0; c < node.num_children; ++c) {
            const NodeId child = node.first_child + c;
            const double p = spec_.incoming_chance(child);
            v += p * single(child, traverser, own, others * p);
         }
         return v;
      }
      const auto sigma = sigma_.at(kOnly, node.infoset);
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
   const GameSpec& spec_;
   const StrategyProfile& sigma_;
   const TableLayout& layout_;
   std::vector< double > regret_;
   std::vector< double > reach_;
   std::vector< double > values_;
   std::vector< double > single_;
   std::size_t width_ = 1;
};

void require_single_type(const GameSpec& spec, const SolverState& state, const char* who)
{
   if(spec.num_types() != 1 || state.regrets.num_types() != 1) {
      throw ConfigError(std::string(who) + ": needs a single-type game (collapse the type model first)");
   }
}

void alternating_iteration(SolverState& state, const GameSpec& spec)
{
   const int t = static_cast< int >(state.iteration + 1);
   for(int p = 0; p < 2; ++p) {
      const StrategyProfile sigma = current_profile(spec, state.regrets);
      CfrWalker walker(spec, sigma);
      walker.single(spec.root(), p, 1.0, 1.0);
      for(int i : spec.infosets_of(PlayerId{p})) {
         state.regrets.accumulate(kOnly, i, walker.regret(i), 1.0);
         state.strategy.add_strategy_weight(kOnly, i, sigma.at(kOnly, i), walker.reach(i), t);
      }
   }
   ++state.iteration;
}

}  // namespace

void cfr_iterate(SolverState& state, const GameSpec& spec)
{
   cfr_iterate(state, spec, UpdateSchedule::simultaneous);
}

void cfr_iterate(SolverState& state, const GameSpec& spec, UpdateSchedule schedule)
{
   require_single_type(spec, state, "cfr");
   if(state.regrets.mode() != RegretMode::vanilla) {
      throw ModeMismatchError("cfr: needs a vanilla regret table");
   }
   if(schedule == UpdateSchedule::alternating) {
      alternating_iteration(state, spec);
      return;
   }
   const int t = static_cast< int >(state.iteration + 1);
   const StrategyProfile sigma = current_profile(spec, state.regrets);
   CfrWalker walker(spec, sigma);
   walker.both(spec.root(), 1.0, 1.0, 1.0);
   for(int i = 0; i < static_cast< int >(spec.num_infosets()); ++i) {
      state.regrets.accumulate(kOnly, i, walker.regret(i), 1.0);
      state.strategy.add_strategy_weight(kOnly, i, sigma.at(kOnly, i), walker.reach(i), t);
   }
   ++state.iteration;
}

void cfr_plus_iterate(SolverState& state, const GameSpec& spec)
{
   require_single_type(spec, state, "cfr+");
   if(state.regrets.mode() != RegretMode::plus) {
      throw ModeMismatchError("cfr+: needs a plus regret table");
   }
   alternating_iteration(state, spec);
}

}  // namespace bcfr
