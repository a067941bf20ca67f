#include "bcfr/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "bcfr/error.hpp"

namespace bcfr {

namespace {

/// Node values for one type once the responder's decisions are fixed.
class Backup {
  public:
   Backup(const GameSpec& spec, const StrategyProfile& opponent, PlayerId player, TypeId type, const std::vector< int >& choice)
       : spec_(spec), opponent_(opponent), player_(player), type_(type), choice_(choice),
         value_(spec.num_nodes(), 0.0), done_(spec.num_nodes(), 0)
   {
   }

   double value(NodeId id)
   {
      const auto k = static_cast< std::size_t >(id);
      if(done_[k]) {
         return value_[k];
      }
      const Node& n = spec_.node(id);
      double v = 0.0;
      if(n.kind == NodeKind::terminal) {
         v = spec_.utility(n, player_, type_);
      }
      else if(n.kind == NodeKind::chance) {
         for(int c = 0; c < n.num_children; ++c) {
            v += spec_.incoming_chance(n.first_child + c) * value(n.first_child + c);
         }
      }
      else if(n.player == player_) {
         const int a = choice_[static_cast< std::size_t >(n.infoset)];
         if(a < 0) {
            throw StructuralError("best_response: infoset visited before its successors were decided");
         }
         v = value(n.first_child + a);
      }
      else {
         const auto sigma = opponent_.at(type_, n.infoset);
         for(int c = 0; c < n.num_children; ++c) {
            if(sigma[static_cast< std::size_t >(c)] != 0.0) {
               v += sigma[static_cast< std::size_t >(c)] * value(n.first_child + c);
            }
         }
      }
      value_[k] = v;
      done_[k] = 1;
      return v;
   }

  private:
   const GameSpec& spec_;
   const StrategyProfile& opponent_;
   PlayerId player_;
   TypeId type_;
   const std::vector< int >& choice_;
   std::vector< double > value_;
   std::vector< char > done_;
};

std::vector< double > reach_of_others(const GameSpec& spec, const StrategyProfile& profile, TypeId type, PlayerId player)
{
   std::vector< double > reach(spec.num_nodes(), 0.0);
   reach[0] = 1.0;
   for(std::size_t idx = 0; idx < spec.num_nodes(); ++idx) {
      const Node& n = spec.node(static_cast< NodeId >(idx));
      for(int k = 0; k < n.num_children; ++k) {
         const NodeId c = n.first_child + k;
         double w = 1.0;
         if(n.kind == NodeKind::chance) {
            w = spec.incoming_chance(c);
         }
         else if(n.player != player) {
            w = profile.at(type, n.infoset)[static_cast< std::size_t >(k)];
         }
         reach[static_cast< std::size_t >(c)] = reach[idx] * w;
      }
   }
   return reach;
}

void check_coverage(const GameSpec& spec, const StrategyProfile& profile)
{
   if(profile.raw().empty() || profile.layout().total != spec.layout().total
      || profile.layout().num_infosets() != spec.num_infosets()) {
      throw ValidationError("profile does not cover the game's infosets");
   }
   if(! profile.type_free() && profile.num_types() != spec.num_types()) {
      throw ValidationError("profile type count does not match the game");
   }
}

}  // namespace

BestResponse best_response(const GameSpec& spec,
                           const StrategyProfile& opponent,
                           std::span< const double > belief,
                           PlayerId player,
                           TypeKnowledge knowledge)
{
   validate_belief(spec, belief);
   check_coverage(spec, opponent);

   std::vector< int > order(spec.infosets_of(player).begin(), spec.infosets_of(player).end());
   std::vector< int > min_depth(spec.num_infosets(), 0);
   for(int i : order) {
      int d = spec.max_depth() + 1;
      for(NodeId h : spec.infoset(i).nodes) {
         d = std::min(d, spec.node(h).depth);
      }
      min_depth[static_cast< std::size_t >(i)] = d;
   }
   std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      return min_depth[static_cast< std::size_t >(a)] > min_depth[static_cast< std::size_t >(b)];
   });

   const int types = spec.num_types();
   const int slots = knowledge == TypeKnowledge::aware ? types : 1;
   std::vector< std::vector< int > > choice(static_cast< std::size_t >(slots), std::vector< int >(spec.num_infosets(), -1));
   std::vector< std::vector< double > > reach(static_cast< std::size_t >(types));
   std::vector< std::unique_ptr< Backup > > backup(static_cast< std::size_t >(types));
   for(int t = 0; t < types; ++t) {
      if(belief[static_cast< std::size_t >(t)] == 0.0) {
         continue;
      }
      reach[static_cast< std::size_t >(t)] = reach_of_others(spec, opponent, TypeId{t}, player);
      const auto& ch = choice[static_cast< std::size_t >(knowledge == TypeKnowledge::aware ? t : 0)];
      backup[static_cast< std::size_t >(t)] = std::make_unique< Backup >(spec, opponent, player, TypeId{t}, ch);
   }

   for(int i : order) {
      const InfosetInfo& info = spec.infoset(i);
      const std::size_t na = info.actions.size();
      const auto decide = [&](std::span< const int > ts, std::vector< int >& ch) {
         std::vector< double > q(na, 0.0);
         for(int t : ts) {
            const double bt = knowledge == TypeKnowledge::blind ? belief[static_cast< std::size_t >(t)] : 1.0;
            auto& bk = *backup[static_cast< std::size_t >(t)];
            const auto& r = reach[static_cast< std::size_t >(t)];
            for(NodeId h : info.nodes) {
               const double w = r[static_cast< std::size_t >(h)];
               if(w == 0.0) {
                  continue;
               }
               const Node& n = spec.node(h);
               for(std::size_t a = 0; a < na; ++a) {
                  q[a] += bt * w * bk.value(n.first_child + static_cast< int >(a));
               }
            }
         }
         int best = 0;
         for(std::size_t a = 1; a < na; ++a) {
            if(q[a] > q[static_cast< std::size_t >(best)]) {
               best = static_cast< int >(a);
            }
         }
         ch[static_cast< std::size_t >(i)] = best;
      };
      if(knowledge == TypeKnowledge::aware) {
         for(int t = 0; t < types; ++t) {
            if(! backup[static_cast< std::size_t >(t)]) {
               continue;
            }
            const int one[] = {t};
            decide(one, choice[static_cast< std::size_t >(t)]);
         }
      }
      else {
         std::vector< int > ts;
         for(int t = 0; t < types; ++t) {
            if(backup[static_cast< std::size_t >(t)]) {
               ts.push_back(t);
            }
         }
         decide(ts, choice[0]);
      }
   }

   BestResponse out;
   out.strategy = StrategyProfile(spec, slots);
   for(int s = 0; s < slots; ++s) {
      for(int i : spec.infosets_of(player)) {
         auto v = out.strategy.mutable_at(TypeId{s}, i);
         std::fill(v.begin(), v.end(), 0.0);
         // Types outside the belief's support keep the first action.
         v[static_cast< std::size_t >(std::max(0, choice[static_cast< std::size_t >(s)][static_cast< std::size_t >(i)]))] = 1.0;
      }
   }
   for(int t = 0; t < types; ++t) {
      if(belief[static_cast< std::size_t >(t)] != 0.0) {
         out.value += belief[static_cast< std::size_t >(t)] * backup[static_cast< std::size_t >(t)]->value(spec.root());
      }
   }
   return out;
}

ExploitabilityReport exploitability(const GameSpec& spec,
                                    const StrategyProfile& profile,
                                    std::span< const double > belief,
                                    TypeKnowledge knowledge,
                                    double big_blind)
{
   if(spec.num_players() != 2 || ! spec.zero_sum()) {
      throw UnsupportedModeError("exploitability requires a two-player zero-sum game");
   }
   ExploitabilityReport r;
   r.big_blind = big_blind;
   r.belief.assign(belief.begin(), belief.end());
   const auto values = expected_value(spec, profile, belief);
   for(int p = 0; p < 2; ++p) {
      r.best_response_value[static_cast< std::size_t >(p)] = best_response(spec, profile, belief, PlayerId{p}, knowledge).value;
      r.profile_value[static_cast< std::size_t >(p)] = values[static_cast< std::size_t >(p)];
      r.exploitability += r.best_response_value[static_cast< std::size_t >(p)] - values[static_cast< std::size_t >(p)];
   }
   r.mbb_per_game = to_mbbg(r.exploitability, big_blind);
   return r;
}

double to_mbbg(double epsilon, double big_blind)
{
   if(! (big_blind > 0.0)) {
      throw ValidationError("to_mbbg: big blind must be positive");
   }
   return epsilon / big_blind * 1000.0;
}

double posterior_l1_error(std::span< const double > belief, std::span< const double > truth)
{
   if(belief.size() != truth.size()) {
      throw ValidationError("posterior_l1_error: dimension mismatch");
   }
   double e = 0.0;
   for(std::size_t k = 0; k < belief.size(); ++k) {
      e += std::abs(belief[k] - truth[k]);
   }
   return e;
}

std::vector< double > point_mass(int num_types, TypeId type)
{
   if(type.index < 0 || type.index >= num_types) {
      throw ValidationError("point_mass: type out of range");
   }
   std::vector< double > v(static_cast< std::size_t >(num_types), 0.0);
   v[static_cast< std::size_t >(type.index)] = 1.0;
   return v;
}

}  // namespace bcfr
