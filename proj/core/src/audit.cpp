#include "bcfr/audit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bcfr/error.hpp"

namespace bcfr {

namespace {

/// Best pure deviation of one player against accumulated terminal weights c(z)
/// (the opponent-and-chance reach is already folded into c).
class DeviationOracle {
  public:
   DeviationOracle(const GameSpec& spec, PlayerId player) : spec_(spec), player_(player)
   {
      for(int i : spec.infosets_of(player)) {
         own_.push_back(i);
      }
      position_.assign(spec.num_infosets(), -1);
      for(std::size_t k = 0; k < own_.size(); ++k) {
         position_[static_cast< std::size_t >(own_[k])] = static_cast< int >(k);
      }
      double log2_count = 0.0;
      for(int i : own_) {
         log2_count += std::log2(static_cast< double >(spec.layout().num_actions[static_cast< std::size_t >(i)]));
      }
      log2_strategies_ = log2_count;
      constraints_.resize(spec.num_terminals());
      for(std::size_t id = 0; id < spec.num_nodes(); ++id) {
         const Node& z = spec.node(static_cast< NodeId >(id));
         if(z.kind != NodeKind::terminal) {
            continue;
         }
         auto& path = constraints_[static_cast< std::size_t >(z.terminal)];
         NodeId child = static_cast< NodeId >(id);
         while(spec.node(child).parent >= 0) {
            const Node& parent = spec.node(spec.node(child).parent);
            if(parent.kind == NodeKind::decision && parent.player == player) {
               path.emplace_back(position_[static_cast< std::size_t >(parent.infoset)], child - parent.first_child);
            }
            child = spec.node(child).parent;
         }
      }
   }

   double log2_strategies() const { return log2_strategies_; }

   /// max over pure strategies by exhaustive enumeration.
   double brute_force(std::span< const double > c) const
   {
      std::vector< int > choice(own_.size(), 0);
      double best = -std::numeric_limits< double >::infinity();
      while(true) {
         double v = 0.0;
         for(std::size_t z = 0; z < constraints_.size(); ++z) {
            bool consistent = true;
            for(const auto& [k, a] : constraints_[z]) {
               if(choice[static_cast< std::size_t >(k)] != a) {
                  consistent = false;
                  break;
               }
            }
            if(consistent) {
               v += c[z];
            }
         }
         best = std::max(best, v);
         std::size_t k = 0;
         for(; k < own_.size(); ++k) {
            const auto n = static_cast< int >(spec_.layout().num_actions[static_cast< std::size_t >(own_[k])]);
            if(++choice[k] < n) {
               break;
            }
            choice[k] = 0;
         }
         if(k == own_.size()) {
            return best;
         }
      }
   }

   /// max over pure strategies by backing up infoset argmaxes.
   double backup(std::span< const double > c) const
   {
      Backup b{*this, c, std::vector< double >(spec_.num_nodes(), std::numeric_limits< double >::quiet_NaN()),
               std::vector< int >(spec_.num_infosets(), -1)};
      return b.value(spec_.root());
   }

  private:
   struct Backup {
      const DeviationOracle& o;
      std::span< const double > c;
      std::vector< double > memo;
      std::vector< int > choice;

      double value(NodeId id)
      {
         auto& slot = memo[static_cast< std::size_t >(id)];
         if(! std::isnan(slot)) {
            return slot;
         }
         const Node& node = o.spec_.node(id);
         double v = 0.0;
         if(node.kind == NodeKind::terminal) {
            v = c[static_cast< std::size_t >(node.terminal)];
         }
         else if(node.kind == NodeKind::decision && node.player == o.player_) {
            v = value(node.first_child + pick(node.infoset));
         }
         else {
            for(int k = 0; k < node.num_children; ++k) {
               v += value(node.first_child + k);
            }
         }
         slot = v;
         return v;
      }

      int pick(int infoset)
      {
         auto& chosen = choice[static_cast< std::size_t >(infoset)];
         if(chosen >= 0) {
            return chosen;
         }
         const auto& info = o.spec_.infoset(infoset);
         double best = -std::numeric_limits< double >::infinity();
         for(int a = 0; a < static_cast< int >(info.actions.size()); ++a) {
            double v = 0.0;
            for(NodeId h : info.nodes) {
               v += value(o.spec_.node(h).first_child + a);
            }
            if(v > best) {
               best = v;
               chosen = a;
            }
         }
         return chosen;
      }
   };

   const GameSpec& spec_;
   PlayerId player_;
   std::vector< int > own_;
   std::vector< int > position_;
   std::vector< std::vector< std::pair< int, int > > > constraints_;
   double log2_strategies_ = 0.0;
};

constexpr double kMaxLog2Strategies = 24.0;

std::vector< double > reach_excluding(const GameSpec& spec, const StrategyProfile& sigma, TypeId type, PlayerId player)
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
            w = sigma.at(type, n.infoset)[static_cast< std::size_t >(k)];
         }
         reach[static_cast< std::size_t >(c)] = reach[idx] * w;
      }
   }
   return reach;
}

}  // namespace

bool AuditPoint::decomposition_holds(double tolerance) const
{
   for(const auto& p : players) {
      const double overall = std::isnan(p.overall_brute_force) ? p.overall_backup : p.overall_brute_force;
      if(overall > p.immediate_sum + tolerance || p.overall_shared > p.immediate_sum_shared + tolerance) {
         return false;
      }
   }
   return true;
}

bool AuditPoint::bound_holds(double tolerance) const
{
   return std::all_of(players.begin(), players.end(), [&](const PlayerAudit& p) { return p.bound_margin >= -tolerance; });
}

TheoremAuditor::TheoremAuditor(const GameSpec& spec, bool brute_force)
    : spec_(spec), brute_force_(brute_force), num_types_(spec.num_types())
{
   if(spec.num_players() != 2) {
      throw UnsupportedModeError("audit: two-player games only");
   }
   if(brute_force) {
      for(int p = 0; p < 2; ++p) {
         if(DeviationOracle(spec, PlayerId{p}).log2_strategies() > kMaxLog2Strategies) {
            throw ConfigError("audit: too many pure strategies to enumerate; disable brute force");
         }
      }
   }
   const auto types = static_cast< std::size_t >(num_types_);
   for(int p = 0; p < 2; ++p) {
      weighted_terminal_[p].assign(types, std::vector< double >(spec.num_terminals(), 0.0));
      plain_terminal_[p].assign(types, std::vector< double >(spec.num_terminals(), 0.0));
      weighted_value_[p].assign(types, 0.0);
      plain_value_[p].assign(types, 0.0);
   }
   immediate_.assign(types, std::vector< double >(spec.layout().total, 0.0));
   max_weight_.assign(types, 0.0);
}

void TheoremAuditor::observe(const StrategyProfile& sigma, std::span< const double > weights)
{
   if(weights.size() != static_cast< std::size_t >(num_types_)) {
      throw ValidationError("audit: weight vector does not match the type count");
   }
   for(int t = 0; t < num_types_; ++t) {
      const TypeId type{t};
      const double w = weights[static_cast< std::size_t >(t)];
      max_weight_[static_cast< std::size_t >(t)] = std::max(max_weight_[static_cast< std::size_t >(t)], w);
      const auto values = expected_value(spec_, sigma, type);
      for(int p = 0; p < 2; ++p) {
         const PlayerId player{p};
         const auto reach = reach_excluding(spec_, sigma, type, player);
         auto& weighted = weighted_terminal_[p][static_cast< std::size_t >(t)];
         auto& plain = plain_terminal_[p][static_cast< std::size_t >(t)];
         for(std::size_t id = 0; id < spec_.num_nodes(); ++id) {
            const Node& z = spec_.node(static_cast< NodeId >(id));
            if(z.kind == NodeKind::terminal) {
               const double x = reach[id] * spec_.utility(z, player, type);
               weighted[static_cast< std::size_t >(z.terminal)] += w * x;
               plain[static_cast< std::size_t >(z.terminal)] += x;
            }
         }
         weighted_value_[p][static_cast< std::size_t >(t)] += w * values[static_cast< std::size_t >(p)];
         plain_value_[p][static_cast< std::size_t >(t)] += values[static_cast< std::size_t >(p)];

         const auto cfv = counterfactual_values(spec_, sigma, type, player);
         auto& imm = immediate_[static_cast< std::size_t >(t)];
         for(int i : spec_.infosets_of(player)) {
            const auto& iv = cfv.at(i);
            const std::size_t off = spec_.layout().offset[static_cast< std::size_t >(i)];
            for(std::size_t a = 0; a < iv.action_values.size(); ++a) {
               imm[off + a] += w * (iv.action_values[a] - iv.baseline);
            }
         }
      }
   }
   ++iterations_;
}

AuditPoint TheoremAuditor::evaluate(std::span< const double > final_weights, const RegretTable* tables) const
{
   if(iterations_ == 0) {
      throw ConfigError("audit: no iterations recorded");
   }
   if(final_weights.size() != static_cast< std::size_t >(num_types_)) {
      throw ValidationError("audit: weight vector does not match the type count");
   }
   const double T = static_cast< double >(iterations_);
   const auto& layout = spec_.layout();
   AuditPoint out;
   out.iterations = iterations_;
   for(int p = 0; p < 2; ++p) {
      const PlayerId player{p};
      const DeviationOracle oracle(spec_, player);
      PlayerAudit& r = out.players[static_cast< std::size_t >(p)];
      const double root_a = std::sqrt(static_cast< double >(spec_.max_actions(player)));

      std::vector< double > shared(spec_.num_terminals(), 0.0);
      double shared_value = 0.0;
      double brute = 0.0;
      double backup = 0.0;
      double final_form = 0.0;
      for(int t = 0; t < num_types_; ++t) {
         const auto& c = weighted_terminal_[p][static_cast< std::size_t >(t)];
         const double base = weighted_value_[p][static_cast< std::size_t >(t)];
         backup += oracle.backup(c) - base;
         if(brute_force_) {
            brute += oracle.brute_force(c) - base;
         }
         for(std::size_t z = 0; z < c.size(); ++z) {
            shared[z] += c[z];
         }
         shared_value += base;
         final_form += final_weights[static_cast< std::size_t >(t)]
                       * (oracle.backup(plain_terminal_[p][static_cast< std::size_t >(t)])
                          - plain_value_[p][static_cast< std::size_t >(t)]);
      }
      r.overall_backup = backup / T;
      r.overall_brute_force = brute_force_ ? brute / T : std::numeric_limits< double >::quiet_NaN();
      r.overall_shared = (oracle.backup(shared) - shared_value) / T;
      r.overall_final_weights = final_form / T;

      double posterior_delta = 0.0;
      double overall_bound = 0.0;
      for(int t = 0; t < num_types_; ++t) {
         const double range = spec_.utility_range(player, TypeId{t});
         posterior_delta += final_weights[static_cast< std::size_t >(t)] * range;
         overall_bound += range * max_weight_[static_cast< std::size_t >(t)];
      }
      const auto& own = spec_.infosets_of(player);
      r.overall_bound = overall_bound * static_cast< double >(own.size()) * root_a / std::sqrt(T);

      r.bound_margin = std::numeric_limits< double >::infinity();
      r.posterior_weighted_bound_margin = std::numeric_limits< double >::infinity();
      for(int i : own) {
         const std::size_t off = layout.offset[static_cast< std::size_t >(i)];
         const std::size_t n = layout.num_actions[static_cast< std::size_t >(i)];
         double best_shared = -std::numeric_limits< double >::infinity();
         for(std::size_t a = 0; a < n; ++a) {
            double s = 0.0;
            for(int t = 0; t < num_types_; ++t) {
               s += immediate_[static_cast< std::size_t >(t)][off + a];
            }
            best_shared = std::max(best_shared, s);
         }
         r.immediate_sum_shared += std::max(best_shared, 0.0) / T;
         r.posterior_weighted_bound_margin = std::min(r.posterior_weighted_bound_margin,
                                                      posterior_delta * root_a / std::sqrt(T) - best_shared / T);
         for(int t = 0; t < num_types_; ++t) {
            const auto& imm = immediate_[static_cast< std::size_t >(t)];
            double best = -std::numeric_limits< double >::infinity();
            for(std::size_t a = 0; a < n; ++a) {
               best = std::max(best, imm[off + a]);
               if(tables) {
                  r.table_mismatch = std::max(r.table_mismatch,
                                              std::abs(tables->at(TypeId{t}, i)[a] - imm[off + a]));
               }
            }
            r.immediate_sum += std::max(best, 0.0) / T;
            const double bound = spec_.utility_range(player, TypeId{t}) * max_weight_[static_cast< std::size_t >(t)]
                                 * root_a / std::sqrt(T);
            r.bound_margin = std::min(r.bound_margin, bound - best / T);
         }
      }
   }
   return out;
}

AuditReport theorem_audit(const GameSpec& spec,
                          const SolverConfig& config,
                          std::optional< TypeId > competitor,
                          std::span< const long > checkpoints,
                          bool brute_force)
{
   if(config.algorithm != Algorithm::bcfr || config.posterior_mode != PosteriorMode::exact_sum
      || config.update != UpdateSchedule::simultaneous || config.sample_chance) {
      throw ConfigError("audit: needs bcfr with exact-sum posterior, simultaneous updates and full chance expansion");
   }
   if(checkpoints.empty()) {
      throw ConfigError("audit: no checkpoints requested");
   }
   std::vector< long > wanted(checkpoints.begin(), checkpoints.end());
   std::sort(wanted.begin(), wanted.end());
   if(wanted.front() < 1) {
      throw ConfigError("audit: checkpoints must be positive");
   }
   auto state = make_solver_state(spec, config, competitor);
   TheoremAuditor auditor(spec, brute_force);
   AuditReport report;
   std::vector< double > weights;
   std::size_t next = 0;
   for(long t = 1; t <= wanted.back(); ++t) {
      weights = state.belief.probs;
      auditor.observe(current_profile(spec, state.regrets), weights);
      bcfr_iterate(state, spec, config);
      while(next < wanted.size() && wanted[next] == t) {
         report.points.push_back(auditor.evaluate(weights, &state.regrets));
         ++next;
      }
   }
   report.final_posterior = state.belief.probs;
   return report;
}

}  // namespace bcfr
