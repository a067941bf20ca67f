#include "bcfr/game.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

#include "bcfr/error.hpp"

namespace bcfr {

namespace {

constexpr double kChanceTolerance = 1e-12;
constexpr double kZeroSumTolerance = 1e-9;
constexpr double kProfileTolerance = 1e-12;

std::uint64_t fnv1a(std::uint64_t h, std::string_view bytes)
{
   for(unsigned char c : bytes) {
      h ^= c;
      h *= 0x100000001b3ULL;
   }
   return h;
}

std::uint64_t fnv1a(std::uint64_t h, std::int64_t value)
{
   for(int i = 0; i < 8; ++i) {
      h ^= static_cast< std::uint64_t >(value >> (8 * i)) & 0xffU;
      h *= 0x100000001b3ULL;
   }
   return h;
}

std::string describe(const History& h)
{
   std::ostringstream os;
   os << '[';
   for(std::size_t i = 0; i < h.size(); ++i) {
      os << (i ? " " : "") << (h[i].actor.is_chance() ? std::string("c") : std::to_string(h[i].actor.index))
         << ':' << h[i].action;
   }
   os << ']';
   return os.str();
}

}  // namespace

class GameSpecBuilder {
  public:
   explicit GameSpecBuilder(std::shared_ptr< const GameRules > rules) : rules_(std::move(rules)) {}

   GameSpec build()
   {
      GameSpec& s = spec_;
      s.rules_ = rules_;
      s.name_ = rules_->name();
      s.num_players_ = rules_->num_players();
      s.num_types_ = rules_->num_types();
      s.zero_sum_ = rules_->zero_sum();
      if(s.num_players_ < 1 || s.num_types_ < 1) {
         throw StructuralError("game must declare at least one player and one type");
      }
      s.player_infosets_.resize(static_cast< std::size_t >(s.num_players_));
      own_sequences_.assign(static_cast< std::size_t >(s.num_players_), {});

      s.nodes_.emplace_back();
      s.incoming_action_.push_back(-1);
      s.incoming_chance_.push_back(1.0);
      History h;
      expand(0, h);

      auto layout = std::make_shared< TableLayout >();
      for(const auto& info : s.infosets_) {
         layout->offset.push_back(layout->total);
         layout->num_actions.push_back(info.actions.size());
         layout->total += info.actions.size();
      }
      s.layout_ = std::move(layout);
      return std::move(spec_);
   }

  private:
   using Sequence = std::vector< std::pair< int, int > >;

   void expand(NodeId id, History& h)
   {
      GameSpec& s = spec_;
      const int depth = static_cast< int >(h.size());
      s.max_depth_ = std::max(s.max_depth_, depth);
      s.nodes_[static_cast< std::size_t >(id)].depth = depth;

      if(rules_->is_terminal(h)) {
         if(! rules_->legal_actions(h).empty()) {
            throw StructuralError("terminal history with legal actions: " + describe(h));
         }
         Node& n = s.nodes_[static_cast< std::size_t >(id)];
         n.kind = NodeKind::terminal;
         n.terminal = static_cast< std::int32_t >(s.num_terminals_++);
         for(int t = 0; t < s.num_types_; ++t) {
            double sum = 0.0;
            for(int p = 0; p < s.num_players_; ++p) {
               const double u = rules_->utility(h, PlayerId{p}, TypeId{t});
               if(! std::isfinite(u)) {
                  throw StructuralError("non-finite utility at " + describe(h));
               }
               s.utilities_.push_back(u);
               sum += u;
            }
            if(s.zero_sum_ && std::abs(sum) > kZeroSumTolerance) {
               throw StructuralError("zero-sum violated at " + describe(h) + " type " + std::to_string(t));
            }
         }
         return;
      }

      const PlayerId actor = rules_->current_player(h);
      const std::vector< Action > actions = rules_->legal_actions(h);
      if(actions.empty()) {
         throw StructuralError("non-terminal history without actions: " + describe(h));
      }
      std::vector< double > chance_probs;
      if(actor.is_chance()) {
         chance_probs = rules_->chance_probabilities(h);
         if(chance_probs.size() != actions.size()) {
            throw StructuralError("chance distribution size mismatch at " + describe(h));
         }
         double total = 0.0;
         for(double p : chance_probs) {
            if(! (p >= 0.0)) {
               throw StructuralError("negative chance probability at " + describe(h));
            }
            total += p;
         }
         if(std::abs(total - 1.0) > kChanceTolerance) {
            throw StructuralError("chance distribution not normalised at " + describe(h));
         }
      }
      else if(actor.index < 0 || actor.index >= s.num_players_) {
         throw StructuralError("acting player out of range at " + describe(h));
      }

      const NodeId first = static_cast< NodeId >(s.nodes_.size());
      {
         Node& n = s.nodes_[static_cast< std::size_t >(id)];
         n.kind = actor.is_chance() ? NodeKind::chance : NodeKind::decision;
         n.player = actor;
         n.first_child = first;
         n.num_children = static_cast< std::int32_t >(actions.size());
      }
      for(std::size_t k = 0; k < actions.size(); ++k) {
         Node child;
         child.parent = id;
         s.nodes_.push_back(child);
         s.incoming_action_.push_back(actions[k].id);
         s.incoming_chance_.push_back(actor.is_chance() ? chance_probs[k] : 1.0);
      }

      int infoset = -1;
      if(! actor.is_chance()) {
         infoset = register_infoset(id, h, actor, actions);
         s.nodes_[static_cast< std::size_t >(id)].infoset = infoset;
      }

      for(std::size_t k = 0; k < actions.size(); ++k) {
         h.push_back(HistoryStep{actor, actions[k].id});
         if(infoset >= 0) {
            own_sequences_[static_cast< std::size_t >(actor.index)].emplace_back(infoset, static_cast< int >(k));
         }
         expand(first + static_cast< NodeId >(k), h);
         if(infoset >= 0) {
            own_sequences_[static_cast< std::size_t >(actor.index)].pop_back();
         }
         h.pop_back();
      }
   }

   int register_infoset(NodeId id, const History& h, PlayerId actor, const std::vector< Action >& actions)
   {
      GameSpec& s = spec_;
      InfoSetKey key{actor, rules_->observation(h)};
      auto [it, inserted] = s.infoset_lookup_.try_emplace(key, static_cast< int >(s.infosets_.size()));
      const int index = it->second;
      const Sequence& seq = own_sequences_[static_cast< std::size_t >(actor.index)];
      if(inserted) {
         InfosetInfo info;
         info.key = std::move(key);
         for(const Action& a : actions) {
            info.actions.push_back(a.id);
            info.action_labels.emplace_back(a.label);
         }
         s.infosets_.push_back(std::move(info));
         s.player_infosets_[static_cast< std::size_t >(actor.index)].push_back(index);
         recall_.push_back(seq);
      }
      else {
         const InfosetInfo& info = s.infosets_[static_cast< std::size_t >(index)];
         if(info.actions.size() != actions.size()
            || ! std::equal(actions.begin(), actions.end(), info.actions.begin(), [](const Action& a, int b) {
                  return a.id == b;
               })) {
            throw StructuralError("infoset '" + info.key.observation + "' has inconsistent legal actions");
         }
         if(recall_[static_cast< std::size_t >(index)] != seq) {
            throw StructuralError("perfect recall violated at infoset '" + info.key.observation + "'");
         }
      }
      s.infosets_[static_cast< std::size_t >(index)].nodes.push_back(id);
      return index;
   }

   std::shared_ptr< const GameRules > rules_;
   GameSpec spec_;
   std::vector< Sequence > own_sequences_;
   std::vector< Sequence > recall_;
};

GameSpec GameSpec::build(std::shared_ptr< const GameRules > rules)
{
   if(! rules) {
      throw StructuralError("GameSpec::build: null rules");
   }
   return GameSpecBuilder(std::move(rules)).build();
}

double GameSpec::utility_range(PlayerId player, TypeId type) const
{
   double lo = std::numeric_limits< double >::infinity();
   double hi = -lo;
   for(std::size_t z = 0; z < num_terminals_; ++z) {
      const double u = utilities_[utility_index(static_cast< std::int32_t >(z), player, type)];
      lo = std::min(lo, u);
      hi = std::max(hi, u);
   }
   return hi - lo;
}

std::optional< int > GameSpec::infoset_index(const InfoSetKey& key) const
{
   auto it = infoset_lookup_.find(key);
   if(it == infoset_lookup_.end()) {
      return std::nullopt;
   }
   return it->second;
}

std::size_t GameSpec::max_actions(PlayerId player) const
{
   std::size_t best = 0;
   for(int i : infosets_of(player)) {
      best = std::max(best, infosets_[static_cast< std::size_t >(i)].actions.size());
   }
   return best;
}

NodeId GameSpec::node_of(const History& h) const
{
   NodeId id = root();
   for(const HistoryStep& step : h) {
      const Node& n = node(id);
      if(n.kind == NodeKind::terminal) {
         throw StructuralError("history continues past a terminal: " + describe(h));
      }
      if(n.player != step.actor) {
         throw StructuralError("history actor mismatch: " + describe(h));
      }
      NodeId next = -1;
      for(int k = 0; k < n.num_children; ++k) {
         if(incoming_action(n.first_child + k) == step.action) {
            next = n.first_child + k;
            break;
         }
      }
      if(next < 0) {
         throw StructuralError("illegal action in history: " + describe(h));
      }
      id = next;
   }
   return id;
}

History GameSpec::history_of(NodeId id) const
{
   History h;
   while(node(id).parent >= 0) {
      const NodeId parent = node(id).parent;
      h.push_back(HistoryStep{node(parent).player, incoming_action(id)});
      id = parent;
   }
   std::reverse(h.begin(), h.end());
   return h;
}

std::uint64_t GameSpec::structure_hash() const
{
   std::uint64_t h = 0xcbf29ce484222325ULL;
   h = fnv1a(h, name_);
   h = fnv1a(h, static_cast< std::int64_t >(num_players_));
   h = fnv1a(h, static_cast< std::int64_t >(nodes_.size()));
   for(const Node& n : nodes_) {
      h = fnv1a(h, static_cast< std::int64_t >(n.kind));
      h = fnv1a(h, static_cast< std::int64_t >(n.num_children));
      h = fnv1a(h, static_cast< std::int64_t >(n.infoset));
   }
   for(const InfosetInfo& info : infosets_) {
      h = fnv1a(h, info.key.observation);
      h = fnv1a(h, static_cast< std::int64_t >(info.key.player.index));
   }
   return h;
}

GameSpec GameSpec::collapse(std::span< const double > weights) const
{
   validate_belief(*this, weights);
   GameSpec out = *this;
   out.num_types_ = 1;
   out.utilities_.assign(num_terminals_ * static_cast< std::size_t >(num_players_), 0.0);
   for(std::size_t z = 0; z < num_terminals_; ++z) {
      for(int p = 0; p < num_players_; ++p) {
         double u = 0.0;
         for(int t = 0; t < num_types_; ++t) {
            u += weights[static_cast< std::size_t >(t)]
                 * utilities_[utility_index(static_cast< std::int32_t >(z), PlayerId{p}, TypeId{t})];
         }
         out.utilities_[z * static_cast< std::size_t >(num_players_) + static_cast< std::size_t >(p)] = u;
      }
   }
   return out;
}

GameSpec GameSpec::scaled(double factor) const
{
   GameSpec out = *this;
   for(double& u : out.utilities_) {
      u *= factor;
   }
   return out;
}

// ---------------------------------------------------------------------------

StrategyProfile::StrategyProfile(const GameSpec& spec, int num_types)
    : layout_(spec.layout_ptr()), num_types_(num_types)
{
   if(num_types < 1) {
      throw ValidationError("StrategyProfile: num_types must be positive");
   }
   probs_.resize(layout_->total * static_cast< std::size_t >(num_types));
   for(int t = 0; t < num_types; ++t) {
      for(std::size_t i = 0; i < layout_->num_infosets(); ++i) {
         auto v = mutable_at(TypeId{t}, static_cast< int >(i));
         std::fill(v.begin(), v.end(), 1.0 / static_cast< double >(v.size()));
      }
   }
}

std::size_t StrategyProfile::slot(TypeId type, int infoset) const
{
   const int t = num_types_ == 1 ? 0 : type.index;
   if(t < 0 || t >= num_types_) {
      throw ValidationError("StrategyProfile: type index out of range");
   }
   return static_cast< std::size_t >(t) * layout_->total + layout_->offset[static_cast< std::size_t >(infoset)];
}

std::span< const double > StrategyProfile::at(TypeId type, int infoset) const
{
   return {probs_.data() + slot(type, infoset), layout_->num_actions[static_cast< std::size_t >(infoset)]};
}

std::span< double > StrategyProfile::mutable_at(TypeId type, int infoset)
{
   return {probs_.data() + slot(type, infoset), layout_->num_actions[static_cast< std::size_t >(infoset)]};
}

void StrategyProfile::set(TypeId type, int infoset, std::span< const double > probs)
{
   auto dst = mutable_at(type, infoset);
   if(probs.size() != dst.size()) {
      throw ValidationError("StrategyProfile::set: wrong vector length");
   }
   double sum = 0.0;
   for(double p : probs) {
      if(! (p >= 0.0)) {
         throw ValidationError("StrategyProfile::set: negative or NaN probability");
      }
      sum += p;
   }
   if(std::abs(sum - 1.0) > kProfileTolerance) {
      throw ValidationError("StrategyProfile::set: probabilities do not sum to 1");
   }
   std::copy(probs.begin(), probs.end(), dst.begin());
}

void StrategyProfile::validate() const
{
   for(int t = 0; t < num_types_; ++t) {
      for(std::size_t i = 0; i < layout_->num_infosets(); ++i) {
         double sum = 0.0;
         for(double p : at(TypeId{t}, static_cast< int >(i))) {
            if(! (p >= 0.0)) {
               throw ValidationError("StrategyProfile: negative or NaN probability");
            }
            sum += p;
         }
         if(std::abs(sum - 1.0) > kProfileTolerance) {
            throw ValidationError("StrategyProfile: vector does not sum to 1");
         }
      }
   }
}

// ---------------------------------------------------------------------------

double ReachProbability::excluding(PlayerId i) const
{
   double r = chance;
   for(std::size_t p = 0; p < player.size(); ++p) {
      if(static_cast< int >(p) != i.index) {
         r *= player[p];
      }
   }
   return r;
}

const InfosetValues& CounterfactualValues::at(int infoset) const
{
   const auto& entry = by_infoset.at(static_cast< std::size_t >(infoset));
   if(! entry) {
      throw ValidationError("counterfactual values requested for another player's infoset");
   }
   return *entry;
}

void validate_belief(const GameSpec& spec, std::span< const double > belief)
{
   if(belief.size() != static_cast< std::size_t >(spec.num_types())) {
      throw ValidationError("belief length does not match the type space");
   }
   double sum = 0.0;
   for(double b : belief) {
      if(! (b >= 0.0)) {
         throw ValidationError("belief has a negative or NaN entry");
      }
      sum += b;
   }
   if(std::abs(sum - 1.0) > 1e-9) {
      throw ValidationError("belief is not normalised");
   }
}

std::vector< Action > legal_actions(const GameSpec& spec, const History& h)
{
   spec.node_of(h);
   return spec.rules().legal_actions(h);
}

ReachProbability reach_probability(const GameSpec& spec, const StrategyProfile& profile, TypeId type, NodeId node)
{
   ReachProbability r;
   r.player.assign(static_cast< std::size_t >(spec.num_players()), 1.0);
   NodeId id = node;
   while(spec.node(id).parent >= 0) {
      const NodeId parent = spec.node(id).parent;
      const Node& pn = spec.node(parent);
      const int k = id - pn.first_child;
      if(pn.kind == NodeKind::chance) {
         r.chance *= spec.incoming_chance(id);
      }
      else {
         r.player[static_cast< std::size_t >(pn.player.index)] *= profile.at(type, pn.infoset)[static_cast< std::size_t >(k)];
      }
      id = parent;
   }
   r.total = r.chance;
   for(double p : r.player) {
      r.total *= p;
   }
   return r;
}

ReachProbability reach_probability(const GameSpec& spec, const StrategyProfile& profile, TypeId type, const History& h)
{
   return reach_probability(spec, profile, type, spec.node_of(h));
}

namespace {

/// Bottom-up values of every node for every player under one type.
std::vector< double > node_values(const GameSpec& spec, const StrategyProfile& profile, TypeId type)
{
   const std::size_t players = static_cast< std::size_t >(spec.num_players());
   std::vector< double > values(spec.num_nodes() * players, 0.0);
   // Children always have larger ids than their parent.
   for(std::size_t idx = spec.num_nodes(); idx-- > 0;) {
      const Node& n = spec.node(static_cast< NodeId >(idx));
      double* out = &values[idx * players];
      if(n.kind == NodeKind::terminal) {
         for(std::size_t p = 0; p < players; ++p) {
            out[p] = spec.utility(n, PlayerId{static_cast< int >(p)}, type);
         }
         continue;
      }
      for(int k = 0; k < n.num_children; ++k) {
         const NodeId c = n.first_child + k;
         const double w = n.kind == NodeKind::chance ? spec.incoming_chance(c)
                                                     : profile.at(type, n.infoset)[static_cast< std::size_t >(k)];
         const double* child = &values[static_cast< std::size_t >(c) * players];
         for(std::size_t p = 0; p < players; ++p) {
            out[p] += w * child[p];
         }
      }
   }
   return values;
}

}  // namespace

std::vector< double > expected_value(const GameSpec& spec, const StrategyProfile& profile, TypeId type)
{
   const auto values = node_values(spec, profile, type);
   return {values.begin(), values.begin() + spec.num_players()};
}

std::vector< double > expected_value(const GameSpec& spec,
                                     const StrategyProfile& profile,
                                     std::span< const double > belief)
{
   validate_belief(spec, belief);
   std::vector< double > total(static_cast< std::size_t >(spec.num_players()), 0.0);
   for(int t = 0; t < spec.num_types(); ++t) {
      if(belief[static_cast< std::size_t >(t)] == 0.0) {
         continue;
      }
      const auto v = expected_value(spec, profile, TypeId{t});
      for(std::size_t p = 0; p < total.size(); ++p) {
         total[p] += belief[static_cast< std::size_t >(t)] * v[p];
      }
   }
   return total;
}

CounterfactualValues counterfactual_values(const GameSpec& spec,
                                           const StrategyProfile& profile,
                                           TypeId type,
                                           PlayerId player)
{
   const std::size_t players = static_cast< std::size_t >(spec.num_players());
   const auto pi = static_cast< std::size_t >(player.index);
   const auto values = node_values(spec, profile, type);

   // Top-down reach of everyone but `player`.
   std::vector< double > reach_others(spec.num_nodes(), 0.0);
   reach_others[0] = 1.0;
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
         reach_others[static_cast< std::size_t >(c)] = reach_others[idx] * w;
      }
   }

   CounterfactualValues out;
   out.player = player;
   out.by_infoset.resize(spec.num_infosets());
   for(int i : spec.infosets_of(player)) {
      const InfosetInfo& info = spec.infoset(i);
      InfosetValues iv;
      iv.action_values.assign(info.actions.size(), 0.0);
      for(NodeId h : info.nodes) {
         const double w = reach_others[static_cast< std::size_t >(h)];
         const Node& n = spec.node(h);
         iv.baseline += w * values[static_cast< std::size_t >(h) * players + pi];
         for(int k = 0; k < n.num_children; ++k) {
            iv.action_values[static_cast< std::size_t >(k)]
                += w * values[static_cast< std::size_t >(n.first_child + k) * players + pi];
         }
      }
      out.by_infoset[static_cast< std::size_t >(i)] = std::move(iv);
   }
   return out;
}

}  // namespace bcfr
