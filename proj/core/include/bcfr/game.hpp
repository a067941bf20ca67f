#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace bcfr {

struct PlayerId {
   static constexpr int kChance = -1;

   int index = 0;

   static constexpr PlayerId chance() { return PlayerId{kChance}; }
   constexpr bool is_chance() const { return index == kChance; }

   friend constexpr auto operator<=>(const PlayerId&, const PlayerId&) = default;
};

struct TypeId {
   int index = 0;
   friend constexpr auto operator<=>(const TypeId&, const TypeId&) = default;
};

/// A move. Identity is the id; the label is a display tag owned by the rules.
struct Action {
   int id = 0;
   std::string_view label;

   friend constexpr bool operator==(const Action& a, const Action& b) { return a.id == b.id; }
};

struct HistoryStep {
   PlayerId actor;
   int action = 0;

   friend constexpr auto operator<=>(const HistoryStep&, const HistoryStep&) = default;
};

/// Sequence of moves from the root, chance moves included.
using History = std::vector< HistoryStep >;

struct InfoSetKey {
   PlayerId player;
   std::string observation;

   friend auto operator<=>(const InfoSetKey&, const InfoSetKey&) = default;
};

/// Rules of an extensive-form game with type-conditioned terminal utilities.
///
/// Types only change the utility table; tree shape and chance never depend on them.
class GameRules {
  public:
   virtual ~GameRules() = default;

   virtual std::string name() const = 0;
   virtual int num_players() const = 0;
   virtual int num_types() const = 0;

   virtual bool is_terminal(const History& h) const = 0;
   /// Acting player at a non-terminal history; `PlayerId::chance()` at chance nodes.
   virtual PlayerId current_player(const History& h) const = 0;
   /// Ordered moves at `h` (chance outcomes at chance nodes). Empty at terminals.
   virtual std::vector< Action > legal_actions(const History& h) const = 0;
   /// Outcome probabilities at a chance history, aligned with `legal_actions`.
   virtual std::vector< double > chance_probabilities(const History& h) const = 0;
   /// What the acting player observes at `h`; equal strings mean the same infoset.
   virtual std::string observation(const History& h) const = 0;
   virtual double utility(const History& terminal, PlayerId player, TypeId type) const = 0;

   virtual bool zero_sum() const { return true; }

   /// Length of `history_features`; 0 when the game offers no observation encoding.
   virtual std::size_t feature_length() const { return 0; }
   /// Fixed-length real encoding of what an observer sees of a history.
   virtual std::vector< double > history_features(const History&) const { return {}; }
   /// Scripted behaviour at a decision history: the given type's player, or a
   /// neutral probe player when `type` is empty. Empty result when unsupported.
   virtual std::vector< double > reference_policy(const History&, std::optional< TypeId >) const { return {}; }
};

enum class NodeKind : std::uint8_t { chance, decision, terminal };

using NodeId = std::int32_t;

struct Node {
   NodeKind kind = NodeKind::terminal;
   PlayerId player;
   std::int32_t infoset = -1;   ///< global infoset index for decision nodes
   std::int32_t terminal = -1;  ///< row in the utility table for terminals
   NodeId parent = -1;
   NodeId first_child = -1;
   std::int32_t num_children = 0;
   std::int32_t depth = 0;
};

struct InfosetInfo {
   InfoSetKey key;
   std::vector< int > actions;  ///< action ids, legal order
   std::vector< std::string > action_labels;
   std::vector< NodeId > nodes;
};

/// Dense per-infoset layout shared by profiles and regret tables.
struct TableLayout {
   std::vector< std::size_t > offset;
   std::vector< std::size_t > num_actions;
   std::size_t total = 0;

   std::size_t num_infosets() const { return offset.size(); }
};

/// Materialised, pre-indexed game tree with type-conditioned utilities.
///
/// Built once from `GameRules`; immutable afterwards and freely shareable.
class GameSpec {
  public:
   /// Expands the full tree and validates chance normalisation, infoset
   /// consistency, perfect recall and (when declared) zero-sum utilities.
   static GameSpec build(std::shared_ptr< const GameRules > rules);

   const GameRules& rules() const { return *rules_; }
   std::shared_ptr< const GameRules > rules_ptr() const { return rules_; }
   const std::string& name() const { return name_; }
   int num_players() const { return num_players_; }
   int num_types() const { return num_types_; }
   bool zero_sum() const { return zero_sum_; }

   NodeId root() const { return 0; }
   const Node& node(NodeId id) const { return nodes_[static_cast< std::size_t >(id)]; }
   std::size_t num_nodes() const { return nodes_.size(); }
   NodeId child(NodeId id, int i) const { return node(id).first_child + i; }
   /// Action id that leads from the parent to `child`.
   int incoming_action(NodeId child) const { return incoming_action_[static_cast< std::size_t >(child)]; }
   /// Chance probability of reaching `child` from its (chance) parent, 1 otherwise.
   double incoming_chance(NodeId child) const { return incoming_chance_[static_cast< std::size_t >(child)]; }
   int max_depth() const { return max_depth_; }

   std::size_t num_terminals() const { return num_terminals_; }
   double utility(const Node& terminal, PlayerId player, TypeId type) const
   {
      return utilities_[utility_index(terminal.terminal, player, type)];
   }
   /// max_z u - min_z u for one player and type.
   double utility_range(PlayerId player, TypeId type) const;

   std::size_t num_infosets() const { return infosets_.size(); }
   const InfosetInfo& infoset(int index) const { return infosets_[static_cast< std::size_t >(index)]; }
   std::span< const int > infosets_of(PlayerId player) const
   {
      return player_infosets_[static_cast< std::size_t >(player.index)];
   }
   std::optional< int > infoset_index(const InfoSetKey& key) const;
   const TableLayout& layout() const { return *layout_; }
   std::shared_ptr< const TableLayout > layout_ptr() const { return layout_; }
   /// Largest action count over the player's infosets (|A_i|).
   std::size_t max_actions(PlayerId player) const;

   /// Node reached by `h`; throws StructuralError when `h` is not a valid history.
   NodeId node_of(const History& h) const;
   History history_of(NodeId id) const;

   /// Hash of tree shape, infoset partition and game name: identifies checkpoints.
   std::uint64_t structure_hash() const;

   /// Same tree, single type, utilities averaged with `weights` (normalised, |Θ| long).
   GameSpec collapse(std::span< const double > weights) const;
   /// Same tree with every utility multiplied by `factor`.
   GameSpec scaled(double factor) const;

  private:
   std::size_t utility_index(std::int32_t terminal, PlayerId player, TypeId type) const
   {
      return (static_cast< std::size_t >(terminal) * static_cast< std::size_t >(num_types_)
              + static_cast< std::size_t >(type.index))
                * static_cast< std::size_t >(num_players_)
             + static_cast< std::size_t >(player.index);
   }

   std::shared_ptr< const GameRules > rules_;
   std::string name_;
   int num_players_ = 0;
   int num_types_ = 0;
   bool zero_sum_ = true;
   int max_depth_ = 0;
   std::vector< Node > nodes_;
   std::vector< int > incoming_action_;
   std::vector< double > incoming_chance_;
   std::size_t num_terminals_ = 0;
   std::vector< double > utilities_;
   std::vector< InfosetInfo > infosets_;
   std::vector< std::vector< int > > player_infosets_;
   std::map< InfoSetKey, int > infoset_lookup_;
   std::shared_ptr< const TableLayout > layout_;

   friend class GameSpecBuilder;
};

/// Behaviour strategy for every (type, infoset).
///
/// A profile with a single type slot is type-free: the same vector is used for
/// every θ of the game it is evaluated on.
class StrategyProfile {
  public:
   StrategyProfile() = default;
   /// Uniform over legal actions everywhere.
   StrategyProfile(const GameSpec& spec, int num_types);

   int num_types() const { return num_types_; }
   bool type_free() const { return num_types_ == 1; }
   const TableLayout& layout() const { return *layout_; }

   std::span< const double > at(TypeId type, int infoset) const;
   /// Overwrites one vector; throws ValidationError unless it is a distribution.
   void set(TypeId type, int infoset, std::span< const double > probs);
   /// Raw write access used by solvers that already produce normalised output.
   std::span< double > mutable_at(TypeId type, int infoset);

   /// Throws ValidationError if any stored vector is not a distribution (±1e-12).
   void validate() const;

   std::span< const double > raw() const { return probs_; }

  private:
   std::size_t slot(TypeId type, int infoset) const;

   std::shared_ptr< const TableLayout > layout_;
   int num_types_ = 1;
   std::vector< double > probs_;
};

/// Reach probability with its per-contributor factorisation.
struct ReachProbability {
   double total = 1.0;
   double chance = 1.0;
   std::vector< double > player;  ///< π_i for each player

   /// π_{-i}: everything except player i's own factors (chance included).
   double excluding(PlayerId i) const;
};

struct InfosetValues {
   double baseline = 0.0;
   std::vector< double > action_values;
};

/// Counterfactual values for one player's infosets, indexed by global infoset id.
struct CounterfactualValues {
   PlayerId player;
   std::vector< std::optional< InfosetValues > > by_infoset;

   const InfosetValues& at(int infoset) const;
};

std::vector< Action > legal_actions(const GameSpec& spec, const History& h);

ReachProbability reach_probability(const GameSpec& spec, const StrategyProfile& profile, TypeId type, const History& h);
ReachProbability reach_probability(const GameSpec& spec, const StrategyProfile& profile, TypeId type, NodeId node);

/// Σ_θ belief(θ) Σ_z π(z) u_{i,θ}(z) for every player.
std::vector< double > expected_value(const GameSpec& spec,
                                     const StrategyProfile& profile,
                                     std::span< const double > belief);

/// Per-type expected value, one entry per player.
std::vector< double > expected_value(const GameSpec& spec, const StrategyProfile& profile, TypeId type);

CounterfactualValues counterfactual_values(const GameSpec& spec,
                                           const StrategyProfile& profile,
                                           TypeId type,
                                           PlayerId player);

/// Throws ValidationError unless `belief` is a distribution over the game's types (±1e-9).
void validate_belief(const GameSpec& spec, std::span< const double > belief);

}  // namespace bcfr
