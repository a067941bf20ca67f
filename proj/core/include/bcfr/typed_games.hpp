#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bcfr/game.hpp"

namespace bcfr {

enum class PayoffKind { normal, conservative, aggressive };

std::string_view to_string(PayoffKind kind);

/// Stakes put into the pot, in chips.
struct PotState {
   std::array< double, 2 > stakes{1.0, 1.0};
   double big_blind = 1.0;
   /// Smallest pot any hand can end with (both antes).
   double min_pot = 2.0;

   double pot() const { return stakes[0] + stakes[1]; }
};

/// Zero-sum utilities for a two-player showdown or fold. `winner` empty means a tie.
///
/// Normal moves the loser's stake to the winner, Conservative pays a flat big
/// blind, Aggressive scales the Normal result by pot / min_pot.
std::array< double, 2 > payoff_transform(PayoffKind kind, std::optional< PlayerId > winner, const PotState& pot);

/// Payoff kind per type plus the distribution the environment draws types from.
///
/// The prior is stored as integer weights over a common denominator, so its sum
/// is checked exactly at construction; `prior()` is the derived double vector.
class TypeModel {
  public:
   TypeModel(std::string name, std::vector< PayoffKind > kinds, std::vector< int > weights, int denominator);

   const std::string& name() const { return name_; }
   const std::vector< PayoffKind >& kinds() const { return kinds_; }
   std::size_t num_types() const { return kinds_.size(); }
   const std::vector< double >& prior() const { return prior_; }
   const std::vector< int >& weights() const { return weights_; }
   int denominator() const { return denominator_; }

   /// Type space restricted to a single payoff kind.
   static TypeModel single(PayoffKind kind);

  private:
   std::string name_;
   std::vector< PayoffKind > kinds_;
   std::vector< int > weights_;
   int denominator_;
   std::vector< double > prior_;
};

/// Pure-N/C/A and Mixed-1..9, all over the type space (Normal, Conservative, Aggressive).
const std::map< std::string, TypeModel >& standard_type_models();
const TypeModel& type_model(const std::string& name);

struct PokerParams {
   std::string name;
   std::vector< int > deck;            ///< rank of each card id
   std::vector< double > bet_sizes;    ///< one per betting round
   int max_raises = 1;                 ///< bets + raises allowed per round
   double ante = 1.0;
};

/// Two-player limit poker with one private card each and an optional board card.
///
/// Covers Kuhn (one round, no raises) and Leduc (two rounds, public card between
/// them). Utilities are routed through `payoff_transform` per type. The rules
/// also expose the observation encoding and the scripted players used to feed
/// the belief module.
class PokerRules final : public GameRules {
  public:
   static constexpr int kFold = 0;
   static constexpr int kCall = 1;  ///< check when nothing is owed
   static constexpr int kRaise = 2; ///< bet when no bet is open

   PokerRules(PokerParams params, TypeModel model);

   std::string name() const override { return params_.name; }
   int num_players() const override { return 2; }
   int num_types() const override { return static_cast< int >(model_.num_types()); }

   bool is_terminal(const History& h) const override;
   PlayerId current_player(const History& h) const override;
   std::vector< Action > legal_actions(const History& h) const override;
   std::vector< double > chance_probabilities(const History& h) const override;
   std::string observation(const History& h) const override;
   double utility(const History& terminal, PlayerId player, TypeId type) const override;

   std::size_t feature_length() const override;
   std::vector< double > history_features(const History& h) const override;
   std::vector< double > reference_policy(const History& h, std::optional< TypeId > type) const override;

   const PokerParams& params() const { return params_; }
   const TypeModel& type_model() const { return model_; }
   int num_rounds() const { return static_cast< int >(params_.bet_sizes.size()); }

   /// Private strength of the acting player's holding in [0, 1].
   double hand_strength(const History& h, PlayerId player) const;

   struct State {
      std::array< int, 2 > hole{-1, -1};
      int board = -1;
      int round = 0;
      std::array< double, 2 > stake{0.0, 0.0};
      int raises = 0;
      int actions_in_round = 0;
      int to_act = 0;
      int folder = -1;
      bool awaiting_board = false;
      bool terminal = false;
      std::vector< std::string > lines;  ///< per-round action characters
      /// counts[round][seat][check, raise, call, fold]
      std::vector< std::array< std::array< int, 4 >, 2 > > counts;
   };

   State replay(const History& h) const;

  private:
   int showdown_winner(const State& s) const;

   PokerParams params_;
   TypeModel model_;
};

std::shared_ptr< const PokerRules > make_kuhn_rules(const TypeModel& model);
std::shared_ptr< const PokerRules > make_leduc_rules(const TypeModel& model);

/// 3-card Kuhn poker, ante 1, a single bet of 1.
GameSpec build_kuhn(const TypeModel& model);
/// 6-card Leduc hold'em, ante 1, bets 2 then 4, two bets per round.
GameSpec build_leduc(const TypeModel& model);
/// `name` is "kuhn" or "leduc".
GameSpec build_game(const std::string& name, const TypeModel& model);

}  // namespace bcfr
