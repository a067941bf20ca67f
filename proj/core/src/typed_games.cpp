#include "bcfr/typed_games.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "bcfr/error.hpp"

namespace bcfr {

std::string_view to_string(PayoffKind kind)
{
   switch(kind) {
      case PayoffKind::normal: return "normal";
      case PayoffKind::conservative: return "conservative";
      case PayoffKind::aggressive: return "aggressive";
   }
   return "?";
}

std::array< double, 2 > payoff_transform(PayoffKind kind, std::optional< PlayerId > winner, const PotState& pot)
{
   if(! winner) {
      return {0.0, 0.0};
   }
   const int w = winner->index;
   const int l = 1 - w;
   std::array< double, 2 > u{0.0, 0.0};
   switch(kind) {
      case PayoffKind::normal:
         u[static_cast< std::size_t >(w)] = pot.stakes[static_cast< std::size_t >(l)];
         break;
      case PayoffKind::conservative:
         u[static_cast< std::size_t >(w)] = pot.big_blind;
         break;
      case PayoffKind::aggressive:
         u[static_cast< std::size_t >(w)] = pot.stakes[static_cast< std::size_t >(l)] * (pot.pot() / pot.min_pot);
         break;
   }
   u[static_cast< std::size_t >(l)] = -u[static_cast< std::size_t >(w)];
   return u;
}

// ---------------------------------------------------------------------------

TypeModel::TypeModel(std::string name, std::vector< PayoffKind > kinds, std::vector< int > weights, int denominator)
    : name_(std::move(name)), kinds_(std::move(kinds)), weights_(std::move(weights)), denominator_(denominator)
{
   if(kinds_.empty()) {
      throw ValidationError("TypeModel '" + name_ + "': needs at least one type");
   }
   if(weights_.size() != kinds_.size() || denominator_ <= 0) {
      throw ValidationError("TypeModel '" + name_ + "': weights do not match the type list");
   }
   if(std::any_of(weights_.begin(), weights_.end(), [](int w) { return w < 0; })
      || std::accumulate(weights_.begin(), weights_.end(), 0) != denominator_) {
      throw ValidationError("TypeModel '" + name_ + "': prior does not sum to 1");
   }
   for(int w : weights_) {
      prior_.push_back(static_cast< double >(w) / static_cast< double >(denominator_));
   }
}

TypeModel TypeModel::single(PayoffKind kind)
{
   return TypeModel("single-" + std::string(to_string(kind)), {kind}, {1}, 1);
}

const std::map< std::string, TypeModel >& standard_type_models()
{
   static const std::map< std::string, TypeModel > models = [] {
      const std::vector< PayoffKind > nca{PayoffKind::normal, PayoffKind::conservative, PayoffKind::aggressive};
      // Percentages over (Normal, Conservative, Aggressive).
      const std::vector< std::pair< std::string, std::array< int, 3 > > > table{
         {"pure-n", {100, 0, 0}},  {"pure-c", {0, 100, 0}},  {"pure-a", {0, 0, 100}},
         {"mixed-1", {10, 80, 10}}, {"mixed-2", {20, 60, 20}}, {"mixed-3", {30, 40, 30}},
         {"mixed-4", {80, 10, 10}}, {"mixed-5", {60, 20, 20}}, {"mixed-6", {40, 30, 30}},
         {"mixed-7", {10, 10, 80}}, {"mixed-8", {20, 20, 60}}, {"mixed-9", {30, 30, 40}},
      };
      std::map< std::string, TypeModel > out;
      for(const auto& [name, pct] : table) {
         out.emplace(name, TypeModel(name, nca, {pct[0], pct[1], pct[2]}, 100));
      }
      return out;
   }();
   return models;
}

const TypeModel& type_model(const std::string& name)
{
   const auto& models = standard_type_models();
   auto it = models.find(name);
   if(it == models.end()) {
      throw ConfigError("unknown type model '" + name + "'");
   }
   return it->second;
}

// ---------------------------------------------------------------------------

namespace {

constexpr std::array< char, 3 > kRankChars{'J', 'Q', 'K'};
constexpr std::array< std::string_view, 3 > kRankLabels{"J", "Q", "K"};

struct Temperament {
   double aggression;
   double fold_propensity;
};

Temperament temperament(std::optional< PayoffKind > kind)
{
   if(! kind) {
      return {0.5, 0.4};
   }
   switch(*kind) {
      case PayoffKind::normal: return {0.45, 0.8};
      case PayoffKind::conservative: return {0.15, 0.1};
      case PayoffKind::aggressive: return {0.95, 0.2};
   }
   return {0.5, 0.4};
}

}  // namespace

PokerRules::PokerRules(PokerParams params, TypeModel model) : params_(std::move(params)), model_(std::move(model))
{
   if(params_.deck.size() < 3 || params_.bet_sizes.empty() || params_.bet_sizes.size() > 2) {
      throw ValidationError("PokerRules: unsupported parameters");
   }
}

PokerRules::State PokerRules::replay(const History& h) const
{
   State s;
   s.stake = {params_.ante, params_.ante};
   const int rounds = num_rounds();
   s.lines.assign(static_cast< std::size_t >(rounds), std::string());
   s.counts.assign(static_cast< std::size_t >(rounds), {});
   const auto remaining = [&](int card) {
      return card >= 0 && card < static_cast< int >(params_.deck.size()) && card != s.hole[0] && card != s.hole[1]
             && card != s.board;
   };

   for(const HistoryStep& step : h) {
      if(s.terminal) {
         throw StructuralError("poker: action after the hand ended");
      }
      if(s.hole[0] < 0 || s.hole[1] < 0 || s.awaiting_board) {
         if(! step.actor.is_chance() || ! remaining(step.action)) {
            throw StructuralError("poker: invalid deal");
         }
         if(s.hole[0] < 0) {
            s.hole[0] = step.action;
         }
         else if(s.hole[1] < 0) {
            s.hole[1] = step.action;
         }
         else {
            s.board = step.action;
            s.awaiting_board = false;
            s.round = 1;
            s.raises = 0;
            s.actions_in_round = 0;
            s.to_act = 0;
         }
         continue;
      }
      const int p = s.to_act;
      const int opp = 1 - p;
      if(step.actor.index != p) {
         throw StructuralError("poker: wrong player to act");
      }
      const bool facing = s.stake[static_cast< std::size_t >(p)] < s.stake[static_cast< std::size_t >(opp)];
      auto& line = s.lines[static_cast< std::size_t >(s.round)];
      auto& count = s.counts[static_cast< std::size_t >(s.round)][static_cast< std::size_t >(p)];
      bool round_over = false;
      switch(step.action) {
         case kFold:
            if(! facing) {
               throw StructuralError("poker: fold without a bet");
            }
            s.folder = p;
            s.terminal = true;
            line += 'f';
            ++count[3];
            break;
         case kCall:
            if(facing) {
               s.stake[static_cast< std::size_t >(p)] = s.stake[static_cast< std::size_t >(opp)];
               line += 'c';
               ++count[2];
               round_over = true;
            }
            else {
               line += 'k';
               ++count[0];
               round_over = s.actions_in_round > 0;
            }
            break;
         case kRaise:
            if(s.raises >= params_.max_raises) {
               throw StructuralError("poker: raise cap exceeded");
            }
            s.stake[static_cast< std::size_t >(p)] = s.stake[static_cast< std::size_t >(opp)]
                                                     + params_.bet_sizes[static_cast< std::size_t >(s.round)];
            line += s.raises == 0 ? 'b' : 'r';
            ++s.raises;
            ++count[1];
            break;
         default: throw StructuralError("poker: unknown action id");
      }
      ++s.actions_in_round;
      s.to_act = opp;
      if(round_over) {
         if(s.round + 1 < rounds) {
            s.awaiting_board = true;
         }
         else {
            s.terminal = true;
         }
      }
   }
   return s;
}

bool PokerRules::is_terminal(const History& h) const
{
   return replay(h).terminal;
}

PlayerId PokerRules::current_player(const History& h) const
{
   const State s = replay(h);
   if(s.terminal) {
      throw StructuralError("poker: no player acts at a terminal");
   }
   if(s.hole[0] < 0 || s.hole[1] < 0 || s.awaiting_board) {
      return PlayerId::chance();
   }
   return PlayerId{s.to_act};
}

std::vector< Action > PokerRules::legal_actions(const History& h) const
{
   const State s = replay(h);
   std::vector< Action > out;
   if(s.terminal) {
      return out;
   }
   if(s.hole[0] < 0 || s.hole[1] < 0 || s.awaiting_board) {
      for(int c = 0; c < static_cast< int >(params_.deck.size()); ++c) {
         if(c != s.hole[0] && c != s.hole[1]) {
            out.push_back(Action{c, kRankLabels[static_cast< std::size_t >(params_.deck[static_cast< std::size_t >(c)])]});
         }
      }
      return out;
   }
   const int p = s.to_act;
   const bool facing = s.stake[static_cast< std::size_t >(p)] < s.stake[static_cast< std::size_t >(1 - p)];
   const bool can_raise = s.raises < params_.max_raises;
   if(facing) {
      out.push_back(Action{kFold, "fold"});
      out.push_back(Action{kCall, "call"});
      if(can_raise) {
         out.push_back(Action{kRaise, "raise"});
      }
   }
   else {
      out.push_back(Action{kCall, "check"});
      if(can_raise) {
         out.push_back(Action{kRaise, s.raises == 0 ? "bet" : "raise"});
      }
   }
   return out;
}

std::vector< double > PokerRules::chance_probabilities(const History& h) const
{
   const auto n = legal_actions(h).size();
   return std::vector< double >(n, 1.0 / static_cast< double >(n));
}

std::string PokerRules::observation(const History& h) const
{
   const State s = replay(h);
   std::string key;
   key += kRankChars[static_cast< std::size_t >(params_.deck[static_cast< std::size_t >(s.hole[static_cast< std::size_t >(s.to_act)])])];
   if(s.board >= 0) {
      key += kRankChars[static_cast< std::size_t >(params_.deck[static_cast< std::size_t >(s.board)])];
   }
   key += ':';
   for(int r = 0; r <= s.round; ++r) {
      if(r > 0) {
         key += '/';
      }
      key += s.lines[static_cast< std::size_t >(r)];
   }
   return key;
}

int PokerRules::showdown_winner(const State& s) const
{
   const auto rank = [&](int card) { return params_.deck[static_cast< std::size_t >(card)]; };
   const int r0 = rank(s.hole[0]);
   const int r1 = rank(s.hole[1]);
   if(s.board >= 0) {
      const int b = rank(s.board);
      const bool pair0 = r0 == b;
      const bool pair1 = r1 == b;
      if(pair0 != pair1) {
         return pair0 ? 0 : 1;
      }
   }
   if(r0 == r1) {
      return -1;
   }
   return r0 > r1 ? 0 : 1;
}

double PokerRules::utility(const History& terminal, PlayerId player, TypeId type) const
{
   const State s = replay(terminal);
   if(! s.terminal) {
      throw StructuralError("poker: utility requested at a non-terminal history");
   }
   std::optional< PlayerId > winner;
   if(s.folder >= 0) {
      winner = PlayerId{1 - s.folder};
   }
   else if(const int w = showdown_winner(s); w >= 0) {
      winner = PlayerId{w};
   }
   PotState pot;
   pot.stakes = s.stake;
   pot.big_blind = params_.ante;
   pot.min_pot = 2.0 * params_.ante;
   const auto u = payoff_transform(model_.kinds().at(static_cast< std::size_t >(type.index)), winner, pot);
   return u[static_cast< std::size_t >(player.index)];
}

std::size_t PokerRules::feature_length() const
{
   return static_cast< std::size_t >(num_rounds()) * 8 + 5;
}

std::vector< double > PokerRules::history_features(const History& h) const
{
   const State s = replay(h);
   std::vector< double > f;
   f.reserve(feature_length());
   for(const auto& round : s.counts) {
      for(const auto& seat : round) {
         for(int c : seat) {
            f.push_back(static_cast< double >(c));
         }
      }
   }
   f.push_back(s.stake[0] / params_.ante);
   f.push_back(s.stake[1] / params_.ante);
   const bool showdown = s.terminal && s.folder < 0;
   f.push_back(showdown ? 1.0 : 0.0);
   // Hole cards are revealed at a showdown only; ranks are shifted so 0 means hidden.
   for(int seat = 0; seat < 2; ++seat) {
      const int card = s.hole[static_cast< std::size_t >(seat)];
      f.push_back(showdown ? 1.0 + params_.deck[static_cast< std::size_t >(card)] : 0.0);
   }
   return f;
}

double PokerRules::hand_strength(const History& h, PlayerId player) const
{
   const State s = replay(h);
   const int card = s.hole[static_cast< std::size_t >(player.index)];
   if(card < 0) {
      throw StructuralError("poker: hand strength before the deal");
   }
   const int max_rank = *std::max_element(params_.deck.begin(), params_.deck.end());
   const int rank = params_.deck[static_cast< std::size_t >(card)];
   const double base = static_cast< double >(rank) / static_cast< double >(max_rank);
   if(s.board < 0) {
      return base;
   }
   return rank == params_.deck[static_cast< std::size_t >(s.board)] ? 1.0 : 0.75 * base;
}

std::vector< double > PokerRules::reference_policy(const History& h, std::optional< TypeId > type) const
{
   const auto actions = legal_actions(h);
   const State s = replay(h);
   std::optional< PayoffKind > kind;
   if(type) {
      kind = model_.kinds().at(static_cast< std::size_t >(type->index));
   }
   const Temperament t = temperament(kind);
   const double strength = hand_strength(h, PlayerId{s.to_act});
   const bool facing = actions.front().id == kFold;
   const bool can_raise = actions.back().id == kRaise;
   std::vector< double > probs(actions.size(), 0.0);
   if(! facing) {
      const double bet = can_raise ? std::clamp(t.aggression * (0.3 + 0.7 * strength), 0.05, 0.95) : 0.0;
      probs[0] = 1.0 - bet;
      if(can_raise) {
         probs[1] = bet;
      }
      return probs;
   }
   const double fold = std::clamp(t.fold_propensity * (1.0 - strength), 0.02, 0.9);
   const double raise = can_raise ? std::clamp(t.aggression * strength * strength, 0.02, 0.9) * (1.0 - fold) : 0.0;
   probs[0] = fold;
   probs[1] = 1.0 - fold - raise;
   if(can_raise) {
      probs[2] = raise;
   }
   return probs;
}

// ---------------------------------------------------------------------------

std::shared_ptr< const PokerRules > make_kuhn_rules(const TypeModel& model)
{
   return std::make_shared< const PokerRules >(PokerParams{"kuhn", {0, 1, 2}, {1.0}, 1, 1.0}, model);
}

std::shared_ptr< const PokerRules > make_leduc_rules(const TypeModel& model)
{
   return std::make_shared< const PokerRules >(PokerParams{"leduc", {0, 0, 1, 1, 2, 2}, {2.0, 4.0}, 2, 1.0}, model);
}

GameSpec build_kuhn(const TypeModel& model)
{
   return GameSpec::build(make_kuhn_rules(model));
}

GameSpec build_leduc(const TypeModel& model)
{
   return GameSpec::build(make_leduc_rules(model));
}

GameSpec build_game(const std::string& name, const TypeModel& model)
{
   if(name == "kuhn") {
      return build_kuhn(model);
   }
   if(name == "leduc") {
      return build_leduc(model);
   }
   throw ConfigError("unknown game '" + name + "'");
}

}  // namespace bcfr
