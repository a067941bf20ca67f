#pragma once

#include <array>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "bcfr/game.hpp"

namespace bcfr {

/// How the responder treats the type.
enum class TypeKnowledge {
   aware,  ///< a separate best response per θ (the type is observed)
   blind,  ///< one best response against the belief-weighted mixture
};

struct BestResponse {
   double value = 0.0;
   StrategyProfile strategy;  ///< pure; only the responder's infosets are meaningful
};

/// Exact best response of `player` against `opponent` under `belief`.
///
/// Max-backup over the responder's infosets, deepest first, with opponent and
/// chance reach weights summed over θ. Ties go to the lowest action index.
BestResponse best_response(const GameSpec& spec,
                           const StrategyProfile& opponent,
                           std::span< const double > belief,
                           PlayerId player,
                           TypeKnowledge knowledge = TypeKnowledge::aware);

struct ExploitabilityReport {
   std::array< double, 2 > best_response_value{0.0, 0.0};
   std::array< double, 2 > profile_value{0.0, 0.0};
   double exploitability = 0.0;  ///< Σ_i (BR_i − u_i), chips per hand
   double mbb_per_game = 0.0;
   double big_blind = 1.0;
   std::vector< double > belief;
   std::string source;
   long iteration = 0;
};

/// Σ_i (BR_i − u_i). Throws UnsupportedModeError unless the game is two-player zero-sum.
ExploitabilityReport exploitability(const GameSpec& spec,
                                    const StrategyProfile& profile,
                                    std::span< const double > belief,
                                    TypeKnowledge knowledge = TypeKnowledge::aware,
                                    double big_blind = 1.0);

/// ε / big_blind × 1000. Throws ValidationError for a non-positive big blind.
double to_mbbg(double epsilon, double big_blind);

/// Σ_θ |belief(θ) − truth(θ)|.
double posterior_l1_error(std::span< const double > belief, std::span< const double > truth);

/// Point mass on `type` over a space of `num_types`.
std::vector< double > point_mass(int num_types, TypeId type);

}  // namespace bcfr
