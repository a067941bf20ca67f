#pragma once

#include <cmath>
#include <vector>

#include "bcfr/game.hpp"
#include "bcfr/rng.hpp"

namespace testing_helpers {

/// Profile with every vector drawn from a Dirichlet(1)-like distribution
/// (normalised exponentials), occasionally forcing zeros.
inline bcfr::StrategyProfile random_profile(const bcfr::GameSpec& spec, int num_types, bcfr::Rng& rng, bool allow_zeros = false)
{
   bcfr::StrategyProfile p(spec, num_types);
   for(int t = 0; t < num_types; ++t) {
      for(std::size_t i = 0; i < spec.num_infosets(); ++i) {
         const auto n = spec.infoset(static_cast< int >(i)).actions.size();
         std::vector< double > v(n);
         double sum = 0.0;
         for(auto& x : v) {
            x = -std::log(1.0 - rng.uniform());
            if(allow_zeros && rng.uniform() < 0.2) {
               x = 0.0;
            }
            sum += x;
         }
         if(sum == 0.0) {
            v[0] = sum = 1.0;
         }
         for(auto& x : v) {
            x /= sum;
         }
         p.set(bcfr::TypeId{t}, static_cast< int >(i), v);
      }
   }
   return p;
}

}  // namespace testing_helpers
