#include "bcfr/rng.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "bcfr/error.hpp"

namespace bcfr {

std::size_t Rng::uniform_index(std::size_t n)
{
   if(n == 0) {
      throw ValidationError("uniform_index: empty range");
   }
   // Rejection sampling removes modulo bias.
   const std::uint64_t limit = std::numeric_limits< std::uint64_t >::max()
                               - std::numeric_limits< std::uint64_t >::max() % n;
   std::uint64_t x = engine_();
   while(x >= limit) {
      x = engine_();
   }
   return static_cast< std::size_t >(x % n);
}

double Rng::normal()
{
   const double u1 = 1.0 - uniform();
   const double u2 = uniform();
   return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
}

std::size_t Rng::categorical(std::span< const double > weights)
{
   double total = 0.0;
   for(double w : weights) {
      total += w;
   }
   if(weights.empty() || ! (total > 0.0)) {
      throw ValidationError("categorical: weights must have a positive sum");
   }
   const double u = uniform() * total;
   double acc = 0.0;
   std::size_t last_positive = 0;
   for(std::size_t i = 0; i < weights.size(); ++i) {
      if(weights[i] <= 0.0) {
         continue;
      }
      acc += weights[i];
      last_positive = i;
      if(u < acc) {
         return i;
      }
   }
   // Rounding left u at or above the accumulated total.
   return last_positive;
}

std::string Rng::serialize() const
{
   std::ostringstream os;
   os << engine_;
   return os.str();
}

Rng Rng::deserialize(const std::string& state)
{
   Rng rng;
   std::istringstream is(state);
   is >> rng.engine_;
   if(is.fail()) {
      throw ValidationError("Rng::deserialize: malformed engine state");
   }
   return rng;
}

}  // namespace bcfr
