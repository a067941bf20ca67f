#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>

namespace bcfr {

/// Seeded random stream.
///
/// Wraps `std::mt19937_64` (whose output sequence is fixed by the standard) and
/// derives every variate from raw engine bits, so draws are reproducible across
/// standard library implementations. The standard distributions are avoided on
/// purpose: their algorithms are implementation-defined.
class Rng {
  public:
   explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

   std::uint64_t next_u64() { return engine_(); }

   /// Uniform in [0, 1) with 53 bits of precision.
   double uniform() { return static_cast< double >(engine_() >> 11) * 0x1.0p-53; }

   /// Uniform integer in [0, n). `n` must be positive.
   std::size_t uniform_index(std::size_t n);

   /// Standard normal variate (Box-Muller, one draw per call).
   double normal();

   /// Index drawn proportionally to `weights` (non-negative, positive sum).
   std::size_t categorical(std::span< const double > weights);

   /// Derive an independent child stream (used to give sub-components their own seeds).
   Rng split() { return Rng(next_u64() ^ 0x9e3779b97f4a7c15ULL); }

   /// Textual engine state; restoring it continues the exact same stream.
   std::string serialize() const;
   static Rng deserialize(const std::string& state);

   friend bool operator==(const Rng& a, const Rng& b) { return a.engine_ == b.engine_; }

  private:
   std::mt19937_64 engine_;
};

}  // namespace bcfr
