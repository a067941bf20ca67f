#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "bcfr/game.hpp"

namespace bcfr {

enum class RegretMode : std::uint32_t { vanilla = 0, plus = 1 };
enum class AveragingScheme : std::uint32_t { uniform = 0, linear = 1 };

/// Dense (type, infoset, action) accumulators shared by both tables.
class DenseTable {
  public:
   DenseTable() = default;
   DenseTable(std::shared_ptr< const TableLayout > layout, int num_types);

   int num_types() const { return num_types_; }
   const TableLayout& layout() const { return *layout_; }
   std::shared_ptr< const TableLayout > layout_ptr() const { return layout_; }

   std::span< const double > at(TypeId type, int infoset) const;
   std::span< const double > raw() const { return values_; }

   void clear();

   friend bool operator==(const DenseTable& a, const DenseTable& b) { return a.values_ == b.values_; }

  protected:
   std::span< double > slot(TypeId type, int infoset);
   std::vector< double >& values() { return values_; }

  private:
   std::size_t offset(TypeId type, int infoset) const;

   std::shared_ptr< const TableLayout > layout_;
   int num_types_ = 1;
   std::vector< double > values_;
};

/// Cumulative (Bayesian) counterfactual regret per (type, infoset, action).
class RegretTable : public DenseTable {
  public:
   RegretTable() = default;
   RegretTable(std::shared_ptr< const TableLayout > layout, int num_types, RegretMode mode);

   RegretMode mode() const { return mode_; }

   /// entry += weight × increments. Throws ModeMismatchError on a plus table.
   void accumulate_vanilla(TypeId type, int infoset, std::span< const double > increments, double weight);
   /// entry ← max(entry + weight × increments, 0). Throws ModeMismatchError on a vanilla table.
   void accumulate_plus(TypeId type, int infoset, std::span< const double > increments, double weight);
   /// Dispatches on the table's mode.
   void accumulate(TypeId type, int infoset, std::span< const double > increments, double weight);

   /// Adds the summed deltas (in order) to every entry, then clamps in plus mode.
   ///
   /// Deltas must be vanilla tables of the same shape; they hold raw weighted
   /// increments collected by independent traversals.
   void merge(std::span< const RegretTable* const > deltas);

   /// Overwrites entries from a checkpoint or another table of identical shape.
   void assign(std::span< const double > values);

  private:
   RegretMode mode_ = RegretMode::vanilla;
};

/// σ(I,a) ∝ max(R(I,a), 0); uniform when no entry is positive.
void regret_match(std::span< const double > regrets, std::span< double > out);
std::vector< double > regret_match(const RegretTable& table, TypeId type, int infoset);

/// Weighted strategy sums s(I,a) per (type, infoset, action).
class StrategyTable : public DenseTable {
  public:
   StrategyTable() = default;
   StrategyTable(std::shared_ptr< const TableLayout > layout, int num_types, AveragingScheme scheme);

   AveragingScheme scheme() const { return scheme_; }

   /// s += reach × σ (uniform) or s += t × reach × σ (linear).
   void add_strategy_weight(TypeId type, int infoset, std::span< const double > sigma, double reach, int iteration);

   void merge(std::span< const StrategyTable* const > deltas);
   void assign(std::span< const double > values);

  private:
   AveragingScheme scheme_ = AveragingScheme::uniform;
};

/// s(I,·) / Σ s(I,·); uniform for an infoset that was never weighted.
void average_strategy(std::span< const double > sums, std::span< double > out);
std::vector< double > average_strategy(const StrategyTable& table, TypeId type, int infoset);

/// Average strategy for every (type, infoset) as a profile.
StrategyProfile average_profile(const GameSpec& spec, const StrategyTable& table);
/// Regret-matched current strategy for every (type, infoset) as a profile.
StrategyProfile current_profile(const GameSpec& spec, const RegretTable& table);

// ---------------------------------------------------------------------------
// Binary checkpoints: header (magic, version, table kind, mode, game hash, |Θ|,
// infoset count, entry count) followed by little-endian 64-bit floats in index
// order.

constexpr std::uint32_t kCheckpointVersion = 1;

void save_checkpoint(std::ostream& out, const GameSpec& spec, const RegretTable& table);
void save_checkpoint(std::ostream& out, const GameSpec& spec, const StrategyTable& table);
/// Throws CheckpointError on a malformed stream or a shape/hash mismatch with `spec`.
RegretTable load_regret_checkpoint(std::istream& in, const GameSpec& spec);
StrategyTable load_strategy_checkpoint(std::istream& in, const GameSpec& spec);

/// Little-endian helpers shared with the network checkpoints.
void write_u32(std::ostream& out, std::uint32_t v);
void write_u64(std::ostream& out, std::uint64_t v);
void write_f64(std::ostream& out, double v);
std::uint32_t read_u32(std::istream& in);
std::uint64_t read_u64(std::istream& in);
double read_f64(std::istream& in);

}  // namespace bcfr
