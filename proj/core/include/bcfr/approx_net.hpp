#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bcfr/game.hpp"
#include "bcfr/rng.hpp"

namespace bcfr {

// ---------------------------------------------------------------------------
// Input encoding

/// Fixed-length network input for one (infoset, type) pair.
struct InfosetEncoding {
   std::vector< double > values;
   std::size_t type_offset = 0;  ///< start of the |Θ|-long one-hot type block
   std::size_t num_types = 0;

   /// Index of the hot entry in the type block; throws ValidationError unless exactly one is hot.
   TypeId type() const;
};

/// What a poker encoding decodes back to.
struct DecodedInfoset {
   int player = 0;
   int private_rank = 0;
   std::optional< int > board_rank;
   std::vector< std::string > lines;  ///< per-round betting line up to the decision
   TypeId type;

   friend bool operator==(const DecodedInfoset&, const DecodedInfoset&) = default;
};

/// One-hot encoding of poker infosets: seat, private rank, board rank,
/// per-round betting slots, normalised stakes, then the type block.
class InfosetEncoder {
  public:
   /// Throws UnsupportedModeError unless the game's rules are `PokerRules`.
   explicit InfosetEncoder(const GameSpec& spec);

   std::size_t length() const { return length_; }
   std::size_t type_offset() const { return type_offset_; }
   std::size_t num_types() const { return num_types_; }

   InfosetEncoding encode(int infoset, TypeId type) const;
   DecodedInfoset decode(const InfosetEncoding& encoding) const;
   /// The fields an encoding of `infoset` must decode to.
   DecodedInfoset describe(int infoset, TypeId type) const;

  private:
   std::size_t num_ranks_ = 0;
   std::size_t rounds_ = 0;
   std::size_t slots_ = 0;
   std::size_t seat_offset_ = 0;
   std::size_t rank_offset_ = 0;
   std::size_t board_offset_ = 0;
   std::size_t line_offset_ = 0;
   std::size_t stake_offset_ = 0;
   std::size_t type_offset_ = 0;
   std::size_t length_ = 0;
   std::size_t num_types_ = 0;
   std::vector< DecodedInfoset > infosets_;
   std::vector< std::array< double, 2 > > stakes_;
};

// ---------------------------------------------------------------------------
// Network

struct NetShape {
   std::size_t input = 0;   ///< encoding length, type block included
   std::vector< std::size_t > hidden{64, 64};
   std::size_t output = 0;  ///< largest action count
   std::size_t type_offset = 0;
   std::size_t type_length = 0;
   /// Layer whose input receives the type block: 0 feeds it with the rest of
   /// the encoding, k > 0 concatenates it to the k-th hidden activation.
   std::size_t type_layer = 0;

   /// Throws ConfigError on empty or inconsistent sizes.
   void validate() const;
};

/// Rectifier feedforward network; every parameter lives in one flat vector.
///
/// Hidden layers use He-scaled Gaussian initialisation; the output layer
/// starts at zero so a fresh network predicts 0 everywhere.
class Mlp {
  public:
   Mlp() = default;
   Mlp(NetShape shape, std::uint64_t seed);

   const NetShape& shape() const { return shape_; }
   std::size_t num_parameters() const { return params_.size(); }
   std::span< const double > parameters() const { return params_; }
   std::span< double > mutable_parameters() { return params_; }

   /// Throws StructuralError when `x` has the wrong length.
   std::vector< double > forward(std::span< const double > x) const;

   /// Σ_b w_b Σ_{a<n_b} (target_{b,a} − y_{b,a})² / Σ_b w_b and its gradient.
   struct Batch {
      std::vector< const double* > inputs;
      std::vector< const double* > targets;
      std::vector< std::size_t > num_actions;
      std::vector< double > weights;
   };
   double loss(const Batch& batch) const;
   double loss_and_gradient(const Batch& batch, std::vector< double >& gradient) const;

   friend bool operator==(const Mlp& a, const Mlp& b) { return a.params_ == b.params_; }

  private:
   struct Layer {
      std::size_t in = 0;
      std::size_t out = 0;
      std::size_t weight_offset = 0;  ///< out × in, row-major
      std::size_t bias_offset = 0;
   };

   /// Layer inputs (pre-activation outputs are kept for the rectifier mask).
   void run(std::span< const double > x,
            std::vector< std::vector< double > >& inputs,
            std::vector< std::vector< double > >& pre) const;

   NetShape shape_;
   std::vector< Layer > layers_;
   std::vector< double > params_;
};

/// Parameter update rule applied to a flat gradient.
class Optimizer {
  public:
   virtual ~Optimizer() = default;
   virtual void step(std::span< double > params, std::span< const double > gradient) = 0;
   virtual double learning_rate() const = 0;
   /// Throws ConfigError for a negative or non-finite rate.
   virtual void set_learning_rate(double learning_rate) = 0;
};

/// Plain momentum-free gradient descent.
class SgdOptimizer : public Optimizer {
  public:
   explicit SgdOptimizer(double learning_rate) : lr_(learning_rate) {}
   void step(std::span< double > params, std::span< const double > gradient) override;
   double learning_rate() const override { return lr_; }
   void set_learning_rate(double learning_rate) override;

  private:
   double lr_;
};

class AdamOptimizer : public Optimizer {
  public:
   explicit AdamOptimizer(double learning_rate, double beta1 = 0.9, double beta2 = 0.999, double epsilon = 1e-8)
       : lr_(learning_rate), beta1_(beta1), beta2_(beta2), epsilon_(epsilon)
   {
   }
   void step(std::span< double > params, std::span< const double > gradient) override;
   double learning_rate() const override { return lr_; }
   void set_learning_rate(double learning_rate) override;

  private:
   double lr_, beta1_, beta2_, epsilon_;
   std::vector< double > m_, v_;
   long t_ = 0;
};

/// "sgd" or "adam"; throws ConfigError otherwise.
std::unique_ptr< Optimizer > make_optimizer(const std::string& name, double learning_rate);

/// One step: loss and gradient on `batch`, gradient clipped to `clip_norm`
/// (0 disables clipping), then the optimizer update. Returns the loss before
/// the step; throws TrainingDivergedError when it is not finite.
double train_step(Mlp& net, Optimizer& optimizer, const Mlp::Batch& batch, double clip_norm);

/// Rescales `gradient` to at most `max_norm` in Euclidean norm; returns the original norm.
double clip_gradient(std::span< double > gradient, double max_norm);

// ---------------------------------------------------------------------------
// Memories

/// Stored sample: the encoding key (infoset, type), its iteration and target.
struct MemoryRecord {
   int infoset = 0;
   TypeId type;
   int iteration = 0;
   std::vector< double > target;
};

enum class MemoryPolicy { reservoir, fifo };

class ReplayMemory {
  public:
   /// Throws ConfigError for a zero capacity.
   ReplayMemory(std::size_t capacity, MemoryPolicy policy);

   std::size_t capacity() const { return capacity_; }
   std::size_t size() const { return records_.size(); }
   bool empty() const { return records_.empty(); }
   std::uint64_t insertions() const { return insertions_; }
   MemoryPolicy policy() const { return policy_; }

   /// Reservoir sampling or FIFO eviction; the rng is used by the reservoir policy only.
   void insert(MemoryRecord record, Rng& rng);

   const MemoryRecord& at(std::size_t k) const { return records_[k]; }
   const std::deque< MemoryRecord >& records() const { return records_; }

  private:
   std::size_t capacity_;
   MemoryPolicy policy_;
   std::uint64_t insertions_ = 0;
   std::deque< MemoryRecord > records_;
};

// ---------------------------------------------------------------------------
// Checkpoints: magic, version, shape, then the parameters as little-endian f64.

constexpr std::uint32_t kNetworkCheckpointVersion = 1;

void save_network(std::ostream& out, const Mlp& net);
/// Throws CheckpointError on a malformed stream.
Mlp load_network(std::istream& in);

}  // namespace bcfr
