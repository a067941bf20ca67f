#include "bcfr/approx_net.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "bcfr/error.hpp"
#include "bcfr/regret.hpp"
#include "bcfr/typed_games.hpp"

namespace bcfr {

namespace {

constexpr const char* kLineKinds = "kbrcf";
constexpr std::size_t kNumLineKinds = 5;

/// Index of the only hot entry of a one-hot block; nullopt when the block is all zero.
std::optional< std::size_t > hot_index(std::span< const double > block, const char* what)
{
   std::optional< std::size_t > hot;
   for(std::size_t k = 0; k < block.size(); ++k) {
      if(block[k] == 1.0) {
         if(hot) {
            throw ValidationError(std::string("encoding: several hot entries in the ") + what + " block");
         }
         hot = k;
      }
      else if(block[k] != 0.0) {
         throw ValidationError(std::string("encoding: non-binary entry in the ") + what + " block");
      }
   }
   return hot;
}

}  // namespace

TypeId InfosetEncoding::type() const
{
   if(type_offset + num_types > values.size()) {
      throw ValidationError("encoding: type block outside the vector");
   }
   const auto hot = hot_index(std::span< const double >(values).subspan(type_offset, num_types), "type");
   if(! hot) {
      throw ValidationError("encoding: no hot entry in the type block");
   }
   return TypeId{static_cast< int >(*hot)};
}

InfosetEncoder::InfosetEncoder(const GameSpec& spec)
{
   const auto* rules = dynamic_cast< const PokerRules* >(&spec.rules());
   if(! rules) {
      throw UnsupportedModeError("encoding: only poker games have an infoset encoding");
   }
   const auto& params = rules->params();
   num_ranks_ = static_cast< std::size_t >(*std::max_element(params.deck.begin(), params.deck.end()) + 1);
   rounds_ = static_cast< std::size_t >(rules->num_rounds());
   slots_ = static_cast< std::size_t >(params.max_raises) + 2;
   num_types_ = static_cast< std::size_t >(spec.num_types());

   seat_offset_ = 0;
   rank_offset_ = seat_offset_ + 2;
   board_offset_ = rank_offset_ + num_ranks_;
   line_offset_ = board_offset_ + (rounds_ > 1 ? num_ranks_ : 0);
   stake_offset_ = line_offset_ + rounds_ * slots_ * kNumLineKinds;
   type_offset_ = stake_offset_ + 2;
   length_ = type_offset_ + num_types_;

   const double unit = 2.0 * params.ante;
   infosets_.resize(spec.num_infosets());
   stakes_.resize(spec.num_infosets());
   for(std::size_t i = 0; i < spec.num_infosets(); ++i) {
      const auto& info = spec.infoset(static_cast< int >(i));
      const auto state = rules->replay(spec.history_of(info.nodes.front()));
      const int p = info.key.player.index;
      DecodedInfoset d;
      d.player = p;
      d.private_rank = params.deck[static_cast< std::size_t >(state.hole[static_cast< std::size_t >(p)])];
      if(state.board >= 0) {
         d.board_rank = params.deck[static_cast< std::size_t >(state.board)];
      }
      d.lines = state.lines;
      for(const auto& line : d.lines) {
         if(line.size() > slots_) {
            throw StructuralError("encoding: betting line longer than its slots");
         }
      }
      infosets_[i] = std::move(d);
      stakes_[i] = {state.stake[static_cast< std::size_t >(p)] / unit, state.stake[static_cast< std::size_t >(1 - p)] / unit};
   }
}

InfosetEncoding InfosetEncoder::encode(int infoset, TypeId type) const
{
   if(infoset < 0 || static_cast< std::size_t >(infoset) >= infosets_.size()) {
      throw ValidationError("encoding: infoset out of range");
   }
   if(type.index < 0 || static_cast< std::size_t >(type.index) >= num_types_) {
      throw ValidationError("encoding: type out of range");
   }
   const auto& d = infosets_[static_cast< std::size_t >(infoset)];
   InfosetEncoding e;
   e.values.assign(length_, 0.0);
   e.type_offset = type_offset_;
   e.num_types = num_types_;
   e.values[seat_offset_ + static_cast< std::size_t >(d.player)] = 1.0;
   e.values[rank_offset_ + static_cast< std::size_t >(d.private_rank)] = 1.0;
   if(d.board_rank) {
      e.values[board_offset_ + static_cast< std::size_t >(*d.board_rank)] = 1.0;
   }
   for(std::size_t r = 0; r < rounds_; ++r) {
      const auto& line = d.lines[r];
      for(std::size_t j = 0; j < line.size(); ++j) {
         const auto kind = static_cast< std::size_t >(std::string_view(kLineKinds).find(line[j]));
         e.values[line_offset_ + (r * slots_ + j) * kNumLineKinds + kind] = 1.0;
      }
   }
   e.values[stake_offset_] = stakes_[static_cast< std::size_t >(infoset)][0];
   e.values[stake_offset_ + 1] = stakes_[static_cast< std::size_t >(infoset)][1];
   e.values[type_offset_ + static_cast< std::size_t >(type.index)] = 1.0;
   return e;
}

DecodedInfoset InfosetEncoder::decode(const InfosetEncoding& e) const
{
   if(e.values.size() != length_ || e.type_offset != type_offset_ || e.num_types != num_types_) {
      throw ValidationError("encoding: layout does not match this encoder");
   }
   const std::span< const double > v(e.values);
   DecodedInfoset d;
   const auto seat = hot_index(v.subspan(seat_offset_, 2), "seat");
   const auto rank = hot_index(v.subspan(rank_offset_, num_ranks_), "rank");
   if(! seat || ! rank) {
      throw ValidationError("encoding: missing seat or rank");
   }
   d.player = static_cast< int >(*seat);
   d.private_rank = static_cast< int >(*rank);
   if(rounds_ > 1) {
      if(const auto board = hot_index(v.subspan(board_offset_, num_ranks_), "board")) {
         d.board_rank = static_cast< int >(*board);
      }
   }
   d.lines.assign(rounds_, std::string());
   for(std::size_t r = 0; r < rounds_; ++r) {
      for(std::size_t j = 0; j < slots_; ++j) {
         const auto kind = hot_index(v.subspan(line_offset_ + (r * slots_ + j) * kNumLineKinds, kNumLineKinds), "line");
         if(! kind) {
            break;
         }
         d.lines[r] += kLineKinds[*kind];
      }
   }
   d.type = e.type();
   return d;
}

DecodedInfoset InfosetEncoder::describe(int infoset, TypeId type) const
{
   DecodedInfoset d = infosets_.at(static_cast< std::size_t >(infoset));
   d.type = type;
   return d;
}

// ---------------------------------------------------------------------------

void NetShape::validate() const
{
   if(input == 0 || output == 0) {
      throw ConfigError("network: input and output sizes must be positive");
   }
   for(std::size_t h : hidden) {
      if(h == 0) {
         throw ConfigError("network: hidden layers must be non-empty");
      }
   }
   if(type_offset + type_length > input) {
      throw ConfigError("network: type block lies outside the input");
   }
   if(type_layer > hidden.size()) {
      throw ConfigError("network: type layer index beyond the last layer");
   }
   if(type_layer > 0 && type_length == 0) {
      throw ConfigError("network: a type layer needs a type block");
   }
   if(type_layer > 0 && type_length == input) {
      throw ConfigError("network: the input holds nothing but the type block");
   }
}

Mlp::Mlp(NetShape shape, std::uint64_t seed) : shape_(std::move(shape))
{
   shape_.validate();
   const std::size_t n = shape_.hidden.size() + 1;
   std::size_t offset = 0;
   for(std::size_t k = 0; k < n; ++k) {
      Layer layer;
      if(k == 0) {
         layer.in = shape_.type_layer == 0 ? shape_.input : shape_.input - shape_.type_length;
      }
      else {
         layer.in = shape_.hidden[k - 1] + (shape_.type_layer == k ? shape_.type_length : 0);
      }
      layer.out = k + 1 < n ? shape_.hidden[k] : shape_.output;
      layer.weight_offset = offset;
      offset += layer.in * layer.out;
      layer.bias_offset = offset;
      offset += layer.out;
      layers_.push_back(layer);
   }
   params_.assign(offset, 0.0);
   Rng rng(seed);
   for(std::size_t k = 0; k + 1 < n; ++k) {
      const Layer& layer = layers_[k];
      const double scale = std::sqrt(2.0 / static_cast< double >(layer.in));
      for(std::size_t j = 0; j < layer.in * layer.out; ++j) {
         params_[layer.weight_offset + j] = scale * rng.normal();
      }
   }
}

void Mlp::run(std::span< const double > x,
              std::vector< std::vector< double > >& inputs,
              std::vector< std::vector< double > >& pre) const
{
   if(x.size() != shape_.input) {
      throw StructuralError("network: input has length " + std::to_string(x.size()) + ", expected "
                            + std::to_string(shape_.input));
   }
   const std::span< const double > type_block = x.subspan(shape_.type_offset, shape_.type_length);
   inputs.resize(layers_.size());
   pre.resize(layers_.size());
   for(std::size_t k = 0; k < layers_.size(); ++k) {
      auto& in = inputs[k];
      in.clear();
      if(k == 0) {
         if(shape_.type_layer == 0) {
            in.assign(x.begin(), x.end());
         }
         else {
            for(std::size_t j = 0; j < x.size(); ++j) {
               if(j < shape_.type_offset || j >= shape_.type_offset + shape_.type_length) {
                  in.push_back(x[j]);
               }
            }
         }
      }
      else {
         const auto& prev = pre[k - 1];
         in.resize(prev.size());
         for(std::size_t j = 0; j < prev.size(); ++j) {
            in[j] = prev[j] > 0.0 ? prev[j] : 0.0;
         }
         if(shape_.type_layer == k) {
            in.insert(in.end(), type_block.begin(), type_block.end());
         }
      }
      const Layer& layer = layers_[k];
      auto& out = pre[k];
      out.assign(layer.out, 0.0);
      const double* w = params_.data() + layer.weight_offset;
      const double* b = params_.data() + layer.bias_offset;
      for(std::size_t r = 0; r < layer.out; ++r) {
         double s = b[r];
         const double* row = w + r * layer.in;
         for(std::size_t c = 0; c < layer.in; ++c) {
            s += row[c] * in[c];
         }
         out[r] = s;
      }
   }
}

std::vector< double > Mlp::forward(std::span< const double > x) const
{
   std::vector< std::vector< double > > inputs;
   std::vector< std::vector< double > > pre;
   run(x, inputs, pre);
   return pre.back();
}

namespace {

double total_weight(const Mlp::Batch& batch)
{
   if(batch.inputs.empty() || batch.inputs.size() != batch.targets.size()
      || batch.inputs.size() != batch.num_actions.size() || batch.inputs.size() != batch.weights.size()) {
      throw ValidationError("network: batch is empty or its fields disagree in length");
   }
   double w = 0.0;
   for(double x : batch.weights) {
      w += x;
   }
   if(! (w > 0.0)) {
      throw ValidationError("network: batch weights must have a positive sum");
   }
   return w;
}

}  // namespace

double Mlp::loss(const Batch& batch) const
{
   const double total = total_weight(batch);
   double l = 0.0;
   for(std::size_t b = 0; b < batch.inputs.size(); ++b) {
      const auto y = forward(std::span< const double >(batch.inputs[b], shape_.input));
      double s = 0.0;
      for(std::size_t a = 0; a < batch.num_actions[b]; ++a) {
         const double d = batch.targets[b][a] - y[a];
         s += d * d;
      }
      l += batch.weights[b] / total * s;
   }
   return l;
}

double Mlp::loss_and_gradient(const Batch& batch, std::vector< double >& gradient) const
{
   const double total = total_weight(batch);
   gradient.assign(params_.size(), 0.0);
   std::vector< std::vector< double > > inputs;
   std::vector< std::vector< double > > pre;
   std::vector< double > delta;
   std::vector< double > back;
   double l = 0.0;
   for(std::size_t b = 0; b < batch.inputs.size(); ++b) {
      if(batch.num_actions[b] > shape_.output) {
         throw StructuralError("network: target longer than the output layer");
      }
      run(std::span< const double >(batch.inputs[b], shape_.input), inputs, pre);
      const auto& y = pre.back();
      const double w = batch.weights[b] / total;
      delta.assign(y.size(), 0.0);
      double s = 0.0;
      for(std::size_t a = 0; a < batch.num_actions[b]; ++a) {
         const double d = y[a] - batch.targets[b][a];
         s += d * d;
         delta[a] = 2.0 * w * d;
      }
      l += w * s;
      for(std::size_t k = layers_.size(); k-- > 0;) {
         const Layer& layer = layers_[k];
         const auto& in = inputs[k];
         double* gw = gradient.data() + layer.weight_offset;
         double* gb = gradient.data() + layer.bias_offset;
         const double* wt = params_.data() + layer.weight_offset;
         for(std::size_t r = 0; r < layer.out; ++r) {
            const double d = delta[r];
            if(d == 0.0) {
               continue;
            }
            gb[r] += d;
            double* row = gw + r * layer.in;
            for(std::size_t c = 0; c < layer.in; ++c) {
               row[c] += d * in[c];
            }
         }
         if(k == 0) {
            break;
         }
         const std::size_t hidden = shape_.hidden[k - 1];
         back.assign(hidden, 0.0);
         for(std::size_t r = 0; r < layer.out; ++r) {
            const double d = delta[r];
            if(d == 0.0) {
               continue;
            }
            const double* row = wt + r * layer.in;
            for(std::size_t c = 0; c < hidden; ++c) {
               back[c] += d * row[c];
            }
         }
         const auto& z = pre[k - 1];
         for(std::size_t c = 0; c < hidden; ++c) {
            if(z[c] <= 0.0) {
               back[c] = 0.0;
            }
         }
         delta.swap(back);
      }
   }
   return l;
}

void SgdOptimizer::step(std::span< double > params, std::span< const double > gradient)
{
   for(std::size_t k = 0; k < params.size(); ++k) {
      params[k] -= lr_ * gradient[k];
   }
}

void AdamOptimizer::step(std::span< double > params, std::span< const double > gradient)
{
   if(m_.size() != params.size()) {
      m_.assign(params.size(), 0.0);
      v_.assign(params.size(), 0.0);
      t_ = 0;
   }
   ++t_;
   const double c1 = 1.0 - std::pow(beta1_, static_cast< double >(t_));
   const double c2 = 1.0 - std::pow(beta2_, static_cast< double >(t_));
   for(std::size_t k = 0; k < params.size(); ++k) {
      m_[k] = beta1_ * m_[k] + (1.0 - beta1_) * gradient[k];
      v_[k] = beta2_ * v_[k] + (1.0 - beta2_) * gradient[k] * gradient[k];
      params[k] -= lr_ * (m_[k] / c1) / (std::sqrt(v_[k] / c2) + epsilon_);
   }
}

namespace {

double checked_rate(double learning_rate)
{
   if(! std::isfinite(learning_rate) || learning_rate < 0.0) {
      throw ConfigError("optimizer: learning rate must be finite and non-negative");
   }
   return learning_rate;
}

}  // namespace

void SgdOptimizer::set_learning_rate(double learning_rate)
{
   lr_ = checked_rate(learning_rate);
}

void AdamOptimizer::set_learning_rate(double learning_rate)
{
   lr_ = checked_rate(learning_rate);
}

std::unique_ptr< Optimizer > make_optimizer(const std::string& name, double learning_rate)
{
   if(! (learning_rate >= 0.0)) {
      throw ConfigError("optimizer: learning rate must be non-negative");
   }
   if(name == "sgd") {
      return std::make_unique< SgdOptimizer >(learning_rate);
   }
   if(name == "adam") {
      return std::make_unique< AdamOptimizer >(learning_rate);
   }
   throw ConfigError("optimizer: unknown optimizer '" + name + "'");
}

double clip_gradient(std::span< double > gradient, double max_norm)
{
   double sq = 0.0;
   for(double g : gradient) {
      sq += g * g;
   }
   const double norm = std::sqrt(sq);
   if(max_norm > 0.0 && norm > max_norm) {
      const double s = max_norm / norm;
      for(double& g : gradient) {
         g *= s;
      }
   }
   return norm;
}

double train_step(Mlp& net, Optimizer& optimizer, const Mlp::Batch& batch, double clip_norm)
{
   std::vector< double > gradient;
   const double l = net.loss_and_gradient(batch, gradient);
   const double norm = clip_gradient(gradient, clip_norm);
   if(! std::isfinite(l) || ! std::isfinite(norm)) {
      double largest = 0.0;
      for(double p : net.parameters()) {
         largest = std::max(largest, std::abs(p));
      }
      std::ostringstream msg;
      msg << "training diverged: loss=" << l << " gradient_norm=" << norm << " max|param|=" << largest
          << " batch=" << batch.inputs.size() << " lr=" << optimizer.learning_rate();
      throw TrainingDivergedError(msg.str());
   }
   optimizer.step(net.mutable_parameters(), gradient);
   return l;
}

// ---------------------------------------------------------------------------

ReplayMemory::ReplayMemory(std::size_t capacity, MemoryPolicy policy) : capacity_(capacity), policy_(policy)
{
   if(capacity == 0) {
      throw ConfigError("memory: capacity must be positive");
   }
}

void ReplayMemory::insert(MemoryRecord record, Rng& rng)
{
   ++insertions_;
   if(records_.size() < capacity_) {
      records_.push_back(std::move(record));
      return;
   }
   if(policy_ == MemoryPolicy::fifo) {
      records_.pop_front();
      records_.push_back(std::move(record));
      return;
   }
   const std::size_t j = rng.uniform_index(static_cast< std::size_t >(insertions_));
   if(j < capacity_) {
      records_[j] = std::move(record);
   }
}

// ---------------------------------------------------------------------------

namespace {

constexpr std::uint32_t kNetworkMagic = 0x54454e42;  // "BNET"

}  // namespace

void save_network(std::ostream& out, const Mlp& net)
{
   const auto& s = net.shape();
   write_u32(out, kNetworkMagic);
   write_u32(out, kNetworkCheckpointVersion);
   write_u64(out, s.input);
   write_u64(out, s.output);
   write_u64(out, s.hidden.size());
   for(std::size_t h : s.hidden) {
      write_u64(out, h);
   }
   write_u64(out, s.type_offset);
   write_u64(out, s.type_length);
   write_u64(out, s.type_layer);
   write_u64(out, net.num_parameters());
   for(double p : net.parameters()) {
      write_f64(out, p);
   }
   if(! out) {
      throw CheckpointError("network checkpoint: write failed");
   }
}

Mlp load_network(std::istream& in)
{
   if(read_u32(in) != kNetworkMagic) {
      throw CheckpointError("network checkpoint: bad magic");
   }
   if(read_u32(in) != kNetworkCheckpointVersion) {
      throw CheckpointError("network checkpoint: unsupported version");
   }
   NetShape s;
   s.input = read_u64(in);
   s.output = read_u64(in);
   const std::uint64_t layers = read_u64(in);
   if(layers > 64) {
      throw CheckpointError("network checkpoint: implausible layer count");
   }
   s.hidden.resize(layers);
   for(auto& h : s.hidden) {
      h = read_u64(in);
   }
   s.type_offset = read_u64(in);
   s.type_length = read_u64(in);
   s.type_layer = read_u64(in);
   Mlp net;
   try {
      net = Mlp(s, 0);
   }
   catch(const ConfigError& e) {
      throw CheckpointError(std::string("network checkpoint: bad shape: ") + e.what());
   }
   if(read_u64(in) != net.num_parameters()) {
      throw CheckpointError("network checkpoint: parameter count does not match the shape");
   }
   for(double& p : net.mutable_parameters()) {
      p = read_f64(in);
      if(! std::isfinite(p)) {
         throw CheckpointError("network checkpoint: non-finite parameter");
      }
   }
   return net;
}

}  // namespace bcfr
