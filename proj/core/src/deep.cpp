#include "bcfr/deep.hpp"

#include <algorithm>

#include "bcfr/error.hpp"
#include "bcfr/regret.hpp"

namespace bcfr {

namespace {

class NetworkModel : public ValueModel {
  public:
   NetworkModel(const GameSpec& spec,
                const InfosetEncoder& encoder,
                PlayerId player,
                const DeepSettings& settings,
                std::uint64_t seed)
       : spec_(spec), settings_(settings), num_types_(spec.num_types())
   {
      NetShape shape;
      shape.input = encoder.length();
      shape.hidden = settings.hidden;
      shape.output = spec.max_actions(player);
      shape.type_offset = encoder.type_offset();
      shape.type_length = encoder.num_types();
      shape.type_layer = settings.type_layer;
      net_ = Mlp(shape, seed);
      optimizer_ = make_optimizer(settings.optimizer, settings.learning_rate);
      encodings_.resize(spec.num_infosets() * static_cast< std::size_t >(num_types_));
      for(int i : spec.infosets_of(player)) {
         for(int t = 0; t < num_types_; ++t) {
            encodings_[slot(i, TypeId{t})] = encoder.encode(i, TypeId{t}).values;
         }
      }
   }

   std::vector< double > predict(int infoset, TypeId type) const override
   {
      const auto& x = encodings_[slot(infoset, type)];
      if(x.empty()) {
         throw ValidationError("deep-bcfr: infoset belongs to the other player's model");
      }
      auto y = net_.forward(x);
      y.resize(spec_.infoset(infoset).actions.size());
      return y;
   }

   void fit(const ReplayMemory& memory,
            const std::function< double(const MemoryRecord&) >& weight,
            std::size_t steps,
            bool clamped,
            Rng& rng) override
   {
      if(memory.empty()) {
         return;
      }
      // The frozen model's outputs, per (infoset, type) slot.
      std::vector< std::vector< double > > frozen;
      if(clamped) {
         frozen.resize(encodings_.size());
         for(std::size_t k = 0; k < encodings_.size(); ++k) {
            if(! encodings_[k].empty()) {
               frozen[k] = net_.forward(encodings_[k]);
            }
         }
      }
      Mlp::Batch batch;
      std::vector< std::vector< double > > targets(settings_.batch_size);
      double total = 0.0;
      const bool decay = settings_.lr_schedule == "linear";
      for(std::size_t s = 0; s < steps; ++s) {
         if(decay) {
            optimizer_->set_learning_rate(settings_.learning_rate * static_cast< double >(steps - s)
                                          / static_cast< double >(steps));
         }
         batch.inputs.clear();
         batch.targets.clear();
         batch.num_actions.clear();
         batch.weights.clear();
         for(std::size_t b = 0; b < settings_.batch_size; ++b) {
            const MemoryRecord& r = memory.at(rng.uniform_index(memory.size()));
            const std::size_t k = slot(r.infoset, r.type);
            batch.inputs.push_back(encodings_[k].data());
            if(clamped) {
               targets[b].resize(r.target.size());
               for(std::size_t a = 0; a < r.target.size(); ++a) {
                  targets[b][a] = std::max(frozen[k][a] + r.target[a], 0.0);
               }
               batch.targets.push_back(targets[b].data());
            }
            else {
               batch.targets.push_back(r.target.data());
            }
            batch.num_actions.push_back(r.target.size());
            batch.weights.push_back(weight(r));
         }
         total += train_step(net_, *optimizer_, batch, settings_.clip_norm);
      }
      last_loss_ = steps > 0 ? total / static_cast< double >(steps) : 0.0;
   }

   const Mlp* network() const override { return &net_; }
   double last_loss() const override { return last_loss_; }

  private:
   std::size_t slot(int infoset, TypeId type) const
   {
      return static_cast< std::size_t >(infoset) * static_cast< std::size_t >(num_types_)
             + static_cast< std::size_t >(type.index);
   }

   const GameSpec& spec_;
   DeepSettings settings_;
   int num_types_;
   Mlp net_;
   std::unique_ptr< Optimizer > optimizer_;
   std::vector< std::vector< double > > encodings_;
   double last_loss_ = 0.0;
};

class TableModel : public ValueModel {
  public:
   explicit TableModel(const GameSpec& spec)
       : spec_(spec), num_types_(spec.num_types()), sums_(spec.layout().total * static_cast< std::size_t >(num_types_)),
         weights_(spec.num_infosets() * static_cast< std::size_t >(num_types_))
   {
   }

   std::vector< double > predict(int infoset, TypeId type) const override
   {
      const std::size_t n = spec_.infoset(infoset).actions.size();
      std::vector< double > y(n, 0.0);
      const double w = weights_[slot(infoset, type)];
      if(w > 0.0) {
         const std::size_t off = value_offset(infoset, type);
         for(std::size_t a = 0; a < n; ++a) {
            y[a] = sums_[off + a] / w;
         }
      }
      return y;
   }

   void fit(const ReplayMemory& memory,
            const std::function< double(const MemoryRecord&) >& weight,
            std::size_t,
            bool clamped,
            Rng&) override
   {
      const TableModel frozen = *this;
      std::fill(sums_.begin(), sums_.end(), 0.0);
      std::fill(weights_.begin(), weights_.end(), 0.0);
      for(const auto& r : memory.records()) {
         const double w = weight(r);
         const std::size_t off = value_offset(r.infoset, r.type);
         const std::vector< double > base =
             clamped ? frozen.predict(r.infoset, r.type) : std::vector< double >(r.target.size(), 0.0);
         for(std::size_t a = 0; a < r.target.size(); ++a) {
            sums_[off + a] += w * (clamped ? std::max(base[a] + r.target[a], 0.0) : r.target[a]);
         }
         weights_[slot(r.infoset, r.type)] += w;
      }
   }

   const Mlp* network() const override { return nullptr; }
   double last_loss() const override { return 0.0; }

  private:
   std::size_t slot(int infoset, TypeId type) const
   {
      return static_cast< std::size_t >(type.index) * spec_.num_infosets() + static_cast< std::size_t >(infoset);
   }
   std::size_t value_offset(int infoset, TypeId type) const
   {
      return static_cast< std::size_t >(type.index) * spec_.layout().total
             + spec_.layout().offset[static_cast< std::size_t >(infoset)];
   }

   const GameSpec& spec_;
   int num_types_;
   std::vector< double > sums_;
   std::vector< double > weights_;
};

NodeId sample_chance(const GameSpec& spec, const Node& node, Sampler& sampler, std::vector< double >& probs)
{
   probs.resize(static_cast< std::size_t >(node.num_children));
   for(int c = 0; c < node.num_children; ++c) {
      probs[static_cast< std::size_t >(c)] = spec.incoming_chance(node.first_child + c);
   }
   return node.first_child + static_cast< NodeId >(sampler.pick(probs));
}

template < class Extract >
StrategyProfile profile_from(const GameSpec& spec, const std::array< const ValueModel*, 2 >& models, Extract extract)
{
   StrategyProfile out(spec, spec.num_types());
   std::vector< double > probs;
   for(int p = 0; p < 2; ++p) {
      for(int i : spec.infosets_of(PlayerId{p})) {
         for(int t = 0; t < spec.num_types(); ++t) {
            const auto y = models[static_cast< std::size_t >(p)]->predict(i, TypeId{t});
            probs.resize(y.size());
            extract(y, probs);
            out.set(TypeId{t}, i, probs);
         }
      }
   }
   return out;
}

std::unique_ptr< ValueModel > make_model(const GameSpec& spec,
                                         const InfosetEncoder* encoder,
                                         PlayerId player,
                                         const DeepSettings& settings,
                                         std::uint64_t seed)
{
   if(settings.tabular_oracle) {
      return make_table_model(spec);
   }
   return make_network_model(spec, *encoder, player, settings, seed);
}

}  // namespace

std::unique_ptr< ValueModel > make_network_model(const GameSpec& spec,
                                                 const InfosetEncoder& encoder,
                                                 PlayerId player,
                                                 const DeepSettings& settings,
                                                 std::uint64_t seed)
{
   return std::make_unique< NetworkModel >(spec, encoder, player, settings, seed);
}

std::unique_ptr< ValueModel > make_table_model(const GameSpec& spec)
{
   return std::make_unique< TableModel >(spec);
}

DeepMemories::DeepMemories(std::size_t capacity, MemoryPolicy policy)
    : regret{ReplayMemory(capacity, policy), ReplayMemory(capacity, policy)},
      strategy{ReplayMemory(capacity, policy), ReplayMemory(capacity, policy)}
{
}

StrategyProfile strategy_from_advantages(const GameSpec& spec, const std::array< const ValueModel*, 2 >& models)
{
   return profile_from(spec, models, [](const std::vector< double >& y, std::vector< double >& out) {
      regret_match(y, out);
   });
}

StrategyProfile strategy_from_policy(const GameSpec& spec, const std::array< const ValueModel*, 2 >& models)
{
   return profile_from(spec, models, [](const std::vector< double >& y, std::vector< double >& out) {
      double total = 0.0;
      for(std::size_t a = 0; a < y.size(); ++a) {
         out[a] = std::max(y[a], 0.0);
         total += out[a];
      }
      for(double& v : out) {
         v = total > 0.0 ? v / total : 1.0 / static_cast< double >(out.size());
      }
   });
}

double deep_bcfr_traverse(const GameSpec& spec,
                          NodeId h,
                          PlayerId traverser,
                          TypeId type,
                          double weight,
                          const StrategyProfile& sigma,
                          DeepMemories& memories,
                          int iteration,
                          Sampler& sampler,
                          Rng& memory_rng)
{
   const Node& node = spec.node(h);
   if(node.kind == NodeKind::terminal) {
      return spec.utility(node, traverser, type);
   }
   if(node.kind == NodeKind::chance) {
      std::vector< double > probs;
      const NodeId child = sample_chance(spec, node, sampler, probs);
      return deep_bcfr_traverse(
          spec, child, traverser, type, weight, sigma, memories, iteration, sampler, memory_rng);
   }
   const auto s = sigma.at(type, node.infoset);
   const auto p = static_cast< std::size_t >(node.player.index);
   if(node.player.index != traverser.index) {
      memories.strategy[p].insert(MemoryRecord{node.infoset, type, iteration, {s.begin(), s.end()}}, memory_rng);
      const NodeId child = node.first_child + static_cast< NodeId >(sampler.pick(s));
      return deep_bcfr_traverse(
          spec, child, traverser, type, weight, sigma, memories, iteration, sampler, memory_rng);
   }
   std::vector< double > values(static_cast< std::size_t >(node.num_children));
   double u = 0.0;
   for(int a = 0; a < node.num_children; ++a) {
      const auto k = static_cast< std::size_t >(a);
      values[k] = deep_bcfr_traverse(
          spec, node.first_child + a, traverser, type, weight, sigma, memories, iteration, sampler, memory_rng);
      u += s[k] * values[k];
   }
   std::vector< double > target(values.size());
   for(std::size_t a = 0; a < values.size(); ++a) {
      target[a] = weight * (values[a] - u);
   }
   memories.regret[p].insert(MemoryRecord{node.infoset, type, iteration, std::move(target)}, memory_rng);
   return u;
}

DeepResult deep_bcfr_run(const GameSpec& spec, const SolverConfig& config, const DeepRunOptions& options)
{
   if(config.algorithm != Algorithm::deep_bcfr) {
      throw ConfigError("deep_bcfr_run: the config's algorithm is " + to_string(config.algorithm));
   }
   for(long c : options.checkpoints) {
      if(c < 1 || c > config.iterations) {
         throw ConfigError("deep_bcfr_run: checkpoint " + std::to_string(c) + " outside 1.." + std::to_string(config.iterations));
      }
   }
   const DeepSettings& settings = config.deep;
   std::optional< InfosetEncoder > encoder;
   if(! settings.tabular_oracle) {
      try {
         encoder.emplace(spec);
      }
      catch(const UnsupportedModeError& e) {
         throw ConfigError(std::string("deep_bcfr_run: ") + e.what());
      }
   }
   SolverState state = make_solver_state(spec, config, options.competitor);
   Rng& rng = state.rng;
   RngSampler sampler(rng);
   const InfosetEncoder* enc = encoder ? &*encoder : nullptr;

   std::array< std::unique_ptr< ValueModel >, 2 > advantage{
       make_model(spec, enc, PlayerId{0}, settings, config.seed * 2 + 1),
       make_model(spec, enc, PlayerId{1}, settings, config.seed * 2 + 2)};
   DeepMemories memories(settings.memory_capacity, MemoryPolicy::reservoir);
   const auto weight = [&](const MemoryRecord& r) {
      return settings.linear_weighting ? static_cast< double >(r.iteration) : 1.0;
   };

   std::vector< long > checkpoints = options.checkpoints;
   checkpoints.push_back(config.iterations);
   std::sort(checkpoints.begin(), checkpoints.end());
   checkpoints.erase(std::unique(checkpoints.begin(), checkpoints.end()), checkpoints.end());
   std::size_t next_checkpoint = 0;

   DeepResult result;
   for(long t = 1; t <= config.iterations; ++t) {
      const int it = static_cast< int >(t);
      DeepIterationMetrics metrics;
      metrics.iteration = t;
      for(int p = 0; p < 2; ++p) {
         const auto pi = static_cast< std::size_t >(p);
         const StrategyProfile sigma = strategy_from_advantages(spec, {advantage[0].get(), advantage[1].get()});
         for(int k = 0; k < config.traversals; ++k) {
            if(config.posterior_mode == PosteriorMode::exact_sum) {
               for(int th = 0; th < spec.num_types(); ++th) {
                  const double w = state.belief.probs[static_cast< std::size_t >(th)];
                  if(w > 0.0) {
                     deep_bcfr_traverse(spec, spec.root(), PlayerId{p}, TypeId{th}, w, sigma, memories, it, sampler, rng);
                  }
               }
            }
            else {
               const TypeId th = sample_type(state.belief, rng);
               const double w = state.belief.probs[static_cast< std::size_t >(th.index)];
               deep_bcfr_traverse(spec, spec.root(), PlayerId{p}, th, w, sigma, memories, it, sampler, rng);
            }
         }
         advantage[pi]->fit(memories.regret[pi], weight, settings.train_steps, settings.clamped_target, rng);
         metrics.advantage_loss[pi] = advantage[pi]->last_loss();
         metrics.regret_memory[pi] = memories.regret[pi].size();
      }
      observe_competitor(state, spec, config);
      state.iteration = t;
      metrics.strategy_memory = memories.strategy[0].size() + memories.strategy[1].size();
      metrics.posterior = state.belief.probs;
      if(options.on_iteration) {
         options.on_iteration(metrics);
      }
      result.history.push_back(std::move(metrics));

      if(next_checkpoint < checkpoints.size() && checkpoints[next_checkpoint] == t) {
         ++next_checkpoint;
         std::array< std::unique_ptr< ValueModel >, 2 > policy{
             make_model(spec, enc, PlayerId{0}, settings, config.seed * 2 + 101),
             make_model(spec, enc, PlayerId{1}, settings, config.seed * 2 + 102)};
         // A separate stream, so the evaluation cadence does not perturb training.
         Rng fit_rng(config.seed ^ (0x9e3779b97f4a7c15ull * static_cast< std::uint64_t >(t)));
         for(std::size_t p = 0; p < 2; ++p) {
            policy[p]->fit(memories.strategy[p], weight, settings.strategy_train_steps, settings.clamped_target, fit_rng);
         }
         result.average = strategy_from_policy(spec, {policy[0].get(), policy[1].get()});
         for(std::size_t p = 0; p < 2; ++p) {
            if(const Mlp* net = policy[p]->network()) {
               result.strategy_networks[p] = *net;
            }
         }
         if(options.on_checkpoint) {
            const DeepCheckpoint cp{t, &result.average, &state.belief};
            options.on_checkpoint(cp);
         }
      }
   }
   result.belief = state.belief;
   return result;
}

}  // namespace bcfr
