#include <benchmark/benchmark.h>

#include <memory>
#include <vector>

#include "bcfr/approx_net.hpp"
#include "bcfr/belief.hpp"
#include "bcfr/deep.hpp"
#include "bcfr/typed_games.hpp"

namespace {

using namespace bcfr;

void BM_CkdeLikelihoods(benchmark::State& st)
{
   const GameSpec spec = build_game("leduc", type_model("mixed-1"));
   const auto per_type = static_cast< std::size_t >(st.range(0));
   SampleBank bank(spec.num_types(), per_type, 500);
   Rng rng(7);
   populate_references(spec.rules(), bank, per_type, rng);
   KernelConfig kernel;
   kernel.scale = standardizing_scale(bank);
   const HistoryFeature h = scripted_observation(spec.rules(), TypeId{1}, rng);
   for(auto _ : st) {
      benchmark::DoNotOptimize(ckde_likelihoods(h, bank, kernel));
   }
   st.SetItemsProcessed(st.iterations() * static_cast< long >(bank.num_references()));
}
BENCHMARK(BM_CkdeLikelihoods)->RangeMultiplier(2)->Range(125, 2000)->Unit(benchmark::kMicrosecond);

void BM_PosteriorUpdate(benchmark::State& st)
{
   const GameSpec spec = build_game("kuhn", type_model("mixed-1"));
   SampleBank bank(spec.num_types(), 500, 500);
   Rng rng(11);
   populate_references(spec.rules(), bank, 500, rng);
   const KernelConfig kernel;
   const HistoryFeature h = scripted_observation(spec.rules(), TypeId{2}, rng);
   BeliefState belief = BeliefState::uniform(spec.num_types());
   for(auto _ : st) {
      belief = posterior_update(belief, h, bank, kernel);
      benchmark::DoNotOptimize(belief.probs.data());
   }
}
BENCHMARK(BM_PosteriorUpdate)->Unit(benchmark::kMicrosecond);

void BM_MlpTrainStep(benchmark::State& st)
{
   const GameSpec spec = build_game("leduc", type_model("mixed-1"));
   const InfosetEncoder encoder(spec);
   NetShape shape;
   shape.input = encoder.length();
   shape.hidden = {64, 64};
   shape.output = 3;
   shape.type_offset = encoder.type_offset();
   shape.type_length = encoder.num_types();
   Mlp net(shape, 3);
   auto optimizer = make_optimizer("adam", 1e-3);

   const auto batch_size = static_cast< std::size_t >(st.range(0));
   Rng rng(5);
   std::vector< InfosetEncoding > inputs;
   std::vector< std::vector< double > > targets;
   Mlp::Batch batch;
   for(std::size_t b = 0; b < batch_size; ++b) {
      const int infoset = static_cast< int >(rng.uniform_index(spec.layout().num_infosets()));
      inputs.push_back(encoder.encode(infoset, TypeId{static_cast< int >(b % 3)}));
      targets.push_back({rng.uniform(), rng.uniform(), rng.uniform()});
   }
   for(std::size_t b = 0; b < batch_size; ++b) {
      batch.inputs.push_back(inputs[b].values.data());
      batch.targets.push_back(targets[b].data());
      batch.num_actions.push_back(3);
      batch.weights.push_back(1.0);
   }
   for(auto _ : st) {
      benchmark::DoNotOptimize(train_step(net, *optimizer, batch, 10.0));
   }
   st.SetItemsProcessed(st.iterations() * static_cast< long >(batch_size));
}
BENCHMARK(BM_MlpTrainStep)->Arg(32)->Arg(256)->Unit(benchmark::kMicrosecond);

void BM_DeepTraversal(benchmark::State& st)
{
   const GameSpec spec = build_game(st.range(0) == 0 ? "kuhn" : "leduc", type_model("mixed-1"));
   const StrategyProfile sigma(spec, spec.num_types());
   DeepMemories memories(1u << 16, MemoryPolicy::reservoir);
   Rng rng(9);
   Rng memory_rng(10);
   RngSampler sampler(rng);
   int t = 0;
   for(auto _ : st) {
      ++t;
      benchmark::DoNotOptimize(deep_bcfr_traverse(spec, spec.root(), PlayerId{t % 2}, TypeId{t % 3}, 1.0, sigma, memories, t, sampler, memory_rng));
   }
}
BENCHMARK(BM_DeepTraversal)->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);

}  // namespace
