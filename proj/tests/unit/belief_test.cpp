#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "bcfr/belief.hpp"
#include "bcfr/error.hpp"

namespace {

using namespace bcfr;

double gaussian(double u)
{
   return std::exp(-0.5 * u * u) / std::sqrt(2.0 * std::numbers::pi);
}

double normal_draw(Rng& rng)
{
   const double u1 = 1.0 - rng.uniform();
   const double u2 = rng.uniform();
   return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

/// Two types whose one-dimensional features are N(−1, 1) and N(+1, 1).
SampleBank two_gaussian_bank(std::size_t m, Rng& rng)
{
   SampleBank bank(2, m, 16);
   for(std::size_t j = 0; j < m; ++j) {
      bank.add_reference({normal_draw(rng) - 1.0}, TypeId{0});
      bank.add_reference({normal_draw(rng) + 1.0}, TypeId{1});
   }
   return bank;
}

TEST(Kernel, GaussianShapeAndDistances)
{
   KernelConfig config;
   EXPECT_DOUBLE_EQ(kernel_eval(config, 0.0, 1.0), 1.0 / std::sqrt(2.0 * std::numbers::pi));
   EXPECT_NEAR(kernel_eval(config, 1.0, 0.5), gaussian(2.0), 1e-16);
   EXPECT_GT(kernel_eval(config, 0.1, 1.0), kernel_eval(config, 0.2, 1.0));

   const std::vector< double > a{0.0, 0.0};
   const std::vector< double > b{3.0, 4.0};
   EXPECT_DOUBLE_EQ(history_distance(a, b, config), 5.0);
   config.scale = {2.0, 0.0};
   EXPECT_DOUBLE_EQ(history_distance(a, b, config), 6.0);
   EXPECT_EQ(type_distance(TypeId{1}, TypeId{1}), 0.0);
   EXPECT_EQ(type_distance(TypeId{0}, TypeId{2}), 1.0);

   const std::vector< double > c{1.0};
   EXPECT_THROW(history_distance(a, c, KernelConfig{}), ValidationError);
   KernelConfig bad;
   bad.w = 0.0;
   EXPECT_THROW(bad.validate(), ValidationError);
}

TEST(Ckde, TwoReferencesAtEqualTypeDistance)
{
   SampleBank bank(2, 8, 8);
   bank.add_reference({0.0}, TypeId{1});
   bank.add_reference({2.0}, TypeId{1});
   const std::vector< double > h{0.0};
   const KernelConfig config;
   // Both references sit at type distance 1 from type 0, so the type kernel cancels.
   EXPECT_NEAR(ckde_likelihood(h, TypeId{0}, bank, config), 0.5 * (gaussian(0.0) + gaussian(2.0)), 1e-15);
   EXPECT_NEAR(ckde_likelihood(h, TypeId{1}, bank, config), 0.5 * (gaussian(0.0) + gaussian(2.0)), 1e-15);
}

TEST(Ckde, MixesTypesThroughTheTypeKernel)
{
   SampleBank bank(2, 8, 8);
   bank.add_reference({0.0}, TypeId{0});
   bank.add_reference({3.0}, TypeId{1});
   const std::vector< double > h{0.0};
   KernelConfig config;
   const double same = gaussian(0.0);
   const double other = gaussian(1.0 / config.w_prime);
   const double expected = (gaussian(0.0) * same + gaussian(3.0) * other) / (same + other);
   EXPECT_NEAR(ckde_likelihood(h, TypeId{0}, bank, config), expected, 1e-15);
   const auto all = ckde_likelihoods(h, bank, config);
   EXPECT_DOUBLE_EQ(all[0], ckde_likelihood(h, TypeId{0}, bank, config));
   EXPECT_GT(all[0], all[1]);
}

TEST(Ckde, EmptyAndDegenerateBanksThrow)
{
   SampleBank bank(2, 4, 4);
   const std::vector< double > h{0.0};
   EXPECT_THROW(ckde_likelihood(h, TypeId{0}, bank, KernelConfig{}), EstimatorUnavailableError);
   bank.add_reference({0.0}, TypeId{0});
   KernelConfig narrow;
   narrow.w_prime = 0.01;
   EXPECT_NO_THROW(ckde_likelihood(h, TypeId{0}, bank, narrow));
   EXPECT_THROW(ckde_likelihood(h, TypeId{1}, bank, narrow), DegenerateKernelError);
}

TEST(SampleBank, EvictsOldestFirst)
{
   SampleBank bank(1, 2, 2);
   bank.add_reference({1.0}, TypeId{0});
   bank.add_reference({2.0}, TypeId{0});
   bank.add_reference({3.0}, TypeId{0});
   ASSERT_EQ(bank.references(TypeId{0}).size(), 2u);
   EXPECT_EQ(bank.references(TypeId{0}).front()[0], 2.0);
   for(double x : {1.0, 2.0, 3.0}) {
      bank.add_observation({x});
   }
   ASSERT_EQ(bank.observations().size(), 2u);
   EXPECT_EQ(bank.observations().back()[0], 3.0);
   EXPECT_EQ(bank.reference_version(), 3u);
   EXPECT_THROW(bank.add_reference({0.0}, TypeId{1}), ValidationError);
   EXPECT_THROW(SampleBank(1, 0, 1), ConfigError);
}

TEST(SampleBank, StandardizingScaleIsInverseSpread)
{
   SampleBank bank(2, 8, 8);
   bank.add_reference({-2.0, 5.0}, TypeId{0});
   bank.add_reference({2.0, 5.0}, TypeId{1});
   const auto scale = standardizing_scale(bank);
   ASSERT_EQ(scale.size(), 2u);
   EXPECT_DOUBLE_EQ(scale[0], 0.5);
   EXPECT_DOUBLE_EQ(scale[1], 1.0);  // constant feature
}

TEST(Posterior, ConcentratesOnTheGeneratingType)
{
   Rng rng(7);
   const auto bank = two_gaussian_bank(300, rng);
   for(int truth = 0; truth < 2; ++truth) {
      auto state = BeliefState::uniform(2);
      for(int k = 0; k < 200; ++k) {
         const double x = normal_draw(rng) + (truth == 0 ? -1.0 : 1.0);
         state = posterior_update(state, std::vector< double >{x}, bank, KernelConfig{});
      }
      EXPECT_GT(state.probs[static_cast< std::size_t >(truth)], 0.999) << "truth " << truth;
      EXPECT_EQ(state.observations, 200u);
   }
}

TEST(Posterior, IncrementalMatchesBatch)
{
   Rng rng(9);
   const auto bank = two_gaussian_bank(50, rng);
   const std::vector< double > prior{0.3, 0.7};
   auto state = BeliefState::from_prior(prior);
   std::vector< HistoryFeature > seen;
   for(int k = 0; k < 60; ++k) {
      seen.push_back({normal_draw(rng) * 2.0});
      state = posterior_update(state, seen.back(), bank, KernelConfig{});
      const auto batch = posterior_batch(prior, seen, bank, KernelConfig{});
      for(std::size_t t = 0; t < 2; ++t) {
         EXPECT_NEAR(state.probs[t], batch[t], 1e-12);
      }
      double sum = state.probs[0] + state.probs[1];
      EXPECT_NEAR(sum, 1.0, 1e-12);
   }
}

TEST(Posterior, KeepsPreviousBeliefWhenEveryLikelihoodUnderflows)
{
   SampleBank bank(2, 4, 4);
   bank.add_reference({0.0}, TypeId{0});
   bank.add_reference({0.1}, TypeId{1});
   KernelConfig narrow;
   narrow.w = 1e-3;
   auto state = BeliefState::uniform(2);
   state = posterior_update(state, std::vector< double >{0.02}, bank, narrow);
   const auto before = state.probs;
   state = posterior_update(state, std::vector< double >{50.0}, bank, narrow);
   EXPECT_TRUE(state.stagnated);
   EXPECT_EQ(state.stagnations, 1u);
   EXPECT_EQ(state.probs, before);
   EXPECT_EQ(state.observations, 1u);
}

TEST(Posterior, RejectsBadPriors)
{
   EXPECT_THROW(BeliefState::from_prior({0.5, 0.6}), ValidationError);
   EXPECT_THROW(BeliefState::uniform(0), ValidationError);
}

TEST(Posterior, SampledTypesFollowTheBelief)
{
   auto state = BeliefState::from_prior({0.2, 0.5, 0.3});
   Rng rng(13);
   std::vector< double > counts(3, 0.0);
   const int n = 20000;
   for(int k = 0; k < n; ++k) {
      counts[static_cast< std::size_t >(sample_type(state, rng).index)] += 1.0;
   }
   double chi2 = 0.0;
   for(std::size_t t = 0; t < 3; ++t) {
      const double e = n * state.probs[t];
      chi2 += (counts[t] - e) * (counts[t] - e) / e;
   }
   EXPECT_LT(chi2, 13.8);  // χ²(2) at p = 0.001
}

TEST(Ckde, ApproachesTheTrueDensityWithMoreReferences)
{
   Rng rng(19);
   const std::vector< double > grid{-2.0, -1.0, 0.0, 1.0, 2.0};
   std::vector< double > errors;
   for(std::size_t m : {100u, 1000u, 10000u}) {
      double err = 0.0;
      for(int rep = 0; rep < 4; ++rep) {
         SampleBank bank(1, m, 1);
         for(std::size_t j = 0; j < m; ++j) {
            bank.add_reference({normal_draw(rng)}, TypeId{0});
         }
         KernelConfig config;
         config.w = 1.06 * std::pow(static_cast< double >(m), -0.2);
         for(double x : grid) {
            const double est = ckde_likelihood(std::vector< double >{x}, TypeId{0}, bank, config) / config.w;
            err += std::abs(est - gaussian(x)) / 4.0;
         }
      }
      errors.push_back(err);
   }
   EXPECT_LT(errors[1], errors[0]);
   EXPECT_LT(errors[2], errors[1]);
   EXPECT_LT(errors[2], 0.03);
}

}  // namespace
