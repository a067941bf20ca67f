#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "bcfr/audit.hpp"
#include "bcfr/error.hpp"
#include "bcfr/typed_games.hpp"

namespace {

using namespace bcfr;

SolverConfig audit_config(std::uint64_t seed)
{
   SolverConfig c;
   c.algorithm = Algorithm::bcfr;
   c.seed = seed;
   c.belief.references_per_type = 300;
   return c;
}

void expect_consistent(const AuditPoint& point)
{
   for(const auto& p : point.players) {
      EXPECT_NEAR(p.overall_brute_force, p.overall_backup, 1e-9);
      EXPECT_LT(p.table_mismatch, 1e-9);
      EXPECT_LE(p.overall_backup, p.immediate_sum + 1e-9);
      EXPECT_LE(p.overall_shared, p.immediate_sum_shared + 1e-9);
      EXPECT_LE(p.overall_backup, p.overall_bound + 1e-9);
      EXPECT_GE(p.bound_margin, -1e-9);
   }
   EXPECT_TRUE(point.decomposition_holds(1e-9));
   EXPECT_TRUE(point.bound_holds(1e-9));
}

class KuhnAudit : public ::testing::TestWithParam< const char* > {};

TEST_P(KuhnAudit, DecompositionAndBoundHold)
{
   const auto& model = type_model(GetParam());
   const GameSpec spec = build_kuhn(model);
   const auto& prior = model.prior();
   const TypeId competitor{static_cast< int >(std::max_element(prior.begin(), prior.end()) - prior.begin())};
   const std::vector< long > checkpoints{1, 10, 100, 1000};
   const auto report = theorem_audit(spec, audit_config(3), competitor, checkpoints);
   ASSERT_EQ(report.points.size(), checkpoints.size());
   for(const auto& point : report.points) {
      SCOPED_TRACE(point.iterations);
      expect_consistent(point);
   }
}

INSTANTIATE_TEST_SUITE_P(TypeModels, KuhnAudit, ::testing::Values("pure-n", "pure-c", "pure-a", "mixed-1"));

TEST(Audit, FirstIterationIsComputable)
{
   const GameSpec spec = build_kuhn(type_model("mixed-2"));
   const std::vector< long > checkpoints{1};
   const auto report = theorem_audit(spec, audit_config(0), TypeId{0}, checkpoints);
   ASSERT_EQ(report.points.size(), 1u);
   expect_consistent(report.points[0]);
   for(const auto& p : report.points[0].players) {
      EXPECT_GT(p.immediate_sum, 0.0);
      EXPECT_TRUE(std::isfinite(p.overall_backup));
   }
}

TEST(Audit, TimeSummedFormMatchesFinalWeightFormUnderFrozenBelief)
{
   const GameSpec spec = build_kuhn(type_model("mixed-1"));
   auto cfg = audit_config(1);
   cfg.belief_mode = BeliefMode::frozen;
   cfg.belief.prior = {0.1, 0.8, 0.1};
   const std::vector< long > checkpoints{5, 50, 200};
   const auto report = theorem_audit(spec, cfg, std::nullopt, checkpoints);
   for(const auto& point : report.points) {
      for(const auto& p : point.players) {
         EXPECT_NEAR(p.overall_final_weights, p.overall_backup, 1e-12);
      }
   }
}

TEST(Audit, LeducWithBackupOnly)
{
   const GameSpec spec = build_leduc(type_model("mixed-1"));
   auto cfg = audit_config(2);
   cfg.belief_mode = BeliefMode::frozen;
   const std::vector< long > checkpoints{1, 8};
   EXPECT_THROW(theorem_audit(spec, cfg, std::nullopt, checkpoints, true), ConfigError);
   const auto report = theorem_audit(spec, cfg, std::nullopt, checkpoints, false);
   for(const auto& point : report.points) {
      EXPECT_TRUE(point.decomposition_holds(1e-9));
      EXPECT_TRUE(point.bound_holds(1e-9));
      for(const auto& p : point.players) {
         EXPECT_TRUE(std::isnan(p.overall_brute_force));
         EXPECT_LT(p.table_mismatch, 1e-9);
      }
   }
}

TEST(Audit, RejectsUnsupportedRuns)
{
   const GameSpec spec = build_kuhn(type_model("mixed-1"));
   const std::vector< long > checkpoints{1};
   auto cfg = audit_config(0);
   cfg.algorithm = Algorithm::bcfr_plus;
   EXPECT_THROW(theorem_audit(spec, cfg, TypeId{0}, checkpoints), ConfigError);
   cfg = audit_config(0);
   cfg.posterior_mode = PosteriorMode::sampled;
   EXPECT_THROW(theorem_audit(spec, cfg, TypeId{0}, checkpoints), ConfigError);
   cfg = audit_config(0);
   cfg.update = UpdateSchedule::alternating;
   EXPECT_THROW(theorem_audit(spec, cfg, TypeId{0}, checkpoints), ConfigError);
   EXPECT_THROW(theorem_audit(spec, audit_config(0), TypeId{0}, std::vector< long >{}), ConfigError);
}

TEST(Audit, AuditorNeedsObservations)
{
   const GameSpec spec = build_kuhn(type_model("mixed-1"));
   TheoremAuditor auditor(spec, true);
   const std::vector< double > w{1.0 / 3, 1.0 / 3, 1.0 / 3};
   EXPECT_THROW(auditor.evaluate(w, nullptr), ConfigError);
   EXPECT_THROW(auditor.observe(StrategyProfile(spec, 3), std::vector< double >{1.0}), ValidationError);
}

}  // namespace
