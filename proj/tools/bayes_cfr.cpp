#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "bcfr/audit.hpp"
#include "bcfr/error.hpp"
#include "bcfr/evaluation.hpp"
#include "bcfr/harness.hpp"
#include "bcfr/typed_games.hpp"

namespace {

using namespace bcfr;

void configure_logging()
{
   auto logger = spdlog::stderr_color_mt("bayes_cfr");
   spdlog::set_default_logger(logger);
   spdlog::set_pattern("[%H:%M:%S.%e] [%l] %v");
   const char* level = std::getenv("BAYES_CFR_LOG");
   const std::string name = level ? level : "info";
   if(name == "error") {
      spdlog::set_level(spdlog::level::err);
   }
   else if(name == "debug") {
      spdlog::set_level(spdlog::level::debug);
   }
   else {
      if(name != "info") {
         spdlog::warn("BAYES_CFR_LOG='{}' is not one of error, info, debug; using info", name);
      }
      spdlog::set_level(spdlog::level::info);
   }
}

/// Settings shared by the subcommands: a config file, named overrides and
/// free-form `--set key=value` pairs. Precedence is CLI over file over defaults.
struct CommonOptions {
   std::string config_file;
   std::map< std::string, std::string > named;
   std::vector< std::string > sets;

   void attach(CLI::App* app)
   {
      app->add_option("--config", config_file, "key=value config file");
      for(const auto& [flag, key] : flags()) {
         app->add_option_function< std::string >(
             flag, [this, key = key](const std::string& v) { named[key] = v; }, "overrides '" + key + "'");
      }
      app->add_option("--set", sets, "extra key=value override (repeatable)");
   }

   static const std::vector< std::pair< std::string, std::string > >& flags()
   {
      static const std::vector< std::pair< std::string, std::string > > f{{"--game", "game"},
                                                                          {"--algo", "algorithm"},
                                                                          {"--iters", "iterations"},
                                                                          {"--seed", "seeds"},
                                                                          {"--type-model", "type_model"},
                                                                          {"--out", "out"}};
      return f;
   }

   KeyValues merged() const
   {
      KeyValues kv;
      if(! config_file.empty()) {
         kv = read_key_value_file(config_file);
      }
      for(const auto& [k, v] : named) {
         kv[k] = v;
      }
      for(const auto& s : sets) {
         const auto eq = s.find('=');
         if(eq == std::string::npos || eq == 0) {
            throw ConfigError("--set expects key=value, got '" + s + "'");
         }
         kv[s.substr(0, eq)] = s.substr(eq + 1);
      }
      return kv;
   }
};

void log_row(const MetricsRow& r)
{
   spdlog::debug("{} t={} eps={:.6g} mbb/g={:.4g} L1={:.4f}", r.run_id, r.iteration, r.exploitability, r.mbb_per_game,
                 r.posterior_l1);
}

int run_solve(const CommonOptions& common)
{
   const ExperimentConfig config = parse_experiment_config(common.merged());
   spdlog::info("solve {} on {} / {}: T={} seeds={}", config.label, config.game, config.type_model,
                config.solver.iterations, config.seeds.size());
   const auto rows = run_experiment(config, log_row);
   std::cout << metrics_header() << '\n';
   for(std::size_t k = 0; k < rows.size(); ++k) {
      if(k + 1 == rows.size() || rows[k + 1].seed != rows[k].seed) {
         std::cout << to_csv(rows[k]) << '\n';
      }
   }
   spdlog::info("metrics written to {}", (std::filesystem::path(config.out_dir) / "metrics.csv").string());
   return 0;
}

int run_eval(const CommonOptions& common, const std::string& checkpoint, const std::string& truth_name)
{
   KeyValues kv = common.merged();
   const ExperimentConfig config = parse_experiment_config(kv);
   SolverConfig solver = solver_for_label(config.label, config.solver);
   solver.seed = config.seeds.front();
   if(solver.algorithm == Algorithm::deep_bcfr) {
      throw ConfigError("eval: deep-bcfr checkpoints hold networks; evaluate them through solve");
   }
   const GameSpec spec = build_game(config.game, type_model(config.type_model));
   const int n = spec.num_types();
   const std::vector< double > uniform(static_cast< std::size_t >(n), 1.0 / n);
   const bool type_free = is_type_free(solver.algorithm);
   const GameSpec solved = type_free ? spec.collapse(uniform) : spec;
   SolverState state;
   try {
      state = load_solver_checkpoint(checkpoint, solved, solver);
   }
   catch(const CheckpointError& e) {
      throw CheckpointError(std::string(e.what()) + " (pass the settings given to solve, e.g. the same --config)");
   }
   std::vector< double > truth;
   if(truth_name == "prior") {
      truth = type_model(config.type_model).prior();
   }
   else if(truth_name == "competitor") {
      const TypeId competitor = config.competitor ? TypeId{*config.competitor}
                                                  : draw_competitor(config.type_model, solver.seed);
      truth = point_mass(n, competitor);
   }
   else {
      throw ConfigError("eval: --truth must be competitor or prior");
   }
   const auto report = exploitability(spec, average_strategy_profile(solved, state), truth, TypeKnowledge::aware, big_blind(spec));
   std::cout.precision(17);
   std::cout << "iteration," << state.iteration << '\n'
             << "exploitability," << report.exploitability << '\n'
             << "mbb_per_game," << report.mbb_per_game << '\n'
             << "best_response_p0," << report.best_response_value[0] << '\n'
             << "best_response_p1," << report.best_response_value[1] << '\n';
   return 0;
}

int run_grid_command(const CommonOptions& common,
                     const std::string& name,
                     long iterations,
                     long deep_iterations,
                     const std::string& models,
                     std::size_t jobs)
{
   KeyValues kv = common.merged();
   // The grid chooses the game, model and algorithm of each cell.
   kv.try_emplace("game", "leduc");
   kv.try_emplace("type_model", "pure-n");
   kv.try_emplace("algorithm", "bcfr");
   const ExperimentConfig base = parse_experiment_config(kv);
   GridSpec grid = grid_spec(name);
   if(iterations > 0) {
      grid.iterations = iterations;
   }
   if(deep_iterations > 0) {
      grid.deep_iterations = deep_iterations;
   }
   if(kv.count("game")) {
      grid.game = base.game;
   }
   if(models == "none") {
      grid.type_models.clear();
   }
   else if(! models.empty()) {
      grid.type_models.clear();
      std::stringstream in(models);
      std::string m;
      while(std::getline(in, m, ',')) {
         grid.type_models.push_back(m);
      }
   }
   if(base.out_dir.empty()) {
      throw ConfigError("grid: --out is required");
   }
   std::filesystem::create_directories(base.out_dir);
   std::ofstream metrics(std::filesystem::path(base.out_dir) / "metrics.csv", std::ios::binary);
   std::ofstream summary_file(std::filesystem::path(base.out_dir) / "summary.csv", std::ios::binary);
   if(! metrics || ! summary_file) {
      throw ConfigError("grid: cannot write to '" + base.out_dir + "'");
   }
   metrics << metrics_header() << '\n';
   spdlog::info("grid {} on {}: {} models x {} algorithms x {} seeds, T={}", name, grid.game, grid.type_models.size(),
                grid.labels.size(), base.seeds.size(), grid.iterations);
   const auto summary = run_grid(grid, base, [&](const MetricsRow& r) {
      log_row(r);
      metrics << to_csv(r) << '\n';
   }, jobs);
   write_summary_csv(summary_file, summary);
   write_summary_csv(std::cout, summary);
   return 0;
}

int run_posterior_bench(PosteriorBenchConfig config)
{
   const auto rows = posterior_bench(config);
   std::cout << "true_type,observations,mean_l1,fraction_below_" << config.threshold << '\n';
   for(const auto& r : rows) {
      std::cout << r.true_type << ',' << r.observations << ',' << r.mean_l1 << ',' << r.fraction_below << '\n';
   }
   return 0;
}

int run_audit(const CommonOptions& common, const std::vector< long >& checkpoints, bool brute_force)
{
   KeyValues kv = common.merged();
   kv.try_emplace("algorithm", "bcfr");
   const ExperimentConfig config = parse_experiment_config(kv);
   const GameSpec spec = build_game(config.game, type_model(config.type_model));
   SolverConfig solver = solver_for_label(config.label, config.solver);
   solver.seed = config.seeds.front();
   std::optional< TypeId > competitor;
   if(solver.belief_mode != BeliefMode::frozen) {
      competitor = config.competitor ? TypeId{*config.competitor} : draw_competitor(config.type_model, solver.seed);
   }
   const auto report = theorem_audit(spec, solver, competitor, checkpoints, brute_force);
   std::cout << "T,player,overall,overall_backup,immediate_sum,overall_shared,immediate_sum_shared,bound_margin,"
                "decomposition,bound\n";
   bool ok = true;
   for(const auto& point : report.points) {
      const bool d = point.decomposition_holds(1e-9);
      const bool b = point.bound_holds(1e-9);
      ok = ok && d && b;
      for(int p = 0; p < 2; ++p) {
         const auto& a = point.players[static_cast< std::size_t >(p)];
         std::cout << point.iterations << ',' << p << ',' << a.overall_brute_force << ',' << a.overall_backup << ','
                   << a.immediate_sum << ',' << a.overall_shared << ',' << a.immediate_sum_shared << ','
                   << a.bound_margin << ',' << (d ? "holds" : "VIOLATED") << ',' << (b ? "holds" : "VIOLATED")
                   << '\n';
      }
   }
   return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv)
{
   configure_logging();
   CLI::App app{"Bayesian counterfactual regret minimisation on typed poker games"};
   app.require_subcommand(1);

   CommonOptions solve_opts;
   auto* solve = app.add_subcommand("solve", "run a solver and write metrics.csv plus final checkpoints");
   solve_opts.attach(solve);

   CommonOptions eval_opts;
   std::string checkpoint;
   std::string truth = "competitor";
   auto* eval = app.add_subcommand("eval", "exploitability of a saved tabular checkpoint");
   eval_opts.attach(eval);
   eval->add_option("--checkpoint", checkpoint, "checkpoint directory written by solve")->required();
   eval->add_option("--truth", truth, "type distribution to evaluate under: competitor or prior");

   CommonOptions grid_opts;
   std::string grid_name;
   long grid_iters = 0;
   long grid_deep_iters = 0;
   std::string grid_models;
   std::size_t grid_jobs = 0;
   auto* grid = app.add_subcommand("grid", "run the table1 or table2 grid and write summary.csv");
   grid_opts.attach(grid);
   grid->add_option("name", grid_name, "table1 or table2")->required();
   grid->add_option("--grid-iters", grid_iters, "iteration budget of the tabular cells");
   grid->add_option("--deep-iters", grid_deep_iters, "iteration budget of the deep-bcfr cells");
   grid->add_option("--models", grid_models, "comma-separated type models, or 'none'");
   grid->add_option("--jobs", grid_jobs, "worker threads (0: one per hardware thread)");

   PosteriorBenchConfig bench;
   auto* posterior = app.add_subcommand("posterior-bench", "posterior L1 error against the number of observations");
   posterior->add_option("--game", bench.game);
   posterior->add_option("--type-model", bench.type_model);
   posterior->add_option("--references", bench.references_per_type, "reference hands per type (m)");
   posterior->add_option("--trials", bench.trials);
   posterior->add_option("--observations", bench.max_observations);
   posterior->add_option("--threshold", bench.threshold);
   posterior->add_option("--seed", bench.seed);

   CommonOptions audit_opts;
   std::vector< long > audit_points{1, 10, 100, 1000};
   bool backup_only = false;
   auto* audit = app.add_subcommand("audit", "check the regret decomposition and per-infoset bound of a bcfr run");
   audit_opts.attach(audit);
   audit->add_option("--at", audit_points, "iterations to audit")->delimiter(',');
   audit->add_flag("--backup-only", backup_only, "skip pure-strategy enumeration (needed for Leduc)");

   CLI11_PARSE(app, argc, argv);

   try {
      if(solve->parsed()) {
         return run_solve(solve_opts);
      }
      if(eval->parsed()) {
         return run_eval(eval_opts, checkpoint, truth);
      }
      if(grid->parsed()) {
         return run_grid_command(grid_opts, grid_name, grid_iters, grid_deep_iters, grid_models, grid_jobs);
      }
      if(posterior->parsed()) {
         return run_posterior_bench(bench);
      }
      if(audit->parsed()) {
         return run_audit(audit_opts, audit_points, ! backup_only);
      }
   }
   catch(const ConfigError& e) {
      spdlog::error("configuration error: {}", e.what());
      return 2;
   }
   catch(const std::exception& e) {
      spdlog::error("{}", e.what());
      return 1;
   }
   return 0;
}
