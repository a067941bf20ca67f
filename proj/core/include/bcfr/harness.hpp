#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bcfr/solvers.hpp"

namespace bcfr {

/// Flat `key = value` settings; `#` starts a comment.
using KeyValues = std::map< std::string, std::string >;

/// Throws ConfigError on a line without `=` or a repeated key.
KeyValues read_key_values(std::istream& in);
/// Reads a file; throws ConfigError when it cannot be opened.
KeyValues read_key_value_file(const std::string& path);

/// One experiment: a solver configuration run over a list of seeds.
struct ExperimentConfig {
   std::string game;
   std::string type_model;
   /// A solver name, or "bcfr-no-posterior" (frozen prior) or "cig" (belief pinned to the true type).
   std::string label;
   SolverConfig solver;
   std::vector< std::uint64_t > seeds{0};
   long cadence = 0;  ///< evaluate every `cadence` iterations; 0 means at every power of two (and at T)
   std::string out_dir;
   std::optional< int > competitor;  ///< fixed competitor type; drawn from the type model when empty
};

/// Builds a config from key/value pairs. `game`, `type_model` and `algorithm`
/// are required; unknown keys and malformed values raise ConfigError naming the key.
ExperimentConfig parse_experiment_config(const KeyValues& values);
/// The keys `parse_experiment_config` understands, in documentation order.
const std::vector< std::string >& experiment_config_keys();

/// Solver config for a label: the algorithm plus the belief mode it implies.
SolverConfig solver_for_label(const std::string& label, SolverConfig base);
/// Throws ConfigError unless the label names a solver or an ablation.
void validate_label(const std::string& label);

/// Iterations at which metrics are recorded; strictly increasing and ending at T.
std::vector< long > evaluation_iterations(long iterations, long cadence);

/// The competitor's type for a seed: drawn from the type model's prior on a
/// stream that depends only on the seed, so every algorithm faces the same one.
TypeId draw_competitor(const std::string& type_model, std::uint64_t seed);

/// The big blind used for mbb/g: the ante of a poker game, 1 otherwise.
double big_blind(const GameSpec& spec);

struct MetricsRow {
   std::string run_id;
   std::string algorithm;
   std::string game;
   std::string type_model;
   std::uint64_t seed = 0;
   long iteration = 0;
   double exploitability = 0.0;  ///< chips per hand
   double mbb_per_game = 0.0;
   double posterior_l1 = 0.0;
   double wall_ms = 0.0;
};

const std::vector< std::string >& metrics_columns();
std::string metrics_header();
/// Round-trippable decimal formatting, so equal rows give equal bytes.
std::string to_csv(const MetricsRow& row);

using MetricsSink = std::function< void(const MetricsRow&) >;

/// Runs one seed of an experiment and returns its metrics rows. The game,
/// model and names are validated before any solving. When `checkpoint_dir`
/// is non-empty the final state is written there.
std::vector< MetricsRow > run_cell(const ExperimentConfig& config,
                                   std::uint64_t seed,
                                   const MetricsSink& sink = {},
                                   const std::string& checkpoint_dir = {});

/// Runs every seed, writing `metrics.csv` and a checkpoint per seed under
/// `config.out_dir` (created if needed). Throws ConfigError before any
/// compute when a name does not resolve or the directory is unwritable.
std::vector< MetricsRow > run_experiment(const ExperimentConfig& config, const MetricsSink& sink = {});

// ---------------------------------------------------------------------------
// Posterior consistency benchmark

struct PosteriorBenchRow {
   int true_type = 0;
   std::size_t observations = 0;
   double mean_l1 = 0.0;
   double fraction_below = 0.0;  ///< trials with L1 below the threshold
};

struct PosteriorBenchConfig {
   std::string game = "kuhn";
   std::string type_model = "mixed-1";
   std::size_t references_per_type = 500;
   std::size_t trials = 100;
   std::size_t max_observations = 200;
   double threshold = 0.2;
   std::uint64_t seed = 0;
   BeliefSettings belief;
};

/// L1 error of the posterior to the point mass on each true type after
/// 1, 2, 4, ... and `max_observations` scripted hands, over seeded trials.
/// Each trial draws a fresh reference bank and observation stream.
std::vector< PosteriorBenchRow > posterior_bench(const PosteriorBenchConfig& config);

// ---------------------------------------------------------------------------
// Grids

struct GridSpec {
   std::string name;
   std::string game;
   std::vector< std::string > labels;
   std::vector< std::string > type_models;
   long iterations = 0;
   long deep_iterations = 0;  ///< budget for deep-bcfr cells
};

/// "table1" or "table2"; throws ConfigError otherwise.
GridSpec grid_spec(const std::string& name);

struct GridSummary {
   std::vector< std::string > labels;
   std::vector< std::string > type_models;
   /// [model][label]: final exploitability per seed.
   std::vector< std::vector< std::vector< double > > > final;
   /// [model][label]: mean over seeds.
   std::vector< std::vector< double > > mean;
   /// [label]: mean over models (the Averaged row); empty without models.
   std::vector< double > averaged;
};

/// Runs every (type model, label, seed) cell with `base` supplying the shared
/// settings. Cells run concurrently on `workers` threads (0 means one per
/// hardware thread); rows reach `sink` on the calling thread in cell order, so
/// the output does not depend on the worker count. The first failing cell's
/// error is rethrown after the pool stops.
GridSummary run_grid(const GridSpec& grid,
                     const ExperimentConfig& base,
                     const MetricsSink& sink = {},
                     std::size_t workers = 0);

/// `type_model,<label>...` header, one row per model, then `Averaged` when there are models.
void write_summary_csv(std::ostream& out, const GridSummary& summary);

}  // namespace bcfr
