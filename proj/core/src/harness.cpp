#include "bcfr/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <condition_variable>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <istream>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "bcfr/deep.hpp"
#include "bcfr/error.hpp"
#include "bcfr/evaluation.hpp"
#include "bcfr/typed_games.hpp"

namespace bcfr {

namespace {

std::string trim(const std::string& s)
{
   const auto b = s.find_first_not_of(" \t\r");
   if(b == std::string::npos) {
      return {};
   }
   const auto e = s.find_last_not_of(" \t\r");
   return s.substr(b, e - b + 1);
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value, const char* expected)
{
   throw ConfigError("config key '" + key + "': '" + value + "' is not " + expected);
}

long parse_long(const std::string& key, const std::string& value)
{
   long v = 0;
   const auto* end = value.data() + value.size();
   const auto [ptr, ec] = std::from_chars(value.data(), end, v);
   if(ec != std::errc() || ptr != end) {
      bad_value(key, value, "an integer");
   }
   return v;
}

std::size_t parse_size(const std::string& key, const std::string& value)
{
   const long v = parse_long(key, value);
   if(v < 0) {
      bad_value(key, value, "a non-negative integer");
   }
   return static_cast< std::size_t >(v);
}

double parse_double(const std::string& key, const std::string& value)
{
   try {
      std::size_t used = 0;
      const double v = std::stod(value, &used);
      if(used != value.size()) {
         bad_value(key, value, "a number");
      }
      return v;
   }
   catch(const std::logic_error&) {
      bad_value(key, value, "a number");
   }
}

bool parse_bool(const std::string& key, const std::string& value)
{
   if(value == "true" || value == "1" || value == "yes" || value == "on") {
      return true;
   }
   if(value == "false" || value == "0" || value == "no" || value == "off") {
      return false;
   }
   bad_value(key, value, "a boolean");
}

std::vector< std::string > split_list(const std::string& value)
{
   std::vector< std::string > out;
   std::stringstream in(value);
   std::string item;
   while(std::getline(in, item, ',')) {
      item = trim(item);
      if(! item.empty()) {
         out.push_back(item);
      }
   }
   return out;
}

template < class Parse >
auto rethrow_as_config(const std::string& key, Parse parse)
{
   try {
      return parse();
   }
   catch(const ConfigError&) {
      throw;
   }
   catch(const Error& e) {
      throw ConfigError("config key '" + key + "': " + e.what());
   }
}

bool is_ablation(const std::string& label)
{
   return label == "bcfr-no-posterior" || label == "cig";
}

const GameSpec& typed_game(const std::string& game, const std::string& model)
{
   // Grids build each typed game many times; the trees are immutable once built.
   static std::map< std::pair< std::string, std::string >, GameSpec > cache;
   static std::mutex mutex;
   const std::lock_guard lock(mutex);
   const auto key = std::make_pair(game, model);
   auto it = cache.find(key);
   if(it == cache.end()) {
      it = cache.emplace(key, build_game(game, type_model(model))).first;
   }
   return it->second;
}

std::string format_double(double v)
{
   char buf[40];
   std::snprintf(buf, sizeof buf, "%.17g", v);
   return buf;
}

void check_names(const ExperimentConfig& config)
{
   if(config.game != "kuhn" && config.game != "leduc") {
      throw ConfigError("config key 'game': unknown game '" + config.game + "'");
   }
   rethrow_as_config("type_model", [&] { return type_model(config.type_model); });
   validate_label(config.label);
   if(config.seeds.empty()) {
      throw ConfigError("config key 'seeds': the seed list is empty");
   }
   if(config.cadence < 0) {
      throw ConfigError("config key 'cadence': must be non-negative");
   }
   if(config.competitor) {
      const int n = static_cast< int >(type_model(config.type_model).num_types());
      if(*config.competitor < 0 || *config.competitor >= n) {
         throw ConfigError("config key 'competitor': type index out of range");
      }
   }
   solver_for_label(config.label, config.solver).validate();
}

}  // namespace

KeyValues read_key_values(std::istream& in)
{
   KeyValues out;
   std::string line;
   int number = 0;
   while(std::getline(in, line)) {
      ++number;
      const auto hash = line.find('#');
      if(hash != std::string::npos) {
         line.erase(hash);
      }
      line = trim(line);
      if(line.empty()) {
         continue;
      }
      const auto eq = line.find('=');
      if(eq == std::string::npos) {
         throw ConfigError("config line " + std::to_string(number) + ": expected key = value");
      }
      const std::string key = trim(line.substr(0, eq));
      if(key.empty()) {
         throw ConfigError("config line " + std::to_string(number) + ": empty key");
      }
      if(! out.emplace(key, trim(line.substr(eq + 1))).second) {
         throw ConfigError("config line " + std::to_string(number) + ": key '" + key + "' repeated");
      }
   }
   return out;
}

KeyValues read_key_value_file(const std::string& path)
{
   std::ifstream in(path);
   if(! in) {
      throw ConfigError("cannot open config file '" + path + "'");
   }
   return read_key_values(in);
}

const std::vector< std::string >& experiment_config_keys()
{
   static const std::vector< std::string > keys{
       "game",
       "type_model",
       "algorithm",
       "iterations",
       "traversals",
       "seeds",
       "cadence",
       "out",
       "competitor",
       "posterior_mode",
       "update",
       "sample_chance",
       "kernel_w",
       "kernel_w_prime",
       "standardize",
       "references_per_type",
       "observation_capacity",
       "observations_per_iteration",
       "online_references",
       "deep.hidden",
       "deep.type_layer",
       "deep.learning_rate",
       "deep.clip_norm",
       "deep.optimizer",
       "deep.lr_schedule",
       "deep.memory_capacity",
       "deep.train_steps",
       "deep.batch_size",
       "deep.strategy_train_steps",
       "deep.clamped_target",
       "deep.tabular_oracle",
       "deep.linear_weighting",
   };
   return keys;
}

ExperimentConfig parse_experiment_config(const KeyValues& values)
{
   const auto& known = experiment_config_keys();
   for(const auto& [key, value] : values) {
      if(std::find(known.begin(), known.end(), key) == known.end()) {
         throw ConfigError("unknown config key '" + key + "'");
      }
   }
   for(const char* required : {"game", "type_model", "algorithm"}) {
      const auto it = values.find(required);
      if(it == values.end() || it->second.empty()) {
         throw ConfigError(std::string("missing required config key '") + required + "'");
      }
   }
   ExperimentConfig c;
   SolverConfig& s = c.solver;
   for(const auto& [key, value] : values) {
      if(key == "game") {
         c.game = value;
      }
      else if(key == "type_model") {
         c.type_model = value;
      }
      else if(key == "algorithm") {
         c.label = value;
      }
      else if(key == "iterations") {
         s.iterations = parse_long(key, value);
      }
      else if(key == "traversals") {
         s.traversals = static_cast< int >(parse_long(key, value));
      }
      else if(key == "seeds") {
         c.seeds.clear();
         for(const auto& item : split_list(value)) {
            c.seeds.push_back(static_cast< std::uint64_t >(parse_size(key, item)));
         }
      }
      else if(key == "cadence") {
         c.cadence = value == "log2" ? 0 : parse_long(key, value);
      }
      else if(key == "out") {
         c.out_dir = value;
      }
      else if(key == "competitor") {
         if(value != "auto") {
            c.competitor = static_cast< int >(parse_long(key, value));
         }
      }
      else if(key == "posterior_mode") {
         s.posterior_mode = rethrow_as_config(key, [&] { return parse_posterior_mode(value); });
      }
      else if(key == "update") {
         s.update = rethrow_as_config(key, [&] { return parse_update_schedule(value); });
      }
      else if(key == "sample_chance") {
         s.sample_chance = parse_bool(key, value);
      }
      else if(key == "kernel_w") {
         s.belief.w = parse_double(key, value);
      }
      else if(key == "kernel_w_prime") {
         s.belief.w_prime = parse_double(key, value);
      }
      else if(key == "standardize") {
         s.belief.standardize = parse_bool(key, value);
      }
      else if(key == "references_per_type") {
         s.belief.references_per_type = parse_size(key, value);
      }
      else if(key == "observation_capacity") {
         s.belief.observation_capacity = parse_size(key, value);
      }
      else if(key == "observations_per_iteration") {
         s.belief.observations_per_iteration = parse_size(key, value);
      }
      else if(key == "online_references") {
         s.belief.online_references = parse_bool(key, value);
      }
      else if(key == "deep.hidden") {
         s.deep.hidden.clear();
         for(const auto& item : split_list(value)) {
            s.deep.hidden.push_back(parse_size(key, item));
         }
      }
      else if(key == "deep.type_layer") {
         s.deep.type_layer = parse_size(key, value);
      }
      else if(key == "deep.learning_rate") {
         s.deep.learning_rate = parse_double(key, value);
      }
      else if(key == "deep.clip_norm") {
         s.deep.clip_norm = parse_double(key, value);
      }
      else if(key == "deep.optimizer") {
         s.deep.optimizer = value;
      }
      else if(key == "deep.lr_schedule") {
         s.deep.lr_schedule = value;
      }
      else if(key == "deep.memory_capacity") {
         s.deep.memory_capacity = parse_size(key, value);
      }
      else if(key == "deep.train_steps") {
         s.deep.train_steps = parse_size(key, value);
      }
      else if(key == "deep.batch_size") {
         s.deep.batch_size = parse_size(key, value);
      }
      else if(key == "deep.strategy_train_steps") {
         s.deep.strategy_train_steps = parse_size(key, value);
      }
      else if(key == "deep.clamped_target") {
         s.deep.clamped_target = parse_bool(key, value);
      }
      else if(key == "deep.tabular_oracle") {
         s.deep.tabular_oracle = parse_bool(key, value);
      }
      else if(key == "deep.linear_weighting") {
         s.deep.linear_weighting = parse_bool(key, value);
      }
   }
   check_names(c);
   return c;
}

void validate_label(const std::string& label)
{
   if(! is_ablation(label)) {
      rethrow_as_config("algorithm", [&] { return parse_algorithm(label); });
   }
}

SolverConfig solver_for_label(const std::string& label, SolverConfig base)
{
   validate_label(label);
   if(label == "bcfr-no-posterior") {
      base.algorithm = Algorithm::bcfr;
      base.belief_mode = BeliefMode::frozen;
   }
   else if(label == "cig") {
      base.algorithm = Algorithm::bcfr;
      base.belief_mode = BeliefMode::pinned;
   }
   else {
      base.algorithm = parse_algorithm(label);
   }
   return base;
}

std::vector< long > evaluation_iterations(long iterations, long cadence)
{
   if(iterations < 1) {
      throw ConfigError("evaluation: T must be at least 1");
   }
   std::vector< long > out;
   if(cadence <= 0) {
      for(long t = 1; t < iterations; t *= 2) {
         out.push_back(t);
      }
   }
   else {
      for(long t = cadence; t < iterations; t += cadence) {
         out.push_back(t);
      }
   }
   out.push_back(iterations);
   return out;
}

double big_blind(const GameSpec& spec)
{
   if(const auto* poker = dynamic_cast< const PokerRules* >(&spec.rules())) {
      return poker->params().ante;
   }
   return 1.0;
}

TypeId draw_competitor(const std::string& type_model_name, std::uint64_t seed)
{
   const auto& prior = type_model(type_model_name).prior();
   Rng rng(seed ^ 0x9e3779b97f4a7c15ULL);
   return TypeId{static_cast< int >(rng.categorical(prior))};
}

const std::vector< std::string >& metrics_columns()
{
   static const std::vector< std::string > columns{"run_id",
                                                   "algorithm",
                                                   "game",
                                                   "type_model",
                                                   "seed",
                                                   "iteration",
                                                   "exploitability",
                                                   "mbb_per_game",
                                                   "posterior_l1",
                                                   "wall_ms"};
   return columns;
}

std::string metrics_header()
{
   std::string out;
   for(const auto& c : metrics_columns()) {
      out += out.empty() ? c : "," + c;
   }
   return out;
}

std::string to_csv(const MetricsRow& r)
{
   char wall[32];
   std::snprintf(wall, sizeof wall, "%.3f", r.wall_ms);
   return r.run_id + "," + r.algorithm + "," + r.game + "," + r.type_model + "," + std::to_string(r.seed) + ","
          + std::to_string(r.iteration) + "," + format_double(r.exploitability) + "," + format_double(r.mbb_per_game)
          + "," + format_double(r.posterior_l1) + "," + wall;
}

std::vector< MetricsRow > run_cell(const ExperimentConfig& config,
                                   std::uint64_t seed,
                                   const MetricsSink& sink,
                                   const std::string& checkpoint_dir)
{
   check_names(config);
   const auto start = std::chrono::steady_clock::now();
   const GameSpec& spec = typed_game(config.game, config.type_model);
   const int n = spec.num_types();
   const TypeId competitor = config.competitor ? TypeId{*config.competitor} : draw_competitor(config.type_model, seed);
   const std::vector< double > truth = point_mass(n, competitor);
   const double bb = big_blind(spec);
   SolverConfig solver = solver_for_label(config.label, config.solver);
   solver.seed = seed;

   std::vector< MetricsRow > rows;
   const auto record = [&](long t, const StrategyProfile& average, std::span< const double > belief) {
      MetricsRow row;
      row.run_id = config.game + "-" + config.type_model + "-" + config.label + "-s" + std::to_string(seed);
      row.algorithm = config.label;
      row.game = config.game;
      row.type_model = config.type_model;
      row.seed = seed;
      row.iteration = t;
      row.exploitability = exploitability(spec, average, truth, TypeKnowledge::aware, bb).exploitability;
      row.mbb_per_game = to_mbbg(row.exploitability, bb);
      row.posterior_l1 = posterior_l1_error(belief, truth);
      row.wall_ms = std::chrono::duration< double, std::milli >(std::chrono::steady_clock::now() - start).count();
      if(sink) {
         sink(row);
      }
      rows.push_back(std::move(row));
   };
   const auto checkpoints = evaluation_iterations(solver.iterations, config.cadence);

   if(solver.algorithm == Algorithm::deep_bcfr) {
      DeepRunOptions options;
      options.competitor = competitor;
      options.checkpoints = checkpoints;
      options.on_checkpoint = [&](const DeepCheckpoint& cp) { record(cp.iteration, *cp.average, cp.belief->probs); };
      const DeepResult result = deep_bcfr_run(spec, solver, options);
      if(! checkpoint_dir.empty()) {
         std::filesystem::create_directories(checkpoint_dir);
         for(std::size_t p = 0; p < 2; ++p) {
            if(result.strategy_networks[p]) {
               std::ofstream out(std::filesystem::path(checkpoint_dir) / ("strategy-p" + std::to_string(p) + ".net"),
                                 std::ios::binary);
               save_network(out, *result.strategy_networks[p]);
            }
         }
      }
      return rows;
   }

   // The classical baselines solve the game collapsed under the solver's uniform prior.
   const bool type_free = is_type_free(solver.algorithm);
   const std::vector< double > uniform(static_cast< std::size_t >(n), 1.0 / n);
   const GameSpec collapsed = type_free ? spec.collapse(uniform) : GameSpec();
   const GameSpec& solved = type_free ? collapsed : spec;
   SolverState state = make_solver_state(solved, solver, type_free ? std::nullopt : std::optional< TypeId >(competitor));
   std::size_t next = 0;
   for(long t = 1; t <= solver.iterations; ++t) {
      iterate(state, solved, solver);
      if(next < checkpoints.size() && checkpoints[next] == t) {
         ++next;
         const StrategyProfile average = average_strategy_profile(solved, state);
         record(t, average, type_free ? std::span< const double >(uniform) : std::span< const double >(state.belief.probs));
      }
   }
   if(! checkpoint_dir.empty()) {
      save_solver_checkpoint(checkpoint_dir, solved, solver, state);
   }
   return rows;
}

std::vector< MetricsRow > run_experiment(const ExperimentConfig& config, const MetricsSink& sink)
{
   check_names(config);
   if(config.out_dir.empty()) {
      throw ConfigError("config key 'out': no output directory given");
   }
   const std::filesystem::path dir(config.out_dir);
   std::error_code ec;
   std::filesystem::create_directories(dir, ec);
   const auto csv_path = dir / "metrics.csv";
   std::ofstream csv(csv_path, std::ios::binary | std::ios::trunc);
   if(ec || ! csv) {
      throw ConfigError("config key 'out': cannot write to '" + config.out_dir + "'");
   }
   csv << metrics_header() << '\n';
   std::vector< MetricsRow > all;
   for(std::uint64_t seed : config.seeds) {
      const auto checkpoint = (dir / ("checkpoint-seed" + std::to_string(seed))).string();
      auto rows = run_cell(config, seed, sink, checkpoint);
      for(const auto& r : rows) {
         csv << to_csv(r) << '\n';
      }
      all.insert(all.end(), rows.begin(), rows.end());
   }
   csv.flush();
   if(! csv) {
      throw Error("failed writing '" + csv_path.string() + "'");
   }
   return all;
}

std::vector< PosteriorBenchRow > posterior_bench(const PosteriorBenchConfig& config)
{
   if(config.game != "kuhn" && config.game != "leduc") {
      throw ConfigError("posterior-bench: unknown game '" + config.game + "'");
   }
   if(config.trials == 0 || config.max_observations == 0 || config.references_per_type == 0) {
      throw ConfigError("posterior-bench: trials, observations and references must be positive");
   }
   const GameSpec& spec = typed_game(config.game, config.type_model);
   const int n = spec.num_types();
   const auto marks = evaluation_iterations(static_cast< long >(config.max_observations), 0);
   std::vector< PosteriorBenchRow > rows;
   for(int truth = 0; truth < n; ++truth) {
      std::vector< double > total(marks.size(), 0.0);
      std::vector< std::size_t > below(marks.size(), 0);
      const auto target = point_mass(n, TypeId{truth});
      for(std::size_t trial = 0; trial < config.trials; ++trial) {
         Rng rng(config.seed * 1000003 + trial * 31 + static_cast< std::uint64_t >(truth));
         SampleBank bank(n, config.references_per_type, config.max_observations);
         populate_references(spec.rules(), bank, config.references_per_type, rng);
         KernelConfig kernel;
         kernel.w = config.belief.w;
         kernel.w_prime = config.belief.w_prime;
         if(config.belief.standardize) {
            kernel.scale = standardizing_scale(bank);
         }
         BeliefState belief = BeliefState::uniform(n);
         std::size_t mark = 0;
         for(std::size_t k = 1; k <= config.max_observations; ++k) {
            const auto obs = scripted_observation(spec.rules(), TypeId{truth}, rng);
            belief = posterior_update(belief, obs, bank, kernel);
            if(static_cast< long >(k) == marks[mark]) {
               const double l1 = posterior_l1_error(belief.probs, target);
               total[mark] += l1;
               below[mark] += l1 < config.threshold ? 1 : 0;
               ++mark;
            }
         }
      }
      for(std::size_t m = 0; m < marks.size(); ++m) {
         rows.push_back({truth,
                         static_cast< std::size_t >(marks[m]),
                         total[m] / static_cast< double >(config.trials),
                         static_cast< double >(below[m]) / static_cast< double >(config.trials)});
      }
   }
   return rows;
}

GridSpec grid_spec(const std::string& name)
{
   GridSpec g;
   g.name = name;
   g.game = "leduc";
   g.iterations = 2000;
   g.deep_iterations = 100;
   if(name == "table1") {
      g.labels = {"bcfr", "bcfr+", "deep-bcfr", "cfr", "cfr+", "mccfr-ext"};
      g.type_models = {"pure-n", "pure-c", "pure-a", "mixed-1", "mixed-2", "mixed-3"};
      return g;
   }
   if(name == "table2") {
      g.labels = {"cig", "bcfr", "bcfr-no-posterior", "cfr"};
      g.type_models = {"pure-n", "pure-c", "pure-a"};
      for(int k = 1; k <= 9; ++k) {
         g.type_models.push_back("mixed-" + std::to_string(k));
      }
      return g;
   }
   throw ConfigError("unknown grid '" + name + "' (expected table1 or table2)");
}

GridSummary run_grid(const GridSpec& grid, const ExperimentConfig& base, const MetricsSink& sink, std::size_t workers)
{
   for(const auto& label : grid.labels) {
      validate_label(label);
   }
   for(const auto& model : grid.type_models) {
      rethrow_as_config("type_model", [&] { return type_model(model); });
   }
   if(base.seeds.empty()) {
      throw ConfigError("grid: the seed list is empty");
   }

   struct Cell {
      ExperimentConfig config;
      std::uint64_t seed = 0;
      std::vector< MetricsRow > rows;
      std::exception_ptr error;
      bool done = false;
   };
   std::vector< Cell > cells;
   for(const auto& model : grid.type_models) {
      for(const auto& label : grid.labels) {
         ExperimentConfig cell = base;
         cell.game = grid.game;
         cell.type_model = model;
         cell.label = label;
         cell.solver.iterations = label == "deep-bcfr" ? grid.deep_iterations : grid.iterations;
         for(std::uint64_t seed : base.seeds) {
            cells.push_back({cell, seed, {}, nullptr, false});
         }
      }
   }

   // Cells run on a pool; rows reach the sink on this thread in cell order.
   if(workers == 0) {
      workers = std::max(1u, std::thread::hardware_concurrency());
   }
   workers = std::min(workers, std::max< std::size_t >(cells.size(), 1));
   std::mutex mutex;
   std::condition_variable finished;
   std::atomic< std::size_t > next{0};
   std::atomic< bool > stop{false};
   const auto work = [&] {
      for(std::size_t k = next++; k < cells.size() && ! stop; k = next++) {
         Cell& c = cells[k];
         std::vector< MetricsRow > rows;
         std::exception_ptr error;
         try {
            rows = run_cell(c.config, c.seed);
         }
         catch(...) {
            error = std::current_exception();
            stop = true;
         }
         const std::lock_guard lock(mutex);
         c.rows = std::move(rows);
         c.error = error;
         c.done = true;
         finished.notify_all();
      }
   };
   std::vector< std::jthread > pool;
   for(std::size_t w = 1; w < workers; ++w) {
      pool.emplace_back(work);
   }
   std::exception_ptr failure;
   std::size_t flushed = 0;
   const auto flush = [&] {
      std::unique_lock lock(mutex);
      while(flushed < cells.size() && cells[flushed].done) {
         Cell& c = cells[flushed++];
         if(c.error) {
            failure = failure ? failure : c.error;
            continue;
         }
         if(sink && ! failure) {
            lock.unlock();
            for(const auto& row : c.rows) {
               sink(row);
            }
            lock.lock();
         }
      }
   };
   if(workers == 1) {
      for(std::size_t k = next++; k < cells.size() && ! stop; k = next++) {
         try {
            cells[k].rows = run_cell(cells[k].config, cells[k].seed);
         }
         catch(...) {
            cells[k].error = std::current_exception();
            stop = true;
         }
         cells[k].done = true;
         flush();
      }
   }
   else {
      while(true) {
         {
            std::unique_lock lock(mutex);
            finished.wait(lock, [&] {
               return (flushed < cells.size() && cells[flushed].done) || flushed == cells.size() || stop;
            });
            if(flushed == cells.size()) {
               break;
            }
         }
         flush();
         if(stop) {
            break;
         }
      }
   }
   pool.clear();
   flush();
   for(const auto& c : cells) {
      if(c.error) {
         failure = failure ? failure : c.error;
      }
   }
   if(failure) {
      std::rethrow_exception(failure);
   }

   GridSummary s;
   s.labels = grid.labels;
   s.type_models = grid.type_models;
   std::size_t k = 0;
   for(std::size_t m = 0; m < grid.type_models.size(); ++m) {
      auto& finals = s.final.emplace_back();
      auto& means = s.mean.emplace_back();
      for(std::size_t l = 0; l < grid.labels.size(); ++l) {
         auto& per_seed = finals.emplace_back();
         double total = 0.0;
         for(std::size_t r = 0; r < base.seeds.size(); ++r) {
            per_seed.push_back(cells[k++].rows.back().exploitability);
            total += per_seed.back();
         }
         means.push_back(total / static_cast< double >(per_seed.size()));
      }
   }
   if(! s.type_models.empty()) {
      s.averaged.assign(s.labels.size(), 0.0);
      for(const auto& row : s.mean) {
         for(std::size_t l = 0; l < row.size(); ++l) {
            s.averaged[l] += row[l] / static_cast< double >(s.type_models.size());
         }
      }
   }
   return s;
}

void write_summary_csv(std::ostream& out, const GridSummary& s)
{
   out << "type_model";
   for(const auto& label : s.labels) {
      out << ',' << label;
   }
   out << '\n';
   for(std::size_t m = 0; m < s.type_models.size(); ++m) {
      out << s.type_models[m];
      for(double v : s.mean[m]) {
         out << ',' << format_double(v);
      }
      out << '\n';
   }
   if(! s.averaged.empty()) {
      out << "Averaged";
      for(double v : s.averaged) {
         out << ',' << format_double(v);
      }
      out << '\n';
   }
}

}  // namespace bcfr
