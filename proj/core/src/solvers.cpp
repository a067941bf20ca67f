#include "bcfr/solvers.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>

#include <json.hpp>

#include "bcfr/error.hpp"
#include "bcfr/evaluation.hpp"

namespace bcfr {

namespace {

struct NamedAlgorithm {
   Algorithm algorithm;
   const char* name;
};

constexpr NamedAlgorithm kAlgorithms[] = {
    {Algorithm::cfr, "cfr"},   {Algorithm::cfr_plus, "cfr+"},   {Algorithm::mccfr_external, "mccfr-ext"},
    {Algorithm::bcfr, "bcfr"}, {Algorithm::bcfr_plus, "bcfr+"}, {Algorithm::deep_bcfr, "deep-bcfr"},
};

bool is_plus(Algorithm a)
{
   return a == Algorithm::cfr_plus || a == Algorithm::bcfr_plus;
}

}  // namespace

std::string to_string(Algorithm algorithm)
{
   for(const auto& a : kAlgorithms) {
      if(a.algorithm == algorithm) {
         return a.name;
      }
   }
   throw ConfigError("unknown algorithm id");
}

Algorithm parse_algorithm(const std::string& name)
{
   for(const auto& a : kAlgorithms) {
      if(name == a.name) {
         return a.algorithm;
      }
   }
   throw ConfigError("unknown algorithm '" + name + "'");
}

bool is_type_free(Algorithm algorithm)
{
   return algorithm == Algorithm::cfr || algorithm == Algorithm::cfr_plus || algorithm == Algorithm::mccfr_external;
}

std::string to_string(PosteriorMode mode)
{
   return mode == PosteriorMode::exact_sum ? "exact-sum" : "sampled";
}

PosteriorMode parse_posterior_mode(const std::string& name)
{
   if(name == "exact-sum") {
      return PosteriorMode::exact_sum;
   }
   if(name == "sampled") {
      return PosteriorMode::sampled;
   }
   throw ConfigError("unknown posterior mode '" + name + "'");
}

std::string to_string(BeliefMode mode)
{
   switch(mode) {
      case BeliefMode::posterior: return "posterior";
      case BeliefMode::frozen: return "frozen";
      case BeliefMode::pinned: return "pinned";
   }
   throw ConfigError("unknown belief mode id");
}

BeliefMode parse_belief_mode(const std::string& name)
{
   if(name == "posterior") {
      return BeliefMode::posterior;
   }
   if(name == "frozen") {
      return BeliefMode::frozen;
   }
   if(name == "pinned") {
      return BeliefMode::pinned;
   }
   throw ConfigError("unknown belief mode '" + name + "'");
}

std::string to_string(UpdateSchedule schedule)
{
   return schedule == UpdateSchedule::simultaneous ? "simultaneous" : "alternating";
}

UpdateSchedule parse_update_schedule(const std::string& name)
{
   if(name == "simultaneous") {
      return UpdateSchedule::simultaneous;
   }
   if(name == "alternating") {
      return UpdateSchedule::alternating;
   }
   throw ConfigError("unknown update schedule '" + name + "'");
}

void SolverConfig::validate() const
{
   if(iterations < 1) {
      throw ConfigError("solver: iteration budget T must be at least 1");
   }
   if(traversals < 1) {
      throw ConfigError("solver: traversals per iteration K must be at least 1");
   }
   if(! (belief.w > 0.0) || ! (belief.w_prime > 0.0)) {
      throw ConfigError("solver: kernel bandwidths must be positive");
   }
   if(belief.references_per_type == 0 || belief.observation_capacity == 0) {
      throw ConfigError("solver: belief queue capacities must be positive");
   }
   if(algorithm == Algorithm::deep_bcfr) {
      if(deep.memory_capacity == 0) {
         throw ConfigError("deep-bcfr: memory capacity must be positive");
      }
      if(deep.batch_size == 0 || deep.hidden.empty()) {
         throw ConfigError("deep-bcfr: batch size and hidden layers must be positive");
      }
      if(deep.optimizer != "sgd" && deep.optimizer != "adam") {
         throw ConfigError("deep-bcfr: optimizer must be sgd or adam");
      }
      if(deep.lr_schedule != "constant" && deep.lr_schedule != "linear") {
         throw ConfigError("deep-bcfr: lr_schedule must be constant or linear");
      }
      if(deep.type_layer > deep.hidden.size()) {
         throw ConfigError("deep-bcfr: type layer beyond the last hidden layer");
      }
      if(! (deep.learning_rate >= 0.0) || ! (deep.clip_norm >= 0.0)) {
         throw ConfigError("deep-bcfr: learning rate and clip norm must be non-negative");
      }
   }
}

SolverState make_solver_state(const GameSpec& spec, const SolverConfig& config, std::optional< TypeId > competitor)
{
   config.validate();
   const int n = spec.num_types();
   if(is_type_free(config.algorithm) && n != 1) {
      throw ConfigError(to_string(config.algorithm) + ": needs a single-type game (collapse the type model first)");
   }
   if(competitor && (competitor->index < 0 || competitor->index >= n)) {
      throw ConfigError("solver: competitor type out of range");
   }
   SolverState state;
   const RegretMode mode = is_plus(config.algorithm) ? RegretMode::plus : RegretMode::vanilla;
   const AveragingScheme scheme = is_plus(config.algorithm) ? AveragingScheme::linear : AveragingScheme::uniform;
   state.regrets = RegretTable(spec.layout_ptr(), n, mode);
   state.strategy = StrategyTable(spec.layout_ptr(), n, scheme);
   state.rng = Rng(config.seed);
   state.competitor = competitor;

   if(config.belief.prior.empty()) {
      state.belief = BeliefState::uniform(n);
   }
   else {
      if(config.belief.prior.size() != static_cast< std::size_t >(n)) {
         throw ConfigError("solver: prior length does not match the type count");
      }
      state.belief = BeliefState::from_prior(config.belief.prior);
   }
   if(n == 1 || is_type_free(config.algorithm)) {
      return state;
   }
   switch(config.belief_mode) {
      case BeliefMode::frozen: break;
      case BeliefMode::pinned: {
         if(! competitor) {
            throw ConfigError("solver: a pinned belief needs the competitor's type");
         }
         state.belief = BeliefState::from_prior(point_mass(n, *competitor));
         break;
      }
      case BeliefMode::posterior: {
         if(! competitor) {
            throw ConfigError("solver: posterior learning needs a competitor type");
         }
         state.bank.emplace(n, config.belief.references_per_type, config.belief.observation_capacity);
         // The reference stream is separate from the solver stream so a restored
         // checkpoint regenerates the same bank.
         Rng reference_rng(config.seed ^ 0x5851f42d4c957f2dULL);
         populate_references(spec.rules(), *state.bank, config.belief.references_per_type, reference_rng);
         state.kernel.w = config.belief.w;
         state.kernel.w_prime = config.belief.w_prime;
         if(config.belief.standardize) {
            state.kernel.scale = standardizing_scale(*state.bank);
         }
         break;
      }
   }
   return state;
}

void observe_competitor(SolverState& state, const GameSpec& spec, const SolverConfig& config)
{
   if(config.belief_mode != BeliefMode::posterior || ! state.bank || ! state.competitor) {
      return;
   }
   for(std::size_t k = 0; k < config.belief.observations_per_iteration; ++k) {
      auto obs = scripted_observation(spec.rules(), *state.competitor, state.rng);
      state.belief = posterior_update(state.belief, obs, *state.bank, state.kernel);
      state.bank->add_observation(std::move(obs));
   }
}

void iterate(SolverState& state, const GameSpec& spec, const SolverConfig& config)
{
   switch(config.algorithm) {
      case Algorithm::cfr: cfr_iterate(state, spec, config.update); return;
      case Algorithm::cfr_plus: cfr_plus_iterate(state, spec); return;
      case Algorithm::mccfr_external: mccfr_external_iterate(state, spec, config); return;
      case Algorithm::bcfr: bcfr_iterate(state, spec, config); return;
      case Algorithm::bcfr_plus: bcfr_plus_iterate(state, spec, config); return;
      case Algorithm::deep_bcfr: break;
   }
   throw ConfigError("iterate: deep-bcfr runs through deep_bcfr_run");
}

StrategyProfile average_strategy_profile(const GameSpec& spec, const SolverState& state)
{
   return average_profile(spec, state.strategy);
}

// ---------------------------------------------------------------------------

namespace {

using nlohmann::json;

json encode_doubles(std::span< const double > v)
{
   json out = json::array();
   for(double x : v) {
      if(std::isfinite(x)) {
         out.push_back(x);
      }
      else {
         out.push_back(nullptr);  // −∞ log-likelihoods
      }
   }
   return out;
}

std::vector< double > decode_doubles(const json& j)
{
   std::vector< double > out;
   for(const auto& x : j) {
      out.push_back(x.is_null() ? -std::numeric_limits< double >::infinity() : x.get< double >());
   }
   return out;
}

json config_echo(const SolverConfig& c)
{
   return json{{"algorithm", to_string(c.algorithm)},
               {"iterations", c.iterations},
               {"traversals", c.traversals},
               {"seed", c.seed},
               {"posterior_mode", to_string(c.posterior_mode)},
               {"belief_mode", to_string(c.belief_mode)},
               {"update", to_string(c.update)},
               {"sample_chance", c.sample_chance},
               {"belief",
                {{"w", c.belief.w},
                 {"w_prime", c.belief.w_prime},
                 {"m", c.belief.references_per_type},
                 {"n", c.belief.observation_capacity},
                 {"standardize", c.belief.standardize}}}};
}

std::filesystem::path sidecar_path(const std::string& dir)
{
   return std::filesystem::path(dir) / "state.json";
}

}  // namespace

void save_solver_checkpoint(const std::string& directory,
                            const GameSpec& spec,
                            const SolverConfig& config,
                            const SolverState& state)
{
   if(config.belief.online_references) {
      throw ConfigError("checkpoint: runs with online reference insertion cannot be restored");
   }
   std::filesystem::create_directories(directory);
   {
      std::ofstream out(std::filesystem::path(directory) / "regrets.bin", std::ios::binary);
      save_checkpoint(out, spec, state.regrets);
   }
   {
      std::ofstream out(std::filesystem::path(directory) / "strategy.bin", std::ios::binary);
      save_checkpoint(out, spec, state.strategy);
   }
   json side{{"version", kCheckpointVersion},
             {"game", spec.name()},
             {"structure_hash", spec.structure_hash()},
             {"config", config_echo(config)},
             {"iteration", state.iteration},
             {"posterior", encode_doubles(state.belief.probs)},
             {"prior", encode_doubles(state.belief.prior)},
             {"log_likelihood", encode_doubles(state.belief.log_likelihood)},
             {"observations", state.belief.observations},
             {"stagnations", state.belief.stagnations},
             {"rng", state.rng.serialize()}};
   side["competitor"] = state.competitor ? json(state.competitor->index) : json(nullptr);
   std::ofstream out(sidecar_path(directory));
   out << side.dump(2) << '\n';
   if(! out) {
      throw CheckpointError("checkpoint: failed to write " + sidecar_path(directory).string());
   }
}

SolverState load_solver_checkpoint(const std::string& directory, const GameSpec& spec, const SolverConfig& config)
{
   std::ifstream side_in(sidecar_path(directory));
   if(! side_in) {
      throw CheckpointError("checkpoint: missing " + sidecar_path(directory).string());
   }
   json side;
   try {
      side = json::parse(side_in);
   }
   catch(const json::exception& e) {
      throw CheckpointError(std::string("checkpoint: malformed sidecar: ") + e.what());
   }
   try {
      if(side.at("structure_hash").get< std::uint64_t >() != spec.structure_hash()) {
         throw CheckpointError("checkpoint: written for a different game");
      }
      if(side.at("config") != config_echo(config)) {
         throw CheckpointError("checkpoint: solver configuration differs from the one that wrote it");
      }
      std::optional< TypeId > competitor;
      if(! side.at("competitor").is_null()) {
         competitor = TypeId{side.at("competitor").get< int >()};
      }
      SolverState state = make_solver_state(spec, config, competitor);
      {
         std::ifstream in(std::filesystem::path(directory) / "regrets.bin", std::ios::binary);
         state.regrets = load_regret_checkpoint(in, spec);
      }
      {
         std::ifstream in(std::filesystem::path(directory) / "strategy.bin", std::ios::binary);
         state.strategy = load_strategy_checkpoint(in, spec);
      }
      state.iteration = side.at("iteration").get< long >();
      state.belief.probs = decode_doubles(side.at("posterior"));
      state.belief.prior = decode_doubles(side.at("prior"));
      state.belief.log_likelihood = decode_doubles(side.at("log_likelihood"));
      state.belief.observations = side.at("observations").get< std::size_t >();
      state.belief.stagnations = side.at("stagnations").get< std::size_t >();
      state.rng = Rng::deserialize(side.at("rng").get< std::string >());
      return state;
   }
   catch(const json::exception& e) {
      throw CheckpointError(std::string("checkpoint: incomplete sidecar: ") + e.what());
   }
}

}  // namespace bcfr
