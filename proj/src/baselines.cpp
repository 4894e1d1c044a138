#include "nsbandit/baselines.hpp"

#include "nsbandit/env_io.hpp"

namespace nsbandit {

namespace {

template <class Choose>
RunTrace run_fixed_rule(const EnvironmentSpec& env, const NoiseStream& noise, const RunOptions& options,
                        const char* name, Choose choose) {
  const Step budget = resolve_budget(env, options);
  RunTrace trace;
  trace.policy = name;
  trace.mode = env.mode();
  trace.seed = noise.seed();
  trace.env_hash = environment_hash(env);
  trace.params = nlohmann::json::object();
  trace.episodes.push_back({1, 1, options.first_time});
  for (Step i = 0; i < budget; ++i) {
    const Step t = options.first_time + i;
    const int k = choose(i, t);
    const double x = sample_reward(env, k, t, noise);
    const double regret = gap_at(env, k, t);
    trace.pulls.push_back({t, k, x, regret, static_cast<int>(i + 1), 1});
    trace.total_regret += regret;
    trace.active_set_sizes.push_back(1);
  }
  return trace;
}

}  // namespace

RunTrace run_oracle(const EnvironmentSpec& env, const NoiseStream& noise, const RunOptions& options) {
  return run_fixed_rule(env, noise, options, "oracle", [&](Step, Step t) { return best_arm_at(env, t); });
}

RunTrace run_uniform(const EnvironmentSpec& env, const NoiseStream& noise, const RunOptions& options) {
  const int K = env.num_arms();
  return run_fixed_rule(env, noise, options, "uniform",
                        [K](Step i, Step) { return static_cast<int>(i % K) + 1; });
}

}  // namespace nsbandit
