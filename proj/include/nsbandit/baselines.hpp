#pragma once

// Reference policies for the harness.

#include "nsbandit/counter_rng.hpp"
#include "nsbandit/environment.hpp"
#include "nsbandit/trace.hpp"

namespace nsbandit {

/// Pulls best_arm_at(t) at every step; regret is identically 0.
RunTrace run_oracle(const EnvironmentSpec& env, const NoiseStream& noise, const RunOptions& options = {});

/// Round-robin over arms 1..K starting with arm 1.
RunTrace run_uniform(const EnvironmentSpec& env, const NoiseStream& noise, const RunOptions& options = {});

}  // namespace nsbandit
