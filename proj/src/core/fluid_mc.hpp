#pragma once
#include <cstdint>

#include "fluid.hpp"

namespace dbvn {

/// Time-average estimates from a stochastic simulation of the two-state
/// fluid queue. This is deliberately independent of the closed forms in
/// fluid.cpp: it only shares the parameter record.
struct FluidQueueEstimate {
    double p_full;
    double p_empty;
    double overflow_rate;
    double time;  // simulated span after warmup, slots
};

// Discretizes the continuous-time on-off process at step
// h = min(1e-3 * burstiness, 1e-2 * K / peak) and applies exact per-step
// fluid balance with reflection at 0 and K. Deterministic per seed.
FluidQueueEstimate simulate_fluid_queue(const FluidParams& p, uint64_t steps, uint64_t seed);

} // namespace dbvn
