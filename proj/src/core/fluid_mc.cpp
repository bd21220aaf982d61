#include "fluid_mc.hpp"

#include <algorithm>
#include <cmath>

#include "errors.hpp"
#include "rng.hpp"

namespace dbvn {

FluidQueueEstimate simulate_fluid_queue(const FluidParams& p, uint64_t steps, uint64_t seed) {
    if (steps < 1000) fail(Status::invalid_params, "fluid oracle needs a reasonable step count");

    const double k = p.voq_size;
    double h = 1e-3 * p.burstiness();
    if (k > 0.0) h = std::min(h, 1e-2 * k / p.peak);

    const double fill = p.peak + p.deflect_rate - p.capacity;   // on-state net inflow
    const double drain = p.capacity - p.deflect_rate;           // off-state net outflow
    const double p_on_off = p.alpha * h;
    const double p_off_on = p.beta * h;

    Xoshiro256pp rng(substream_seed(seed, 0));
    bool on = rng.uniform() < p.on_fraction();  // stationary start
    double x = 0.0;

    const uint64_t warmup = steps / 20;
    double t_full = 0.0, t_empty = 0.0, spilled = 0.0;

    for (uint64_t i = 0; i < steps; ++i) {
        const bool measure = i >= warmup;
        if (on) {
            double xn = x + fill * h;
            if (xn >= k) {
                double over = xn - k;
                if (measure) {
                    spilled += over;
                    t_full += std::min(h, over / fill);
                }
                x = k;
            } else {
                x = xn;
            }
            if (rng.uniform() < p_on_off) on = false;
        } else {
            double xn = x - drain * h;
            if (xn <= 0.0) {
                if (measure) t_empty += std::min(h, -xn / drain);
                x = 0.0;
            } else {
                x = xn;
            }
            if (rng.uniform() < p_off_on) on = true;
        }
    }

    const double span = static_cast<double>(steps - warmup) * h;
    return {t_full / span, t_empty / span, spilled / span, span};
}

} // namespace dbvn
