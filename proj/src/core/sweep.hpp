#pragma once
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "config_file.hpp"
#include "fluid.hpp"
#include "switch_sim.hpp"

namespace dbvn {

enum class SweepAxis { voq_size, burstiness, load };
enum class VoqPolicy { fixed, critical };

/// Resolved experiment description: one switch/traffic base point plus an
/// optional sweep axis. Built from a ConfigFile; see the README for the key
/// reference.
struct Experiment {
    // switch
    int ports = 64;
    int voq_size = 0;
    double throttle_pct = -1.0;  // >= 0: B_T = pct% of ports*voq_size
    int throttle_size = 0;       // used when throttle_pct < 0
    SwitchMode mode = SwitchMode::dbvn;
    int cross_delay = 1;
    uint64_t seed = 1;
    int64_t slots = 1'000'000;
    int64_t warmup = -1;
    bool stationary_start = true;

    // traffic (per-slot probabilities; also the fluid rates)
    double peak = 0.8;
    double alpha = 0.5;
    double beta = 0.01;
    double mean = -1.0;  // < 0: derived as peak*beta/(alpha+beta)

    // sweep
    SweepAxis axis = SweepAxis::voq_size;
    std::vector<double> points;
    int64_t slots_per_point = -1;  // < 0: use slots
    int seeds_per_point = 1;
    double loss_target = 1e-5;
    VoqPolicy voq_policy = VoqPolicy::fixed;
    bool analytic_only = false;
    int k_max = 1'000'000;  // search ceiling for the critical-K probe

    static Experiment from_config(const ConfigFile& cfg);

    double resolved_mean(double a, double b) const;
    int throttle_packets(int k) const;

    // Parameters of one VC at a point on the sweep axis.
    FluidParams fluid_at(double value) const;
    FluidParams fluid_base() const { return fluid_at_base(voq_size); }
    FluidParams fluid_at_base(double k) const;

    // Simulator configuration for one point/replicate.
    SwitchConfig switch_at(double value, uint64_t run_seed) const;

    // Axis value -> concrete per-point settings.
    void apply_axis(double value, double& k, double& a, double& b, double& m) const;
};

struct SweepRow {
    double value = 0;
    uint64_t seed = 0;
    double sim_pl, sim_pd, sim_delay_mean, sim_delay_var, sim_oos, sim_reseq_max;
    double ana_pl, ana_pd, ana_delay_mean, ana_delay_var;
    double kdot, bvn_pl, bvn_k_required;
};

struct SweepResult {
    std::vector<SweepRow> rows;  // ordered by (point index, seed index)
    std::vector<std::pair<std::string, std::string>> metadata;
};

SweepResult run_sweep(const Experiment& ex, int threads = 0);

void write_sweep_csv(const SweepResult& r, std::ostream& out);
SweepResult read_sweep_csv(std::istream& in);

struct CriticalKResult {
    int k = 0;
    bool monotone_ok = true;
    std::vector<std::pair<int, double>> probes;  // (K, pooled loss), in probe order
};

/// Smallest integer K whose pooled simulated loss is <= target, by geometric
/// bracketing from K = 1 followed by binary refinement. Fixed seeds per probe.
CriticalKResult find_critical_k(const Experiment& ex, double loss_target, int threads = 0);

struct BoundCheck {
    double value;          // axis value
    std::string relation;  // e.g. "sim_pl <= bvn_pl + eps"
    double lhs, rhs;
    bool pass;
};

struct BoundReport {
    bool applicable = false;
    bool all_pass = true;
    std::vector<BoundCheck> checks;
};

/// Bounding relations between simulation and the ideal/baseline analytics,
/// with 3-standard-error statistical slack.
BoundReport compare_report(const SweepResult& r);

void write_report(const BoundReport& rep, std::ostream& out);

/// Analytic report for the experiment's base operating point, key = value text.
void write_analysis(const Experiment& ex, std::ostream& out);

// Small shared helpers.
std::string format_double(double v);
void parallel_for(int jobs, int threads, const std::function<void(int)>& fn);

} // namespace dbvn
