#pragma once
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "schedule.hpp"

namespace dbvn {

enum class SwitchMode { dbvn, bvn };

/// Per-slot probabilities of the discrete on-off sources: a packet is
/// generated with probability peak in every on slot; state flips on -> off
/// with probability alpha and off -> on with probability beta per slot.
struct OnOffTraffic {
    double peak = 0.0;
    double alpha = 0.5;
    double beta = 0.5;

    double on_fraction() const { return beta / (alpha + beta); }
    double mean() const { return peak * on_fraction(); }
};

struct SwitchConfig {
    int ports = 0;
    int voq_size = 0;        // K, packets per VOQ
    int throttle_size = 0;   // B_T, packets per input; ignored in bvn mode
    SwitchMode mode = SwitchMode::dbvn;
    int cross_delay = 1;     // a, slots spent crossing the fabric per deflection
    uint64_t seed = 1;
    int64_t warmup = -1;     // slots excluded from metrics; -1 = 10 * ports * voq_size
    bool stationary_start = true;
    OnOffTraffic traffic;
    FrameSchedule schedule;

    int64_t resolved_warmup() const {
        return warmup >= 0 ? warmup : 10LL * ports * voq_size;
    }
};

// B_T as a percentage of the total VOQ space at one input.
int throttle_from_pct(double pct, int ports, int voq_size);

struct Metrics {
    uint64_t offered = 0;             // fresh packets generated after warmup
    uint64_t delivered = 0;
    uint64_t lost = 0;
    uint64_t deflection_events = 0;   // deflection hops launched
    uint64_t deflected_packets = 0;   // packets deflected at least once
    uint64_t admissions = 0;          // fresh + fed-back arrivals at inputs
    uint64_t delay_sum = 0;           // slots, over delivered packets
    uint64_t delay_sq_sum = 0;        // slots^2
    uint64_t delivered_hops = 0;      // deflection hops summed over delivered packets
    uint64_t out_of_seq = 0;          // delivered behind a higher seq of the same flow
    uint64_t order_violations = 0;    // same, restricted to never-deflected packets
    uint64_t spare_tokens_used = 0;
    uint64_t spare_tokens_total = 0;
    uint64_t reseq_parked = 0;        // deliveries the reorder stage had to hold
    uint64_t reseq_held_peak = 0;     // max packets parked at one output
    double reseq_held_mean = 0.0;     // mean parked packets per output per slot
    uint64_t in_flight = 0;           // packets still inside when the run ended
    int64_t measured_slots = 0;

    double p_loss() const { return offered ? static_cast<double>(lost) / offered : 0.0; }
    double p_deflect() const {
        return admissions ? static_cast<double>(deflection_events) / admissions : 0.0;
    }
    double mean_delay() const {
        return delivered ? static_cast<double>(delay_sum) / delivered : 0.0;
    }
    double delay_variance() const {
        if (!delivered) return 0.0;
        double m = mean_delay();
        return static_cast<double>(delay_sq_sum) / delivered - m * m;
    }
    double oos_fraction() const {
        return delivered ? static_cast<double>(out_of_seq) / delivered : 0.0;
    }
};

/// Reorder-stage cost at one output: the buffer that would release packets in
/// per-flow sequence order.
struct ReseqStat {
    uint64_t held_peak = 0;   // most packets parked at once
    double held_mean = 0.0;   // time-average parked packets
    uint64_t parked = 0;      // deliveries that had to wait for a lower seq
};

/// Slot-accurate crossbar simulation. Each slot runs in a fixed phase order:
/// expired feedback packets re-enter their co-located input, sources advance
/// and fresh arrivals are admitted, then the scheduled permutation serves one
/// head-of-line packet per connected VC with free tokens offered to the
/// throttle buffer for deflection.
class Simulation {
public:
    explicit Simulation(SwitchConfig cfg);
    ~Simulation();
    Simulation(const Simulation&) = delete;
    Simulation& operator=(const Simulation&) = delete;

    void step();
    // Schedules a fresh arrival for the next step's arrival phase (test hook;
    // counted exactly like a generated packet).
    void inject_arrival(int input, int output);
    // Stops generation and steps until the switch is empty.
    void drain();

    int64_t slot() const;
    Metrics metrics() const;  // snapshot with derived fields resolved
    std::vector<ReseqStat> resequencer_stats() const;  // one entry per output

    // Optional CSV event trace: slot,event,input,output,flow_i,flow_k,seq,deflections
    void set_trace(std::ostream* out);

private:
    struct Impl;
    Impl* impl_;
};

/// One complete run; deterministic per (config, slots, drain_after).
Metrics run_switch(const SwitchConfig& cfg, int64_t slots, bool drain_after = false);

} // namespace dbvn
