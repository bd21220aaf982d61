#include "switch_sim.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <ostream>
#include <string>

#include "errors.hpp"
#include "rng.hpp"

namespace dbvn {

int throttle_from_pct(double pct, int ports, int voq_size) {
    if (pct < 0) fail(Status::config_error, "throttle percentage must be >= 0");
    return static_cast<int>(std::llround(pct / 100.0 * ports * voq_size));
}

namespace {

struct Packet {
    uint32_t seq;
    uint32_t birth;
    uint16_t src;
    uint16_t dst;
    uint16_t hops;
    uint8_t eligible;
    uint8_t pad;
};

// L >= 1 with P(L = k) = (1-p)^(k-1) p, via inversion. log1m = log(1 - p).
int64_t geometric(Xoshiro256pp& rng, double log1m) {
    double r = std::log(1.0 - rng.uniform()) / log1m;
    if (!(r < 4.0e18)) r = 4.0e18;
    return static_cast<int64_t>(r) + 1;
}

struct MinHeap {
    std::vector<uint32_t> v;
    bool empty() const { return v.empty(); }
    uint32_t top() const { return v.front(); }
    void push(uint32_t x) {
        v.push_back(x);
        std::push_heap(v.begin(), v.end(), std::greater<>{});
    }
    void pop() {
        std::pop_heap(v.begin(), v.end(), std::greater<>{});
        v.pop_back();
    }
};

constexpr int kWheelBits = 14;
constexpr int64_t kWheelSize = int64_t{1} << kWheelBits;
constexpr int64_t kWheelMask = kWheelSize - 1;

} // namespace

struct Simulation::Impl {
    SwitchConfig cfg;
    int n, voq_cap, tb_cap, frame, delay;
    SwitchMode mode;
    int64_t warmup;
    double log1m_alpha, log1m_beta;

    std::vector<int32_t> sched;  // frame * n, row-major by slot
    int cursor = 0;
    int64_t t = 0;
    bool gen_enabled = true;

    // Per-VC FIFO rings, flattened.
    std::vector<Packet> voq_buf;
    std::vector<uint32_t> voq_head, voq_len;
    std::vector<Packet> tb_buf;
    std::vector<uint32_t> tb_head, tb_len;

    // Feedback delay lines: arrivals at slot s live in ring slot s % (delay+1).
    std::vector<std::vector<std::pair<int32_t, Packet>>> feedback;

    struct Source {
        Xoshiro256pp rng;
        int64_t until;  // on: first slot with no generation; off: wake slot
    };
    std::vector<Source> sources;
    std::vector<int32_t> on_list;
    std::vector<std::vector<int32_t>> wheel;

    std::vector<uint32_t> flow_seq;
    std::vector<std::pair<int32_t, int32_t>> pending;

    // Resequencing trackers (per flow) and per-output occupancy. Per-output
    // time averages are accumulated at change points, not per slot.
    std::vector<uint32_t> reseq_next;
    std::vector<MinHeap> reseq_held, reseq_dropped;
    std::vector<uint32_t> held_count;
    std::vector<uint64_t> held_peak_out, held_integral, parked_out;
    std::vector<int64_t> held_changed;
    uint64_t total_held = 0, occ_sum = 0, held_peak = 0;

    std::vector<int64_t> max_seq, max_seq_direct;

    Metrics m;
    uint64_t in_network = 0;  // all packets currently inside, warmup included
    std::ostream* trace = nullptr;

    explicit Impl(SwitchConfig c) : cfg(std::move(c)) {
        n = cfg.ports;
        if (n < 1) fail(Status::config_error, "ports must be >= 1");
        if (n > 60000) fail(Status::config_error, "ports out of range");
        if (cfg.schedule.ports() != n)
            fail(Status::config_error,
                 "schedule is for " + std::to_string(cfg.schedule.ports()) + " ports, switch has " +
                     std::to_string(n));
        if (cfg.schedule.frame_size() < 1) fail(Status::config_error, "schedule frame is empty");
        if (cfg.voq_size < 0 || cfg.throttle_size < 0)
            fail(Status::config_error, "buffer sizes must be >= 0");
        if (cfg.cross_delay < 1) fail(Status::config_error, "cross_delay must be >= 1");
        if (!(cfg.traffic.peak >= 0.0) || cfg.traffic.peak > 1.0)
            fail(Status::config_error, "peak must lie in [0, 1]");
        if (!(cfg.traffic.alpha > 0.0) || cfg.traffic.alpha > 1.0 ||
            !(cfg.traffic.beta > 0.0) || cfg.traffic.beta > 1.0)
            fail(Status::config_error, "alpha and beta must lie in (0, 1]");

        voq_cap = cfg.voq_size;
        tb_cap = cfg.mode == SwitchMode::bvn ? 0 : cfg.throttle_size;
        mode = cfg.mode;
        frame = cfg.schedule.frame_size();
        delay = cfg.cross_delay;
        warmup = cfg.resolved_warmup();
        log1m_alpha = std::log1p(-cfg.traffic.alpha);
        log1m_beta = std::log1p(-cfg.traffic.beta);

        sched.resize(static_cast<size_t>(frame) * n);
        for (int s = 0; s < frame; ++s)
            for (int i = 0; i < n; ++i) sched[static_cast<size_t>(s) * n + i] = cfg.schedule.slot(s)[i];

        size_t flows = static_cast<size_t>(n) * n;
        voq_buf.resize(flows * voq_cap);
        voq_head.assign(flows, 0);
        voq_len.assign(flows, 0);
        tb_buf.resize(static_cast<size_t>(n) * tb_cap);
        tb_head.assign(n, 0);
        tb_len.assign(n, 0);
        feedback.resize(delay + 1);
        flow_seq.assign(flows, 0);
        reseq_next.assign(flows, 0);
        reseq_held.resize(flows);
        reseq_dropped.resize(flows);
        held_count.assign(n, 0);
        held_peak_out.assign(n, 0);
        held_integral.assign(n, 0);
        parked_out.assign(n, 0);
        held_changed.assign(n, 0);
        max_seq.assign(flows, -1);
        max_seq_direct.assign(flows, -1);
        wheel.resize(kWheelSize);

        sources.reserve(flows);
        double pi_on = cfg.traffic.on_fraction();
        for (size_t f = 0; f < flows; ++f) {
            sources.push_back({Xoshiro256pp(substream_seed(cfg.seed, f)), 0});
            Source& s = sources.back();
            bool on = cfg.stationary_start && s.rng.uniform() < pi_on;
            if (on) {
                s.until = geometric(s.rng, log1m_alpha);
                on_list.push_back(static_cast<int32_t>(f));
            } else {
                wheel_insert(static_cast<int32_t>(f), geometric(s.rng, log1m_beta));
            }
        }
    }

    void wheel_insert(int32_t f, int64_t wake) {
        sources[f].until = wake;
        int64_t bucket = std::min(wake, t + kWheelSize - 1);
        wheel[bucket & kWheelMask].push_back(f);
    }

    void voq_push(size_t f, const Packet& p) {
        voq_buf[f * voq_cap + (voq_head[f] + voq_len[f]) % voq_cap] = p;
        ++voq_len[f];
    }
    Packet voq_pop(size_t f) {
        Packet p = voq_buf[f * voq_cap + voq_head[f]];
        voq_head[f] = (voq_head[f] + 1) % voq_cap;
        --voq_len[f];
        return p;
    }
    void tb_push(int i, const Packet& p) {
        tb_buf[static_cast<size_t>(i) * tb_cap + (tb_head[i] + tb_len[i]) % tb_cap] = p;
        ++tb_len[i];
    }
    Packet tb_pop(int i) {
        Packet p = tb_buf[static_cast<size_t>(i) * tb_cap + tb_head[i]];
        tb_head[i] = (tb_head[i] + 1) % tb_cap;
        --tb_len[i];
        return p;
    }

    void emit(const char* event, int input, int output, const Packet& p) {
        *trace << t << ',' << event << ',' << input << ',' << output << ',' << p.src << ','
               << p.dst << ',' << p.seq << ',' << p.hops << '\n';
    }

    // Accumulate the time-weighted occupancy of output `out` up to now.
    void held_integrate(int out) {
        int64_t from = std::max(held_changed[out], warmup);
        if (t > from) held_integral[out] += held_count[out] * static_cast<uint64_t>(t - from);
        held_changed[out] = t;
    }

    void reseq_advance(size_t flow, int out) {
        MinHeap& held = reseq_held[flow];
        MinHeap& dropped = reseq_dropped[flow];
        uint32_t& next = reseq_next[flow];
        for (;;) {
            if (!held.empty() && held.top() == next) {
                held.pop();
                held_integrate(out);
                --held_count[out];
                --total_held;
                ++next;
            } else if (!dropped.empty() && dropped.top() == next) {
                dropped.pop();
                ++next;
            } else {
                break;
            }
        }
    }

    void reseq_deliver(size_t flow, uint32_t seq, int out, bool eligible) {
        if (seq == reseq_next[flow]) {
            ++reseq_next[flow];
            reseq_advance(flow, out);
        } else {
            if (eligible) {
                ++m.reseq_parked;
                ++parked_out[out];
            }
            held_integrate(out);
            reseq_held[flow].push(seq);
            ++total_held;
            if (++held_count[out] > held_peak) held_peak = held_count[out];
            if (held_count[out] > held_peak_out[out]) held_peak_out[out] = held_count[out];
        }
    }

    void reseq_drop(const Packet& p) {
        size_t flow = static_cast<size_t>(p.src) * n + p.dst;
        if (p.seq == reseq_next[flow]) {
            ++reseq_next[flow];
            reseq_advance(flow, p.dst);
        } else {
            reseq_dropped[flow].push(p.seq);
        }
    }

    void deliver(Packet& p, int input, int) {
        --in_network;
        size_t flow = static_cast<size_t>(p.src) * n + p.dst;
        if (p.eligible) {
            ++m.delivered;
            m.delivered_hops += p.hops;
            uint64_t d = static_cast<uint64_t>(t) - p.birth;
            m.delay_sum += d;
            m.delay_sq_sum += d * d;
            if (static_cast<int64_t>(p.seq) < max_seq[flow])
                ++m.out_of_seq;
            else
                max_seq[flow] = p.seq;
            if (p.hops == 0) {
                if (static_cast<int64_t>(p.seq) < max_seq_direct[flow])
                    ++m.order_violations;
                else
                    max_seq_direct[flow] = p.seq;
            }
        }
        reseq_deliver(flow, p.seq, p.dst, p.eligible);
        if (trace) emit("deliver", input, p.dst, p);
    }

    // Step 1 of the deflection procedure at `input`; true if the packet found
    // a buffer (VOQ first, throttle as fallback).
    bool admit(int input, const Packet& p) {
        size_t f = static_cast<size_t>(input) * n + p.dst;
        if (voq_len[f] < static_cast<uint32_t>(voq_cap)) {
            voq_push(f, p);
            if (trace) emit("voq", input, p.dst, p);
            return true;
        }
        if (mode == SwitchMode::dbvn && tb_len[input] < static_cast<uint32_t>(tb_cap)) {
            tb_push(input, p);
            if (trace) emit("tb", input, p.dst, p);
            return true;
        }
        if (p.eligible) ++m.lost;
        reseq_drop(p);
        if (trace) emit("drop", input, p.dst, p);
        return false;
    }

    void fresh_arrival(int i, int k) {
        size_t f = static_cast<size_t>(i) * n + k;
        Packet p{flow_seq[f]++, static_cast<uint32_t>(t), static_cast<uint16_t>(i),
                 static_cast<uint16_t>(k), 0, t >= warmup, 0};
        if (p.eligible) ++m.offered;
        if (t >= warmup) ++m.admissions;
        if (trace) emit("fresh", i, k, p);
        if (admit(i, p)) ++in_network;
    }

    void step() {
        // 1: feedback packets whose cross-switch delay expired re-enter the
        // input co-located with the output they were deflected to.
        auto& arrivals = feedback[t % (delay + 1)];
        for (auto& [input, p] : arrivals) {
            if (t >= warmup) ++m.admissions;
            if (trace) emit("reenter", input, p.dst, p);
            if (!admit(input, p)) --in_network;
        }
        arrivals.clear();

        // 2: sources advance; fresh arrivals run Step 1.
        for (auto [i, k] : pending) fresh_arrival(i, k);
        pending.clear();
        if (gen_enabled) {
            auto& bucket = wheel[t & kWheelMask];
            if (!bucket.empty()) {
                for (int32_t f : bucket) {
                    Source& s = sources[f];
                    if (s.until == t) {
                        s.until = t + geometric(s.rng, log1m_alpha);
                        on_list.push_back(f);
                    } else {
                        wheel[std::min(s.until, t + kWheelSize - 1) & kWheelMask].push_back(f);
                    }
                }
                bucket.clear();
            }
            const double peak = cfg.traffic.peak;
            for (size_t idx = 0; idx < on_list.size();) {
                int32_t f = on_list[idx];
                Source& s = sources[f];
                if (t >= s.until) {
                    wheel_insert(f, t + geometric(s.rng, log1m_beta));
                    on_list[idx] = on_list.back();
                    on_list.pop_back();
                    continue;
                }
                if (s.rng.uniform() < peak) fresh_arrival(f / n, f % n);
                ++idx;
            }
        }

        // 3: the scheduled permutation serves one HOL packet per connected VC;
        // a free token (empty VOQ) may carry the throttle buffer's HOL instead.
        const int32_t* row = &sched[static_cast<size_t>(cursor) * n];
        for (int i = 0; i < n; ++i) {
            int j = row[i];
            size_t f = static_cast<size_t>(i) * n + j;
            if (voq_len[f]) {
                Packet p = voq_pop(f);
                deliver(p, i, j);
            } else {
                if (t >= warmup) ++m.spare_tokens_total;
                if (mode == SwitchMode::dbvn && tb_len[i]) {
                    Packet p = tb_pop(i);
                    ++p.hops;
                    if (t >= warmup) {
                        ++m.deflection_events;
                        ++m.spare_tokens_used;
                    }
                    if (p.hops == 1 && p.eligible) ++m.deflected_packets;
                    if (trace) emit("deflect", i, j, p);
                    if (j == p.dst)
                        deliver(p, i, j);
                    else
                        feedback[(t + delay) % (delay + 1)].push_back(
                            {static_cast<int32_t>(j), p});
                }
            }
        }

        // 4: occupancy sampling.
        if (t >= warmup) {
            occ_sum += total_held;
            ++m.measured_slots;
        }
        ++t;
        cursor = cursor + 1 == frame ? 0 : cursor + 1;
    }

    uint64_t eligible_in_flight() const {
        uint64_t c = 0;
        size_t flows = static_cast<size_t>(n) * n;
        for (size_t f = 0; f < flows; ++f)
            for (uint32_t q = 0; q < voq_len[f]; ++q)
                c += voq_buf[f * voq_cap + (voq_head[f] + q) % voq_cap].eligible;
        for (int i = 0; i < n; ++i)
            for (uint32_t q = 0; q < tb_len[i]; ++q)
                c += tb_buf[static_cast<size_t>(i) * tb_cap + (tb_head[i] + q) % tb_cap].eligible;
        for (const auto& ring : feedback)
            for (const auto& [input, p] : ring) c += p.eligible;
        return c;
    }
};

Simulation::Simulation(SwitchConfig cfg) : impl_(new Impl(std::move(cfg))) {}
Simulation::~Simulation() { delete impl_; }

void Simulation::step() { impl_->step(); }

void Simulation::inject_arrival(int input, int output) {
    if (input < 0 || input >= impl_->n || output < 0 || output >= impl_->n)
        fail(Status::config_error, "injected arrival out of range");
    impl_->pending.push_back({input, output});
}

void Simulation::drain() {
    impl_->gen_enabled = false;
    int64_t cap = impl_->t + (int64_t{2} << 32);
    while (impl_->in_network > 0) {
        impl_->step();
        if (impl_->t > cap) fail(Status::internal_error, "drain did not terminate");
    }
}

int64_t Simulation::slot() const { return impl_->t; }

Metrics Simulation::metrics() const {
    Metrics m = impl_->m;
    m.reseq_held_peak = impl_->held_peak;
    m.reseq_held_mean =
        m.measured_slots ? static_cast<double>(impl_->occ_sum) /
                               (static_cast<double>(m.measured_slots) * impl_->n)
                         : 0.0;
    m.in_flight = impl_->eligible_in_flight();
    return m;
}

std::vector<ReseqStat> Simulation::resequencer_stats() const {
    std::vector<ReseqStat> out(impl_->n);
    int64_t span = impl_->t - impl_->warmup;
    for (int k = 0; k < impl_->n; ++k) {
        ReseqStat& s = out[k];
        s.held_peak = impl_->held_peak_out[k];
        s.parked = impl_->parked_out[k];
        uint64_t integral = impl_->held_integral[k];
        int64_t from = std::max(impl_->held_changed[k], impl_->warmup);
        if (impl_->t > from)
            integral += impl_->held_count[k] * static_cast<uint64_t>(impl_->t - from);
        s.held_mean = span > 0 ? static_cast<double>(integral) / span : 0.0;
    }
    return out;
}

void Simulation::set_trace(std::ostream* out) { impl_->trace = out; }

Metrics run_switch(const SwitchConfig& cfg, int64_t slots, bool drain_after) {
    if (slots <= cfg.resolved_warmup())
        fail(Status::config_error, "run length must exceed the warmup");
    Simulation sim(cfg);
    for (int64_t s = 0; s < slots; ++s) sim.step();
    if (drain_after) sim.drain();
    return sim.metrics();
}

} // namespace dbvn
