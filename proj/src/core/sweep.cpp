#include "sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <thread>

#include "errors.hpp"
#include "version.hpp"

namespace dbvn {

namespace {
constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

const std::vector<std::string> kKnownKeys = {
    "n",     "voq_size",        "throttle_pct", "throttle_size",   "mode",
    "seed",  "slots",           "warmup",       "cross_delay",     "stationary_start",
    "peak",  "alpha",           "beta",         "mean",            "axis",
    "points", "slots_per_point", "seeds_per_point", "loss_target", "voq_policy",
    "analytic_only", "k_max",
};
} // namespace

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void parallel_for(int jobs, int threads, const std::function<void(int)>& fn) {
    if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
    threads = std::max(1, std::min(threads, jobs));
    if (threads == 1) {
        for (int j = 0; j < jobs; ++j) fn(j);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr err;
    std::atomic<bool> failed{false};
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int w = 0; w < threads; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                int j = next.fetch_add(1);
                if (j >= jobs || failed.load()) return;
                try {
                    fn(j);
                } catch (...) {
                    if (!failed.exchange(true)) err = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (err) std::rethrow_exception(err);
}

Experiment Experiment::from_config(const ConfigFile& cfg) {
    cfg.restrict_keys(kKnownKeys);
    Experiment e;
    e.ports = static_cast<int>(cfg.get_int("n", e.ports));
    e.voq_size = static_cast<int>(cfg.get_int("voq_size", e.voq_size));
    e.throttle_pct = cfg.get_double("throttle_pct", -1.0);
    e.throttle_size = static_cast<int>(cfg.get_int("throttle_size", 0));
    std::string mode = cfg.get_string("mode", "dbvn");
    if (mode == "dbvn")
        e.mode = SwitchMode::dbvn;
    else if (mode == "bvn")
        e.mode = SwitchMode::bvn;
    else
        fail(Status::config_error, "mode must be dbvn or bvn, got '" + mode + "'");
    e.cross_delay = static_cast<int>(cfg.get_int("cross_delay", e.cross_delay));
    e.seed = static_cast<uint64_t>(cfg.get_int("seed", 1));
    e.slots = cfg.get_int("slots", e.slots);
    e.warmup = cfg.get_int("warmup", -1);
    e.stationary_start = cfg.get_bool("stationary_start", true);

    e.peak = cfg.get_double("peak", e.peak);
    e.alpha = cfg.get_double("alpha", e.alpha);
    e.beta = cfg.get_double("beta", e.beta);
    e.mean = cfg.get_double("mean", -1.0);

    std::string axis = cfg.get_string("axis", "voq_size");
    if (axis == "voq_size" || axis == "K")
        e.axis = SweepAxis::voq_size;
    else if (axis == "burstiness")
        e.axis = SweepAxis::burstiness;
    else if (axis == "load")
        e.axis = SweepAxis::load;
    else
        fail(Status::config_error, "axis must be voq_size, burstiness or load");
    if (cfg.has("points")) e.points = cfg.get_list("points");
    e.slots_per_point = cfg.get_int("slots_per_point", -1);
    e.seeds_per_point = static_cast<int>(cfg.get_int("seeds_per_point", 1));
    e.loss_target = cfg.get_double("loss_target", 1e-5);
    std::string policy = cfg.get_string("voq_policy", "fixed");
    if (policy == "fixed")
        e.voq_policy = VoqPolicy::fixed;
    else if (policy == "critical")
        e.voq_policy = VoqPolicy::critical;
    else
        fail(Status::config_error, "voq_policy must be fixed or critical");
    e.analytic_only = cfg.get_bool("analytic_only", false);
    e.k_max = static_cast<int>(cfg.get_int("k_max", e.k_max));
    return e;
}

double Experiment::resolved_mean(double a, double b) const {
    return mean >= 0.0 ? mean : peak * b / (a + b);
}

int Experiment::throttle_packets(int k) const {
    return throttle_pct >= 0.0 ? throttle_from_pct(throttle_pct, ports, k) : throttle_size;
}

void Experiment::apply_axis(double value, double& k, double& a, double& b, double& m) const {
    k = voq_size;
    a = alpha;
    b = beta;
    m = mean;
    switch (axis) {
        case SweepAxis::voq_size:
            k = value;
            break;
        case SweepAxis::burstiness: {
            if (!(value > 0)) fail(Status::config_error, "burstiness points must be positive");
            double scale = value * (alpha + beta);  // value / base burstiness
            a = alpha / scale;
            b = beta / scale;
            break;
        }
        case SweepAxis::load: {
            double cap = 1.0 / ports;
            double burst = 1.0 / (alpha + beta);
            m = value * cap;
            b = m / (peak * burst);
            a = 1.0 / burst - b;
            if (!(a > 0))
                fail(Status::config_error,
                     "load point " + format_double(value) + " needs beta >= 1/burstiness");
            break;
        }
    }
    if (axis != SweepAxis::voq_size && voq_policy == VoqPolicy::critical) {
        double mm = resolved_mean(a, b);
        FluidParams p = FluidParams::make(1.0 / ports, peak, mm, a, b, 1.0);
        k = std::llround(critical_voq_size(p));
    }
}

FluidParams Experiment::fluid_at_base(double k) const {
    double m = resolved_mean(alpha, beta);
    return FluidParams::make(1.0 / ports, peak, m, alpha, beta, k);
}

FluidParams Experiment::fluid_at(double value) const {
    double k, a, b, m;
    apply_axis(value, k, a, b, m);
    double mm = mean >= 0.0 && axis != SweepAxis::load ? mean : resolved_mean(a, b);
    if (axis == SweepAxis::load) mm = m;
    return FluidParams::make(1.0 / ports, peak, mm, a, b, k);
}

SwitchConfig Experiment::switch_at(double value, uint64_t run_seed) const {
    double k, a, b, m;
    apply_axis(value, k, a, b, m);
    int ki = static_cast<int>(std::llround(k));
    SwitchConfig c;
    c.ports = ports;
    c.voq_size = ki;
    c.throttle_size = throttle_packets(ki);
    c.mode = mode;
    c.cross_delay = cross_delay;
    c.seed = run_seed;
    c.warmup = warmup;
    c.stationary_start = stationary_start;
    c.traffic = OnOffTraffic{peak, a, b};
    c.schedule = FrameSchedule::circular_shift(ports, seed);
    return c;
}

namespace {

void fill_analytics(const Experiment& ex, double value, SweepRow& row) {
    FluidParams p = ex.fluid_at(value);
    row.kdot = kNan;
    try {
        row.kdot = critical_voq_size(p);
    } catch (const Error&) {
    }
    DeflectionFix fix = solve_deflection_rate(p);
    row.ana_pl = ideal_loss_probability(p, fix);
    row.ana_pd = ideal_deflection_probability(p, fix);
    row.ana_delay_mean = kNan;
    row.ana_delay_var = kNan;
    if (fix.regime != Regime::unstable) {
        auto [m, v] = end_to_end_delay(p, fix, ex.cross_delay);
        row.ana_delay_mean = m;
        row.ana_delay_var = v;
    }
    row.bvn_pl = bvn_loss_probability(p.with_deflect(0.0));
    row.bvn_k_required = kNan;
    try {
        row.bvn_k_required = bvn_required_voq(p.with_deflect(0.0), ex.loss_target);
    } catch (const Error&) {
    }
}

void fill_simulation(const Experiment& ex, double value, uint64_t run_seed, SweepRow& row) {
    int64_t slots = ex.slots_per_point > 0 ? ex.slots_per_point : ex.slots;
    Metrics m = run_switch(ex.switch_at(value, run_seed), slots);
    row.sim_pl = m.p_loss();
    row.sim_pd = m.p_deflect();
    row.sim_delay_mean = m.mean_delay();
    row.sim_delay_var = m.delay_variance();
    row.sim_oos = m.oos_fraction();
    row.sim_reseq_max = static_cast<double>(m.reseq_held_peak);
}

std::vector<std::pair<std::string, std::string>> experiment_metadata(const Experiment& ex) {
    std::vector<std::pair<std::string, std::string>> md;
    auto add = [&](const std::string& k, const std::string& v) { md.emplace_back(k, v); };
    add("tool", "dbvn");
    add("version", kVersion);
    add("n", std::to_string(ex.ports));
    add("voq_size", std::to_string(ex.voq_size));
    if (ex.throttle_pct >= 0.0)
        add("throttle_pct", format_double(ex.throttle_pct));
    else
        add("throttle_size", std::to_string(ex.throttle_size));
    add("mode", ex.mode == SwitchMode::dbvn ? "dbvn" : "bvn");
    add("cross_delay", std::to_string(ex.cross_delay));
    add("seed", std::to_string(ex.seed));
    add("slots_per_point", std::to_string(ex.slots_per_point > 0 ? ex.slots_per_point : ex.slots));
    add("warmup", std::to_string(ex.warmup));
    add("stationary_start", ex.stationary_start ? "true" : "false");
    add("schedule", "circular_shift");
    add("peak", format_double(ex.peak));
    add("alpha", format_double(ex.alpha));
    add("beta", format_double(ex.beta));
    add("mean", format_double(ex.resolved_mean(ex.alpha, ex.beta)));
    switch (ex.axis) {
        case SweepAxis::voq_size: add("axis", "voq_size"); break;
        case SweepAxis::burstiness: add("axis", "burstiness"); break;
        case SweepAxis::load: add("axis", "load"); break;
    }
    std::string pts;
    for (double p : ex.points) pts += (pts.empty() ? "" : " ") + format_double(p);
    add("points", pts);
    add("seeds_per_point", std::to_string(ex.seeds_per_point));
    add("loss_target", format_double(ex.loss_target));
    add("voq_policy", ex.voq_policy == VoqPolicy::fixed ? "fixed" : "critical");
    add("analytic_only", ex.analytic_only ? "true" : "false");
    return md;
}

} // namespace

SweepResult run_sweep(const Experiment& ex, int threads) {
    if (ex.points.empty())
        fail(Status::config_error, "sweep needs a nonempty, strictly increasing points list");
    for (size_t i = 1; i < ex.points.size(); ++i)
        if (!(ex.points[i] > ex.points[i - 1]))
            fail(Status::config_error, "sweep points must be strictly increasing");
    if (ex.seeds_per_point < 1)
        fail(Status::config_error, "seeds_per_point must be >= 1");

    const int npts = static_cast<int>(ex.points.size());
    const int nseeds = ex.seeds_per_point;
    SweepResult result;
    result.rows.resize(static_cast<size_t>(npts) * nseeds);

    for (int pi = 0; pi < npts; ++pi) {
        double value = ex.points[pi];
        SweepRow base{};
        base.value = value;
        base.sim_pl = base.sim_pd = base.sim_delay_mean = base.sim_delay_var = kNan;
        base.sim_oos = base.sim_reseq_max = kNan;
        try {
            fill_analytics(ex, value, base);
        } catch (const Error& e) {
            fail(e.code(), "at sweep point " + format_double(value) + ": " + e.what());
        }
        for (int si = 0; si < nseeds; ++si) {
            SweepRow row = base;
            row.seed = ex.seed + static_cast<uint64_t>(si);
            result.rows[static_cast<size_t>(pi) * nseeds + si] = row;
        }
    }

    if (!ex.analytic_only) {
        parallel_for(npts * nseeds, threads, [&](int j) {
            SweepRow& row = result.rows[j];
            try {
                fill_simulation(ex, row.value, row.seed, row);
            } catch (const Error& e) {
                fail(e.code(),
                     "at sweep point " + format_double(row.value) + " seed " +
                         std::to_string(row.seed) + ": " + e.what());
            }
        });
    }

    result.metadata = experiment_metadata(ex);
    return result;
}

static const char* kCsvHeader =
    "axis,value,seed,sim_pl,sim_pd,sim_delay_mean,sim_delay_var,sim_oos,sim_reseq_max,"
    "ana_pl,ana_pd,ana_delay_mean,ana_delay_var,kdot,bvn_pl,bvn_k_required";

void write_sweep_csv(const SweepResult& r, std::ostream& out) {
    for (const auto& [k, v] : r.metadata) out << "# " << k << " = " << v << '\n';
    out << kCsvHeader << '\n';
    std::string axis = "voq_size";
    for (const auto& [k, v] : r.metadata)
        if (k == "axis") axis = v;
    for (const SweepRow& row : r.rows) {
        out << axis << ',' << format_double(row.value) << ',' << row.seed << ','
            << format_double(row.sim_pl) << ',' << format_double(row.sim_pd) << ','
            << format_double(row.sim_delay_mean) << ',' << format_double(row.sim_delay_var) << ','
            << format_double(row.sim_oos) << ',' << format_double(row.sim_reseq_max) << ','
            << format_double(row.ana_pl) << ',' << format_double(row.ana_pd) << ','
            << format_double(row.ana_delay_mean) << ',' << format_double(row.ana_delay_var) << ','
            << format_double(row.kdot) << ',' << format_double(row.bvn_pl) << ','
            << format_double(row.bvn_k_required) << '\n';
    }
}

SweepResult read_sweep_csv(std::istream& in) {
    SweepResult r;
    std::string line;
    bool header_seen = false;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        if (line[0] == '#') {
            size_t eq = line.find('=');
            if (eq != std::string::npos) {
                auto trim = [](std::string s) {
                    size_t a = s.find_first_not_of(" \t#");
                    size_t b = s.find_last_not_of(" \t\r");
                    return a == std::string::npos ? std::string{} : s.substr(a, b - a + 1);
                };
                r.metadata.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
            }
            continue;
        }
        if (!header_seen) {
            if (line.rfind("axis,", 0) != 0)
                fail(Status::io_error, "sweep CSV: unexpected header on line " +
                                           std::to_string(lineno));
            header_seen = true;
            continue;
        }
        std::istringstream ls(line);
        std::string cell;
        std::vector<std::string> cells;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        if (cells.size() != 16)
            fail(Status::io_error,
                 "sweep CSV: expected 16 columns on line " + std::to_string(lineno));
        SweepRow row{};
        auto num = [&](int idx) { return std::strtod(cells[idx].c_str(), nullptr); };
        row.value = num(1);
        row.seed = static_cast<uint64_t>(std::strtoull(cells[2].c_str(), nullptr, 10));
        row.sim_pl = num(3);
        row.sim_pd = num(4);
        row.sim_delay_mean = num(5);
        row.sim_delay_var = num(6);
        row.sim_oos = num(7);
        row.sim_reseq_max = num(8);
        row.ana_pl = num(9);
        row.ana_pd = num(10);
        row.ana_delay_mean = num(11);
        row.ana_delay_var = num(12);
        row.kdot = num(13);
        row.bvn_pl = num(14);
        row.bvn_k_required = num(15);
        r.rows.push_back(row);
    }
    if (!header_seen) fail(Status::io_error, "sweep CSV: no header found");
    return r;
}

CriticalKResult find_critical_k(const Experiment& ex, double loss_target, int threads) {
    if (!(loss_target > 0.0) || !(loss_target < 1.0))
        fail(Status::config_error, "loss target must lie in (0, 1)");
    if (ex.axis != SweepAxis::voq_size)
        fail(Status::config_error, "critical-K search runs on the voq_size axis");

    auto probe = [&](int k) {
        uint64_t lost = 0, offered = 0;
        std::vector<Metrics> ms(ex.seeds_per_point);
        parallel_for(ex.seeds_per_point, threads, [&](int si) {
            int64_t slots = ex.slots_per_point > 0 ? ex.slots_per_point : ex.slots;
            ms[si] = run_switch(ex.switch_at(k, ex.seed + static_cast<uint64_t>(si)), slots);
        });
        for (const Metrics& m : ms) {
            lost += m.lost;
            offered += m.offered;
        }
        return offered ? static_cast<double>(lost) / static_cast<double>(offered) : 0.0;
    };

    CriticalKResult out;
    auto run_probe = [&](int k) {
        double pl = probe(k);
        out.probes.emplace_back(k, pl);
        return pl;
    };

    int lo = 0;  // highest failing K seen (0 = none)
    int hi = -1; // lowest passing K seen
    for (int k = 1; k <= ex.k_max; k *= 2) {
        if (run_probe(k) <= loss_target) {
            hi = k;
            break;
        }
        lo = k;
        if (k > ex.k_max / 2) break;
    }
    if (hi < 0 && lo < ex.k_max) {
        // The ceiling itself may not be a power of two; give it the last word.
        if (run_probe(ex.k_max) <= loss_target)
            hi = ex.k_max;
        else
            lo = ex.k_max;
    }
    if (hi < 0)
        fail(Status::not_bracketed, "loss never fell below " + format_double(loss_target) +
                                        " for K <= " + std::to_string(ex.k_max));
    while (hi - lo > 1) {
        int mid = lo + (hi - lo) / 2;
        if (run_probe(mid) <= loss_target)
            hi = mid;
        else
            lo = mid;
    }
    out.k = hi;

    // Empirical monotonicity audit over the probes actually taken.
    std::vector<std::pair<int, double>> sorted = out.probes;
    std::sort(sorted.begin(), sorted.end());
    for (size_t i = 1; i < sorted.size(); ++i) {
        double prev = sorted[i - 1].second, cur = sorted[i].second;
        if (cur > prev && cur - prev > 0.25 * std::max(prev, loss_target)) {
            out.monotone_ok = false;
            break;
        }
    }
    return out;
}

namespace {

struct PointAgg {
    double value;
    int count = 0;
    double sim_pl = 0, sim_pd = 0, sim_delay = 0, sim_oos = 0;
    double sim_pl2 = 0, sim_pd2 = 0, sim_delay2 = 0;
    double ana_pl = 0, ana_pd = 0, ana_delay = 0, bvn_pl = 0;
    bool has_sim = false, has_ana_delay = false;
};

double meta_double(const SweepResult& r, const std::string& key, double fallback) {
    for (const auto& [k, v] : r.metadata)
        if (k == key) return std::strtod(v.c_str(), nullptr);
    return fallback;
}

} // namespace

BoundReport compare_report(const SweepResult& r) {
    BoundReport rep;
    std::vector<PointAgg> pts;
    for (const SweepRow& row : r.rows) {
        PointAgg* agg = nullptr;
        for (auto& p : pts)
            if (p.value == row.value) agg = &p;
        if (!agg) {
            pts.push_back({});
            agg = &pts.back();
            agg->value = row.value;
            agg->ana_pl = row.ana_pl;
            agg->ana_pd = row.ana_pd;
            agg->ana_delay = row.ana_delay_mean;
            agg->bvn_pl = row.bvn_pl;
            agg->has_ana_delay = std::isfinite(row.ana_delay_mean);
        }
        if (std::isfinite(row.sim_pl)) {
            agg->has_sim = true;
            ++agg->count;
            agg->sim_pl += row.sim_pl;
            agg->sim_pl2 += row.sim_pl * row.sim_pl;
            agg->sim_pd += row.sim_pd;
            agg->sim_pd2 += row.sim_pd * row.sim_pd;
            agg->sim_delay += row.sim_delay_mean;
            agg->sim_delay2 += row.sim_delay_mean * row.sim_delay_mean;
            agg->sim_oos += row.sim_oos;
        }
    }

    bool any_sim = false;
    for (const auto& p : pts) any_sim |= p.has_sim;
    if (!any_sim) {
        rep.applicable = false;
        return rep;
    }
    rep.applicable = true;

    // Estimated Bernoulli trials behind each probability column.
    double slots = meta_double(r, "slots_per_point", 0);
    double n = meta_double(r, "n", 0);
    double mean = meta_double(r, "mean", 0);
    double offered_per_seed = slots * n * n * mean;

    auto add_check = [&](double value, const std::string& rel, double lhs, double rhs) {
        bool pass = lhs <= rhs;
        rep.checks.push_back({value, rel, lhs, rhs, pass});
        rep.all_pass &= pass;
    };

    for (const auto& p : pts) {
        if (!p.has_sim) continue;
        double s = p.count;
        double pl = p.sim_pl / s, pd = p.sim_pd / s, dmean = p.sim_delay / s, oos = p.sim_oos / s;
        double trials = std::max(1.0, offered_per_seed * s);
        auto prob_eps = [&](double prob) {
            return 3.0 * std::sqrt(std::max(prob * (1.0 - prob), 0.0) / trials) + 3.0 / trials;
        };
        double sd_delay = s > 1 ? std::sqrt(std::max(
                                      0.0, (p.sim_delay2 - s * dmean * dmean) / (s - 1.0)))
                                : 0.05 * std::fabs(dmean);
        double delay_eps = 3.0 * sd_delay / std::sqrt(s);

        add_check(p.value, "ana_pl - eps <= sim_pl", p.ana_pl - prob_eps(pl), pl);
        add_check(p.value, "sim_pl <= bvn_pl + eps", pl, p.bvn_pl + prob_eps(pl));
        add_check(p.value, "ana_pd - eps <= sim_pd", p.ana_pd - prob_eps(pd), pd);
        if (p.has_ana_delay)
            add_check(p.value, "ana_delay - eps <= sim_delay", p.ana_delay - delay_eps, dmean);
        add_check(p.value, "sim_oos <= sim_pd", oos, pd);
    }
    return rep;
}

void write_analysis(const Experiment& ex, std::ostream& out) {
    FluidParams p = ex.fluid_base();
    auto emit = [&](const char* key, double v) { out << key << " = " << format_double(v) << '\n'; };
    out << "ports = " << ex.ports << '\n';
    emit("capacity", p.capacity);
    emit("peak", p.peak);
    emit("mean", p.mean);
    emit("alpha", p.alpha);
    emit("beta", p.beta);
    emit("burstiness", p.burstiness());
    emit("load", p.load());
    emit("voq_size", p.voq_size);

    DeflectionFix fix = solve_deflection_rate(p);
    out << "regime = " << regime_name(fix.regime) << '\n';
    emit("deflect_rate", fix.deflect_rate);
    emit("overflow_rate", fix.solution.overflow_rate);
    emit("spare_capacity", fix.solution.spare_capacity);
    emit("p_full", fix.solution.p_full);
    emit("p_empty", fix.solution.p_empty);
    emit("ideal_p_loss", ideal_loss_probability(p, fix));
    emit("ideal_p_deflect", ideal_deflection_probability(p, fix));
    try {
        emit("critical_voq", critical_voq_size(p));
    } catch (const Error&) {
        out << "critical_voq = nan\n";
    }
    auto [m1, m2] = queue_delay_moments(p.with_deflect(fix.deflect_rate), fix.solution);
    emit("queue_delay_mean", m1);
    emit("queue_delay_second_moment", m2);
    if (fix.regime != Regime::unstable) {
        auto [dm, dv] = end_to_end_delay(p, fix, ex.cross_delay);
        emit("delay_mean", dm);
        emit("delay_jitter", dv);
    } else {
        out << "delay_mean = nan\ndelay_jitter = nan\n";
    }
    FluidParams base = p.with_deflect(0.0);
    emit("bvn_p_loss", bvn_loss_probability(base));
    try {
        BvnBaseline bb = bvn_baseline(base, ex.loss_target);
        emit("bvn_k_required", bb.k_required);
        emit("bvn_delay_mean", bb.mean_delay);
        emit("bvn_delay_jitter", bb.delay_jitter);
    } catch (const Error&) {
        out << "bvn_k_required = nan\n";
    }
}

void write_report(const BoundReport& rep, std::ostream& out) {
    if (!rep.applicable) {
        out << "not applicable: no simulation columns in the sweep\n";
        return;
    }
    for (const auto& c : rep.checks) {
        out << (c.pass ? "PASS" : "FAIL") << " value=" << format_double(c.value) << "  "
            << c.relation << "  [" << format_double(c.lhs) << " vs " << format_double(c.rhs)
            << "  margin " << format_double(c.rhs - c.lhs) << "]\n";
    }
    out << (rep.all_pass ? "all bound checks passed\n" : "bound checks FAILED\n");
}

} // namespace dbvn
