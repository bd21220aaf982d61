#include "dbvn/dbvn.h"

#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

#include "config_file.hpp"
#include "decompose.hpp"
#include "errors.hpp"
#include "fluid.hpp"
#include "fluid_mc.hpp"
#include "matrix.hpp"
#include "schedule.hpp"
#include "sweep.hpp"
#include "switch_sim.hpp"
#include "version.hpp"

using namespace dbvn;

namespace {

thread_local std::string g_last_error;

dbvn_status to_status(Status s) { return static_cast<dbvn_status>(static_cast<int>(s)); }

template <class Fn>
dbvn_status guarded(Fn&& fn) {
    try {
        fn();
        return DBVN_OK;
    } catch (const Error& e) {
        g_last_error = e.what();
        return to_status(e.code());
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return DBVN_ERR_INTERNAL;
    } catch (...) {
        g_last_error = "unknown error";
        return DBVN_ERR_INTERNAL;
    }
}

char* dup_string(const std::string& s) {
    char* out = new char[s.size() + 1];
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

FluidParams to_params(const dbvn_fluid_params& p) {
    double mean = p.mean < 0 ? p.peak * p.beta / (p.alpha + p.beta) : p.mean;
    return FluidParams::make(p.capacity, p.peak, mean, p.alpha, p.beta, p.voq_size,
                             p.deflect_rate);
}

void fill_solution(const FluidSolution& s, dbvn_fluid_solution* out) {
    out->p_full = s.p_full;
    out->overflow_rate = s.overflow_rate;
    out->spare_capacity = s.spare_capacity;
    out->epsilon = s.epsilon;
    out->cdf_a0 = s.cdf_a0;
    out->cdf_a1 = s.cdf_a1;
    out->p_empty = s.p_empty;
    out->degenerate = s.degenerate ? 1 : 0;
}

void fill_metrics(const Metrics& m, dbvn_sim_metrics* out) {
    out->offered = m.offered;
    out->delivered = m.delivered;
    out->lost = m.lost;
    out->deflection_events = m.deflection_events;
    out->deflected_packets = m.deflected_packets;
    out->admissions = m.admissions;
    out->out_of_seq = m.out_of_seq;
    out->order_violations = m.order_violations;
    out->spare_tokens_used = m.spare_tokens_used;
    out->spare_tokens_total = m.spare_tokens_total;
    out->reseq_held_peak = m.reseq_held_peak;
    out->in_flight = m.in_flight;
    out->measured_slots = m.measured_slots;
    out->p_loss = m.p_loss();
    out->p_deflect = m.p_deflect();
    out->mean_delay = m.mean_delay();
    out->delay_variance = m.delay_variance();
    out->oos_fraction = m.oos_fraction();
    out->reseq_held_mean = m.reseq_held_mean;
}

} // namespace

struct dbvn_matrix {
    CapacityMatrix m;
};
struct dbvn_decomposition {
    BirkhoffDecomposition d;
};
struct dbvn_schedule {
    FrameSchedule s;
};
struct dbvn_experiment {
    Experiment ex;
};

extern "C" {

const char* dbvn_status_name(dbvn_status s) {
    return status_name(static_cast<Status>(static_cast<int>(s)));
}

const char* dbvn_last_error(void) { return g_last_error.c_str(); }

const char* dbvn_version(void) { return kVersion; }

void dbvn_string_destroy(char* s) { delete[] s; }

dbvn_status dbvn_matrix_create(int ports, const double* entries, double tol,
                               dbvn_matrix** out) {
    return guarded([&] {
        if (!entries || !out) fail(Status::invalid_params, "null argument");
        std::vector<double> e(entries, entries + static_cast<size_t>(ports) * ports);
        *out = new dbvn_matrix{
            CapacityMatrix::validate(ports, std::move(e), tol > 0 ? tol : kStochasticTol)};
    });
}

dbvn_status dbvn_matrix_read_file(const char* path, double tol, dbvn_matrix** out) {
    return guarded([&] {
        if (!path || !out) fail(Status::invalid_params, "null argument");
        std::ifstream in(path);
        if (!in) fail(Status::io_error, std::string("cannot open ") + path);
        *out = new dbvn_matrix{CapacityMatrix::read(in, tol > 0 ? tol : kStochasticTol)};
    });
}

int dbvn_matrix_ports(const dbvn_matrix* m) { return m ? m->m.ports() : 0; }

double dbvn_matrix_at(const dbvn_matrix* m, int i, int j) { return m->m.at(i, j); }

void dbvn_matrix_destroy(dbvn_matrix* m) { delete m; }

dbvn_status dbvn_decompose(const dbvn_matrix* m, double tol, dbvn_decomposition** out) {
    return guarded([&] {
        if (!m || !out) fail(Status::invalid_params, "null argument");
        *out = new dbvn_decomposition{
            BirkhoffDecomposition::compute(m->m, tol > 0 ? tol : kDecomposeTol)};
    });
}

int dbvn_decomposition_terms(const dbvn_decomposition* d) {
    return d ? static_cast<int>(d->d.terms().size()) : 0;
}

double dbvn_decomposition_weight(const dbvn_decomposition* d, int term) {
    return d->d.terms()[term].weight;
}

dbvn_status dbvn_decomposition_permutation(const dbvn_decomposition* d, int term, int* image) {
    return guarded([&] {
        if (!d || !image) fail(Status::invalid_params, "null argument");
        if (term < 0 || term >= static_cast<int>(d->d.terms().size()))
            fail(Status::invalid_params, "term index out of range");
        const auto& perm = d->d.terms()[term].perm;
        std::copy(perm.begin(), perm.end(), image);
    });
}

dbvn_status dbvn_decomposition_write_file(const dbvn_decomposition* d, const char* path) {
    return guarded([&] {
        if (!d || !path) fail(Status::invalid_params, "null argument");
        std::ofstream out(path);
        if (!out) fail(Status::io_error, std::string("cannot open ") + path);
        d->d.write(out);
    });
}

dbvn_status dbvn_decomposition_to_text(const dbvn_decomposition* d, char** text) {
    return guarded([&] {
        if (!d || !text) fail(Status::invalid_params, "null argument");
        std::ostringstream out;
        d->d.write(out);
        *text = dup_string(out.str());
    });
}

void dbvn_decomposition_destroy(dbvn_decomposition* d) { delete d; }

dbvn_status dbvn_schedule_build(const dbvn_decomposition* d, int frame_size,
                                dbvn_schedule** out) {
    return guarded([&] {
        if (!d || !out) fail(Status::invalid_params, "null argument");
        *out = new dbvn_schedule{FrameSchedule::from_decomposition(d->d, frame_size)};
    });
}

dbvn_status dbvn_schedule_circular_shift(int ports, uint64_t seed, dbvn_schedule** out) {
    return guarded([&] {
        if (!out) fail(Status::invalid_params, "null argument");
        *out = new dbvn_schedule{FrameSchedule::circular_shift(ports, seed)};
    });
}

int dbvn_schedule_ports(const dbvn_schedule* s) { return s ? s->s.ports() : 0; }

int dbvn_schedule_frame_size(const dbvn_schedule* s) { return s ? s->s.frame_size() : 0; }

dbvn_status dbvn_schedule_slot(const dbvn_schedule* s, int slot, int* image) {
    return guarded([&] {
        if (!s || !image) fail(Status::invalid_params, "null argument");
        if (slot < 0 || slot >= s->s.frame_size())
            fail(Status::invalid_params, "slot index out of range");
        const auto& perm = s->s.slot(slot);
        std::copy(perm.begin(), perm.end(), image);
    });
}

dbvn_status dbvn_schedule_write_file(const dbvn_schedule* s, const char* path) {
    return guarded([&] {
        if (!s || !path) fail(Status::invalid_params, "null argument");
        std::ofstream out(path);
        if (!out) fail(Status::io_error, std::string("cannot open ") + path);
        s->s.write(out);
    });
}

dbvn_status dbvn_schedule_to_text(const dbvn_schedule* s, char** text) {
    return guarded([&] {
        if (!s || !text) fail(Status::invalid_params, "null argument");
        std::ostringstream out;
        s->s.write(out);
        *text = dup_string(out.str());
    });
}

void dbvn_schedule_destroy(dbvn_schedule* s) { delete s; }

dbvn_status dbvn_fluid_check(dbvn_fluid_params* p) {
    return guarded([&] {
        if (!p) fail(Status::invalid_params, "null argument");
        FluidParams q = to_params(*p);
        p->mean = q.mean;
    });
}

dbvn_status dbvn_fluid_solve_vc(const dbvn_fluid_params* p, dbvn_fluid_solution* out) {
    return guarded([&] {
        if (!p || !out) fail(Status::invalid_params, "null argument");
        fill_solution(solve_vc(to_params(*p)), out);
    });
}

dbvn_status dbvn_fluid_solve_deflection(const dbvn_fluid_params* p, dbvn_ideal_point* out) {
    return guarded([&] {
        if (!p || !out) fail(Status::invalid_params, "null argument");
        FluidParams q = to_params(*p);
        DeflectionFix fix = solve_deflection_rate(q);
        out->deflect_rate = fix.deflect_rate;
        out->regime = static_cast<dbvn_regime>(static_cast<int>(fix.regime));
        fill_solution(fix.solution, &out->solution);
        out->p_loss = ideal_loss_probability(q, fix);
        out->p_deflect = ideal_deflection_probability(q, fix);
    });
}

dbvn_status dbvn_fluid_critical_voq(const dbvn_fluid_params* p, double* kdot) {
    return guarded([&] {
        if (!p || !kdot) fail(Status::invalid_params, "null argument");
        *kdot = critical_voq_size(to_params(*p));
    });
}

dbvn_status dbvn_fluid_queue_delay(const dbvn_fluid_params* p, double* mean,
                                   double* second_moment) {
    return guarded([&] {
        if (!p || !mean || !second_moment) fail(Status::invalid_params, "null argument");
        FluidParams q = to_params(*p);
        auto [m1, m2] = queue_delay_moments(q, solve_vc(q));
        *mean = m1;
        *second_moment = m2;
    });
}

dbvn_status dbvn_fluid_end_to_end(const dbvn_fluid_params* p, double cross_delay,
                                  double* mean, double* jitter) {
    return guarded([&] {
        if (!p || !mean || !jitter) fail(Status::invalid_params, "null argument");
        FluidParams q = to_params(*p);
        DeflectionFix fix = solve_deflection_rate(q);
        auto [m, v] = end_to_end_delay(q, fix, cross_delay);
        *mean = m;
        *jitter = v;
    });
}

dbvn_status dbvn_fluid_bvn_baseline(const dbvn_fluid_params* p, double loss_target,
                                    double* p_loss, double* k_required, double* mean_delay,
                                    double* jitter) {
    return guarded([&] {
        if (!p || !p_loss || !k_required || !mean_delay || !jitter)
            fail(Status::invalid_params, "null argument");
        BvnBaseline b = bvn_baseline(to_params(*p), loss_target);
        *p_loss = b.p_loss;
        *k_required = b.k_required;
        *mean_delay = b.mean_delay;
        *jitter = b.delay_jitter;
    });
}

dbvn_status dbvn_fluid_oracle(const dbvn_fluid_params* p, uint64_t steps, uint64_t seed,
                              double* p_full, double* p_empty, double* overflow_rate) {
    return guarded([&] {
        if (!p || !p_full || !p_empty || !overflow_rate)
            fail(Status::invalid_params, "null argument");
        FluidQueueEstimate est = simulate_fluid_queue(to_params(*p), steps, seed);
        *p_full = est.p_full;
        *p_empty = est.p_empty;
        *overflow_rate = est.overflow_rate;
    });
}

dbvn_status dbvn_experiment_load(const char* config_path, const char* overrides,
                                 dbvn_experiment** out) {
    return guarded([&] {
        if (!config_path || !out) fail(Status::invalid_params, "null argument");
        std::ifstream in(config_path);
        if (!in) fail(Status::io_error, std::string("cannot open ") + config_path);
        std::stringstream merged;
        merged << in.rdbuf();
        if (overrides && *overrides) merged << '\n' << overrides << '\n';
        ConfigFile raw = ConfigFile::parse_with_overrides(merged);
        *out = new dbvn_experiment{Experiment::from_config(raw)};
    });
}

void dbvn_experiment_destroy(dbvn_experiment* ex) { delete ex; }

dbvn_status dbvn_experiment_simulate(const dbvn_experiment* ex, int drain,
                                     dbvn_sim_metrics* out) {
    return guarded([&] {
        if (!ex || !out) fail(Status::invalid_params, "null argument");
        const Experiment& e = ex->ex;
        Metrics m = run_switch(e.switch_at(e.voq_size, e.seed), e.slots, drain != 0);
        fill_metrics(m, out);
    });
}

dbvn_status dbvn_experiment_analyze(const dbvn_experiment* ex, char** text) {
    return guarded([&] {
        if (!ex || !text) fail(Status::invalid_params, "null argument");
        std::ostringstream out;
        write_analysis(ex->ex, out);
        *text = dup_string(out.str());
    });
}

dbvn_status dbvn_experiment_sweep_csv(const dbvn_experiment* ex, int threads, char** csv) {
    return guarded([&] {
        if (!ex || !csv) fail(Status::invalid_params, "null argument");
        SweepResult r = run_sweep(ex->ex, threads);
        std::ostringstream out;
        write_sweep_csv(r, out);
        *csv = dup_string(out.str());
    });
}

dbvn_status dbvn_experiment_single_csv(const dbvn_experiment* ex, int threads, char** csv) {
    return guarded([&] {
        if (!ex || !csv) fail(Status::invalid_params, "null argument");
        Experiment single = ex->ex;
        single.axis = SweepAxis::voq_size;
        single.points = {static_cast<double>(single.voq_size)};
        SweepResult r = run_sweep(single, threads);
        std::ostringstream out;
        write_sweep_csv(r, out);
        *csv = dup_string(out.str());
    });
}

dbvn_status dbvn_experiment_critical_k(const dbvn_experiment* ex, double target, int threads,
                                       int* k, int* monotone_ok) {
    return guarded([&] {
        if (!ex || !k) fail(Status::invalid_params, "null argument");
        double t = target > 0 ? target : ex->ex.loss_target;
        CriticalKResult res = find_critical_k(ex->ex, t, threads);
        *k = res.k;
        if (monotone_ok) *monotone_ok = res.monotone_ok ? 1 : 0;
    });
}

dbvn_status dbvn_compare_csv_file(const char* csv_path, char** report, int* all_pass,
                                  int* applicable) {
    return guarded([&] {
        if (!csv_path) fail(Status::invalid_params, "null argument");
        std::ifstream in(csv_path);
        if (!in) fail(Status::io_error, std::string("cannot open ") + csv_path);
        SweepResult r = read_sweep_csv(in);
        BoundReport rep = compare_report(r);
        if (report) {
            std::ostringstream out;
            write_report(rep, out);
            *report = dup_string(out.str());
        }
        if (all_pass) *all_pass = rep.all_pass ? 1 : 0;
        if (applicable) *applicable = rep.applicable ? 1 : 0;
    });
}

} // extern "C"
