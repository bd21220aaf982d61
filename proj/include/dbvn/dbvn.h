/*
 * dbvn: deflection-compensated Birkhoff-von-Neumann switch toolkit.
 *
 * C API of the shared library. All functions return a dbvn_status; on
 * failure dbvn_last_error() carries a human-readable detail message for the
 * calling thread. Objects are opaque handles released with the matching
 * _destroy function. Strings returned through char** are heap-allocated and
 * released with dbvn_string_destroy.
 */
#ifndef DBVN_H
#define DBVN_H

#include <stdint.h>

#if defined(_WIN32)
#define DBVN_API __declspec(dllexport)
#else
#define DBVN_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum dbvn_status {
    DBVN_OK = 0,
    DBVN_ERR_DIMENSION = 1,
    DBVN_ERR_NEGATIVE_ENTRY = 2,
    DBVN_ERR_STOCHASTICITY = 3,
    DBVN_ERR_DECOMPOSITION_STALL = 4,
    DBVN_ERR_FRAME_TOO_SMALL = 5,
    DBVN_ERR_INVALID_PARAMS = 6,
    DBVN_ERR_DEGENERATE_PARAMS = 7,
    DBVN_ERR_NO_CONVERGENCE = 8,
    DBVN_ERR_NEGATIVE_RESULT = 9,
    DBVN_ERR_QUADRATURE_FAILURE = 10,
    DBVN_ERR_UNSTABLE_REGIME = 11,
    DBVN_ERR_TARGET_UNREACHABLE = 12,
    DBVN_ERR_CONFIG = 13,
    DBVN_ERR_NOT_BRACKETED = 14,
    DBVN_ERR_IO = 15,
    DBVN_ERR_INTERNAL = 16
} dbvn_status;

DBVN_API const char* dbvn_status_name(dbvn_status s);
DBVN_API const char* dbvn_last_error(void);
DBVN_API const char* dbvn_version(void);
DBVN_API void dbvn_string_destroy(char* s);

/* -------- capacity matrices, decomposition, frame schedules -------- */

typedef struct dbvn_matrix dbvn_matrix;
typedef struct dbvn_decomposition dbvn_decomposition;
typedef struct dbvn_schedule dbvn_schedule;

/* entries: row-major ports*ports grid; tol <= 0 uses the default 1e-6. */
DBVN_API dbvn_status dbvn_matrix_create(int ports, const double* entries, double tol,
                                        dbvn_matrix** out);
/* Text format: first line the port count, then one whitespace-separated row per line. */
DBVN_API dbvn_status dbvn_matrix_read_file(const char* path, double tol, dbvn_matrix** out);
DBVN_API int dbvn_matrix_ports(const dbvn_matrix* m);
DBVN_API double dbvn_matrix_at(const dbvn_matrix* m, int i, int j);
DBVN_API void dbvn_matrix_destroy(dbvn_matrix* m);

/* tol <= 0 uses the default 1e-10 residual tolerance. */
DBVN_API dbvn_status dbvn_decompose(const dbvn_matrix* m, double tol, dbvn_decomposition** out);
DBVN_API int dbvn_decomposition_terms(const dbvn_decomposition* d);
DBVN_API double dbvn_decomposition_weight(const dbvn_decomposition* d, int term);
/* image must hold ports ints; image[input] = output. */
DBVN_API dbvn_status dbvn_decomposition_permutation(const dbvn_decomposition* d, int term,
                                                    int* image);
/* One term per line: weight, then the permutation image list. */
DBVN_API dbvn_status dbvn_decomposition_write_file(const dbvn_decomposition* d,
                                                   const char* path);
DBVN_API dbvn_status dbvn_decomposition_to_text(const dbvn_decomposition* d, char** text);
DBVN_API void dbvn_decomposition_destroy(dbvn_decomposition* d);

DBVN_API dbvn_status dbvn_schedule_build(const dbvn_decomposition* d, int frame_size,
                                         dbvn_schedule** out);
DBVN_API dbvn_status dbvn_schedule_circular_shift(int ports, uint64_t seed,
                                                  dbvn_schedule** out);
DBVN_API int dbvn_schedule_ports(const dbvn_schedule* s);
DBVN_API int dbvn_schedule_frame_size(const dbvn_schedule* s);
DBVN_API dbvn_status dbvn_schedule_slot(const dbvn_schedule* s, int slot, int* image);
/* One slot per line: the permutation image list. */
DBVN_API dbvn_status dbvn_schedule_write_file(const dbvn_schedule* s, const char* path);
DBVN_API dbvn_status dbvn_schedule_to_text(const dbvn_schedule* s, char** text);
DBVN_API void dbvn_schedule_destroy(dbvn_schedule* s);

/* -------- closed-form per-VC analysis -------- */

/* Rates in packets/slot, times in slots, buffer sizes in packets.
 * mean < 0 derives the mean rate as peak*beta/(alpha+beta). */
typedef struct dbvn_fluid_params {
    double capacity;
    double peak;
    double mean;
    double alpha;
    double beta;
    double voq_size;
    double deflect_rate;
} dbvn_fluid_params;

typedef struct dbvn_fluid_solution {
    double p_full;          /* Pr{queue = K} */
    double overflow_rate;
    double spare_capacity;
    double epsilon;
    double cdf_a0, cdf_a1;  /* NaN when the degenerate limit forms were used */
    double p_empty;
    int degenerate;
} dbvn_fluid_solution;

typedef enum dbvn_regime {
    DBVN_REGIME_STABLE = 0,
    DBVN_REGIME_UNSTABLE = 1,
    DBVN_REGIME_EQUILIBRIUM = 2
} dbvn_regime;

typedef struct dbvn_ideal_point {
    double deflect_rate;    /* self-consistent deflected inflow */
    dbvn_regime regime;
    dbvn_fluid_solution solution;
    double p_loss;
    double p_deflect;
} dbvn_ideal_point;

/* Validates (and resolves a derived mean in place). */
DBVN_API dbvn_status dbvn_fluid_check(dbvn_fluid_params* p);
DBVN_API dbvn_status dbvn_fluid_solve_vc(const dbvn_fluid_params* p, dbvn_fluid_solution* out);
DBVN_API dbvn_status dbvn_fluid_solve_deflection(const dbvn_fluid_params* p,
                                                 dbvn_ideal_point* out);
DBVN_API dbvn_status dbvn_fluid_critical_voq(const dbvn_fluid_params* p, double* kdot);
/* VOQ waiting-time moments at the given deflect_rate (slots, slots^2). */
DBVN_API dbvn_status dbvn_fluid_queue_delay(const dbvn_fluid_params* p, double* mean,
                                            double* second_moment);
/* End-to-end delay mean and jitter at the solved operating point. */
DBVN_API dbvn_status dbvn_fluid_end_to_end(const dbvn_fluid_params* p, double cross_delay,
                                           double* mean, double* jitter);
/* Baseline without deflection: loss at voq_size, buffer needed for the loss
 * target, and delay/jitter at that required buffer. */
DBVN_API dbvn_status dbvn_fluid_bvn_baseline(const dbvn_fluid_params* p, double loss_target,
                                             double* p_loss, double* k_required,
                                             double* mean_delay, double* jitter);
/* Stochastic fluid-queue estimate (independent of the closed forms). */
DBVN_API dbvn_status dbvn_fluid_oracle(const dbvn_fluid_params* p, uint64_t steps,
                                       uint64_t seed, double* p_full, double* p_empty,
                                       double* overflow_rate);

/* -------- discrete simulation and experiments -------- */

typedef struct dbvn_sim_metrics {
    uint64_t offered, delivered, lost;
    uint64_t deflection_events, deflected_packets, admissions;
    uint64_t out_of_seq, order_violations;
    uint64_t spare_tokens_used, spare_tokens_total;
    uint64_t reseq_held_peak, in_flight;
    int64_t measured_slots;
    double p_loss, p_deflect, mean_delay, delay_variance, oos_fraction, reseq_held_mean;
} dbvn_sim_metrics;

typedef struct dbvn_experiment dbvn_experiment;

/* Loads a key = value config file; overrides (nullable) is extra config text
 * applied on top, newline-separated. */
DBVN_API dbvn_status dbvn_experiment_load(const char* config_path, const char* overrides,
                                          dbvn_experiment** out);
DBVN_API void dbvn_experiment_destroy(dbvn_experiment* ex);

/* One run at the base operating point. drain != 0 stops the sources after the
 * configured slots and empties the switch before measuring in_flight. */
DBVN_API dbvn_status dbvn_experiment_simulate(const dbvn_experiment* ex, int drain,
                                              dbvn_sim_metrics* out);
/* Analytic report for the base point, as key = value text. */
DBVN_API dbvn_status dbvn_experiment_analyze(const dbvn_experiment* ex, char** text);
/* Full sweep (analytics + simulation unless analytic_only) as CSV text.
 * threads <= 0 uses the hardware concurrency. */
DBVN_API dbvn_status dbvn_experiment_sweep_csv(const dbvn_experiment* ex, int threads,
                                               char** csv);
/* Base point as a single-point sweep, same CSV schema. */
DBVN_API dbvn_status dbvn_experiment_single_csv(const dbvn_experiment* ex, int threads,
                                                char** csv);
/* Smallest K with pooled simulated loss <= target (target <= 0 uses the
 * configured loss_target). monotone_ok reports the empirical monotonicity audit. */
DBVN_API dbvn_status dbvn_experiment_critical_k(const dbvn_experiment* ex, double target,
                                                int threads, int* k, int* monotone_ok);
/* Bound checks on a sweep CSV; all_pass/applicable are 0/1 flags. */
DBVN_API dbvn_status dbvn_compare_csv_file(const char* csv_path, char** report,
                                           int* all_pass, int* applicable);

#ifdef __cplusplus
}
#endif

#endif /* DBVN_H */
