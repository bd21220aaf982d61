#pragma once
#include <cstdint>
#include <utility>

namespace dbvn {

// Relative tolerance for the mean-rate consistency check mean = peak*beta/(alpha+beta).
// Published parameter sets are often rounded to a few digits, so this is loose.
inline constexpr double kMeanConsistencyTol = 0.01;

// |epsilon| below this multiple of alpha/C switches the closed forms to their
// analytic limits (first-order expansion of exp(-eps*K)); the equilibrium
// operating point sits exactly at eps = 0.
inline constexpr double kDegenerateEpsFactor = 1e-12;

inline constexpr double kFixedPointTol = 1e-14;   // absolute, on the deflection rate
inline constexpr int kFixedPointBudget = 200;     // bisection iterations
inline constexpr double kEquilibriumTolFactor = 1e-10;  // |delta - c2| < factor * C

/// Parameters of one virtual circuit under Markov-modulated on-off arrivals.
/// Rates are in packets/slot, times in slots, buffer sizes in packets.
struct FluidParams {
    double capacity;      // C: service rate of the VC
    double peak;          // arrival rate in the on state, > capacity
    double mean;          // average fresh arrival rate, < capacity
    double alpha;         // on -> off transition rate
    double beta;          // off -> on transition rate
    double voq_size;      // K
    double deflect_rate;  // constant deflected inflow, < capacity

    double burstiness() const { return 1.0 / (alpha + beta); }
    double load() const { return mean / capacity; }
    double on_fraction() const { return beta / (alpha + beta); }
    double off_fraction() const { return alpha / (alpha + beta); }

    FluidParams with_deflect(double lambda_d) const;
    FluidParams with_voq(double k) const;

    // Validates all invariants; throws invalid_params on violation.
    static FluidParams make(double capacity, double peak, double mean, double alpha,
                            double beta, double voq_size, double deflect_rate = 0.0,
                            double consistency_tol = kMeanConsistencyTol);

    // Derives the mean from (peak, alpha, beta); exactly consistent.
    static FluidParams from_on_off(double capacity, double peak, double alpha, double beta,
                                   double voq_size, double deflect_rate = 0.0);
};

/// Stationary solution of the finite-buffer fluid queue for one VC.
struct FluidSolution {
    double p_full;          // Pr{x = K}
    double overflow_rate;   // mean rate spilled past the full buffer
    double spare_capacity;  // mean rate of unused service tokens
    double epsilon;         // decay exponent of the queue-length distribution
    double cdf_a0, cdf_a1;  // CDF coefficients (NaN in the degenerate limit)
    double p_empty;         // Pr{x = 0}
    bool degenerate;        // true when evaluated by the eps -> 0 limit forms

    // Inputs echoed for distribution evaluation.
    double drift_on;    // peak + deflect_rate - capacity
    double drift_off;   // capacity - deflect_rate (drain rate in the off state)
    double alpha, beta, voq_size;
    double density_scale;  // -epsilon * A1, finite in both branches

    // Joint CDF/PDF of queue length by modulating state, on [0, K).
    double cdf_off(double x) const;
    double cdf_on(double x) const;
    double pdf_off(double x) const;
    double pdf_on(double x) const;
};

FluidSolution solve_vc(const FluidParams& p);

enum class Regime { stable, unstable, equilibrium };

const char* regime_name(Regime r);

/// Self-consistent deflection rate under the ideal-deflection approximation,
/// with the regime the fixed point landed in and the VC solution there.
struct DeflectionFix {
    double deflect_rate;
    Regime regime;
    FluidSolution solution;
};

DeflectionFix solve_deflection_rate(const FluidParams& p);

double ideal_loss_probability(const FluidParams& p, const DeflectionFix& fix);
double ideal_deflection_probability(const FluidParams& p, const DeflectionFix& fix);

// Smallest VOQ size that sustains 100% throughput of offered load under ideal
// deflection. Throws negative_result when the parameters make it <= 0.
double critical_voq_size(const FluidParams& p);

// First and second moments of the VOQ queueing delay (slots, slots^2),
// antiderivative route.
std::pair<double, double> queue_delay_moments(const FluidParams& p, const FluidSolution& s);

// Same moments by adaptive Simpson quadrature over the literal four-class
// densities; kept as an independent verification route.
std::pair<double, double> queue_delay_moments_quadrature(const FluidParams& p,
                                                         const FluidSolution& s,
                                                         double tol = 1e-10);

// Closed-form equilibrium moments (functions of burstiness, alpha/beta, load only).
std::pair<double, double> equilibrium_delay_moments(const FluidParams& p);

// End-to-end delay mean and jitter with cross-switch delay a (slots).
// Defined only in the stable/equilibrium regimes.
std::pair<double, double> end_to_end_delay(const FluidParams& p, const DeflectionFix& fix,
                                           double cross_delay);

/// Baseline without deflection: overflow is dropped at the VOQ.
struct BvnBaseline {
    double p_loss;       // loss probability at p.voq_size
    double k_required;   // buffer size achieving the target loss
    double mean_delay;   // delay moments evaluated at k_required
    double delay_jitter;
};

double bvn_loss_probability(const FluidParams& p);
double bvn_required_voq(const FluidParams& p, double p_loss_target);
BvnBaseline bvn_baseline(const FluidParams& p, double p_loss_target);

} // namespace dbvn
