#include "fluid.hpp"

#include <cmath>
#include <string>

#include "errors.hpp"

namespace dbvn {
namespace {

void check_params(const FluidParams& p, double consistency_tol) {
    if (!(p.capacity > 0))
        fail(Status::invalid_params, "capacity must be positive");
    if (!(p.alpha > 0) || !(p.beta > 0))
        fail(Status::invalid_params, "alpha and beta must be positive");
    if (!(p.mean > 0) || !(p.mean < p.capacity))
        fail(Status::invalid_params, "mean rate must satisfy 0 < mean < capacity, got mean=" +
                                         std::to_string(p.mean) + " capacity=" +
                                         std::to_string(p.capacity));
    if (!(p.peak > p.capacity))
        fail(Status::invalid_params, "peak rate must exceed the VC capacity");
    if (!(p.voq_size >= 0))
        fail(Status::invalid_params, "voq_size must be >= 0");
    if (!(p.deflect_rate >= 0) || !(p.deflect_rate < p.capacity))
        fail(Status::invalid_params, "deflect_rate must satisfy 0 <= deflect_rate < capacity");
    double implied = p.peak * p.beta / (p.alpha + p.beta);
    if (std::fabs(p.mean - implied) > consistency_tol * p.mean)
        fail(Status::invalid_params,
             "mean " + std::to_string(p.mean) + " inconsistent with peak*beta/(alpha+beta) = " +
                 std::to_string(implied));
}

} // namespace

FluidParams FluidParams::with_deflect(double lambda_d) const {
    FluidParams q = *this;
    q.deflect_rate = lambda_d;
    return q;
}

FluidParams FluidParams::with_voq(double k) const {
    FluidParams q = *this;
    q.voq_size = k;
    return q;
}

FluidParams FluidParams::make(double capacity, double peak, double mean, double alpha,
                              double beta, double voq_size, double deflect_rate,
                              double consistency_tol) {
    FluidParams p{capacity, peak, mean, alpha, beta, voq_size, deflect_rate};
    check_params(p, consistency_tol);
    return p;
}

FluidParams FluidParams::from_on_off(double capacity, double peak, double alpha, double beta,
                                     double voq_size, double deflect_rate) {
    double mean = peak * beta / (alpha + beta);
    return make(capacity, peak, mean, alpha, beta, voq_size, deflect_rate);
}

FluidSolution solve_vc(const FluidParams& p) {
    const double u = p.peak + p.deflect_rate - p.capacity;  // net fill rate, on state
    const double v = p.capacity - p.deflect_rate;           // net drain rate, off state
    const double k = p.voq_size;
    const double a = p.alpha, b = p.beta;
    const double ab = a + b;
    const double burst = 1.0 / ab;
    const double eps = a / u - b / v;

    FluidSolution s{};
    s.epsilon = eps;
    s.drift_on = u;
    s.drift_off = v;
    s.alpha = a;
    s.beta = b;
    s.voq_size = k;

    if (std::fabs(eps) < kDegenerateEpsFactor * (a / p.capacity)) {
        // eps -> 0 limit: the mean input rate equals the capacity and the
        // queue-length density flattens to a uniform profile.
        const double denom = b * k + v;
        s.degenerate = true;
        s.p_full = burst * b * v / denom;
        s.p_empty = burst * a * v / denom;
        s.density_scale = a * b / (ab * u * denom);
        s.cdf_a0 = std::nan("");
        s.cdf_a1 = std::nan("");
    } else {
        const double em1 = std::expm1(-eps * k);
        const double e = std::exp(-eps * k);  // full relative precision at any eps*K
        // w = (u*beta*exp(-eps*K) - v*alpha) / u, written without cancellation
        const double w = b * em1 - eps * v;
        s.degenerate = false;
        s.p_full = -burst * b * eps * v * e / w;
        s.p_empty = -burst * a * eps * v / w;
        s.cdf_a1 = a * b / (ab * u * w);
        s.cdf_a0 = -v * a / (ab * u * w);
        s.density_scale = -eps * s.cdf_a1;
    }
    s.overflow_rate = s.p_full * u;
    s.spare_capacity = p.capacity - (p.mean + p.deflect_rate) + s.overflow_rate;
    return s;
}

double FluidSolution::cdf_off(double x) const {
    if (degenerate) {
        double ab = alpha + beta;
        return alpha * (drift_off + beta * x) / (ab * (beta * voq_size + drift_off));
    }
    return cdf_a0 * alpha + cdf_a1 * drift_on * std::exp(-epsilon * x);
}

double FluidSolution::cdf_on(double x) const {
    if (degenerate) {
        double ab = alpha + beta;
        return alpha * beta * drift_off * x / (ab * drift_on * (beta * voq_size + drift_off));
    }
    return cdf_a0 * beta + cdf_a1 * drift_off * std::exp(-epsilon * x);
}

double FluidSolution::pdf_off(double x) const {
    return density_scale * drift_on * (degenerate ? 1.0 : std::exp(-epsilon * x));
}

double FluidSolution::pdf_on(double x) const {
    return density_scale * drift_off * (degenerate ? 1.0 : std::exp(-epsilon * x));
}

const char* regime_name(Regime r) {
    switch (r) {
        case Regime::stable: return "stable";
        case Regime::unstable: return "unstable";
        case Regime::equilibrium: return "equilibrium";
    }
    return "?";
}

namespace {

// Bisection for a continuous g with g(lo) >= 0 >= g(hi).
template <class F>
double bisect(F&& g, double lo, double hi) {
    double glo = g(lo);
    if (glo <= 0.0) return lo;
    double ghi = g(hi);
    if (ghi >= 0.0) return hi;
    for (int it = 0; it < kFixedPointBudget && hi - lo > kFixedPointTol; ++it) {
        double mid = 0.5 * (lo + hi);
        double gm = g(mid);
        if (gm >= 0.0)
            lo = mid;
        else
            hi = mid;
    }
    if (hi - lo > kFixedPointTol)
        fail(Status::no_convergence, "deflection-rate bisection exhausted its budget");
    return 0.5 * (lo + hi);
}

} // namespace

DeflectionFix solve_deflection_rate(const FluidParams& p) {
    const double hi = p.capacity - 1e-12;
    if (hi <= 0.0)
        fail(Status::invalid_params, "capacity too small to bracket the deflection rate");

    auto overflow_at = [&](double ld) { return solve_vc(p.with_deflect(ld)).overflow_rate; };

    // Stable-regime equation first: the fixed point of lambda_d = Delta.
    double ld = bisect([&](double x) { return overflow_at(x) - x; }, 0.0, hi);
    FluidSolution sol = solve_vc(p.with_deflect(ld));
    const double eq_tol = kEquilibriumTolFactor * p.capacity;
    double gap = sol.overflow_rate - sol.spare_capacity;

    if (std::fabs(gap) < eq_tol)
        return {ld, Regime::equilibrium, sol};
    if (gap <= 0.0)
        return {ld, Regime::stable, sol};

    // Overflow exceeds the spare capacity: solve lambda_d = C2 instead.
    ld = bisect([&](double x) { return p.capacity - (p.mean + x) + overflow_at(x) - x; }, 0.0,
                hi);
    sol = solve_vc(p.with_deflect(ld));
    gap = sol.overflow_rate - sol.spare_capacity;
    if (std::fabs(gap) < eq_tol)
        return {ld, Regime::equilibrium, sol};
    return {ld, Regime::unstable, sol};
}

double ideal_loss_probability(const FluidParams& p, const DeflectionFix& fix) {
    if (fix.regime != Regime::unstable) return 0.0;
    return (fix.solution.overflow_rate - fix.solution.spare_capacity) / p.mean;
}

double ideal_deflection_probability(const FluidParams& p, const DeflectionFix& fix) {
    double total = p.mean + fix.deflect_rate;
    switch (fix.regime) {
        case Regime::unstable: return fix.deflect_rate / total;
        case Regime::stable: return fix.solution.overflow_rate / total;
        case Regime::equilibrium: return 1.0 - p.load();
    }
    return 0.0;
}

double critical_voq_size(const FluidParams& p) {
    const double rho = p.load();
    double k = p.burstiness() * p.mean *
               ((p.alpha / p.beta) * (rho / (1.0 - rho) - 1.0) - 1.0);
    if (k <= 0.0)
        fail(Status::negative_result,
             "critical VOQ size is not positive for these parameters: " + std::to_string(k));
    return k;
}

namespace {

// int_0^K x e^(-eps x) dx and int_0^K x^2 e^(-eps x) dx, series near eps*K = 0.
std::pair<double, double> exp_moments(double eps, double k) {
    double ek = eps * k;
    if (std::fabs(ek) < 1e-3) {
        double i1 = k * k *
                    (0.5 - ek / 3.0 + ek * ek / 8.0 - ek * ek * ek / 30.0 +
                     ek * ek * ek * ek / 144.0);
        double i2 = k * k * k *
                    (1.0 / 3.0 - ek / 4.0 + ek * ek / 10.0 - ek * ek * ek / 36.0 +
                     ek * ek * ek * ek / 168.0);
        return {i1, i2};
    }
    double e = std::exp(-ek);
    double i1 = (1.0 - e * (1.0 + ek)) / (eps * eps);
    double i2 = (2.0 - e * (ek * ek + 2.0 * ek + 2.0)) / (eps * eps * eps);
    return {i1, i2};
}

} // namespace

std::pair<double, double> queue_delay_moments(const FluidParams& p, const FluidSolution& s) {
    const double k = p.voq_size;
    if (k == 0.0) return {0.0, 0.0};
    const double total_in = p.mean + p.deflect_rate;
    const double p_over = s.overflow_rate / total_in;
    const double admitted = total_in * (1.0 - p_over);
    auto [i1, i2] = exp_moments(s.degenerate ? 0.0 : s.epsilon, k);
    // (peak+ld)*pdf_on(x) + ld*pdf_off(x) collapses to scale * peak * C * e^(-eps x)
    double scale = s.density_scale;
    double m1 = (scale * p.peak * i1 + k * s.p_full) / admitted;
    double m2 = (scale * p.peak * i2 + k * k * s.p_full) / (p.capacity * admitted);
    return {m1, m2};
}

namespace {

struct Simpson {
    const FluidParams& p;
    const FluidSolution& s;
    int power;  // 1 or 2
    double admitted;
    int evals = 0;

    double f(double x) const {
        double dq = x / p.capacity;
        double density = (p.peak + p.deflect_rate) * s.pdf_on(x) + p.deflect_rate * s.pdf_off(x);
        return (power == 1 ? dq : dq * dq) * density / admitted;
    }

    double recurse(double lo, double hi, double flo, double fmid, double fhi, double whole,
                   double tol, int depth) {
        double mid = 0.5 * (lo + hi);
        double lmid = 0.5 * (lo + mid), rmid = 0.5 * (mid + hi);
        double fl = f(lmid), fr = f(rmid);
        evals += 2;
        double left = (mid - lo) / 6.0 * (flo + 4.0 * fl + fmid);
        double right = (hi - mid) / 6.0 * (fmid + 4.0 * fr + fhi);
        double delta = left + right - whole;
        if (std::fabs(delta) <= 15.0 * tol || (hi - lo) < 1e-14 * p.voq_size)
            return left + right + delta / 15.0;
        if (depth > 60 || evals > 2'000'000)
            fail(Status::quadrature_failure, "adaptive quadrature did not reach tolerance");
        return recurse(lo, mid, flo, fl, fmid, left, 0.5 * tol, depth + 1) +
               recurse(mid, hi, fmid, fr, fhi, right, 0.5 * tol, depth + 1);
    }

    double integrate(double lo, double hi, double tol) {
        double flo = f(lo), fhi = f(hi), fmid = f(0.5 * (lo + hi));
        evals = 3;
        double whole = (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi);
        return recurse(lo, hi, flo, fmid, fhi, whole, tol, 0);
    }
};

} // namespace

std::pair<double, double> queue_delay_moments_quadrature(const FluidParams& p,
                                                         const FluidSolution& s, double tol) {
    const double k = p.voq_size;
    if (k == 0.0) return {0.0, 0.0};
    const double total_in = p.mean + p.deflect_rate;
    const double admitted = total_in - s.overflow_rate;
    const double k_over_c = k / p.capacity;
    double atom = p.capacity * s.p_full / admitted;

    Simpson s1{p, s, 1, admitted};
    Simpson s2{p, s, 2, admitted};
    double scale1 = k_over_c * atom;           // magnitude guide for the absolute tolerance
    double scale2 = k_over_c * k_over_c * atom;
    double m1 = s1.integrate(0.0, k, tol * std::max(scale1, 1.0)) + k_over_c * atom;
    double m2 = s2.integrate(0.0, k, tol * std::max(scale2, 1.0)) + k_over_c * k_over_c * atom;
    return {m1, m2};
}

std::pair<double, double> equilibrium_delay_moments(const FluidParams& p) {
    const double rho = p.load();
    const double r = p.alpha / p.beta;
    const double burst = p.burstiness();
    double m1 = burst * ((2.0 * r + 1.0) * rho - (1.0 + r)) *
                ((2.0 - 1.0 / r) * rho + (1.0 / r - 1.0)) / (2.0 * rho * (1.0 - rho));
    double m2 = burst * burst * ((2.0 * rho - 1.0) * r - (1.0 - rho)) *
                ((2.0 * rho - 1.0) * r - (1.0 - rho)) *
                ((1.0 - rho) * 2.0 / r + 2.0 * rho - 1.0) /
                (3.0 * (1.0 - rho) * (1.0 - rho));
    return {m1, m2};
}

std::pair<double, double> end_to_end_delay(const FluidParams& p, const DeflectionFix& fix,
                                           double cross_delay) {
    if (fix.regime == Regime::unstable)
        fail(Status::unstable_regime,
             "end-to-end delay is only defined in the loss-free regimes");
    double pd = ideal_deflection_probability(p, fix);
    auto [m1, m2] = queue_delay_moments(p.with_deflect(fix.deflect_rate), fix.solution);
    double mean = cross_delay * pd / (1.0 - pd) + m1;
    double var = (m2 - m1 * m1) + cross_delay * cross_delay * pd / ((1.0 - pd) * (1.0 - pd));
    return {mean, var};
}

double bvn_loss_probability(const FluidParams& p) {
    if (p.deflect_rate != 0.0)
        fail(Status::invalid_params, "baseline without deflection requires deflect_rate = 0");
    FluidSolution s = solve_vc(p);
    return s.overflow_rate / p.mean;
}

double bvn_required_voq(const FluidParams& p, double target) {
    if (p.deflect_rate != 0.0)
        fail(Status::invalid_params, "baseline without deflection requires deflect_rate = 0");
    if (!(target > 0.0) || !(target < 1.0))
        fail(Status::invalid_params, "loss target must lie in (0, 1)");
    const double u = p.peak - p.capacity;
    const double c = p.capacity;
    const double a = p.alpha, b = p.beta;
    const double eps = a / u - b / c;
    double loss_at_zero = bvn_loss_probability(p.with_voq(0.0));
    if (target >= loss_at_zero)
        fail(Status::target_unreachable, "loss target " + std::to_string(target) +
                                             " is not below the zero-buffer loss " +
                                             std::to_string(loss_at_zero));
    if (!(eps > 0.0))
        fail(Status::target_unreachable,
             "loss does not decay with buffer size for these parameters");
    double arg = (b * u + u * b * (c * a - b * u) / ((a + b) * p.mean * target)) / (c * a);
    return std::log(arg) / eps;
}

BvnBaseline bvn_baseline(const FluidParams& p, double target) {
    BvnBaseline out{};
    out.p_loss = bvn_loss_probability(p);
    out.k_required = bvn_required_voq(p, target);
    FluidParams sized = p.with_voq(out.k_required);
    auto [m1, m2] = queue_delay_moments(sized, solve_vc(sized));
    out.mean_delay = m1;
    out.delay_jitter = m2 - m1 * m1;
    return out;
}

} // namespace dbvn
