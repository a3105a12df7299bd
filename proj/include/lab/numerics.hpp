#pragma once

// Bracketed quadrature and root finding for monotone decreasing functions
// on (0,1).  Monotonicity gives rigorous Riemann brackets per panel with no
// smoothness assumptions; an integrable singularity at 0 is handled by
// geometric subdivision toward the origin.

#include <cstddef>
#include <functional>

#include "lab/errors.hpp"

namespace ergolab {

// A nonnegative monotone decreasing function on (0,1).  The function is 0 to
// the right of support_right; the evaluator is never called there.
struct MonotoneFunction {
    std::function<double(double)> evaluator;
    bool monotone_decreasing = true;
    double support_right = 1.0;

    double operator()(double x) const {
        return x > support_right ? 0.0 : evaluator(x);
    }

    static MonotoneFunction constant(double c);
    static MonotoneFunction inverse_power(double c);  // x^{-c}, 0 <= c < 1 integrable
    static MonotoneFunction one_minus_x();
    static MonotoneFunction zero();
};

struct IntegralEstimate {
    double value = 0.0;        // midpoint of the bracket when converged,
                               // the certified lower bound otherwise
    double lower_bound = 0.0;
    double upper_bound = 0.0;
    bool converged = false;
    std::size_t panels_used = 0;
};

struct IntegrationOptions {
    double divergence_cap = 1e9;
    std::size_t panel_budget = 1'000'000;
    // When true, budget exhaustion returns the partial bracket (value = the
    // certified lower bound) instead of throwing ToleranceNotReached.
    bool best_effort = false;
};

// Bracketing quadrature of a monotone decreasing f over [a,b] in [0,1].
// The singular case is a == 0; subdivision there is geometric toward 0 and
// the remaining tail is certified by comparison with the observed decay of
// the dyadic frontier masses.  Throws NonIntegrableDetected when the partial
// lower bounds provably outrun the divergence cap, ToleranceNotReached when
// the panel budget runs out first (unless best_effort).
IntegralEstimate integrate_monotone(const MonotoneFunction& f, double a, double b,
                                    double tol, const IntegrationOptions& opts = {});

// (1/L) * integral of f over [0, L].  Nonincreasing in L for monotone
// decreasing f.
double prefix_average(const MonotoneFunction& f, double L, double tol = 1e-8,
                      const IntegrationOptions& opts = {});

// Bisection for a monotone g on [lo, hi].  When g(lo) and g(hi) bracket the
// target, resolves the crossing to width <= tol and returns the midpoint.
// Degenerate one-sided cases return the endpoint where g is closest to the
// target: for decreasing g strictly above the target this is hi, strictly
// below it is lo (and symmetrically for increasing g).  Throws
// NotMonotoneDetected when interior samples violate monotonicity beyond tol.
double bisect_monotone(const std::function<double(double)>& g, double target,
                       double lo, double hi, double tol = 1e-10);

}  // namespace ergolab
