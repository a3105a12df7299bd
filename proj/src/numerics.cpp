#include "lab/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <queue>
#include <vector>

namespace ergolab {

MonotoneFunction MonotoneFunction::constant(double c) {
    return {[c](double) { return c; }, true, 1.0};
}

MonotoneFunction MonotoneFunction::inverse_power(double c) {
    if (c == 0.0) return constant(1.0);
    return {[c](double x) { return std::pow(x, -c); }, true, 1.0};
}

MonotoneFunction MonotoneFunction::one_minus_x() {
    return {[](double x) { return 1.0 - x; }, true, 1.0};
}

MonotoneFunction MonotoneFunction::zero() {
    return {[](double) { return 0.0; }, true, 1.0};
}

namespace {

struct Panel {
    double u, v;    // [u, v], 0 < u < v
    double fu, fv;  // f(u) >= f(v) for decreasing f
    double gap() const { return (fu - fv) * (v - u); }
    double lower() const { return fv * (v - u); }
    double upper() const { return fu * (v - u); }
    double trap() const { return 0.5 * (fu + fv) * (v - u); }
};

struct GapOrder {
    bool operator()(const Panel& a, const Panel& b) const { return a.gap() < b.gap(); }
};

constexpr double kMonotoneSlack = 1e-9;

void check_pair_monotone(double fu, double fv, double u, double v) {
    if (fv > fu * (1.0 + kMonotoneSlack) + 1e-300) {
        throw NotMonotoneDetected("f(" + std::to_string(v) + ") > f(" + std::to_string(u) +
                                  ") for a declared decreasing function");
    }
}

}  // namespace

IntegralEstimate integrate_monotone(const MonotoneFunction& f, double a, double b,
                                    double tol, const IntegrationOptions& opts) {
    if (!(0.0 <= a && a < b && b <= 1.0)) throw LabError("integrate_monotone: need 0 <= a < b <= 1");
    if (!(tol > 0.0)) throw LabError("integrate_monotone: tol must be positive");

    // f vanishes beyond its support
    const double b_eff = std::min(b, f.support_right);
    if (b_eff <= a) return {0.0, 0.0, 0.0, true, 0};

    const bool singular = (a == 0.0);
    std::priority_queue<Panel, std::vector<Panel>, GapOrder> panels;
    double lower_sum = 0.0, upper_sum = 0.0, trap_sum = 0.0;
    std::size_t used = 0;

    auto push_panel = [&](double u, double v, double fu, double fv) {
        if (!std::isfinite(fu) || !std::isfinite(fv))
            throw LabError("integrate_monotone: evaluator returned a non-finite value near x = " +
                           std::to_string(u));
        check_pair_monotone(fu, fv, u, v);
        Panel p{u, v, fu, fv};
        lower_sum += p.lower();
        upper_sum += p.upper();
        trap_sum += p.trap();
        panels.push(p);
        ++used;
    };

    // state of the geometric frontier toward 0 (singular case only)
    double t_cut = 0.0;     // panels cover [t_cut, b_eff]; tail is [0, t_cut]
    double f_cut = 0.0;     // f(t_cut)
    std::deque<double> frontier_mass;  // f(t_j) * t_j at successive halvings
    int nondecay_run = 0;

    if (singular) {
        t_cut = b_eff / 2;
        f_cut = f(t_cut);
        const double fb = f(b_eff);
        push_panel(t_cut, b_eff, f_cut, fb);
        frontier_mass.push_back(f_cut * t_cut);
    } else {
        push_panel(a, b_eff, f(a), f(b_eff));
    }

    auto tail_lower = [&]() { return singular ? f_cut * t_cut : 0.0; };
    auto tail_upper = [&]() -> double {
        if (!singular) return 0.0;
        // Sound when future dyadic masses keep decaying at least as fast as
        // the observed ratios; refuse to extrapolate when the ratios are
        // drifting up toward 1 (subexponential tails under-bound otherwise).
        constexpr std::size_t W = 6;
        if (frontier_mass.size() < W + 1) return std::numeric_limits<double>::infinity();
        double rho = 0.0;
        double prev_ratio = 0.0;
        bool first = true;
        for (std::size_t i = frontier_mass.size() - W; i < frontier_mass.size(); ++i) {
            const double m0 = frontier_mass[i - 1];
            if (m0 <= 0.0) return frontier_mass[i] == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
            const double r = frontier_mass[i] / m0;
            if (!first && r > prev_ratio * (1.0 + 1e-9))
                return std::numeric_limits<double>::infinity();
            prev_ratio = r;
            first = false;
            rho = std::max(rho, r);
        }
        if (rho >= 0.999) return std::numeric_limits<double>::infinity();
        return frontier_mass.back() * rho / (1.0 - rho);
    };

    auto deepen = [&]() {
        const double t_new = t_cut / 2;
        const double f_new = f(t_new);
        push_panel(t_new, t_cut, f_new, f_cut);
        const double mass = f_new * t_new;
        if (mass >= frontier_mass.back() * (1.0 - 1e-9))
            ++nondecay_run;
        else
            nondecay_run = 0;
        frontier_mass.push_back(mass);
        if (frontier_mass.size() > 80) frontier_mass.pop_front();
        t_cut = t_new;
        f_cut = f_new;
    };

    while (true) {
        const double tail_lo = tail_lower();
        const double tail_hi = tail_upper();
        const double lo = lower_sum + tail_lo;
        const double hi = upper_sum + tail_hi;

        if (lo > opts.divergence_cap) throw NonIntegrableDetected(lo);
        if (singular && nondecay_run >= 64) throw NonIntegrableDetected(lo);

        if (hi - lo <= tol) {
            // the trapezoid point estimate sits inside the rigorous bracket
            // and converges second order where f is smooth
            const double value =
                std::clamp(trap_sum + 0.5 * (tail_lo + tail_hi), lo, hi);
            return {value, lo, hi, true, used};
        }
        if (used >= opts.panel_budget) {
            if (opts.best_effort) {
                // an uncertified tail contributes only its lower bound, so the
                // point estimate stays conservative for slowly-resolving masses
                const double tail_est = std::isinf(tail_hi) ? tail_lo : 0.5 * (tail_lo + tail_hi);
                const double value = std::clamp(trap_sum + tail_est, lo, hi);
                return {value, lo, hi, false, used};
            }
            throw ToleranceNotReached(lo, hi);
        }

        const double worst_gap = panels.top().gap();
        // An uncertified tail is prioritized by the mass of the last frontier
        // panel, which is what one more halving stands to resolve; evaluation
        // stops above 1e-280 so steep integrands stay inside double range.
        const double tail_unresolved =
            singular ? (std::isinf(tail_hi) ? frontier_mass.back() : tail_hi - tail_lo)
                     : 0.0;
        const bool bootstrap = singular && frontier_mass.size() < 8;
        if (singular && t_cut >= 1e-280 && (bootstrap || tail_unresolved > worst_gap)) {
            deepen();
        } else {
            Panel p = panels.top();
            panels.pop();
            lower_sum -= p.lower();
            upper_sum -= p.upper();
            trap_sum -= p.trap();
            --used;
            const double mid = 0.5 * (p.u + p.v);
            const double fm = f(mid);
            push_panel(p.u, mid, p.fu, fm);
            push_panel(mid, p.v, fm, p.fv);
        }
    }
}

double prefix_average(const MonotoneFunction& f, double L, double tol,
                      const IntegrationOptions& opts) {
    if (!(0.0 < L && L <= 1.0)) throw LabError("prefix_average: need 0 < L <= 1");
    return integrate_monotone(f, 0.0, L, tol * L, opts).value / L;
}

double bisect_monotone(const std::function<double(double)>& g, double target,
                       double lo, double hi, double tol) {
    if (!(lo < hi)) throw LabError("bisect_monotone: need lo < hi");
    double glo = g(lo), ghi = g(hi);
    const bool increasing = ghi >= glo;
    const double span = std::max({std::abs(glo), std::abs(ghi), 1.0});
    const double mono_slack = tol * span + 1e-12 * span;

    // one-sided degenerate cases: return the endpoint where g is closest
    if (glo > target && ghi > target) return increasing ? lo : hi;
    if (glo < target && ghi < target) return increasing ? hi : lo;

    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const double gm = g(mid);
        const double lo_val = increasing ? glo : ghi;
        const double hi_val = increasing ? ghi : glo;
        if (gm < lo_val - mono_slack || gm > hi_val + mono_slack) {
            throw NotMonotoneDetected("sample at " + std::to_string(mid) +
                                      " escapes the bracketing values");
        }
        const bool go_right = increasing ? (gm < target) : (gm >= target);
        if (go_right) {
            lo = mid;
            glo = gm;
        } else {
            hi = mid;
            ghi = gm;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace ergolab
