#include "lab/orlicz.hpp"

#include <cmath>
#include <string>

namespace ergolab {

OrliczFunction OrliczFunction::power(double p) {
    if (!(p >= 1.0)) throw LabError("Power family needs p >= 1");
    OrliczFunction phi;
    phi.family = OrliczFamily::Power;
    phi.p = p;
    return phi;
}

OrliczFunction OrliczFunction::llog_beta(double beta) {
    if (!(beta > 0.0)) throw LabError("LLogBeta family needs beta > 0");
    OrliczFunction phi;
    phi.family = OrliczFamily::LLogBeta;
    phi.beta = beta;
    return phi;
}

OrliczFunction OrliczFunction::composite(double s, double p) {
    if (!(s >= 1.0) || !(p > 0.0)) throw LabError("CompositePower family needs s >= 1, p > 0");
    OrliczFunction phi;
    phi.family = OrliczFamily::CompositePower;
    phi.s = s;
    phi.p = p;
    return phi;
}

double OrliczFunction::operator()(double t) const { return phi_eval(*this, t); }

std::string OrliczFunction::name() const {
    switch (family) {
        case OrliczFamily::Power: return "power:" + std::to_string(p);
        case OrliczFamily::LLogBeta: return "llog:" + std::to_string(beta);
        case OrliczFamily::CompositePower:
            return "composite:" + std::to_string(s) + ":" + std::to_string(p);
    }
    return "?";
}

double phi_eval(const OrliczFunction& phi, double t) {
    const double u = std::abs(t);
    if (u == 0.0) return 0.0;
    switch (phi.family) {
        case OrliczFamily::Power:
            return std::pow(u, phi.p);
        case OrliczFamily::LLogBeta:
            return u * std::pow(std::log1p(u), phi.beta);
        case OrliczFamily::CompositePower:
            return std::pow(u, phi.s) * std::pow(std::log1p(u), phi.p);
    }
    return 0.0;
}

SawyerCheckReport sawyer_growth_check(const OrliczFunction& phi, double C, double p,
                                      const std::vector<std::pair<double, double>>& grid) {
    SawyerCheckReport report;
    report.C = C;
    report.p_exponent = p;
    for (const auto& [x, y] : grid) {
        if (!(y >= 1.0) || !(x >= 1.0 / y)) {
            ++report.filtered_out;
            continue;
        }
        const double lhs = phi_eval(phi, x * y);
        const double rhs_core = std::pow(phi_eval(phi, y), p) * phi_eval(phi, x);
        if (rhs_core > 0.0) report.max_ratio = std::max(report.max_ratio, lhs / rhs_core);
        if (lhs > C * rhs_core) report.violations.emplace_back(x, y);
    }
    return report;
}

MonotoneFunction compose_phi(const OrliczFunction& phi, const MonotoneFunction& f,
                             double scale) {
    MonotoneFunction g;
    g.monotone_decreasing = true;
    g.support_right = f.support_right;
    g.evaluator = [phi, f, scale](double x) { return phi_eval(phi, f(x) / scale); };
    return g;
}

MembershipResult membership_integral(const OrliczFunction& phi, const MonotoneFunction& f,
                                     double tol, const IntegrationOptions& opts) {
    try {
        return {false, integrate_monotone(compose_phi(phi, f), 0.0, 1.0, tol, opts)};
    } catch (const NonIntegrableDetected&) {
        return {true, {}};
    }
}

namespace {

// integral of Phi(f/k); +inf stands for divergence.  Best-effort: the
// trapezoid point estimate stays accurate well past the rigorous bracket.
double unit_integral(const OrliczFunction& phi, const MonotoneFunction& f, double k,
                     double tol) {
    IntegrationOptions opts;
    opts.panel_budget = 30'000;
    opts.best_effort = true;
    try {
        return integrate_monotone(compose_phi(phi, f, k), 0.0, 1.0, tol, opts).value;
    } catch (const NonIntegrableDetected&) {
        return std::numeric_limits<double>::infinity();
    }
}

}  // namespace

double luxemburg_norm(const OrliczFunction& phi, const MonotoneFunction& f, double tol) {
    const double int_tol = std::min(tol, 1e-6);
    double hi = 1.0;
    double I = unit_integral(phi, f, hi, int_tol);
    if (I <= 1.0) {
        // walk down for the lower bracket edge
        double lo = hi;
        for (int j = 0; j < 60; ++j) {
            lo = hi / 2;
            if (unit_integral(phi, f, lo, int_tol) > 1.0) break;
            hi = lo;
        }
        if (hi <= std::ldexp(1.0, -59)) return 0.0;  // f vanishes at our scales
        if (lo == hi) return 0.0;
        const double k = bisect_monotone(
            [&](double kk) { return unit_integral(phi, f, kk, int_tol); }, 1.0, lo, hi,
            tol * hi);
        // land on the safe side of the unit ball
        double k_hi = std::min(hi, k + tol * std::max(k, 1.0));
        return unit_integral(phi, f, k_hi, int_tol) <= 1.0 ? k_hi : hi;
    }
    for (int j = 1; j <= 60; ++j) {
        const double k = std::ldexp(1.0, j);
        I = unit_integral(phi, f, k, int_tol);
        if (I <= 1.0) {
            const double lo = std::ldexp(1.0, j - 1);
            const double kk = bisect_monotone(
                [&](double c) { return unit_integral(phi, f, c, int_tol); }, 1.0, lo, k,
                tol * k);
            double k_hi = std::min(k, kk + tol * kk);
            return unit_integral(phi, f, k_hi, int_tol) <= 1.0 ? k_hi : k;
        }
    }
    throw NormInfinite("integral of Phi(f/k) stays above 1 for all probes k <= 2^60");
}

}  // namespace ergolab
