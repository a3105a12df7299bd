#pragma once

// Orlicz growth functions, the Luxemburg norm, membership integrals and the
// Sawyer growth condition.  Three parametric families are supported:
//   Power(p)            Phi(t) = |t|^p
//   LLogBeta(beta)      Phi(t) = |t| * log(|t|+1)^beta
//   CompositePower(s,p) Phi(t) = |t|^s * log(|t|+1)^p
// Natural logarithms throughout.  Power(1) and LLogBeta with beta < 1 are
// admitted as growth gauges even though they miss one of the classical
// Orlicz conditions; membership statements, not convexity, are what they
// feed here.

#include <utility>
#include <vector>

#include "lab/numerics.hpp"

namespace ergolab {

enum class OrliczFamily { Power, LLogBeta, CompositePower };

struct OrliczFunction {
    OrliczFamily family = OrliczFamily::Power;
    double p = 1.0;     // Power exponent, or the log exponent of CompositePower
    double beta = 1.0;  // LLogBeta exponent
    double s = 1.0;     // CompositePower power exponent

    static OrliczFunction power(double p);
    static OrliczFunction llog_beta(double beta);
    static OrliczFunction composite(double s, double p);

    double operator()(double t) const;
    std::string name() const;
};

double phi_eval(const OrliczFunction& phi, double t);

struct SawyerCheckReport {
    double C = 0.0;
    double p_exponent = 0.0;
    std::vector<std::pair<double, double>> violations;  // (x, y) with Phi(xy) > C Phi(y)^p Phi(x)
    double max_ratio = 0.0;                             // max Phi(xy) / (Phi(y)^p Phi(x))
    std::size_t filtered_out = 0;                       // grid points failing y >= 1, x >= 1/y
};

// Checks Phi(xy) <= C * Phi(y)^p * Phi(x) over the admissible grid points.
SawyerCheckReport sawyer_growth_check(const OrliczFunction& phi, double C, double p,
                                      const std::vector<std::pair<double, double>>& grid);

struct MembershipResult {
    bool diverges = false;      // the divergence signal, returned as a value
    IntegralEstimate estimate;  // meaningful when !diverges
};

// integral of Phi(f(x)) over (0,1); divergence per the numerics caps.
MembershipResult membership_integral(const OrliczFunction& phi, const MonotoneFunction& f,
                                     double tol, const IntegrationOptions& opts = {});

// Luxemburg norm inf{ k : integral of Phi(f/k) <= 1 }, located by probing
// k = 2^j, |j| <= 60, then bisecting.  Returns 0 for f identically 0 (any f
// whose unit integral stays <= 1 down to k = 2^-60).  Throws NormInfinite
// when no probe gives a finite integral <= 1.
double luxemburg_norm(const OrliczFunction& phi, const MonotoneFunction& f,
                      double tol = 1e-8);

// Phi(f(x)/scale) as a monotone decreasing function, for reuse by level-set
// and weak-inequality scans.
MonotoneFunction compose_phi(const OrliczFunction& phi, const MonotoneFunction& f,
                             double scale = 1.0);

}  // namespace ergolab
