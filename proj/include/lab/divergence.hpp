#pragma once

// The inductive construction of a perturbed block sequence along which the
// averages of a monotone singular function blow up on arcs that sweep the
// circle, driven by the schedule s_k, c_k, a_k, p_k, J_k; plus the explicit
// g_s example family with its membership and series classifiers.

#include <span>
#include <vector>

#include "lab/blockseq.hpp"
#include "lab/levelset.hpp"

namespace ergolab {

// g_s(x) = (loglog(2/x) + 1) / ((x/2) (log(2/x) loglog(2/x))^{s+1}) on
// (0, eps_s], 0 beyond; natural logs, monotone decreasing on its support.
struct GsFunction {
    double s = 1.0;
    double eps_s = 0.0;

    double operator()(double x) const;
    MonotoneFunction to_monotone() const;

    static GsFunction make(double s);  // picks eps_s via choose_eps_s
};

double gs_eval(const GsFunction& g, double x);

// Largest value in the ladder {2 e^-e, 1e-1, 1e-2, ..., 1e-6} on which all
// inner logarithms stay positive and a 10^4-point grid confirms monotone
// decrease.
double choose_eps_s(double s);

struct DivergenceSchedule {
    int k0 = 16;
    int K = 0;                       // filled through K
    std::vector<double> s;           // s_k, index i <-> k = k0 + i
    std::vector<double> c;           // c_k
    std::vector<double> a;           // a_k = M_{s_k/2}(f)
    std::vector<CirclePoint> p;      // p[0] = 0 (k0-1), p[i] = sum of a up to k0+i-1, mod 1
    std::vector<CircleArc> j_arcs;   // J_{k-1} = [p_{k-1}, p_k) for k = k0..K
    std::vector<double> delta;       // delta_k = a_{k+1}/10 for k = k0..K-1

    double s_at(int k) const { return s.at(static_cast<std::size_t>(k - k0)); }
    double c_at(int k) const { return c.at(static_cast<std::size_t>(k - k0)); }
    double a_at(int k) const { return a.at(static_cast<std::size_t>(k - k0)); }
    double delta_at(int k) const { return delta.at(static_cast<std::size_t>(k - k0)); }
    const CircleArc& j_arc_before(int k) const {
        return j_arcs.at(static_cast<std::size_t>(k - k0));
    }
};

// the example-family scalars: s_k = k / ((log k)^{s-1} (loglog k)^s) and
// c_k = loglog(k) / s_k, so that c_k s_k = loglog k; natural logs, k >= 16
double example_s_k(double s, int k);
double example_c_k(double s, int k);

// Fills s_k, c_k per the formulas above, a_k = m_lambda(f, s_k/2), p_k the
// exact fixed-point cumulative sum.  k0 = 16 keeps loglog positive in
// natural logs.
DivergenceSchedule schedule_from_example(double s, int K, const MonotoneFunction& f,
                                         double tol = 1e-6,
                                         const IntegrationOptions& quad = {1e9, 4096, true});

struct PreconditionReport {
    double sum_a = 0.0;
    bool diverging_evidence = false;  // a_k >= 1/(k log k) at every computed k
    std::vector<int> failing_k;
};

PreconditionReport divergence_precondition_check(const MonotoneFunction& f,
                                                 const DivergenceSchedule& schedule, int K);

struct StageReport {
    int k = 0;
    long long l_k = 0;
    long long d_k = 0;
    double lower_bound_lhs = 0.0;  // min over samples of the full average
    double lower_bound_rhs = 0.0;  // (1/4) (d_k / total) (s_k / 2)
    long long sample_points_checked = 0;
    bool passed = false;
    double witness_certified_measure = 0.0;  // diagnostics from the stage witness
    double witness_min_average = 0.0;
};

struct ConstructOptions {
    long long max_total_elements = 10'000'000;
    long long entry_budget = 100'000'000;
    int sample_count = 100;
    // witness level as a fraction of s_k; the arc J_{k-1} has length
    // a_k = M_{s_k/2}, matching the witness contract at level s_k/2
    double level_fraction = 0.5;
    long long cert_samples = 1500;
    int workers = 1;
};

struct ConstructionResult {
    PerturbedBlockSequence sequence;
    std::vector<StageReport> stages;
};

// Stages k = k0..K: block B_k of length l_k = max(prev max element + 1,
// k*l_{k-1}); then d_k = round(c_k l_k) witness times targeting (J_{k-1})
// shrunk by delta_k, re-searched to start after B_k.  Growth constraints and
// |d_k - c_k l_k| <= 0.5 hold exactly by construction.
ConstructionResult construct_divergent_sequence(const RotationSystem& sys,
                                                const MonotoneFunction& f,
                                                const DivergenceSchedule& schedule, int K,
                                                const ConstructOptions& opts = {});

// lhs: full average over all elements through stage k, sampled on
// (J_{k-1})_{delta_k}; rhs = (1/4) (d_k / (sum l + sum d)) (s_k / 2).  The
// 1/4 is this implementation's pinned conservative constant.
StageReport stage_inequality_check(const PerturbedBlockSequence& seq, const RotationSystem& sys,
                                   const MonotoneFunction& f, const DivergenceSchedule& schedule,
                                   int k, int sample_count, int workers = 1);

enum class Membership { InSpace, NotInSpace };

// g_s lies in L Log^p L for s > p when s <= 1, and for s >= p when s > 1.
Membership membership_exponent_classifier(double s, double p);

// Terms (loglog k)^{s+2} / (k (log k)^{p+1-s}) from k = 16; classification
// by the integral-test certificate on the exponent p+1-s (the loglog factor
// cannot rescue exponent <= 1).
CriterionReport example_criterion_series(double s, double p, long long K);

struct ExponentFit {
    double slope = 0.0;      // regression of log(lambda * A_lambda) on
                             // log(log(2/lambda) loglog(2/lambda)); -s expected
    double intercept = 0.0;  // log(2/s) expected
};

// Fits the decay of the prefix average of g_s by quadrature, for comparison
// with the closed-form exponent.
ExponentFit fit_example_average_exponent(double s, int npoints = 12);

}  // namespace ergolab
