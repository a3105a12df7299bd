#include "lab/divergence.hpp"

#include <algorithm>
#include <cmath>

#include "lab/parallel.hpp"

namespace ergolab {

double gs_eval(const GsFunction& g, double x) {
    if (!(x > 0.0)) throw std::domain_error("gs_eval: x must be positive");
    if (x > g.eps_s) return 0.0;
    const double log_x = std::log(x);
    const double L = std::log(2.0) - log_x;  // log(2/x) without overflow near 0
    const double LL = std::log(L);
    // log-space evaluation stays finite down to subnormal x
    const double log_val = std::log1p(LL) - log_x + std::log(2.0) - (g.s + 1.0) * std::log(L * LL);
    return std::exp(std::min(log_val, 700.0));
}

double GsFunction::operator()(double x) const { return gs_eval(*this, x); }

MonotoneFunction GsFunction::to_monotone() const {
    MonotoneFunction f;
    f.monotone_decreasing = true;
    f.support_right = eps_s;
    GsFunction g = *this;
    f.evaluator = [g](double x) { return gs_eval(g, x); };
    return f;
}

GsFunction GsFunction::make(double s) {
    GsFunction g;
    g.s = s;
    g.eps_s = choose_eps_s(s);
    return g;
}

double choose_eps_s(double s) {
    if (!(s > 0.0)) throw LabError("choose_eps_s: s must be positive");
    std::vector<double> ladder = {2.0 * std::exp(-std::exp(1.0)), 1e-1, 1e-2,
                                  1e-3, 1e-4, 1e-5, 1e-6};
    for (double eps : ladder) {
        // inner logarithms positive on (0, eps]: need log(2/eps) > 1
        if (!(std::log(2.0 / eps) > 1.0) || !(std::log(std::log(2.0 / eps)) > 0.0)) continue;
        GsFunction g{s, eps};
        bool monotone = true;
        double prev = gs_eval(g, eps / 1e4);
        for (int i = 2; i <= 10'000 && monotone; ++i) {
            const double x = eps * static_cast<double>(i) / 1e4;
            const double cur = gs_eval(g, x);
            if (cur > prev * (1.0 + 1e-12)) monotone = false;
            prev = cur;
        }
        if (monotone) return eps;
    }
    throw NoValidEps("no ladder value gives a monotone g_s");
}

double example_s_k(double s, int k) {
    if (k < 16) throw LabError("example scalars need k >= 16");
    const double logk = std::log(static_cast<double>(k));
    const double loglogk = std::log(logk);
    return static_cast<double>(k) / (std::pow(logk, s - 1.0) * std::pow(loglogk, s));
}

double example_c_k(double s, int k) {
    return std::log(std::log(static_cast<double>(k))) / example_s_k(s, k);
}

DivergenceSchedule schedule_from_example(double s, int K, const MonotoneFunction& f, double tol,
                                         const IntegrationOptions& quad) {
    DivergenceSchedule sched;
    sched.k0 = 16;
    sched.K = K;
    if (K < sched.k0) throw LabError("schedule_from_example: K >= 16");
    sched.p.push_back(CirclePoint{0});
    for (int k = sched.k0; k <= K; ++k) {
        const double s_k = example_s_k(s, k);
        const double c_k = example_c_k(s, k);
        const double a_k = m_lambda(f, s_k / 2.0, tol, quad);
        if (a_k <= 0.0)
            throw ScheduleDegenerate("a_k vanished at k = " + std::to_string(k));
        sched.s.push_back(s_k);
        sched.c.push_back(c_k);
        sched.a.push_back(a_k);
        const CirclePoint p_prev = sched.p.back();
        const CirclePoint p_k = p_prev + CirclePoint::from_double(a_k);
        sched.p.push_back(p_k);
        sched.j_arcs.push_back(CircleArc::between(p_prev, p_k));
    }
    for (int k = sched.k0; k < K; ++k)
        sched.delta.push_back(sched.a_at(k + 1) / 10.0);
    return sched;
}

PreconditionReport divergence_precondition_check(const MonotoneFunction& f,
                                                 const DivergenceSchedule& schedule, int K) {
    (void)f;  // the schedule already carries a_k = M_{s_k/2}(f)
    if (K > schedule.K) throw LabError("precondition check: schedule not filled through K");
    PreconditionReport report;
    report.diverging_evidence = true;
    for (int k = schedule.k0; k <= K; ++k) {
        const double a_k = schedule.a_at(k);
        report.sum_a += a_k;
        const double bound = 1.0 / (static_cast<double>(k) * std::log(static_cast<double>(k)));
        if (a_k < bound) {
            report.diverging_evidence = false;
            report.failing_k.push_back(k);
        }
    }
    return report;
}

namespace {

CircleArc shrink_arc(const CircleArc& arc, double delta) {
    const double len = arc.length() - 2.0 * delta;
    if (len <= 0.0) return CircleArc{};  // empty
    CircleArc out;
    out.start = arc.start + CirclePoint::from_double(delta);
    out.length_bits = CirclePoint::from_double(len).bits;
    return out;
}

// equally spaced sample points inside the shrunk arc
std::vector<CirclePoint> arc_samples(const CircleArc& arc, int count) {
    std::vector<CirclePoint> pts;
    pts.reserve(static_cast<std::size_t>(count));
    const double len = arc.length();
    for (int i = 0; i < count; ++i) {
        const double frac = (static_cast<double>(i) + 0.5) / static_cast<double>(count);
        pts.push_back(arc.start + CirclePoint::from_double(frac * len));
    }
    return pts;
}

}  // namespace

StageReport stage_inequality_check(const PerturbedBlockSequence& seq, const RotationSystem& sys,
                                   const MonotoneFunction& f, const DivergenceSchedule& schedule,
                                   int k, int sample_count, int workers) {
    const int idx = k - schedule.k0;
    if (idx < 0 || idx >= static_cast<int>(seq.blocks().size()))
        throw LabError("stage_inequality_check: stage " + std::to_string(k) + " not constructed");

    long long sum_l = 0, sum_d = 0;
    for (int i = 0; i <= idx; ++i) {
        sum_l += seq.block_length(static_cast<std::size_t>(i));
        sum_d += seq.perturbation_size(static_cast<std::size_t>(i));
    }
    const long long d_k = seq.perturbation_size(static_cast<std::size_t>(idx));
    const long long total = sum_l + sum_d;

    StageReport report;
    report.k = k;
    report.l_k = seq.block_length(static_cast<std::size_t>(idx));
    report.d_k = d_k;
    report.sample_points_checked = sample_count;
    report.lower_bound_rhs = 0.25 * (static_cast<double>(d_k) / static_cast<double>(total)) *
                             (schedule.s_at(k) / 2.0);

    // offsets for every element through stage k, computed once
    std::vector<CirclePoint> offsets;
    offsets.reserve(static_cast<std::size_t>(total));
    const long long max_elem =
        idx + 1 < static_cast<int>(seq.blocks().size()) ? seq.blocks()[idx + 1].start - 1
                                                        : seq.max_element();
    seq.for_each_element_upto(max_elem, [&](long long u, bool) {
        offsets.push_back(rotation_offset(sys, static_cast<unsigned long long>(u)));
    });

    const CircleArc target = shrink_arc(schedule.j_arc_before(k), schedule.delta_at(k));
    const auto samples = arc_samples(target, sample_count);
    std::vector<double> lhs(samples.size());
    parallel_for(samples.size(), workers, [&](std::size_t i) {
        double sum = 0.0, comp = 0.0;
        for (const CirclePoint& o : offsets) {
            CirclePoint p = samples[i] + o;
            if (p.bits == 0) p.bits = static_cast<u128>(1) << 28;
            const double term = f(p.to_double());
            const double y = term - comp;
            const double t = sum + y;
            comp = (t - sum) - y;
            sum = t;
        }
        lhs[i] = sum / static_cast<double>(total);
    });
    report.lower_bound_lhs = *std::min_element(lhs.begin(), lhs.end());
    report.passed = report.lower_bound_lhs >= report.lower_bound_rhs;
    return report;
}

ConstructionResult construct_divergent_sequence(const RotationSystem& sys,
                                                const MonotoneFunction& f,
                                                const DivergenceSchedule& schedule, int K,
                                                const ConstructOptions& opts) {
    if (K < schedule.k0) throw LabError("construct: K >= k0");
    if (K > schedule.K - 1)
        throw LabError("construct: schedule must be filled through K+1 (delta_K needs a_{K+1})");

    std::vector<Block> blocks;
    std::vector<std::vector<long long>> perturbations;
    std::vector<double> witness_measure, witness_minavg;
    long long prev_max = 0;
    long long l_prev = 1;
    long long total = 0;

    for (int k = schedule.k0; k <= K; ++k) {
        const long long l_k = std::max(prev_max + 1, static_cast<long long>(k) * l_prev);
        const double c_k = schedule.c_at(k);
        const long long d_k =
            std::max<long long>(1, std::llround(c_k * static_cast<double>(l_k)));
        if (total + l_k + d_k > opts.max_total_elements)
            throw ScheduleExhausted(k, "stage needs " + std::to_string(l_k + d_k) +
                                           " more elements over budget " +
                                           std::to_string(opts.max_total_elements));

        Block b{prev_max + 1, l_k};
        blocks.push_back(b);

        const CircleArc I = shrink_arc(schedule.j_arc_before(k), schedule.delta_at(k));
        if (I.length_bits == 0)
            throw StageFailed(k, "target arc vanished after the delta shrink");
        const double M = I.length();
        const double lambda_w = opts.level_fraction * schedule.s_at(k);
        const double eps_w = std::min(1e-3, M / 10.0);
        const long long r = (d_k + 1) / 2;
        const double eta_w =
            std::max(1e-12, (f(eps_w) - f(M)) * (M - eps_w) / static_cast<double>(r));
        const double w_panel = (M - eps_w) / static_cast<double>(r);

        WitnessOptions wopts;
        wopts.n_max = opts.entry_budget;
        wopts.max_times = d_k;
        wopts.cert_samples = opts.cert_samples;
        wopts.workers = opts.workers;
        WitnessResult witness;
        try {
            witness = construct_witness(sys, f, lambda_w, I, schedule.delta_at(k), eps_w, eta_w,
                                        w_panel, b.end() + 1, wopts);
        } catch (const NoWitness& e) {
            throw StageFailed(k, e.what());
        } catch (const EntryTimeBudgetExceeded& e) {
            throw StageFailed(k, e.what());
        }

        perturbations.push_back(witness.subsequence);
        witness_measure.push_back(witness.certified_measure);
        witness_minavg.push_back(witness.min_average_on_arc);
        prev_max = std::max(b.end(), witness.subsequence.back());
        l_prev = l_k;
        total += l_k + d_k;
    }

    ConstructionResult result{PerturbedBlockSequence(std::move(blocks), std::move(perturbations)),
                              {}};
    for (int k = schedule.k0; k <= K; ++k) {
        StageReport report = stage_inequality_check(result.sequence, sys, f, schedule, k,
                                                    opts.sample_count, opts.workers);
        report.witness_certified_measure =
            witness_measure[static_cast<std::size_t>(k - schedule.k0)];
        report.witness_min_average = witness_minavg[static_cast<std::size_t>(k - schedule.k0)];
        result.stages.push_back(report);
    }
    return result;
}

Membership membership_exponent_classifier(double s, double p) {
    if (!(s > 0.0) || p < 0.0) throw LabError("classifier: s > 0, p >= 0");
    if (s <= 1.0) return s > p ? Membership::InSpace : Membership::NotInSpace;
    return s >= p ? Membership::InSpace : Membership::NotInSpace;
}

CriterionReport example_criterion_series(double s, double p, long long K) {
    if (K < 16) throw LabError("example_criterion_series: K >= 16");
    CriterionReport report;
    const double exponent = p + 1.0 - s;
    double acc = 0.0;
    for (long long k = 16; k <= K; ++k) {
        const double logk = std::log(static_cast<double>(k));
        const double loglogk = std::log(logk);
        const double term =
            std::pow(loglogk, s + 2.0) / (static_cast<double>(k) * std::pow(logk, exponent));
        report.terms.push_back(term);
        acc += term;
        report.partial_sums.push_back(acc);
    }
    if (exponent > 1.0) {
        report.classification = SeriesClass::Convergent;
        report.rationale = "integral test: log exponent p+1-s > 1";
    } else {
        report.classification = SeriesClass::Divergent;
        report.rationale = "integral test: log exponent p+1-s <= 1, loglog factor cannot rescue";
    }
    return report;
}

ExponentFit fit_example_average_exponent(double s, int npoints) {
    const MonotoneFunction f = GsFunction::make(s).to_monotone();
    IntegrationOptions quad;
    quad.panel_budget = 8192;
    quad.best_effort = true;
    // lambda log-spaced in [1e-6, 1e-2]; regress log(lambda A_lambda) on
    // log(log(2/lambda) loglog(2/lambda))
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int i = 0; i < npoints; ++i) {
        const double t = static_cast<double>(i) / static_cast<double>(npoints - 1);
        const double lambda = std::pow(10.0, -6.0 + 4.0 * t);
        const double avg = prefix_average(f, lambda, 1e-6, quad);
        const double L = std::log(2.0 / lambda);
        const double x = std::log(L * std::log(L));
        const double y = std::log(lambda * avg);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double n = static_cast<double>(npoints);
    ExponentFit fit;
    fit.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    fit.intercept = (sy - fit.slope * sx) / n;
    return fit;
}

}  // namespace ergolab
