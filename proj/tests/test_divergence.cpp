#include <doctest.h>

#include <cmath>

#include "lab/divergence.hpp"

using namespace ergolab;

TEST_CASE("gs_eval: support cutoff, domain, fixed values") {
    const auto g1 = GsFunction::make(1.0);
    CHECK(g1(g1.eps_s * 1.5) == 0.0);
    CHECK_THROWS_AS(gs_eval(g1, 0.0), std::domain_error);
    CHECK_THROWS_AS(gs_eval(g1, -0.5), std::domain_error);
    // frozen by direct evaluation of the formula
    CHECK(g1(0.01) == doctest::Approx(6.835439523603538).epsilon(1e-9));
    CHECK(g1(0.005) == doctest::Approx(9.700217139985634).epsilon(1e-9));
    const auto g05 = GsFunction::make(0.5);
    CHECK(g05(0.01) == doctest::Approx(20.316735830921914).epsilon(1e-9));
    const auto g2 = GsFunction::make(2.0);
    CHECK(g2(0.05) == 0.0);  // beyond the support for s = 2
    CHECK(g2(0.005) == doctest::Approx(0.9043029479417781).epsilon(1e-9));
    // subnormal arguments stay finite
    CHECK(std::isfinite(g05(1e-320)));
    CHECK(g05(1e-320) > 1e200);
}

TEST_CASE("gs_eval: monotone decreasing on the support") {
    for (double s : {0.5, 1.0, 2.0}) {
        const auto g = GsFunction::make(s);
        double prev = std::numeric_limits<double>::infinity();
        for (int i = 1; i <= 2000; ++i) {
            const double x = g.eps_s * static_cast<double>(i) / 2000.0;
            const double cur = g(x);
            REQUIRE(cur <= prev * (1.0 + 1e-12));
            prev = cur;
        }
    }
}

TEST_CASE("choose_eps_s: ladder pick keeps the logarithms positive") {
    for (double s : {0.5, 1.0, 2.0, 4.0}) {
        const double eps = choose_eps_s(s);
        CHECK(eps <= 2.0 * std::exp(-std::exp(1.0)) + 1e-15);
        CHECK(std::log(std::log(2.0 / eps)) > 0.0);
    }
    // s = 1/2 is monotone on the full first ladder value; larger s has a
    // hump short of it and drops to the next rungs
    CHECK(choose_eps_s(0.5) == doctest::Approx(0.13197607169062509).epsilon(1e-12));
    CHECK(choose_eps_s(1.0) == doctest::Approx(0.01).epsilon(1e-12));
    CHECK(choose_eps_s(2.0) == doctest::Approx(0.01).epsilon(1e-12));
}

TEST_CASE("gs family: prefix mass matches the closed-form antiderivative") {
    // integral_0^t g_s = (2/s) (log(2/t) loglog(2/t))^{-s} for t <= eps_s,
    // via the substitution u = log(2/x)
    IntegrationOptions opts;
    opts.panel_budget = 20'000;
    opts.best_effort = true;
    for (double s : {0.5, 1.0}) {
        const auto f = GsFunction::make(s).to_monotone();
        for (double lo : {1e-5, 1e-4, 1e-3}) {
            const double hi = std::min(5.0 * lo, f.support_right);
            const double L1 = std::log(2.0 / lo), L2 = std::log(2.0 / hi);
            const double truth = (2.0 / s) * (std::pow(L2 * std::log(L2), -s) -
                                              std::pow(L1 * std::log(L1), -s));
            const auto est = integrate_monotone(f, lo, hi, 1e-8, opts);
            INFO("s=", s, " lo=", lo);
            CHECK(est.value == doctest::Approx(truth).epsilon(1e-5));
        }
    }
}

TEST_CASE("schedule_from_example: formula values at k = 100") {
    const auto f = GsFunction::make(1.0).to_monotone();
    const auto sched = schedule_from_example(1.0, 100, f);
    CHECK(sched.s_at(100) == doctest::Approx(65.48018210176062).epsilon(1e-10));
    CHECK(sched.c_at(100) == doctest::Approx(0.02332277609482761).epsilon(1e-10));
}

TEST_CASE("schedule_from_example: c_k s_k = loglog k to 1e-12 relative") {
    const auto f = GsFunction::make(0.5).to_monotone();
    const auto sched = schedule_from_example(0.5, 120, f);
    for (int k = sched.k0; k <= 120; ++k) {
        const double expect = std::log(std::log(static_cast<double>(k)));
        REQUIRE(std::abs(sched.c_at(k) * sched.s_at(k) - expect) <= 1e-12 * expect);
    }
}

TEST_CASE("schedule_from_example: arcs chain with matching lengths") {
    const auto f = GsFunction::make(0.5).to_monotone();
    const auto sched = schedule_from_example(0.5, 25, f);
    CHECK(sched.p.front() == CirclePoint{});
    for (int k = sched.k0; k <= 25; ++k) {
        const auto& arc = sched.j_arc_before(k);
        // |J_{k-1}| equals a_k up to the fixed-point rounding of the endpoints
        CHECK(arc.length() == doctest::Approx(sched.a_at(k)).epsilon(1e-12));
        CHECK(arc.start ==
              sched.p[static_cast<std::size_t>(k - sched.k0)]);
    }
    // s_k increases over the computed range
    for (int k = sched.k0 + 1; k <= 25; ++k) CHECK(sched.s_at(k) > sched.s_at(k - 1));
    // delta defaults to a_{k+1}/10
    for (int k = sched.k0; k < 25; ++k)
        CHECK(sched.delta_at(k) == doctest::Approx(sched.a_at(k + 1) / 10.0));
}

TEST_CASE("divergence_precondition_check: g_{0.5} dominates 1/(k log k)") {
    const auto f = GsFunction::make(0.5).to_monotone();
    const auto sched = schedule_from_example(0.5, 200, f);
    const auto report = divergence_precondition_check(f, sched, 200);
    CHECK(report.diverging_evidence);
    CHECK(report.failing_k.empty());
    CHECK(report.sum_a > 1.0);
}

TEST_CASE("divergence_precondition_check: bounded f loses the evidence") {
    const auto f = MonotoneFunction::constant(1.0);
    // schedule would abort on a_k = 0, so assemble the degenerate case directly
    DivergenceSchedule sched;
    sched.k0 = 16;
    sched.K = 40;
    sched.p.push_back(CirclePoint{});
    for (int k = 16; k <= 40; ++k) {
        const double logk = std::log(static_cast<double>(k));
        const double s_k = static_cast<double>(k) * std::sqrt(logk / std::log(logk));
        sched.s.push_back(s_k);
        sched.c.push_back(std::log(logk) / s_k);
        const double a_k = m_lambda(f, s_k / 2.0, 1e-8);  // 0 for all large s_k
        sched.a.push_back(a_k);
        const CirclePoint p_prev = sched.p.back();
        const CirclePoint p_k = p_prev + CirclePoint::from_double(a_k);
        sched.p.push_back(p_k);
        sched.j_arcs.push_back(CircleArc::between(p_prev, p_k));
    }
    const auto report = divergence_precondition_check(f, sched, 40);
    CHECK_FALSE(report.diverging_evidence);
}

TEST_CASE("divergence_precondition_check: x^{-1/2} with s_k = k has summable a_k") {
    // closed form a_k = M_{k/2} = min(1, 16/k^2)
    const auto f = MonotoneFunction::inverse_power(0.5);
    DivergenceSchedule sched;
    sched.k0 = 16;
    sched.K = 100;
    sched.p.push_back(CirclePoint{});
    for (int k = 16; k <= 100; ++k) {
        sched.s.push_back(static_cast<double>(k));
        sched.c.push_back(std::log(std::log(static_cast<double>(k))) / k);
        const double a_k = m_lambda(f, static_cast<double>(k) / 2.0, 1e-9);
        const double closed = std::min(1.0, 16.0 / (static_cast<double>(k) * k));
        REQUIRE(a_k == doctest::Approx(closed).epsilon(1e-4));
        sched.a.push_back(a_k);
        const CirclePoint p_prev = sched.p.back();
        const CirclePoint p_k = p_prev + CirclePoint::from_double(a_k);
        sched.p.push_back(p_k);
        sched.j_arcs.push_back(CircleArc::between(p_prev, p_k));
    }
    const auto report = divergence_precondition_check(f, sched, 100);
    CHECK_FALSE(report.diverging_evidence);  // 16/k^2 < 1/(k log k) for k >= 91
    CHECK(report.sum_a < 1.1);
}

TEST_CASE("membership_exponent_classifier: exact rule") {
    CHECK(membership_exponent_classifier(2.0, 1.0) == Membership::InSpace);
    CHECK(membership_exponent_classifier(0.5, 0.5) == Membership::NotInSpace);
    CHECK(membership_exponent_classifier(1.0, 0.5) == Membership::InSpace);
    CHECK(membership_exponent_classifier(1.0, 1.0) == Membership::NotInSpace);  // s = p <= 1
    CHECK(membership_exponent_classifier(2.0, 2.0) == Membership::InSpace);     // s = p > 1
}

TEST_CASE("example_criterion_series: classification matches the exponent rule") {
    CHECK(example_criterion_series(0.5, 1.0, 2000).classification == SeriesClass::Convergent);
    CHECK(example_criterion_series(1.0, 1.0, 2000).classification == SeriesClass::Divergent);
    CHECK(example_criterion_series(2.0, 1.0, 2000).classification == SeriesClass::Divergent);
    // grid: convergent exactly when p > s
    for (double s : {0.5, 1.0, 2.0}) {
        for (double p : {0.25, 0.5, 0.75, 1.0, 1.5, 2.0, 2.5}) {
            const auto r = example_criterion_series(s, p, 500);
            INFO("s=", s, " p=", p);
            CHECK((r.classification == SeriesClass::Convergent) == (p > s));
        }
    }
}

TEST_CASE("classifier consistency: convergent regimes never hold the bad function") {
    // wherever the series certifies convergence (p > s), g_s must sit outside
    // LLog^p L; the divergence construction only targets exponents at or
    // below s
    for (double s : {0.5, 1.0, 2.0}) {
        for (double p : {0.25, 0.5, 0.75, 1.0, 1.5, 2.0, 2.5}) {
            const bool convergent =
                example_criterion_series(s, p, 200).classification == SeriesClass::Convergent;
            const bool in_space = membership_exponent_classifier(s, p) == Membership::InSpace;
            const bool both = convergent && in_space;
            INFO("s=", s, " p=", p);
            CHECK_FALSE(both);
        }
    }
}

TEST_CASE("example_criterion_series: partial sums are nondecreasing evidence") {
    const auto r = example_criterion_series(0.5, 1.0, 5000);
    for (std::size_t i = 1; i < r.partial_sums.size(); ++i)
        REQUIRE(r.partial_sums[i] >= r.partial_sums[i - 1]);
    CHECK(r.terms.size() == 5000 - 16 + 1);
}

TEST_CASE("fit_example_average_exponent: quadrature recovers the decay exponent") {
    for (double s : {0.5, 1.0}) {
        const auto fit = fit_example_average_exponent(s);
        INFO("s=", s, " slope=", fit.slope, " intercept=", fit.intercept);
        CHECK(fit.slope == doctest::Approx(-s).epsilon(0.08));
        CHECK(fit.intercept == doctest::Approx(std::log(2.0 / s)).epsilon(0.25));
    }
}

TEST_CASE("construct_divergent_sequence: single stage completes and certifies") {
    const auto sys = RotationSystem::golden();
    const auto f = GsFunction::make(0.5).to_monotone();
    const auto sched = schedule_from_example(0.5, 17, f);
    ConstructOptions opts;
    opts.sample_count = 50;
    const auto result = construct_divergent_sequence(sys, f, sched, 16, opts);
    REQUIRE(result.stages.size() == 1);
    const auto& r = result.stages[0];
    CHECK(r.passed);
    CHECK(r.k == 16);
    CHECK(r.l_k == 16);
    CHECK(std::abs(static_cast<double>(r.d_k) - sched.c_at(16) * static_cast<double>(r.l_k)) <=
          0.5);
    // cross-validation: recheck the inequality at a different sampling density
    const auto recheck = stage_inequality_check(result.sequence, sys, f, sched, 16, 100);
    CHECK(recheck.passed);
    CHECK(recheck.lower_bound_rhs == doctest::Approx(r.lower_bound_rhs));
}

TEST_CASE("construct_divergent_sequence: growth constraints hold exactly") {
    const auto sys = RotationSystem::golden();
    const auto f = GsFunction::make(0.5).to_monotone();
    const auto sched = schedule_from_example(0.5, 19, f);
    ConstructOptions opts;
    opts.sample_count = 25;
    const auto result = construct_divergent_sequence(sys, f, sched, 18, opts);
    REQUIRE(result.stages.size() == 3);
    const auto& blocks = result.sequence.blocks();
    long long prev_max = 0;
    long long l_prev = 1;
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        const int k = sched.k0 + static_cast<int>(i);
        const long long l_k = blocks[i].length;
        REQUIRE(l_k >= k * l_prev);
        REQUIRE(l_k > prev_max);
        const double c_l = sched.c_at(k) * static_cast<double>(l_k);
        REQUIRE(std::abs(static_cast<double>(result.stages[i].d_k) - c_l) <= 0.5);
        prev_max = std::max(blocks[i].end(),
                            result.sequence.perturbations()[i].back());
        l_prev = l_k;
    }
    for (const auto& r : result.stages) CHECK(r.passed);
}

TEST_CASE("construct_divergent_sequence: element budget is enforced") {
    const auto sys = RotationSystem::golden();
    const auto f = GsFunction::make(0.5).to_monotone();
    const auto sched = schedule_from_example(0.5, 17, f);
    ConstructOptions opts;
    opts.max_total_elements = 10;
    CHECK_THROWS_AS(construct_divergent_sequence(sys, f, sched, 16, opts), ScheduleExhausted);
}

TEST_CASE("stage_inequality_check: sabotaged perturbation fails the inequality") {
    // a block-light stage: lhs is carried by the perturbation average, so
    // pointing D at the small-f region must flip the verdict
    const auto sys = RotationSystem::golden();
    const auto f = MonotoneFunction::inverse_power(0.5);

    DivergenceSchedule sched;
    sched.k0 = 16;
    sched.K = 16;
    sched.s = {12.0};  // rhs = (1/4)(40/41)(6) = 1.46, above any bounded-away average
    sched.c = {0.9};
    const double a16 = m_lambda(f, 6.0, 1e-9);  // 4/36
    sched.a = {a16};
    sched.p.push_back(CirclePoint{});
    sched.p.push_back(CirclePoint::from_double(a16));
    sched.j_arcs.push_back(CircleArc::between(sched.p[0], sched.p[1]));
    sched.delta = {a16 / 10.0};

    // honest stage: one tiny block, perturbation routed into the large-f region
    const auto I = CircleArc::between(CirclePoint::from_double(a16 / 10.0),
                                      CirclePoint::from_double(a16 - a16 / 10.0));
    WitnessOptions wopts;
    wopts.max_times = 40;
    const auto witness = construct_witness(sys, f, 6.0, I, a16 / 10.0, 1e-3,
                                           2.0, (I.length() - 1e-3) / 20.0, 2, wopts);
    REQUIRE(witness.subsequence.size() == 40);
    const PerturbedBlockSequence honest({{1, 1}}, {witness.subsequence});
    const auto good = stage_inequality_check(honest, sys, f, sched, 16, 60);
    CHECK(good.passed);

    // sabotage: the same shape, but every perturbation time sends the target
    // arc into [0.8, 1) where f is smallest
    std::vector<long long> bad_times;
    const auto far_arc = CircleArc::from_doubles(0.85, 0.1);
    long long n = 2;
    while (bad_times.size() < 40) {
        const auto hit = first_entry_time(sys, sched.p[0], far_arc, n, 1'000'000);
        REQUIRE(hit.has_value());
        bad_times.push_back(*hit);
        n = *hit + 1;
    }
    const PerturbedBlockSequence sabotaged({{1, 1}}, {bad_times});
    const auto bad = stage_inequality_check(sabotaged, sys, f, sched, 16, 60);
    CHECK_FALSE(bad.passed);
}
