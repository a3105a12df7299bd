#include <doctest.h>

#include <cmath>

#include "lab/levelset.hpp"

using namespace ergolab;

namespace {

std::vector<long long> prefix(long long n) {
    std::vector<long long> out(static_cast<std::size_t>(n));
    for (long long i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = i;
    return out;
}

}  // namespace

TEST_CASE("compute_level_set: full circle at lambda = 0") {
    const auto sys = RotationSystem::golden();
    const auto ls =
        compute_level_set(sys, MonotoneFunction::inverse_power(0.25), prefix(3), 0.0, 2000);
    CHECK(ls.outer_measure == 1.0);
    CHECK(ls.inner_measure == 1.0);
    REQUIRE(ls.arcs.size() == 1);
    CHECK(ls.arcs[0].full);
}

TEST_CASE("compute_level_set: bounded function, unreachable level") {
    const auto sys = RotationSystem::golden();
    const auto ls = compute_level_set(sys, MonotoneFunction::one_minus_x(), prefix(4), 2.0, 2000);
    CHECK(ls.outer_measure == 0.0);
    CHECK(ls.arcs.empty());
}

TEST_CASE("compute_level_set: one-term average is a rotated sublevel arc") {
    // N = 1, seq = {n0}: B_lambda = T^{-n0}([0, f^{-1}(lambda)]), f = x^{-1/2}:
    // f^{-1}(2) = 1/4
    const auto sys = RotationSystem::golden();
    std::vector<long long> seq = {7};
    const auto ls =
        compute_level_set(sys, MonotoneFunction::inverse_power(0.5), seq, 2.0, 100'000);
    CHECK(ls.outer_measure == doctest::Approx(0.25).epsilon(1e-3));
    REQUIRE(ls.arcs.size() == 1);
    // the arc must start at T^{-7}(0)
    const CirclePoint expected_start = CirclePoint{} - rotation_offset(sys, 7);
    const double gap = std::abs(ls.arcs[0].start.to_double() - expected_start.to_double());
    CHECK(std::min(gap, 1.0 - gap) <= 2.0 / 100'000);
}

TEST_CASE("compute_level_set: inner and outer sandwich the set") {
    const auto sys = RotationSystem::golden();
    const auto ls =
        compute_level_set(sys, MonotoneFunction::inverse_power(0.5), prefix(5), 1.5, 20'000);
    CHECK(ls.inner_measure <= ls.outer_measure);
    const double slack =
        2.0 * static_cast<double>(5 + ls.arcs.size()) / static_cast<double>(ls.grid_cells);
    CHECK(ls.outer_measure - ls.inner_measure <= slack);
}

TEST_CASE("m_lambda: closed forms for x^{-1/2}") {
    const auto f = MonotoneFunction::inverse_power(0.5);
    // prefix average 2/sqrt(L) = lambda at L = 4/lambda^2
    CHECK(m_lambda(f, 4.0, 1e-8) == doctest::Approx(0.25).epsilon(1e-5));
    CHECK(m_lambda(f, 1.0, 1e-8) == 1.0);
    CHECK(m_lambda(MonotoneFunction::constant(1.0), 2.0, 1e-8) == 0.0);
}

TEST_CASE("m_lambda: monotone nonincreasing in lambda") {
    const auto f = MonotoneFunction::inverse_power(0.5);
    double prev = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 20; ++i) {
        const double lambda = 1.2 * std::pow(20.0 / 1.2, i / 19.0);
        const double m = m_lambda(f, lambda, 1e-8);
        CHECK(m <= prev + 1e-9);
        prev = m;
    }
}

TEST_CASE("verify_weak_bound: closed-form cases") {
    const auto sys = RotationSystem::golden();
    const auto f = MonotoneFunction::inverse_power(0.5);
    std::vector<long long> one = {0};
    // |B_4| = 1/16 <= M_4 = 1/4
    auto r = verify_weak_bound(sys, f, one, 4.0, 100'000);
    CHECK(r.holds);
    CHECK(r.measure_outer == doctest::Approx(1.0 / 16.0).epsilon(1e-3));
    CHECK(r.m_lambda_value == doctest::Approx(0.25).epsilon(1e-5));
    // both equal 1 at lambda = 0.1
    r = verify_weak_bound(sys, f, one, 0.1, 10'000);
    CHECK(r.holds);
    CHECK(r.measure_outer == 1.0);
    CHECK(r.m_lambda_value == 1.0);
    // empty set convention
    r = verify_weak_bound(sys, MonotoneFunction::constant(1.0), one, 2.0, 10'000);
    CHECK(r.holds);
    CHECK(r.measure_outer == 0.0);
    CHECK(r.m_lambda_value == 0.0);
}

TEST_CASE("decompose_level_set: one-term decomposition equals the level set") {
    const auto sys = RotationSystem::golden();
    std::vector<long long> seq = {3};
    const auto d =
        decompose_level_set(sys, MonotoneFunction::inverse_power(0.5), seq, 2.0, 50'000);
    REQUIRE_FALSE(d.degenerate);
    REQUIRE(d.s_arcs.size() == 1);
    CHECK(d.a_values[0] == doctest::Approx(0.25).epsilon(1e-3));
    CHECK(d.union_measure == doctest::Approx(0.25).epsilon(1e-3));
    CHECK(d.symdiff_vs_levelset <= 10.0 * (1.0 + 1.0) / 50'000);
}

TEST_CASE("decompose_level_set: lambda = 0 covers the circle") {
    const auto sys = RotationSystem::golden();
    const auto d =
        decompose_level_set(sys, MonotoneFunction::inverse_power(0.25), prefix(2), 0.0, 20'000);
    CHECK(d.union_measure == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("decompose_level_set: empty level set is degenerate") {
    const auto sys = RotationSystem::golden();
    const auto d =
        decompose_level_set(sys, MonotoneFunction::one_minus_x(), prefix(3), 5.0, 10'000);
    CHECK(d.degenerate);
    for (double a : d.a_values) CHECK(a == 0.0);
}

TEST_CASE("decompose_level_set: golden two-term case is disjoint and tight") {
    const auto sys = RotationSystem::golden();
    std::vector<long long> seq = {1, 4};
    const auto d =
        decompose_level_set(sys, MonotoneFunction::inverse_power(0.5), seq, 1.5, 100'000);
    REQUIRE_FALSE(d.degenerate);
    // exact pairwise disjointness in fixed point
    for (std::size_t i = 0; i < d.s_arcs.size(); ++i) {
        for (std::size_t j = i + 1; j < d.s_arcs.size(); ++j) {
            const auto& a = d.s_arcs[i];
            const auto& b = d.s_arcs[j];
            const u128 b_from_a = b.start.bits - a.start.bits;  // mod 1
            const u128 a_from_b = a.start.bits - b.start.bits;
            const bool disjoint = b_from_a >= a.length_bits && a_from_b >= b.length_bits;
            REQUIRE(disjoint);
        }
    }
    const double slack = 10.0 * (2.0 + static_cast<double>(d.s_arcs.size())) / 100'000;
    CHECK(d.symdiff_vs_levelset <= slack);
}

TEST_CASE("construct_witness: constant function certifies everything") {
    const auto sys = RotationSystem::golden();
    const auto I = CircleArc::from_doubles(0.2, 0.5);
    const auto w = construct_witness(sys, MonotoneFunction::constant(1.0), 1.0, I, 0.05, 1e-3,
                                     1e-2, 1e-3, 1);
    CHECK(w.min_average_on_arc >= 0.5);
    CHECK(w.certified_measure == doctest::Approx(0.5).epsilon(1e-2));
    CHECK(w.r_k >= 1);
    CHECK(std::is_sorted(w.subsequence.begin(), w.subsequence.end()));
}

TEST_CASE("construct_witness: bounded function cannot reach lambda = 3") {
    const auto sys = RotationSystem::golden();
    CHECK_THROWS_AS(construct_witness(sys, MonotoneFunction::one_minus_x(), 3.0,
                                      CircleArc::full_circle(), 0.1, 1e-3, 1e-2, 1e-3, 1),
                    NoWitness);
}

TEST_CASE("construct_witness: sqrt singularity over the full circle") {
    const auto sys = RotationSystem::golden();
    const auto f = MonotoneFunction::inverse_power(0.5);
    WitnessOptions opts;
    opts.workers = 2;
    const auto w = construct_witness(sys, f, 2.0, CircleArc::full_circle(), 0.1, 1e-3, 1e-2,
                                     1e-3, 1, opts);
    CHECK(w.certified_measure >= 0.9);
    CHECK(w.min_average_on_arc >= 1.0);
    CHECK(w.subsequence.size() == static_cast<std::size_t>(2 * w.r_k));
    // distinct sorted times
    for (std::size_t i = 1; i < w.subsequence.size(); ++i)
        REQUIRE(w.subsequence[i] > w.subsequence[i - 1]);
}

TEST_CASE("construct_witness: re-verification at doubled sampling holds up") {
    const auto sys = RotationSystem::golden();
    const auto f = MonotoneFunction::inverse_power(0.5);
    const auto w =
        construct_witness(sys, f, 2.0, CircleArc::full_circle(), 0.1, 1e-3, 1e-2, 1e-3, 1);
    REQUIRE(w.certified_measure > 0.0);
    // sample the certified arc at twice the resolution
    const long long n2 = 2 * static_cast<long long>(std::ceil(1.0 / (w.beta / 2.0)));
    double min_avg = std::numeric_limits<double>::infinity();
    for (long long i = 0; i < n2; ++i) {
        const double frac = (static_cast<double>(i) + 0.5) / static_cast<double>(n2);
        const CirclePoint x =
            w.certified_arc.start +
            CirclePoint::from_double(frac * w.certified_arc.length());
        min_avg = std::min(min_avg, ergodic_average(sys, f, w.subsequence, x));
    }
    CHECK(min_avg >= 1.0 - 1e-9);
}

TEST_CASE("construct_witness: pinned subsequence length with parity trim") {
    const auto sys = RotationSystem::golden();
    const auto f = MonotoneFunction::inverse_power(0.5);
    WitnessOptions opts;
    opts.max_times = 7;
    const auto w = construct_witness(sys, f, 1.0, CircleArc::from_doubles(0.1, 0.4), 0.02, 1e-3,
                                     5.0, 1e-2, 1, opts);
    CHECK(w.subsequence.size() == 7);
    CHECK(w.r_k == 4);
}

TEST_CASE("construct_witness: target arc wrapping past zero") {
    // schedule arcs eventually wrap; the contract must hold regardless
    const auto sys = RotationSystem::golden();
    const auto f = MonotoneFunction::inverse_power(0.5);
    const auto I = CircleArc::from_doubles(0.9, 0.25);  // covers [0.9, 1) u [0, 0.15)
    WitnessOptions opts;
    opts.max_times = 60;
    const auto w = construct_witness(sys, f, 2.0, I, 0.02, 1e-3, 2.0, 0.005, 1, opts);
    CHECK(w.subsequence.size() == 60);
    CHECK(std::is_sorted(w.subsequence.begin(), w.subsequence.end()));
    if (w.certified_measure > 0.0) {
        CHECK(w.min_average_on_arc >= 1.0);
        CHECK(w.certified_measure <= I.length() + 1e-12);
        // certified arc sits inside I
        CHECK(I.contains(w.certified_arc.start));
        const CirclePoint last{w.certified_arc.start.bits + w.certified_arc.length_bits - 1};
        CHECK(I.contains(last));
    }
}

TEST_CASE("construct_witness: entry budget is enforced") {
    const auto sys = RotationSystem::golden();
    WitnessOptions opts;
    opts.n_max = 40;  // far too small for a 1e-3 target arc
    CHECK_THROWS_AS(construct_witness(sys, MonotoneFunction::inverse_power(0.5), 2.0,
                                      CircleArc::full_circle(), 0.1, 1e-3, 1e-2, 1e-3, 1, opts),
                    EntryTimeBudgetExceeded);
}

TEST_CASE("weak_phi_inequality_scan: vanishing function gives zero constants") {
    const auto sys = RotationSystem::golden();
    std::vector<std::vector<long long>> family = {prefix(5)};
    std::vector<double> grid = {1.0, 2.0};
    const auto scan = weak_phi_inequality_scan(sys, MonotoneFunction::zero(),
                                               OrliczFunction::power(1.0), family, grid, 2000);
    for (const auto& row : scan.rows) {
        CHECK(row.measure == 0.0);
        CHECK(row.empirical_c == 0.0);
    }
    CHECK(scan.max_c == 0.0);
}

TEST_CASE("weak_phi_inequality_scan: closed-form single-time row") {
    // T* = f for seq {0}; lambda = 4: measure = 1/16, integral of f/4 = 1/2
    const auto sys = RotationSystem::golden();
    std::vector<std::vector<long long>> family = {{0}};
    std::vector<double> grid = {4.0};
    const auto scan =
        weak_phi_inequality_scan(sys, MonotoneFunction::inverse_power(0.5),
                                 OrliczFunction::power(1.0), family, grid, 100'000);
    REQUIRE(scan.rows.size() == 1);
    CHECK(scan.rows[0].measure == doctest::Approx(1.0 / 16.0).epsilon(1e-3));
    CHECK(scan.rows[0].integral == doctest::Approx(0.5).epsilon(1e-4));
    CHECK(scan.rows[0].empirical_c == doctest::Approx(0.125).epsilon(2e-3));
}

TEST_CASE("weak_phi_inequality_scan: stable under grid refinement") {
    const auto sys = RotationSystem::golden();
    std::vector<std::vector<long long>> family = {prefix(10), prefix(100)};
    std::vector<double> grid = {1.5, 3.0, 6.0};
    const auto coarse = weak_phi_inequality_scan(sys, MonotoneFunction::inverse_power(0.5),
                                                 OrliczFunction::power(1.0), family, grid,
                                                 20'000);
    const auto fine = weak_phi_inequality_scan(sys, MonotoneFunction::inverse_power(0.5),
                                               OrliczFunction::power(1.0), family, grid,
                                               80'000);
    CHECK(std::isfinite(coarse.max_c));
    CHECK(coarse.max_c == doctest::Approx(fine.max_c).epsilon(0.05));
}
