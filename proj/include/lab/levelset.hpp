#pragma once

// Level sets B_lambda of finite-subsequence averages on the circle, their
// disjoint decomposition into rotated prefixes S_k, the quantity M_lambda,
// the weak bound |B_lambda| <= M_lambda, the finite witness construction,
// and an empirical weak-(Phi) inequality estimator.
//
// Level sets use a three-point cell rule on a uniform grid: a cell is inner
// when the midpoint and both endpoints clear the level, outer when any of
// the three does, giving an inner/outer sandwich of the true set.

#include <span>
#include <vector>

#include "lab/orlicz.hpp"
#include "lab/rotation.hpp"

namespace ergolab {

struct LevelSet {
    double lambda = 0.0;
    std::vector<CircleArc> arcs;  // maximal runs of outer cells
    double inner_measure = 0.0;
    double outer_measure = 0.0;
    long long grid_cells = 0;
};

// A_N on a shared circle grid: endpoint and midpoint values computed once,
// reused across levels lambda.
class AverageGrid {
public:
    AverageGrid(const RotationSystem& sys, const MonotoneFunction& f,
                std::span<const long long> seq, long long cells, int workers = 1);

    LevelSet level_set(double lambda) const;
    long long cells() const { return cells_; }
    double endpoint(long long i) const { return endpoints_[static_cast<std::size_t>(i % cells_)]; }
    double midpoint(long long i) const { return midpoints_[static_cast<std::size_t>(i)]; }
    CirclePoint cell_start(long long i) const;

private:
    long long cells_;
    std::vector<double> endpoints_;  // A_N at i/cells
    std::vector<double> midpoints_;  // A_N at (i + 1/2)/cells
};

LevelSet compute_level_set(const RotationSystem& sys, const MonotoneFunction& f,
                           std::span<const long long> seq, double lambda, long long grid_cells,
                           int workers = 1);

struct DecompositionResult {
    std::vector<double> a_values;   // a_k: sup of T^{n_k} y over grid points whose
                                    // orbit minimum is attained at index k
    std::vector<CircleArc> s_arcs;  // S_k = T^{-n_k}([0, a_k])
    double union_measure = 0.0;
    double symdiff_vs_levelset = 0.0;
    bool degenerate = false;  // B_lambda empty: all a_k = 0
};

DecompositionResult decompose_level_set(const RotationSystem& sys, const MonotoneFunction& f,
                                        std::span<const long long> seq, double lambda,
                                        long long grid_cells, int workers = 1);

// M_lambda = sup{ L : (1/L) integral_0^L f > lambda }.  Located by bisection
// of the nonincreasing prefix average over [tol, 1]; returns 1 when the
// average still exceeds lambda at L = 1, and 0 when it is already below at
// L = tol (empty-set convention).  Quadrature runs best-effort by default so
// slowly-resolving singular masses give a conservative (lower) value.
double m_lambda(const MonotoneFunction& f, double lambda, double tol = 1e-10,
                const IntegrationOptions& opts = {1e9, 20'000, true});

struct WeakBoundResult {
    double measure_outer = 0.0;
    double m_lambda_value = 0.0;
    double slack = 0.0;  // 2 * (N + arc count) / grid_cells
    bool holds = false;
};

WeakBoundResult verify_weak_bound(const RotationSystem& sys, const MonotoneFunction& f,
                                  std::span<const long long> seq, double lambda,
                                  long long grid_cells, int workers = 1);

struct WitnessOptions {
    long long n_max = 100'000'000;     // entry-time scan budget per search
    long long max_times = -1;          // trim the subsequence to exactly this many
                                       // times (-1: the natural 2 r_k)
    long long min_times = 2;           // lengthen the partition until 2 r_k >= this
    long long cert_samples = 0;        // certification sample count (0: |I| / (beta/2))
    long long cert_samples_cap = 250'000;
    int workers = 1;
};

struct WitnessResult {
    std::vector<long long> subsequence;  // sorted entry times
    long long r_k = 0;                   // partition size
    double epsilon = 0.0, eta = 0.0, beta = 0.0;
    CircleArc certified_arc;       // largest subarc with sampled average >= lambda/2
    double certified_measure = 0.0;
    double min_average_on_arc = 0.0;
};

// The partition-and-entry-time construction: split [epsilon, |I|] into r_k
// equal panels (r_k minimal with Riemann bracket within eta), route the
// right endpoint of I near each panel's right end and the epsilon-shifted
// left endpoint near each panel's left end, then certify the advertised
// average lambda/2 by sampling I at resolution beta_prox/2 and keeping the
// largest clean subarc.  Throws NoWitness when even the ideal average
// lambda/2 is out of reach, EntryTimeBudgetExceeded when a search passes
// n_max.
WitnessResult construct_witness(const RotationSystem& sys, const MonotoneFunction& f,
                                double lambda, const CircleArc& I, double delta, double epsilon,
                                double eta, double beta_prox, long long n_start,
                                const WitnessOptions& opts = {});

struct WeakScanRow {
    double lambda = 0.0;
    double measure = 0.0;        // outer measure of { T* f >= lambda }
    double integral = 0.0;       // integral of Phi(f / lambda)
    bool integral_resolved = false;
    double empirical_c = 0.0;    // measure / integral
};

struct WeakScanResult {
    std::vector<WeakScanRow> rows;
    double max_c = 0.0;
};

// T* approximated by the max over the finite family of averages.
WeakScanResult weak_phi_inequality_scan(const RotationSystem& sys, const MonotoneFunction& f,
                                        const OrliczFunction& phi,
                                        const std::vector<std::vector<long long>>& seq_family,
                                        std::span<const double> lambda_grid,
                                        long long grid_cells, int workers = 1);

}  // namespace ergolab
