#include "lab/levelset.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <unordered_set>

#include "lab/parallel.hpp"

namespace ergolab {

namespace {

double kahan_average(const std::vector<CirclePoint>& offsets, CirclePoint x,
                     const MonotoneFunction& f) {
    double sum = 0.0, comp = 0.0;
    for (const CirclePoint& o : offsets) {
        CirclePoint p = x + o;
        if (p.bits == 0) p.bits = static_cast<u128>(1) << 28;
        const double term = f(p.to_double());
        const double y = term - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    return sum / static_cast<double>(offsets.size());
}

std::vector<CirclePoint> offsets_of(const RotationSystem& sys, std::span<const long long> seq) {
    std::vector<CirclePoint> offsets;
    offsets.reserve(seq.size());
    for (long long n : seq)
        offsets.push_back(rotation_offset(sys, static_cast<unsigned long long>(n)));
    return offsets;
}

}  // namespace

AverageGrid::AverageGrid(const RotationSystem& sys, const MonotoneFunction& f,
                         std::span<const long long> seq, long long cells, int workers)
    : cells_(cells) {
    if (cells < 1000) throw LabError("AverageGrid: need at least 10^3 cells");
    if (seq.empty()) throw LabError("AverageGrid: empty sequence");
    const auto offsets = offsets_of(sys, seq);
    endpoints_.resize(static_cast<std::size_t>(cells));
    midpoints_.resize(static_cast<std::size_t>(cells));
    const auto c = static_cast<unsigned long long>(cells);
    parallel_for(static_cast<std::size_t>(cells), workers, [&](std::size_t i) {
        const auto ii = static_cast<unsigned long long>(i);
        endpoints_[i] = kahan_average(offsets, circle_fraction(ii, c), f);
        midpoints_[i] =
            kahan_average(offsets, circle_fraction(2 * ii + 1, 2 * c), f);
    });
}

CirclePoint AverageGrid::cell_start(long long i) const {
    return circle_fraction(static_cast<unsigned long long>(i),
                           static_cast<unsigned long long>(cells_));
}

LevelSet AverageGrid::level_set(double lambda) const {
    LevelSet out;
    out.lambda = lambda;
    out.grid_cells = cells_;
    const auto n = static_cast<std::size_t>(cells_);
    std::vector<char> outer(n), inner(n);
    long long inner_count = 0, outer_count = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const bool le = endpoints_[i] >= lambda;
        const bool re = endpoints_[(i + 1) % n] >= lambda;
        const bool mid = midpoints_[i] >= lambda;
        inner[i] = le && re && mid;
        outer[i] = le || re || mid;
        inner_count += inner[i];
        outer_count += outer[i];
    }
    out.inner_measure = static_cast<double>(inner_count) / static_cast<double>(cells_);
    out.outer_measure = static_cast<double>(outer_count) / static_cast<double>(cells_);

    if (outer_count == static_cast<long long>(n)) {
        out.arcs.push_back(CircleArc::full_circle());
        return out;
    }
    // maximal runs of outer cells, merged across the wrap at 0
    std::size_t first_gap = 0;
    while (outer[first_gap]) ++first_gap;
    std::size_t i = first_gap;
    do {
        while (i < first_gap + n && !outer[i % n]) ++i;
        if (i >= first_gap + n) break;
        const std::size_t run_start = i;
        while (i < first_gap + n && outer[i % n]) ++i;
        const std::size_t run_len = i - run_start;
        CircleArc arc;
        arc.start = cell_start(static_cast<long long>(run_start % n));
        arc.length_bits = circle_fraction(run_len, static_cast<unsigned long long>(cells_)).bits;
        out.arcs.push_back(arc);
    } while (i < first_gap + n);
    return out;
}

LevelSet compute_level_set(const RotationSystem& sys, const MonotoneFunction& f,
                           std::span<const long long> seq, double lambda, long long grid_cells,
                           int workers) {
    return AverageGrid(sys, f, seq, grid_cells, workers).level_set(lambda);
}

DecompositionResult decompose_level_set(const RotationSystem& sys, const MonotoneFunction& f,
                                        std::span<const long long> seq, double lambda,
                                        long long grid_cells, int workers) {
    if (grid_cells < 1000) throw LabError("decompose_level_set: need at least 10^3 cells");
    const std::size_t N = seq.size();
    const auto offsets = offsets_of(sys, seq);
    const auto cells = static_cast<std::size_t>(grid_cells);

    // per-cell membership (midpoint rule) and argmin bookkeeping
    std::vector<int> argmin(cells, -1);
    std::vector<CirclePoint> minpos(cells);
    std::vector<char> member(cells, 0);
    parallel_for(cells, workers, [&](std::size_t i) {
        const CirclePoint y = circle_fraction(2 * static_cast<unsigned long long>(i) + 1,
                                              2 * static_cast<unsigned long long>(grid_cells));
        double sum = 0.0, comp = 0.0;
        int k_min = -1;
        CirclePoint best;
        for (std::size_t k = 0; k < N; ++k) {
            CirclePoint p = y + offsets[k];
            if (p.bits == 0) p.bits = static_cast<u128>(1) << 28;
            if (k_min < 0 || p < best) {
                best = p;
                k_min = static_cast<int>(k);
            }
            const double term = f(p.to_double());
            const double yy = term - comp;
            const double t = sum + yy;
            comp = (t - sum) - yy;
            sum = t;
        }
        if (sum / static_cast<double>(N) >= lambda) {
            member[i] = 1;
            argmin[i] = k_min;
            minpos[i] = best;
        }
    });

    DecompositionResult out;
    out.a_values.assign(N, 0.0);
    std::vector<CirclePoint> a_points(N);
    std::vector<char> a_seen(N, 0);
    bool any = false;
    for (std::size_t i = 0; i < cells; ++i) {
        if (!member[i]) continue;
        any = true;
        const int k = argmin[i];
        if (!a_seen[k] || a_points[k] < minpos[i]) {
            a_points[k] = minpos[i];
            a_seen[k] = 1;
        }
    }
    out.degenerate = !any;

    for (std::size_t k = 0; k < N; ++k) {
        if (!a_seen[k]) continue;
        out.a_values[k] = a_points[k].to_double();
        CircleArc arc;
        arc.start = CirclePoint{0} - rotation_offset(sys, static_cast<unsigned long long>(seq[k]));
        arc.length_bits = a_points[k].bits;
        out.s_arcs.push_back(arc);
    }

    // union measure via sorted sweep (exact endpoints)
    std::vector<std::pair<u128, u128>> spans;  // (start, end) possibly wrapping
    for (const CircleArc& arc : out.s_arcs) {
        const u128 s = arc.start.bits;
        const u128 e = s + arc.length_bits;
        if (e >= s) {
            spans.emplace_back(s, e);
        } else {  // wraps
            spans.emplace_back(s, ~static_cast<u128>(0));
            spans.emplace_back(0, e);
        }
    }
    std::sort(spans.begin(), spans.end());
    double covered = 0.0;
    u128 cursor = 0;
    bool active = false;
    for (const auto& [s, e] : spans) {
        if (!active || s > cursor) {
            covered += CirclePoint{e - s}.to_double();
            cursor = e;
            active = true;
        } else if (e > cursor) {
            covered += CirclePoint{e - cursor}.to_double();
            cursor = e;
        }
    }
    out.union_measure = covered;

    // symmetric difference vs the midpoint-rule level set, on the same grid
    long long symdiff = 0;
    for (std::size_t i = 0; i < cells; ++i) {
        const CirclePoint y = circle_fraction(2 * static_cast<unsigned long long>(i) + 1,
                                              2 * static_cast<unsigned long long>(grid_cells));
        bool in_union = false;
        for (const CircleArc& arc : out.s_arcs) {
            if (arc.contains(y)) {
                in_union = true;
                break;
            }
        }
        if (in_union != static_cast<bool>(member[i])) ++symdiff;
    }
    out.symdiff_vs_levelset = static_cast<double>(symdiff) / static_cast<double>(grid_cells);
    return out;
}

double m_lambda(const MonotoneFunction& f, double lambda, double tol,
                const IntegrationOptions& opts) {
    if (!(lambda > 0.0)) throw LabError("m_lambda: lambda must be positive");
    const double lo = std::max(tol, 1e-12);
    auto avg = [&](double L) { return prefix_average(f, L, std::max(tol, 1e-9), opts); };
    if (avg(1.0) > lambda) return 1.0;
    if (avg(lo) <= lambda) return 0.0;
    return bisect_monotone(avg, lambda, lo, 1.0, tol);
}

WeakBoundResult verify_weak_bound(const RotationSystem& sys, const MonotoneFunction& f,
                                  std::span<const long long> seq, double lambda,
                                  long long grid_cells, int workers) {
    const LevelSet ls = compute_level_set(sys, f, seq, lambda, grid_cells, workers);
    WeakBoundResult out;
    out.measure_outer = ls.outer_measure;
    out.m_lambda_value = m_lambda(f, lambda, 1e-8);
    out.slack = 2.0 * static_cast<double>(seq.size() + ls.arcs.size()) /
                static_cast<double>(grid_cells);
    out.holds = out.measure_outer <= out.m_lambda_value + out.slack;
    return out;
}

namespace {

// entry-time search against a ladder of sorted orbit windows, grown on demand
class EntrySearcher {
public:
    EntrySearcher(const RotationSystem& sys, CirclePoint anchor, long long n_start,
                  std::size_t window, long long n_max)
        : sys_(sys), anchor_(anchor), n_start_(n_start), window_(window), n_max_(n_max) {}

    long long find(const CircleArc& arc, const std::unordered_set<long long>& used) {
        const auto accept = [&](long long n) { return n <= n_max_ && !used.count(n); };
        for (const auto& w : windows_) {
            if (auto hit = w->smallest_in_arc(arc, n_start_, accept)) return *hit;
        }
        while (next_begin() <= n_max_) {
            const auto count = static_cast<std::size_t>(
                std::min<long long>(static_cast<long long>(window_), n_max_ - next_begin() + 1));
            windows_.push_back(
                std::make_unique<OrbitWindowIndex>(sys_, anchor_, next_begin(), count));
            if (auto hit = windows_.back()->smallest_in_arc(arc, n_start_, accept)) return *hit;
        }
        throw EntryTimeBudgetExceeded("entry-time search passed n_max = " +
                                      std::to_string(n_max_));
    }

private:
    long long next_begin() const {
        return windows_.empty() ? n_start_ : windows_.back()->n_end();
    }
    const RotationSystem& sys_;
    CirclePoint anchor_;
    long long n_start_;
    std::size_t window_;
    long long n_max_;
    std::vector<std::unique_ptr<OrbitWindowIndex>> windows_;
};

}  // namespace

WitnessResult construct_witness(const RotationSystem& sys, const MonotoneFunction& f,
                                double lambda, const CircleArc& I, double delta, double epsilon,
                                double eta, double beta_prox, long long n_start,
                                const WitnessOptions& opts) {
    const double M = I.length();
    if (!(epsilon > 0.0) || epsilon >= M)
        throw LabError("construct_witness: need 0 < epsilon < |I|");
    if (!(eta > 0.0) || !(beta_prox > 0.0))
        throw LabError("construct_witness: eta and beta_prox must be positive");

    IntegrationOptions quad;
    quad.panel_budget = 20'000;
    quad.best_effort = true;
    if (lambda / 2.0 > prefix_average(f, M, 1e-6, quad) + eta)
        throw NoWitness("lambda/2 exceeds the reachable prefix average over |I|");

    const double f_eps = f(epsilon);
    const double f_M = f(M);
    long long r = static_cast<long long>(std::ceil((f_eps - f_M) * (M - epsilon) / eta));
    r = std::max<long long>(r, (opts.min_times + 1) / 2);
    if (opts.max_times > 0) r = (opts.max_times + 1) / 2;  // pinned subsequence length
    r = std::max<long long>(r, 1);
    const long long want = opts.max_times > 0 ? opts.max_times : 2 * r;

    const double w = (M - epsilon) / static_cast<double>(r);
    const double tw = std::min(beta_prox, w);
    const CirclePoint right = I.full ? I.start : I.end();
    const CirclePoint left_eps = I.start + CirclePoint::from_double(epsilon);
    const u128 tw_bits = std::max<u128>(CirclePoint::from_double(tw).bits, 1);

    const std::size_t window =
        static_cast<std::size_t>(std::clamp(6.0 / tw, 4096.0, 6.0e6));
    EntrySearcher search_right(sys, right, n_start, window, opts.n_max);
    EntrySearcher search_left(sys, left_eps, n_start, window, opts.n_max);

    std::unordered_set<long long> used;
    std::vector<long long> times;
    times.reserve(static_cast<std::size_t>(want));
    for (long long j = 1; j <= r && static_cast<long long>(times.size()) < want; ++j) {
        // right endpoint routed just below b_j, the right end of panel I_j
        CircleArc target;
        target.start = I.start + CirclePoint::from_double(M - (j - 1) * w) - CirclePoint{tw_bits};
        target.length_bits = tw_bits;
        const long long n = search_right.find(target, used);
        used.insert(n);
        times.push_back(n);
    }
    for (long long j = 1; j <= r && static_cast<long long>(times.size()) < want; ++j) {
        // epsilon-shifted left endpoint routed just above a_j, the left end of I_j
        CircleArc target;
        target.start = I.start + CirclePoint::from_double(M - j * w);
        target.length_bits = tw_bits;
        const long long n = search_left.find(target, used);
        used.insert(n);
        times.push_back(n);
    }
    std::sort(times.begin(), times.end());

    // certification by sampling I and keeping the largest clean run
    long long nsamples = opts.cert_samples > 0
                             ? opts.cert_samples
                             : static_cast<long long>(std::ceil(M / (beta_prox / 2.0)));
    nsamples = std::clamp<long long>(nsamples, 16, opts.cert_samples_cap);
    const auto offsets = offsets_of(sys, times);
    std::vector<double> averages(static_cast<std::size_t>(nsamples));
    parallel_for(static_cast<std::size_t>(nsamples), opts.workers, [&](std::size_t i) {
        const double frac = (static_cast<double>(i) + 0.5) / static_cast<double>(nsamples);
        const CirclePoint x = I.start + CirclePoint::from_double(frac * M);
        averages[i] = kahan_average(offsets, x, f);
    });

    const double threshold = lambda / 2.0;
    std::vector<char> good(averages.size());
    for (std::size_t i = 0; i < averages.size(); ++i) good[i] = averages[i] >= threshold;

    // largest run; on the full circle runs may wrap
    const std::size_t n = good.size();
    std::size_t best_start = 0, best_len = 0, cur_start = 0, cur_len = 0;
    const std::size_t limit = I.full ? 2 * n : n;
    for (std::size_t i = 0; i < limit; ++i) {
        if (good[i % n]) {
            if (cur_len == 0) cur_start = i;
            if (++cur_len > best_len) {
                best_len = cur_len;
                best_start = cur_start;
            }
        } else {
            cur_len = 0;
        }
    }
    best_len = std::min(best_len, n);

    WitnessResult out;
    out.subsequence = std::move(times);
    out.r_k = r;
    out.epsilon = epsilon;
    out.eta = eta;
    out.beta = beta_prox;
    if (best_len > 0) {
        const double cell = M / static_cast<double>(n);
        const double start_frac = static_cast<double>(best_start % n) * cell;
        out.certified_arc.start = I.start + CirclePoint::from_double(start_frac);
        out.certified_arc.length_bits =
            CirclePoint::from_double(static_cast<double>(best_len) * cell).bits;
        if (best_len == n && I.full) out.certified_arc = CircleArc::full_circle();
        out.certified_measure = static_cast<double>(best_len) * cell;
        double min_avg = averages[best_start % n];
        for (std::size_t i = 0; i < best_len; ++i)
            min_avg = std::min(min_avg, averages[(best_start + i) % n]);
        out.min_average_on_arc = min_avg;
    }
    (void)delta;  // recorded by callers; the certification itself is empirical
    return out;
}

WeakScanResult weak_phi_inequality_scan(const RotationSystem& sys, const MonotoneFunction& f,
                                        const OrliczFunction& phi,
                                        const std::vector<std::vector<long long>>& seq_family,
                                        std::span<const double> lambda_grid,
                                        long long grid_cells, int workers) {
    if (seq_family.empty()) throw LabError("weak scan: empty sequence family");
    const auto cells = static_cast<std::size_t>(grid_cells);
    std::vector<double> endpoint_max(cells, 0.0), midpoint_max(cells, 0.0);
    for (const auto& seq : seq_family) {
        AverageGrid grid(sys, f, seq, grid_cells, workers);
        for (std::size_t i = 0; i < cells; ++i) {
            endpoint_max[i] = std::max(endpoint_max[i], grid.endpoint(static_cast<long long>(i)));
            midpoint_max[i] = std::max(midpoint_max[i], grid.midpoint(static_cast<long long>(i)));
        }
    }

    WeakScanResult out;
    IntegrationOptions quad;
    quad.panel_budget = 100'000;
    quad.best_effort = true;
    for (double lambda : lambda_grid) {
        WeakScanRow row;
        row.lambda = lambda;
        long long outer = 0;
        for (std::size_t i = 0; i < cells; ++i) {
            const bool any = endpoint_max[i] >= lambda || midpoint_max[i] >= lambda ||
                             endpoint_max[(i + 1) % cells] >= lambda;
            outer += any;
        }
        row.measure = static_cast<double>(outer) / static_cast<double>(grid_cells);
        const IntegralEstimate est =
            integrate_monotone(compose_phi(phi, f, lambda), 0.0, 1.0, 1e-8, quad);
        row.integral = est.value;
        row.integral_resolved = est.converged;
        row.empirical_c = row.integral > 0.0 ? row.measure / row.integral
                                             : (row.measure > 0.0
                                                    ? std::numeric_limits<double>::infinity()
                                                    : 0.0);
        out.max_c = std::max(out.max_c, row.empirical_c);
        out.rows.push_back(row);
    }
    return out;
}

}  // namespace ergolab
