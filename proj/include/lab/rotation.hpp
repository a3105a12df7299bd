#pragma once

// Circle rotation T(x) = x + alpha mod 1 with exact fixed-point arithmetic.
// Points carry exactly 128 fractional bits, so n*alpha mod 1 is trustworthy
// for n up to ~2^60 with wide margin; doubles appear only at the evaluation
// boundary.  Irrational presets are 128-bit truncations (period ~2^128,
// irrelevant at this scale).

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lab/numerics.hpp"

namespace ergolab {

using u128 = unsigned __int128;

struct CirclePoint {
    u128 bits = 0;  // value = bits / 2^128 in [0,1); arithmetic wraps mod 1

    friend bool operator==(const CirclePoint&, const CirclePoint&) = default;
    friend bool operator<(const CirclePoint& a, const CirclePoint& b) { return a.bits < b.bits; }

    CirclePoint operator+(CirclePoint o) const { return {bits + o.bits}; }
    CirclePoint operator-(CirclePoint o) const { return {bits - o.bits}; }

    double to_double() const;
    std::string to_hex() const;                       // 32 hex digits
    std::string to_decimal(int digits = 40) const;    // "0.ddd...", exact truncation
    static CirclePoint from_double(double x);         // nearest representable
    static CirclePoint from_hex(std::string_view);
    static CirclePoint from_decimal(std::string_view);
};

enum class AlphaKind { Golden, SqrtTwo, Rational, ExplicitBits };

struct RotationSystem {
    CirclePoint alpha;
    AlphaKind kind = AlphaKind::ExplicitBits;
    long long num = 0, den = 1;  // Rational descriptor only

    static RotationSystem golden();    // (sqrt(5)-1)/2 truncated to 128 bits
    static RotationSystem sqrt_two();  // sqrt(2)-1 truncated to 128 bits
    static RotationSystem rational(long long p, long long q);
    static RotationSystem from_bits(CirclePoint a);

    // "golden" | "sqrt2" | "rational:p/q" | "bits:<32 hex digits>"
    static RotationSystem parse(std::string_view descriptor);
    std::string descriptor() const;
};

// Half-open arc [start, start + length) on the circle; membership is exact.
struct CircleArc {
    CirclePoint start;
    u128 length_bits = 0;
    bool full = false;  // the whole circle (length 1 does not fit in 128 bits)

    bool contains(CirclePoint x) const {
        return full || (x.bits - start.bits) < length_bits;
    }
    double length() const;
    CirclePoint end() const { return {start.bits + length_bits}; }

    static CircleArc full_circle();
    static CircleArc from_doubles(double start, double length);
    static CircleArc between(CirclePoint a, CirclePoint b);  // [a, b)
};

// x + n*alpha, exact (full-width multiply, fraction retained).
CirclePoint orbit_point(const RotationSystem& sys, CirclePoint x, unsigned long long n);
CirclePoint rotation_offset(const RotationSystem& sys, unsigned long long n);  // n*alpha mod 1

// num/den as a circle point, rounded to nearest representable (exact for
// den dividing 2^128).
CirclePoint circle_fraction(unsigned long long num, unsigned long long den);

// Evaluation of f at a circle point; a point landing exactly on the
// singularity at 0 is nudged by 2^-100 and counted.
struct DodgeLog {
    long long count = 0;
};
double eval_on_circle(const MonotoneFunction& f, CirclePoint x, DodgeLog* log = nullptr);

// (1/N) sum f(T^{n_k} x) over the given strictly increasing times.
double ergodic_average(const RotationSystem& sys, const MonotoneFunction& f,
                       std::span<const long long> seq, CirclePoint x,
                       DodgeLog* log = nullptr);

// Smallest n in [n_min, n_max] with T^n x in the arc; linear scan, exact
// membership.  nullopt when the orbit misses the arc on that range.
std::optional<long long> first_entry_time(const RotationSystem& sys, CirclePoint x,
                                          const CircleArc& arc, long long n_min,
                                          long long n_max);

// Fraction of n in [0, N) with T^n x in the arc.
double interval_visit_fraction(const RotationSystem& sys, CirclePoint x,
                               const CircleArc& arc, long long N);

// Orbit positions for n in [n_begin, n_begin + count), sorted by position.
// Entry-time queries against many narrow arcs become range lookups instead
// of repeated linear scans; results agree exactly with first_entry_time.
class OrbitWindowIndex {
public:
    OrbitWindowIndex(const RotationSystem& sys, CirclePoint anchor, long long n_begin,
                     std::size_t count);

    long long n_begin() const { return n_begin_; }
    long long n_end() const { return n_begin_ + static_cast<long long>(count_); }

    // smallest n in the window with anchor + n*alpha in the arc, n >= n_min,
    // and accept(n) true; nullopt if none.
    template <class Accept>
    std::optional<long long> smallest_in_arc(const CircleArc& arc, long long n_min,
                                             Accept&& accept) const;

private:
    struct Entry {
        std::uint64_t pos_hi;  // top 64 bits of the position
        long long n;
    };
    const RotationSystem* sys_;
    CirclePoint anchor_;
    long long n_begin_;
    std::size_t count_;
    std::vector<Entry> entries_;

    std::optional<long long> scan_range(std::uint64_t lo_hi, std::uint64_t hi_hi,
                                        const CircleArc& arc, long long n_min,
                                        const std::function<bool(long long)>& accept) const;
};

template <class Accept>
std::optional<long long> OrbitWindowIndex::smallest_in_arc(const CircleArc& arc,
                                                           long long n_min,
                                                           Accept&& accept) const {
    std::function<bool(long long)> fn = std::forward<Accept>(accept);
    const std::uint64_t lo = static_cast<std::uint64_t>(arc.start.bits >> 64);
    const std::uint64_t hi = static_cast<std::uint64_t>((arc.start.bits + arc.length_bits) >> 64);
    if (arc.full) return scan_range(0, ~0ull, arc, n_min, fn);
    if (lo <= hi && arc.start.bits + arc.length_bits >= arc.start.bits) {
        return scan_range(lo, hi, arc, n_min, fn);
    }
    // arc wraps around 0
    auto a = scan_range(lo, ~0ull, arc, n_min, fn);
    auto b = scan_range(0, hi, arc, n_min, fn);
    if (a && b) return std::min(*a, *b);
    return a ? a : b;
}

}  // namespace ergolab
