#include "lab/rotation.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>

namespace ergolab {

namespace {

constexpr std::uint64_t kGoldenHi = 0x9e3779b97f4a7c15ull;
constexpr std::uint64_t kGoldenLo = 0xf39cc0605cedc834ull;
constexpr std::uint64_t kSqrt2Hi = 0x6a09e667f3bcc908ull;
constexpr std::uint64_t kSqrt2Lo = 0xb2fb1366ea957d3eull;

u128 make_u128(std::uint64_t hi, std::uint64_t lo) {
    return (static_cast<u128>(hi) << 64) | lo;
}

// floor(r * 2^128 / q) with optional round-to-nearest, r < q
u128 fraction_bits(std::uint64_t r, std::uint64_t q, bool round_nearest) {
    const u128 top = static_cast<u128>(r) << 64;
    const u128 q1 = top / q;
    const u128 r1 = top % q;
    const u128 mid = r1 << 64;
    const u128 q2 = mid / q;
    const u128 r2 = mid % q;
    u128 bits = (q1 << 64) | static_cast<std::uint64_t>(q2);
    if (round_nearest && 2 * r2 >= q) bits += 1;
    return bits;
}

}  // namespace

double CirclePoint::to_double() const {
    const double hi = static_cast<double>(static_cast<std::uint64_t>(bits >> 64));
    const double lo = static_cast<double>(static_cast<std::uint64_t>(bits));
    return hi * 0x1p-64 + lo * 0x1p-128;
}

CirclePoint CirclePoint::from_double(double x) {
    x -= std::floor(x);
    if (x >= 1.0) x = 0.0;
    const double scaled = x * 0x1p64;
    std::uint64_t hi = static_cast<std::uint64_t>(scaled);
    double rem = scaled - static_cast<double>(hi);
    double lo_d = rem * 0x1p64;
    std::uint64_t lo = static_cast<std::uint64_t>(lo_d);
    // round the residue
    if (lo_d - static_cast<double>(lo) >= 0.5) {
        if (++lo == 0) ++hi;  // carry into the high limb (wraps mod 1 at the top)
    }
    return {make_u128(hi, lo)};
}

std::string CirclePoint::to_hex() const {
    static const char* digits = "0123456789abcdef";
    std::string out(32, '0');
    u128 v = bits;
    for (int i = 31; i >= 0; --i) {
        out[i] = digits[static_cast<unsigned>(v & 0xf)];
        v >>= 4;
    }
    return out;
}

CirclePoint CirclePoint::from_hex(std::string_view s) {
    if (s.empty() || s.size() > 32) throw LabError("bits literal must be 1..32 hex digits");
    u128 v = 0;
    for (char c : s) {
        unsigned d;
        if (c >= '0' && c <= '9') d = c - '0';
        else if (c >= 'a' && c <= 'f') d = 10 + (c - 'a');
        else if (c >= 'A' && c <= 'F') d = 10 + (c - 'A');
        else throw LabError(std::string("bad hex digit '") + c + "'");
        v = (v << 4) | d;
    }
    // short literals are left-aligned: "8" means 0.5
    v <<= 4 * (32 - s.size());
    return {v};
}

std::string CirclePoint::to_decimal(int digits) const {
    std::string out = "0.";
    out.reserve(2 + digits);
    std::uint64_t hi = static_cast<std::uint64_t>(bits >> 64);
    std::uint64_t lo = static_cast<std::uint64_t>(bits);
    for (int i = 0; i < digits; ++i) {
        // multiply the 128-bit fraction by 10, digit is the overflow
        const u128 lo10 = static_cast<u128>(lo) * 10;
        const u128 hi10 = static_cast<u128>(hi) * 10 + static_cast<std::uint64_t>(lo10 >> 64);
        out.push_back(static_cast<char>('0' + static_cast<unsigned>(hi10 >> 64)));
        hi = static_cast<std::uint64_t>(hi10);
        lo = static_cast<std::uint64_t>(lo10);
    }
    return out;
}

CirclePoint CirclePoint::from_decimal(std::string_view s) {
    std::string_view digits = s;
    if (digits.substr(0, 2) == "0.") digits.remove_prefix(2);
    else if (digits.substr(0, 1) == ".") digits.remove_prefix(1);
    if (digits.empty()) return {0};
    // Horner from the least significant digit: bits = (bits + d * 2^128) / 10
    u128 bits = 0;
    for (auto it = digits.rbegin(); it != digits.rend(); ++it) {
        const char c = *it;
        if (c < '0' || c > '9') throw LabError("bad decimal digit in circle point");
        const std::uint64_t d = static_cast<std::uint64_t>(c - '0');
        // numerator = d * 2^128 + bits, 3 limbs; divide by 10
        std::uint64_t limbs[3] = {static_cast<std::uint64_t>(bits),
                                  static_cast<std::uint64_t>(bits >> 64), d};
        u128 rem = 0;
        std::uint64_t q[3];
        for (int i = 2; i >= 0; --i) {
            const u128 cur = (rem << 64) | limbs[i];
            q[i] = static_cast<std::uint64_t>(cur / 10);
            rem = cur % 10;
        }
        bits = make_u128(q[1], q[0]);
        if (rem >= 5) bits += 1;  // round the final shift
    }
    return {bits};
}

RotationSystem RotationSystem::golden() {
    RotationSystem s;
    s.alpha = {make_u128(kGoldenHi, kGoldenLo)};
    s.kind = AlphaKind::Golden;
    return s;
}

RotationSystem RotationSystem::sqrt_two() {
    RotationSystem s;
    s.alpha = {make_u128(kSqrt2Hi, kSqrt2Lo)};
    s.kind = AlphaKind::SqrtTwo;
    return s;
}

RotationSystem RotationSystem::rational(long long p, long long q) {
    if (q <= 0 || p < 0) throw LabError("rational alpha needs p >= 0, q > 0");
    const long long g = std::gcd(p, q);
    p /= g;
    q /= g;
    p %= q;
    RotationSystem s;
    s.alpha = {fraction_bits(static_cast<std::uint64_t>(p), static_cast<std::uint64_t>(q), true)};
    s.kind = AlphaKind::Rational;
    s.num = p;
    s.den = q;
    return s;
}

RotationSystem RotationSystem::from_bits(CirclePoint a) {
    RotationSystem s;
    s.alpha = a;
    s.kind = AlphaKind::ExplicitBits;
    return s;
}

RotationSystem RotationSystem::parse(std::string_view d) {
    if (d == "golden") return golden();
    if (d == "sqrt2") return sqrt_two();
    if (d.substr(0, 9) == "rational:") {
        const auto rest = d.substr(9);
        const auto slash = rest.find('/');
        if (slash == std::string_view::npos) throw LabError("rational alpha: want rational:p/q");
        long long p = 0, q = 0;
        auto r1 = std::from_chars(rest.data(), rest.data() + slash, p);
        auto r2 = std::from_chars(rest.data() + slash + 1, rest.data() + rest.size(), q);
        if (r1.ec != std::errc{} || r2.ec != std::errc{} ||
            r2.ptr != rest.data() + rest.size())
            throw LabError("rational alpha: bad p/q");
        return rational(p, q);
    }
    if (d.substr(0, 5) == "bits:") return from_bits(CirclePoint::from_hex(d.substr(5)));
    throw LabError("unknown alpha descriptor: " + std::string(d));
}

std::string RotationSystem::descriptor() const {
    switch (kind) {
        case AlphaKind::Golden: return "golden";
        case AlphaKind::SqrtTwo: return "sqrt2";
        case AlphaKind::Rational:
            return "rational:" + std::to_string(num) + "/" + std::to_string(den);
        case AlphaKind::ExplicitBits: return "bits:" + alpha.to_hex();
    }
    return "?";
}

double CircleArc::length() const {
    if (full) return 1.0;
    return CirclePoint{length_bits}.to_double();
}

CircleArc CircleArc::full_circle() {
    CircleArc a;
    a.full = true;
    return a;
}

CircleArc CircleArc::from_doubles(double start, double length) {
    CircleArc a;
    if (length >= 1.0) return full_circle();
    a.start = CirclePoint::from_double(start);
    a.length_bits = CirclePoint::from_double(std::max(0.0, length)).bits;
    return a;
}

CircleArc CircleArc::between(CirclePoint a, CirclePoint b) {
    CircleArc arc;
    arc.start = a;
    arc.length_bits = b.bits - a.bits;
    return arc;
}

CirclePoint rotation_offset(const RotationSystem& sys, unsigned long long n) {
    // u128 multiplication wraps mod 2^128, which is exactly mod 1
    return {static_cast<u128>(n) * sys.alpha.bits};
}

CirclePoint circle_fraction(unsigned long long num, unsigned long long den) {
    if (den == 0) throw LabError("circle_fraction: zero denominator");
    num %= den;
    return {fraction_bits(num, den, true)};
}

CirclePoint orbit_point(const RotationSystem& sys, CirclePoint x, unsigned long long n) {
    return x + rotation_offset(sys, n);
}

double eval_on_circle(const MonotoneFunction& f, CirclePoint x, DodgeLog* log) {
    if (x.bits == 0) {
        if (log) ++log->count;
        x.bits = static_cast<u128>(1) << 28;  // 2^-100
    }
    return f(x.to_double());
}

double ergodic_average(const RotationSystem& sys, const MonotoneFunction& f,
                       std::span<const long long> seq, CirclePoint x, DodgeLog* log) {
    if (seq.empty()) throw LabError("ergodic_average: empty sequence");
    double sum = 0.0, comp = 0.0;  // Kahan
    for (long long n : seq) {
        const double term =
            eval_on_circle(f, orbit_point(sys, x, static_cast<unsigned long long>(n)), log);
        const double y = term - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    return sum / static_cast<double>(seq.size());
}

std::optional<long long> first_entry_time(const RotationSystem& sys, CirclePoint x,
                                          const CircleArc& arc, long long n_min,
                                          long long n_max) {
    if (n_min > n_max) throw LabError("first_entry_time: n_min > n_max");
    if (arc.full) return n_min;
    CirclePoint pos = orbit_point(sys, x, static_cast<unsigned long long>(n_min));
    for (long long n = n_min; n <= n_max; ++n) {
        if (arc.contains(pos)) return n;
        pos = pos + sys.alpha;
    }
    return std::nullopt;
}

double interval_visit_fraction(const RotationSystem& sys, CirclePoint x,
                               const CircleArc& arc, long long N) {
    if (N < 1) throw LabError("interval_visit_fraction: N >= 1");
    if (arc.full) return 1.0;
    long long hits = 0;
    CirclePoint pos = x;
    for (long long n = 0; n < N; ++n) {
        if (arc.contains(pos)) ++hits;
        pos = pos + sys.alpha;
    }
    return static_cast<double>(hits) / static_cast<double>(N);
}

OrbitWindowIndex::OrbitWindowIndex(const RotationSystem& sys, CirclePoint anchor,
                                   long long n_begin, std::size_t count)
    : sys_(&sys), anchor_(anchor), n_begin_(n_begin), count_(count) {
    entries_.resize(count);
    CirclePoint pos = orbit_point(sys, anchor, static_cast<unsigned long long>(n_begin));
    for (std::size_t i = 0; i < count; ++i) {
        entries_[i] = {static_cast<std::uint64_t>(pos.bits >> 64),
                       n_begin + static_cast<long long>(i)};
        pos = pos + sys.alpha;
    }
    std::sort(entries_.begin(), entries_.end(),
              [](const Entry& a, const Entry& b) { return a.pos_hi < b.pos_hi; });
}

std::optional<long long> OrbitWindowIndex::scan_range(
    std::uint64_t lo_hi, std::uint64_t hi_hi, const CircleArc& arc, long long n_min,
    const std::function<bool(long long)>& accept) const {
    // candidates live in pos_hi range [lo_hi-1, hi_hi] (truncation slop);
    // each one is verified with exact fixed-point membership
    const std::uint64_t from = lo_hi == 0 ? 0 : lo_hi - 1;
    auto it = std::lower_bound(entries_.begin(), entries_.end(), from,
                               [](const Entry& e, std::uint64_t v) { return e.pos_hi < v; });
    std::optional<long long> best;
    for (; it != entries_.end() && it->pos_hi <= hi_hi; ++it) {
        const long long n = it->n;
        if (n < n_min || (best && n >= *best)) continue;
        if (!arc.contains(orbit_point(*sys_, anchor_, static_cast<unsigned long long>(n))))
            continue;
        if (!accept(n)) continue;
        best = n;
    }
    return best;
}

}  // namespace ergolab
