#pragma once

#include <stdexcept>
#include <string>

namespace ergolab {

// Base for all error conditions raised by the library.
struct LabError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Partial lower Riemann sums exceeded the divergence cap, or the dyadic
// frontier masses stopped decaying (which makes any cap unreachable only
// in time, not in fact).
struct NonIntegrableDetected : LabError {
    double partial_lower;
    explicit NonIntegrableDetected(double lower)
        : LabError("integral diverges: partial lower bound " + std::to_string(lower)),
          partial_lower(lower) {}
};

// Subdivision budget exhausted before the bracket reached the tolerance.
// Carries the best bracket obtained so far.
struct ToleranceNotReached : LabError {
    double lower, upper;
    ToleranceNotReached(double lo, double hi)
        : LabError("tolerance not reached: bracket [" + std::to_string(lo) + ", " +
                   std::to_string(hi) + "]"),
          lower(lo), upper(hi) {}
};

struct NotMonotoneDetected : LabError {
    using LabError::LabError;
};

struct NormInfinite : LabError {
    using LabError::LabError;
};

struct EmptyPrefix : LabError {
    using LabError::LabError;
};

struct NoWitness : LabError {
    using LabError::LabError;
};

struct EntryTimeBudgetExceeded : LabError {
    using LabError::LabError;
};

struct StageFailed : LabError {
    int stage;
    StageFailed(int k, const std::string& why)
        : LabError("stage " + std::to_string(k) + " failed: " + why), stage(k) {}
};

struct ScheduleExhausted : LabError {
    int stage;
    ScheduleExhausted(int k, const std::string& why)
        : LabError("stage " + std::to_string(k) + ": " + why), stage(k) {}
};

struct ScheduleDegenerate : LabError {
    using LabError::LabError;
};

struct NoValidEps : LabError {
    using LabError::LabError;
};

struct OverflowDetected : LabError {
    using LabError::LabError;
};

}  // namespace ergolab
