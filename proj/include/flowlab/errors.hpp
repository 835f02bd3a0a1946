#ifndef FLOWLAB_ERRORS_HPP
#define FLOWLAB_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace flowlab {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// apply_iet called within tie tolerance of an interior discontinuity.
struct DiscontinuityHit : Error {
    double x;
    explicit DiscontinuityHit(double x_)
        : Error("point within tie tolerance of a discontinuity"), x(x_) {}
};

/// Rauzy induction tie: last-letter lengths coincide (Keane condition fails).
struct ConnectionDetected : Error {
    ConnectionDetected() : Error("saddle connection: last-letter lengths tie") {}
};

/// Flow orbit passes within the clearance tolerance of a rectangle corner.
struct SingularityHit : Error {
    double time;  // flow time at which the orbit became singular
    explicit SingularityHit(double t)
        : Error("orbit hits a singularity"), time(t) {}
};

struct ReduciblePermutation : Error {
    ReduciblePermutation() : Error("permutation is reducible") {}
};

struct InvalidSuspension : Error {
    explicit InvalidSuspension(const std::string& what_) : Error(what_) {}
};

struct NonFiniteInput : Error {
    NonFiniteInput() : Error("non-finite numeric input") {}
};

struct UnsupportedObservable : Error {
    explicit UnsupportedObservable(const std::string& what_) : Error(what_) {}
};

struct EmptyTimes : Error {
    EmptyTimes() : Error("empty renormalization time sequence") {}
};

struct DegenerateData : Error {
    explicit DegenerateData(const std::string& what_) : Error(what_) {}
};

struct QuadratureBudgetExceeded : Error {
    explicit QuadratureBudgetExceeded(const std::string& what_) : Error(what_) {}
};

struct ConfigInvalid : Error {
    explicit ConfigInvalid(const std::string& what_) : Error(what_) {}
};

struct IoFailure : Error {
    explicit IoFailure(const std::string& what_) : Error(what_) {}
};

}  // namespace flowlab

#endif
