#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace sphq {

// Thrown when an adaptive rule or node ladder fails to reach its tolerance.
// The message carries the offending interval and the local error estimate.
class numerical_error : public std::runtime_error {
public:
    explicit numerical_error(const std::string& what) : std::runtime_error(what) {}
};

namespace detail {

inline constexpr double pi = 3.14159265358979323846;

// (1 - p)^n without catastrophic cancellation for p near 0 and large n.
inline double pow_one_minus(double p, double n) {
    if (p <= 0.0) return 1.0;
    if (p >= 1.0) return 0.0;
    const double e = n * std::log1p(-p);
    return e < -745.0 ? 0.0 : std::exp(e);
}

inline double sqr(double x) { return x * x; }

} // namespace detail
} // namespace sphq
