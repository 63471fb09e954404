#pragma once

#include <complex>
#include <limits>
#include <stdexcept>
#include <string>

namespace qlab {

using cplx = std::complex<double>;

inline constexpr double PI = 3.14159265358979323846;
inline const cplx I_UNIT{0.0, 1.0};

/// Thrown when an iterative scheme fails to reach its tolerance.
struct NonConvergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Thrown when a contour family cannot satisfy its inclusion/exclusion constraints.
struct ContourInfeasibleError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw std::invalid_argument(msg);
}

// log(sin(pi z)) without overflow for large |Im z|.
inline cplx log_sin_pi(cplx z) {
    const double y = z.imag();
    // sin(pi z) = (e^{i pi z} - e^{-i pi z}) / (2i); keep the dominant branch.
    if (y > 18.0) {
        return cplx(0, 1) * PI * z * (-1.0) + std::log(cplx(0, 0.5)) + std::log(cplx(1.0) - std::exp(cplx(0, 2) * PI * z));
    }
    if (y < -18.0) {
        return cplx(0, 1) * PI * z + std::log(cplx(0, -0.5)) + std::log(cplx(1.0) - std::exp(cplx(0, -2) * PI * z));
    }
    return std::log(std::sin(PI * z));
}

/// Gamma(-s) Gamma(1+s) = pi / sin(-pi s), computed in log form.
inline cplx log_gamma_pair(cplx s) {
    return std::log(PI) - log_sin_pi(-s);
}

// Lanczos approximation (g = 7), ~1e-13 relative accuracy; reflection for Re z < 0.5.
cplx log_gamma(cplx z);

/// z^n for integer n (negative allowed), by squaring.
inline cplx pow_int(cplx z, long n) {
    if (n < 0) return 1.0 / pow_int(z, -n);
    cplx r = 1.0, b = z;
    unsigned long m = static_cast<unsigned long>(n);
    while (m) {
        if (m & 1UL) r *= b;
        b *= b;
        m >>= 1;
    }
    return r;
}

}  // namespace qlab
