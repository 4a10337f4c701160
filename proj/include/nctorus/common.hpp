#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace nctorus {

using cplx = std::complex<double>;

inline constexpr double PI = 3.141592653589793238462643383279502884;
inline constexpr double TWO_PI = 2.0 * PI;

// e(t) = exp(2*pi*i*t), defined for complex t.
inline cplx e2pi(cplx t) { return std::exp(cplx(0.0, TWO_PI) * t); }
inline cplx e2pi(double t) { return std::polar(1.0, TWO_PI * t); }

struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

#define NCTORUS_ERROR_TYPE(NAME)                                   \
    struct NAME : Error {                                          \
        explicit NAME(const std::string& msg) : Error(#NAME ": " + msg) {} \
    }

NCTORUS_ERROR_TYPE(ZeroRank);
NCTORUS_ERROR_TYPE(DegenerateDegree);
NCTORUS_ERROR_TYPE(ConvergenceError);
NCTORUS_ERROR_TYPE(DomainError);
NCTORUS_ERROR_TYPE(NonIntegrable);
NCTORUS_ERROR_TYPE(ShapeMismatch);
NCTORUS_ERROR_TYPE(IndeterminateRank);
NCTORUS_ERROR_TYPE(LatticeBoundary);
NCTORUS_ERROR_TYPE(ZeroRankTarget);
NCTORUS_ERROR_TYPE(InternalInvariantViolation);
NCTORUS_ERROR_TYPE(ConfigError);
NCTORUS_ERROR_TYPE(IOError);

#undef NCTORUS_ERROR_TYPE

// Overflow-checked 64-bit arithmetic; matrix entries stay exact or we refuse.
inline std::int64_t checked_mul(std::int64_t x, std::int64_t y) {
    std::int64_t r;
    if (__builtin_mul_overflow(x, y, &r))
        throw DomainError("integer overflow in multiplication");
    return r;
}

inline std::int64_t checked_add(std::int64_t x, std::int64_t y) {
    std::int64_t r;
    if (__builtin_add_overflow(x, y, &r))
        throw DomainError("integer overflow in addition");
    return r;
}

inline std::int64_t checked_neg(std::int64_t x) {
    if (x == INT64_MIN) throw DomainError("integer overflow in negation");
    return -x;
}

// Euclidean remainder in [0, |m|).
inline std::int64_t floor_mod(std::int64_t n, std::int64_t m) {
    if (m == 0) throw DomainError("floor_mod: zero modulus");
    std::int64_t am = m < 0 ? -m : m;
    std::int64_t r = n % am;
    return r < 0 ? r + am : r;
}

inline std::int64_t gcd_i64(std::int64_t a, std::int64_t b) {
    a = a < 0 ? -a : a;
    b = b < 0 ? -b : b;
    while (b != 0) {
        std::int64_t t = a % b;
        a = b;
        b = t;
    }
    return a;
}

// g = gcd(a,b) together with x,y such that a*x + b*y = g.
struct Bezout {
    std::int64_t g, x, y;
};

inline Bezout ext_gcd(std::int64_t a, std::int64_t b) {
    std::int64_t old_r = a, r = b;
    std::int64_t old_s = 1, s = 0;
    std::int64_t old_t = 0, t = 1;
    while (r != 0) {
        std::int64_t q = old_r / r;
        std::int64_t tmp = old_r - q * r; old_r = r; r = tmp;
        tmp = old_s - q * s; old_s = s; s = tmp;
        tmp = old_t - q * t; old_t = t; t = tmp;
    }
    if (old_r < 0) { old_r = -old_r; old_s = -old_s; old_t = -old_t; }
    return {old_r, old_s, old_t};
}

}  // namespace nctorus
