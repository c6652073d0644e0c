#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "cse/error.hpp"

namespace cse::numkit {

using cplx = std::complex<double>;

namespace detail {

// exp(-z^2) with an explicit overflow check.
inline cplx exp_minus_sq(cplx z) {
    const cplx e = -z * z;
    if (e.real() > 709.0) throw NumericalError("exp(-z^2) overflows for the requested argument");
    return std::exp(e);
}

// Faddeeva function for Im z >= 0 by the trapezoidal rule applied to
// (i/pi) int exp(-t^2)/(z - t) dt with step h, plus the residue
// correction from the pole. The grid is shifted by h/2 when Re z sits
// close to a node. Truncation error is of order exp(-pi^2/h^2).
inline cplx faddeeva_upper(cplx z) {
    constexpr double h = 0.5;
    constexpr int nmax = 14;  // exp(-(nmax h)^2) < 1e-21
    const double x = z.real();
    const double y = z.imag();
    const double frac = x / h - std::floor(x / h);
    const bool shifted = !(frac >= 0.25 && frac <= 0.75);
    const double offset = shifted ? 0.5 : 0.0;

    cplx sum = 0.0;
    for (int n = -nmax - 1; n <= nmax + 1; ++n) {
        const double t = (n + offset) * h;
        sum += std::exp(-t * t) / (z - t);
    }
    sum *= cplx(0.0, h / std::numbers::pi);

    constexpr double pole_limit = std::numbers::pi / h;
    if (y < pole_limit) {
        const cplx e = std::exp(cplx(0.0, -2.0 * std::numbers::pi / h) * z);
        const cplx ez2 = std::exp(-z * z);
        sum += shifted ? 2.0 * ez2 / (1.0 + e) : 2.0 * ez2 / (1.0 - e);
    }
    return sum;
}

inline cplx erf_series(cplx z) {
    // 2/sqrt(pi) sum (-1)^k z^(2k+1) / (k! (2k+1)), used for |z| < 0.5
    const cplx z2 = z * z;
    cplx term = z;
    cplx sum = z;
    for (int k = 1; k < 40; ++k) {
        term *= -z2 / static_cast<double>(k);
        const cplx add = term / (2.0 * k + 1.0);
        sum += add;
        if (std::abs(add) < 1e-17 * std::abs(sum)) break;
    }
    return sum * (2.0 / std::sqrt(std::numbers::pi));
}

}  // namespace detail

/// Faddeeva function w(z) = exp(-z^2) erfc(-iz). Relative accuracy is
/// about 1e-15 in the closed upper half plane; the lower half plane uses
/// w(z) = 2 exp(-z^2) - w(-z) and overflows once Im(z)^2 - Re(z)^2 > 709.
[[nodiscard]] inline cplx faddeeva_w(cplx z) {
    if (z.imag() >= 0.0) return detail::faddeeva_upper(z);
    return 2.0 * detail::exp_minus_sq(z) - detail::faddeeva_upper(-z);
}

[[nodiscard]] inline cplx erfc(cplx z) {
    if (z.real() >= 0.0) {
        const cplx e = -z * z;
        if (e.real() < -745.0) return 0.0;
        return std::exp(e) * detail::faddeeva_upper(cplx(-z.imag(), z.real()));
    }
    return 2.0 - erfc(-z);
}

[[nodiscard]] inline cplx erf(cplx z) {
    if (std::abs(z) < 0.5) return detail::erf_series(z);
    if (z.real() < 0.0) return -erf(-z);
    const cplx e = -z * z;
    if (e.real() > 709.0) throw NumericalError("erf: argument outside the representable range");
    if (e.real() < -745.0) return 1.0;
    return 1.0 - std::exp(e) * detail::faddeeva_upper(cplx(-z.imag(), z.real()));
}

/// Imaginary error function erfi(z) = -i erf(iz). Overflows (NumericalError)
/// once Re(z)^2 - Im(z)^2 exceeds 709.
[[nodiscard]] inline cplx erfi(cplx z) {
    const cplx r = erf(cplx(-z.imag(), z.real()));
    return cplx(r.imag(), -r.real());
}

struct ErrorFunctions {
    cplx erf;
    cplx erfc;
    cplx erfi;
};

[[nodiscard]] inline ErrorFunctions faddeeva_related(cplx z) {
    return {numkit::erf(z), numkit::erfc(z), numkit::erfi(z)};
}

[[nodiscard]] inline double gamma_fn(double x) {
    if (!(x > 0.0)) throw std::invalid_argument("gamma_fn: argument must be positive");
    return std::tgamma(x);
}

/// Normalized Hermite functions f_n(x) = H_n(x) / sqrt(2^n n!), n = 0..n_max,
/// orthonormal under exp(-x^2)/sqrt(pi).
[[nodiscard]] inline std::vector<double> hermite_f(int n_max, double x) {
    if (n_max < 0) throw std::invalid_argument("hermite_f: n_max must be >= 0");
    std::vector<double> f(n_max + 1);
    f[0] = 1.0;
    if (n_max >= 1) f[1] = std::sqrt(2.0) * x;
    for (int m = 1; m < n_max; ++m) {
        f[m + 1] = (x * f[m] - std::sqrt(m / 2.0) * f[m - 1]) / std::sqrt((m + 1) / 2.0);
    }
    return f;
}

}  // namespace cse::numkit
