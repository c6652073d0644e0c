#pragma once

// Direct (slow) evaluations of j_n and k_n used to build the kernel tables
// and to validate the fast representations.

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "cse/numkit/quadrature.hpp"

namespace cse {

using cplx = std::complex<double>;

namespace detail {

// log of the j_n normalization 2 / Gamma((n+1)/2)
inline double log_jn_norm(int n) { return std::log(2.0) - std::lgamma(0.5 * (n + 1)); }

// Smallest xi beyond the peak of xi^n e^{-xi^2} * 2/Gamma((n+1)/2) where the
// integrand (and so the tail) drops below eps.
inline double jn_cutoff(int n, double eps) {
    double xi = std::sqrt(0.5 * n) + 1.0;
    const double target = std::log(eps);
    for (;;) {
        const double l = n * std::log(xi) - xi * xi + log_jn_norm(n);
        if (l < target) return xi;
        xi += 0.25;
    }
}

}  // namespace detail

struct DirectOptions {
    double tol = 1e-14;
    /// from this |t| on, the large-argument series replaces quadrature
    /// whenever its smallest term is below tol/100
    double asymptotic_from = 20.0;
};

/// j_0(t)..j_{n_max}(t) from the defining integral
/// (2/Gamma((n+1)/2)) int_0^inf xi^n e^{-xi^2 - i xi t} d xi.
[[nodiscard]] inline Eigen::VectorXcd jn_direct(int n_max, double t, DirectOptions opt = {}) {
    if (n_max < 0) throw std::invalid_argument("jn_direct: n_max must be >= 0");
    if (t < 0.0) return jn_direct(n_max, -t, opt).conjugate();

    Eigen::VectorXd lnorm(n_max + 1);
    for (int n = 0; n <= n_max; ++n) lnorm[n] = detail::log_jn_norm(n);

    if (t >= opt.asymptotic_from) {
        // Large-argument series sum_j (-1)^j (n+2j)!/j! / (it)^{n+2j+1}, cut
        // at its smallest term. Used only when that term is negligible.
        Eigen::VectorXcd out(n_max + 1);
        bool accurate = true;
        for (int n = 0; n <= n_max && accurate; ++n) {
            cplx sum = 0.0;
            double last = std::numeric_limits<double>::infinity();
            for (int j = 0; j < 100000; ++j) {
                const double lmag = std::lgamma(n + 2.0 * j + 1.0) - std::lgamma(j + 1.0) -
                                    (n + 2.0 * j + 1.0) * std::log(t) + lnorm[n];
                const double mag = std::exp(lmag);
                if (mag >= last) break;
                const double sign = (j % 2 == 0) ? 1.0 : -1.0;
                sum += sign * mag * std::pow(cplx(0.0, -1.0), (n + 2 * j + 1) % 4);
                last = mag;
                if (mag < 1e-19) break;
            }
            out[n] = sum;
            accurate = last < opt.tol * 1e-2;
        }
        if (accurate) return out;
    }

    const double cut = detail::jn_cutoff(n_max, opt.tol * 1e-3);
    auto f = [&](double xi) {
        Eigen::VectorXcd v(n_max + 1);
        const cplx phase = std::exp(cplx(-xi * xi, -xi * t));
        const double lx = xi > 0.0 ? std::log(xi) : -std::numeric_limits<double>::infinity();
        for (int n = 0; n <= n_max; ++n) {
            v[n] = n == 0 ? phase * std::exp(lnorm[0]) : phase * std::exp(n * lx + lnorm[n]);
        }
        return v;
    };
    numkit::QuadOptions qo;
    qo.initial_panels = 1 + static_cast<int>(cut * t / std::numbers::pi);
    return numkit::adaptive_quad(f, 0.0, cut, opt.tol, qo);
}

/// k_0(t)..k_{n_max}(t) with k_n(t) = int_0^t e^{i w s} j_n(sqrt2 s) ds, by
/// exchanging the order of integration:
/// (2/Gamma) int xi^n e^{-xi^2} t e^{i phi/2} sinc(phi/2) d xi, phi = (w - sqrt2 xi) t.
[[nodiscard]] inline Eigen::VectorXcd kn_direct(int n_max, double t, double w, double tol = 1e-14) {
    if (n_max < 0) throw std::invalid_argument("kn_direct: n_max must be >= 0");
    if (t < 0.0) throw std::invalid_argument("kn_direct: t must be >= 0");
    Eigen::VectorXd lnorm(n_max + 1);
    for (int n = 0; n <= n_max; ++n) lnorm[n] = detail::log_jn_norm(n);
    const double cut = detail::jn_cutoff(n_max, tol * 1e-3 / std::max(t, 1.0));
    auto f = [&](double xi) {
        const double half = 0.5 * (w - std::numbers::sqrt2 * xi) * t;
        const double sinc = std::abs(half) < 1e-8 ? 1.0 - half * half / 6.0 : std::sin(half) / half;
        const cplx g = t * sinc * std::exp(cplx(-xi * xi, half));
        Eigen::VectorXcd v(n_max + 1);
        const double lx = xi > 0.0 ? std::log(xi) : -std::numeric_limits<double>::infinity();
        for (int n = 0; n <= n_max; ++n) v[n] = n == 0 ? g * std::exp(lnorm[0]) : g * std::exp(n * lx + lnorm[n]);
        return v;
    };
    numkit::QuadOptions qo;
    qo.initial_panels = 1 + static_cast<int>(cut * t / std::numbers::pi);
    return numkit::adaptive_quad(f, 0.0, cut, tol, qo);
}

}  // namespace cse
