#pragma once

// Sum-of-exponentials representation of j_n for t > delta, obtained by
// deforming the defining contour onto the imaginary axis, and its lift to
// the K_mn kernels.

#include <algorithm>
#include <cmath>
#include <complex>
#include <concepts>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cse/error.hpp"
#include "cse/physics.hpp"
#include "cse/numkit/quadrature.hpp"
#include "cse/reference.hpp"

namespace cse {

/// j_n weights vanish identically past this index.
inline constexpr int kSoeMaxN = 23;

/// Bound on the neglected part of the deformed contour, 14 e^{2a^2 - a t}.
[[nodiscard]] inline double jn2_bound(double a, double t) {
    if (!(a > 0.0)) throw std::invalid_argument("jn2_bound: a must be positive");
    return 14.0 * std::exp(2.0 * a * a - a * t);
}

/// max over n of 2^{n/2} sqrt(n+1) / Gamma((n+1)/2), the constant behind jn2_bound.
[[nodiscard]] inline std::pair<double, int> jn2_bound_constant(int n_scan = 200) {
    double best = 0.0;
    int arg = 0;
    for (int n = 0; n <= n_scan; ++n) {
        const double v = std::exp(0.5 * n * std::log(2.0) + 0.5 * std::log(n + 1.0) - std::lgamma(0.5 * (n + 1)));
        if (v > best) {
            best = v;
            arg = n;
        }
    }
    return {best, arg};
}

struct SoeOptions {
    double delta = 20.0;
    double t_max = 1e7;
    double a = 5.0;
    double tol = 1e-12;
    int panel_order = 16;
    int validation_points = 400;
};

struct SoeJ {
    std::vector<double> lambdas;                    // lambda~_mu in (0, a]
    std::vector<std::vector<cplx>> weights;         // weights[n][mu], n <= kSoeMaxN
    double delta = 20.0;
    double t_max = 1e7;
    double a = 5.0;
    double tol = 1e-12;
    double validation_error = 0.0;

    [[nodiscard]] int size() const { return static_cast<int>(lambdas.size()); }

    [[nodiscard]] cplx weight(int n, int mu) const {
        return n > kSoeMaxN ? cplx(0.0) : weights[n][mu];
    }

    /// sum_mu w~_{n,mu} e^{-lambda~_mu t}
    [[nodiscard]] cplx eval(int n, double t) const {
        if (n > kSoeMaxN) return 0.0;
        cplx s = 0.0;
        const auto& w = weights[n];
        for (std::size_t mu = 0; mu < lambdas.size(); ++mu) {
            const double e = lambdas[mu] * t;
            if (e < 745.0) s += w[mu] * std::exp(-e);
        }
        return s;
    }
};

namespace detail {

// Composite Gauss-Legendre rule on [0, a]: dyadic panels
// [a 2^{-(k+1)}, a 2^{-k}], k = 0..K, plus the bottom panel [0, a 2^{-(K+1)}].
inline numkit::QuadRule dyadic_rule(double a, double delta, double t_max, int order) {
    const int K = static_cast<int>(std::ceil(std::log2(a * t_max / delta)));
    numkit::QuadRule out;
    out.lo = 0.0;
    out.hi = a;
    auto append = [&](double lo, double hi) {
        const auto r = numkit::gauss_legendre(order, lo, hi);
        out.nodes.insert(out.nodes.end(), r.nodes.begin(), r.nodes.end());
        out.weights.insert(out.weights.end(), r.weights.begin(), r.weights.end());
    };
    append(0.0, a * std::ldexp(1.0, -(K + 1)));
    for (int k = K; k >= 0; --k) append(a * std::ldexp(1.0, -(k + 1)), a * std::ldexp(1.0, -k));
    return out;
}

}  // namespace detail

/// Builds the j_n expansion valid on [delta, t_max] to absolute accuracy tol,
/// then confirms it on a log-spaced sweep against direct evaluation.
[[nodiscard]] inline SoeJ build_soe_j(SoeOptions opt = {}) {
    if (!(opt.delta > 0.0) || !(opt.t_max > opt.delta)) {
        throw std::invalid_argument("build_soe_j: require 0 < delta < t_max");
    }
    if (!(opt.tol > 0.0)) throw std::invalid_argument("build_soe_j: tol must be positive");
    if (!(jn2_bound(opt.a, opt.delta) < opt.tol)) {
        throw std::invalid_argument("build_soe_j: contour height a=" + std::to_string(opt.a) +
                                    " is too small for delta=" + std::to_string(opt.delta));
    }
    const auto rule = detail::dyadic_rule(opt.a, opt.delta, opt.t_max, opt.panel_order);
    const int nq = static_cast<int>(rule.size());

    // j_n^{(1)}(t) = 2(-i)^{n+1}/Gamma((n+1)/2) int_0^a eta^n e^{eta^2 - eta t} d eta
    std::vector<std::vector<cplx>> w(kSoeMaxN + 1, std::vector<cplx>(nq));
    for (int n = 0; n <= kSoeMaxN; ++n) {
        const cplx phase = std::pow(cplx(0.0, -1.0), n + 1);
        for (int mu = 0; mu < nq; ++mu) {
            const double eta = rule.nodes[mu];
            const double lmag = std::log(2.0) - std::lgamma(0.5 * (n + 1)) + std::log(rule.weights[mu]) +
                                n * std::log(eta) + eta * eta;
            w[n][mu] = phase * std::exp(lmag);
        }
    }

    // Drop the modes contributing least over [delta, inf) while the
    // cumulative dropped contribution stays below tol/10.
    std::vector<double> contrib(nq);
    for (int mu = 0; mu < nq; ++mu) {
        double m = 0.0;
        for (int n = 0; n <= kSoeMaxN; ++n) m = std::max(m, std::abs(w[n][mu]));
        contrib[mu] = m * std::exp(-rule.nodes[mu] * opt.delta);
    }
    std::vector<int> order(nq);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int x, int y) { return contrib[x] < contrib[y]; });
    std::vector<bool> keep(nq, true);
    double dropped = 0.0;
    for (int idx : order) {
        if (dropped + contrib[idx] >= opt.tol / 10.0) break;
        dropped += contrib[idx];
        keep[idx] = false;
    }

    SoeJ soe;
    soe.delta = opt.delta;
    soe.t_max = opt.t_max;
    soe.a = opt.a;
    soe.tol = opt.tol;
    soe.weights.assign(kSoeMaxN + 1, {});
    for (int mu = 0; mu < nq; ++mu) {
        if (!keep[mu]) continue;
        soe.lambdas.push_back(rule.nodes[mu]);
        for (int n = 0; n <= kSoeMaxN; ++n) soe.weights[n].push_back(w[n][mu]);
    }

    const int npts = std::max(2, opt.validation_points);
    double err = 0.0;
    for (int i = 0; i < npts; ++i) {
        const double t = opt.delta * std::pow(opt.t_max / opt.delta, static_cast<double>(i) / (npts - 1));
        const Eigen::VectorXcd ref = jn_direct(kSoeMaxN, t);
        for (int n = 0; n <= kSoeMaxN; ++n) err = std::max(err, std::abs(soe.eval(n, t) - ref[n]));
    }
    soe.validation_error = err;
    if (err > opt.tol) {
        throw NumericalError("build_soe_j: validation error " + std::to_string(err) +
                             " exceeds tolerance " + std::to_string(opt.tol));
    }
    return soe;
}

/// Anything that evaluates the reduced kernels k_r(t).
template <class K>
concept ReducedKernelSource = requires(const K& k, int r, double t) {
    { k.reduced(r, t) } -> std::convertible_to<cplx>;
};

/// Representation K_mn(t) = sum_mu w_{m,n,mu} e^{-lambda_mu t}, t >= delta/sqrt2,
/// stored in reduced form: w_{m,n,mu} = pref_{mn} v_{m+n,mu}.
struct SoeK {
    std::vector<cplx> lambdas;               // last entry is the constant mode (0)
    std::vector<std::vector<cplx>> reduced;  // reduced[r][mu], r = 0..r_max
    double t_start = 0.0;                    // delta / sqrt2

    [[nodiscard]] int size() const { return static_cast<int>(lambdas.size()); }
    [[nodiscard]] int constant_mode() const { return size() - 1; }

    [[nodiscard]] cplx eval_reduced(int r, double t) const {
        const auto& v = reduced.at(r);
        cplx s = 0.0;
        for (std::size_t mu = 0; mu < lambdas.size(); ++mu) {
            const double e = lambdas[mu].real() * t;
            if (e < 745.0) s += v[mu] * std::exp(-lambdas[mu] * t);
        }
        return s;
    }
};

/// Integrates the j_n expansion term by term from delta/sqrt2 to obtain
/// exponentials for k_r, r = 0..r_max, then appends the constant mode
/// carrying k_r(delta/sqrt2).
template <ReducedKernelSource K>
[[nodiscard]] SoeK lift_soe_to_K(const SoeJ& soe, const Physics& phys, const K& kernel, int r_max) {
    const double w = phys.kernel_omega();
    const double s0 = soe.delta / std::sqrt(2.0);
    const int ne = soe.size();
    SoeK out;
    out.t_start = s0;
    out.lambdas.resize(ne + 1);
    for (int mu = 0; mu < ne; ++mu) out.lambdas[mu] = cplx(std::sqrt(2.0) * soe.lambdas[mu], -w);
    out.lambdas[ne] = 0.0;
    out.reduced.assign(r_max + 1, std::vector<cplx>(ne + 1, 0.0));
    for (int r = 0; r <= r_max; ++r) {
        cplx tail_at_s0 = 0.0;
        for (int mu = 0; mu < ne && r <= kSoeMaxN; ++mu) {
            const cplx z(-std::sqrt(2.0) * soe.lambdas[mu], w);
            const cplx v = soe.weight(r, mu) / z;
            out.reduced[r][mu] = v;
            tail_at_s0 += v * std::exp(z * s0);
        }
        out.reduced[r][ne] = cplx(kernel.reduced(r, s0)) - tail_at_s0;
    }
    return out;
}

}  // namespace cse
