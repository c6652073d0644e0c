#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "cse/error.hpp"

namespace cse::numkit {

/// Nodes and weights of a quadrature rule on [lo, hi].
struct QuadRule {
    std::vector<double> nodes;
    std::vector<double> weights;
    double lo = -1.0;
    double hi = 1.0;

    [[nodiscard]] std::size_t size() const { return nodes.size(); }

    template <class F>
    auto integrate(F&& f) const {
        using T = std::decay_t<std::invoke_result_t<F, double>>;
        T acc = weights[0] * f(nodes[0]);
        for (std::size_t i = 1; i < nodes.size(); ++i) acc += weights[i] * f(nodes[i]);
        return acc;
    }
};

namespace detail {

// Standard Legendre P_n(x) and its derivative by the three-term recurrence.
inline std::pair<double, double> legendre_with_derivative(int n, double x) {
    double p0 = 1.0;
    double p1 = x;
    if (n == 0) return {1.0, 0.0};
    for (int k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
    }
    const double dp = n * (x * p1 - p0) / (x * x - 1.0);
    return {p1, dp};
}

}  // namespace detail

/// q-point Gauss-Legendre rule on [lo, hi]; exact for degree <= 2q-1.
[[nodiscard]] inline QuadRule gauss_legendre(int q, double lo = -1.0, double hi = 1.0) {
    if (q < 1) throw std::invalid_argument("gauss_legendre: q must be >= 1");
    if (!(lo < hi)) throw std::invalid_argument("gauss_legendre: require lo < hi");

    std::vector<double> x(q), w(q);
    const int half = (q + 1) / 2;
    for (int i = 0; i < half; ++i) {
        // Tricomi initial guess, then Newton
        double z = std::cos(std::numbers::pi * (i + 0.75) / (q + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            auto [p, d] = detail::legendre_with_derivative(q, z);
            dp = d;
            const double dz = p / d;
            z -= dz;
            if (std::abs(dz) < 1e-16) break;
        }
        dp = detail::legendre_with_derivative(q, z).second;
        const double wi = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = -z;
        x[q - 1 - i] = z;
        w[i] = wi;
        w[q - 1 - i] = wi;
    }
    if (q % 2 == 1) x[q / 2] = 0.0;

    QuadRule rule;
    rule.lo = lo;
    rule.hi = hi;
    rule.nodes.resize(q);
    rule.weights.resize(q);
    const double half_len = 0.5 * (hi - lo);
    const double mid = 0.5 * (hi + lo);
    for (int i = 0; i < q; ++i) {
        rule.nodes[i] = mid + half_len * x[i];
        rule.weights[i] = half_len * w[i];
    }
    return rule;
}

/// Error-norm used by the adaptive integrator for scalar and vector values.
inline double magnitude(double v) { return std::abs(v); }
inline double magnitude(const std::complex<double>& v) { return std::abs(v); }
template <class V>
    requires requires(const V& v) { v.cwiseAbs().maxCoeff(); }
double magnitude(const V& v) {
    return v.size() == 0 ? 0.0 : static_cast<double>(v.cwiseAbs().maxCoeff());
}

struct QuadOptions {
    double abs_tol = 1e-13;
    double rel_tol = 0.0;
    int max_intervals = 400000;
    /// Uniform pre-split of [lo, hi]; useful for integrands with a known
    /// oscillation count so the first error estimates are meaningful.
    int initial_panels = 1;
};

namespace detail {

// 21-point Gauss-Kronrod rule with its embedded 10-point Gauss rule.
inline constexpr std::array<double, 11> kXgk = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.000000000000000000000000000000000};
inline constexpr std::array<double, 11> kWgk = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077208056182445, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};
inline constexpr std::array<double, 5> kWg = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

template <class T>
struct Panel {
    double a;
    double b;
    T value;
    double error;
    double absval;  // integral of |f|, sets the roundoff floor
    bool operator<(const Panel& o) const { return error < o.error; }
};

template <class F, class T>
Panel<T> gk21(F& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    const T fc = f(c);
    T kron = kWgk[10] * fc;
    T gauss = 0.0 * fc;
    double absval = kWgk[10] * magnitude(fc);
    for (int j = 0; j < 10; ++j) {
        const double dx = h * kXgk[j];
        const T f1 = f(c - dx);
        const T f2 = f(c + dx);
        kron += kWgk[j] * (f1 + f2);
        absval += kWgk[j] * (magnitude(f1) + magnitude(f2));
        if (j % 2 == 1) gauss += kWg[j / 2] * (f1 + f2);
    }
    kron *= h;
    gauss *= h;
    return {a, b, kron, magnitude(T(kron - gauss)), h * absval};
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod (21-point) integration of f over
/// [lo, hi]. The value type may be double, std::complex<double>, or an
/// Eigen vector (all components share the subdivision). hi may be +inf;
/// the range is then truncated at xi* = sqrt(-log(tol * 1e-2)), which
/// suits the Gaussian-weighted integrands used throughout this library.
template <class F>
auto adaptive_quad(F&& f, double lo, double hi, double tol, QuadOptions opt = {}) {
    using T = std::decay_t<std::invoke_result_t<F, double>>;
    if (!(tol > 0.0)) throw std::invalid_argument("adaptive_quad: tol must be positive");
    if (std::isinf(hi)) {
        const double cut = std::sqrt(-std::log(tol * 1e-2));
        hi = std::max(lo, 0.0) + cut;
    }
    if (!(lo <= hi)) throw std::invalid_argument("adaptive_quad: require lo <= hi");
    opt.abs_tol = std::min(opt.abs_tol, tol);

    if (lo == hi) {
        return T(0.0 * f(lo));
    }

    const int n0 = std::max(1, opt.initial_panels);
    std::vector<detail::Panel<T>> heap;
    heap.reserve(static_cast<std::size_t>(n0) + 64);
    for (int i = 0; i < n0; ++i) {
        const double a = lo + (hi - lo) * i / n0;
        const double b = (i + 1 == n0) ? hi : lo + (hi - lo) * (i + 1) / n0;
        heap.push_back(detail::gk21<F, T>(f, a, b));
    }
    std::make_heap(heap.begin(), heap.end());

    T total{};
    double total_err = 0.0;
    double total_abs = 0.0;
    auto resum = [&] {
        total = heap.front().value;
        total_err = heap.front().error;
        total_abs = heap.front().absval;
        for (std::size_t i = 1; i < heap.size(); ++i) {
            total += heap[i].value;
            total_err += heap[i].error;
            total_abs += heap[i].absval;
        }
    };
    resum();

    // a cancelling integrand cannot be resolved below the rounding of its
    // absolute integral
    constexpr double kRoundoff = 50.0 * std::numeric_limits<double>::epsilon();
    auto target = [&] {
        return std::max({opt.abs_tol, opt.rel_tol * magnitude(total), kRoundoff * total_abs});
    };
    std::size_t next_resum = 2 * heap.size();
    const std::size_t limit = static_cast<std::size_t>(n0) + static_cast<std::size_t>(opt.max_intervals);
    for (;;) {
        if (total_err <= target()) {
            // Running sums drift; confirm against an exact re-summation.
            resum();
            if (total_err <= target()) break;
        }
        if (heap.size() >= limit) {
            throw NumericalError("adaptive_quad: no convergence after " +
                                 std::to_string(heap.size()) + " subintervals (error estimate " +
                                 std::to_string(total_err) + ")");
        }
        std::pop_heap(heap.begin(), heap.end());
        auto worst = std::move(heap.back());
        heap.pop_back();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b)) {
            throw NumericalError("adaptive_quad: subinterval collapsed to machine precision");
        }
        auto left = detail::gk21<F, T>(f, worst.a, mid);
        auto right = detail::gk21<F, T>(f, mid, worst.b);
        total += (left.value + right.value) - worst.value;
        total_err += left.error + right.error - worst.error;
        total_abs += left.absval + right.absval - worst.absval;
        heap.push_back(std::move(left));
        std::push_heap(heap.begin(), heap.end());
        heap.push_back(std::move(right));
        std::push_heap(heap.begin(), heap.end());
        if (heap.size() >= next_resum) {
            resum();
            next_resum *= 2;
        }
    }
    return total;
}

}  // namespace cse::numkit
