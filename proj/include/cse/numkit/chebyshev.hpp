#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace cse::numkit {

using cplx = std::complex<double>;

namespace detail {
// cos(pi * m / N) with m reduced modulo 2N
inline double cos_pi_ratio(long m, long N) {
    m %= 2 * N;
    return std::cos(std::numbers::pi * static_cast<double>(m) / static_cast<double>(N));
}
}  // namespace detail

/// Chebyshev points of the second kind on [lo, hi], ascending.
[[nodiscard]] inline std::vector<double> chebyshev_points(int n, double lo, double hi) {
    if (n < 2) throw std::invalid_argument("chebyshev_points: need at least 2 points");
    std::vector<double> x(n);
    const int N = n - 1;
    for (int j = 0; j <= N; ++j) {
        // sin form keeps the points symmetric to rounding
        const double s = std::sin(std::numbers::pi * (N - 2.0 * j) / (2.0 * N));
        x[N - j] = 0.5 * (hi + lo) + 0.5 * (hi - lo) * s;
    }
    x.front() = lo;
    x.back() = hi;
    return x;
}

/// Polynomial interpolant through complex samples at second-kind
/// Chebyshev points, evaluated by the barycentric formula.
class ChebInterpolant {
public:
    ChebInterpolant() = default;

    ChebInterpolant(double lo, double hi, std::vector<cplx> samples)
        : lo_(lo), hi_(hi), samples_(std::move(samples)) {
        const int n = static_cast<int>(samples_.size());
        if (n < 2) throw std::invalid_argument("ChebInterpolant: need at least 2 samples");
        if (!(lo < hi)) throw std::invalid_argument("ChebInterpolant: require lo < hi");
        nodes_ = chebyshev_points(n, lo, hi);
        weights_.resize(n);
        // ascending order: node i corresponds to cos((n-1-i) pi/(n-1))
        for (int i = 0; i < n; ++i) {
            const int j = n - 1 - i;
            double w = (j % 2 == 0) ? 1.0 : -1.0;
            if (j == 0 || j == n - 1) w *= 0.5;
            weights_[i] = w;
        }
    }

    [[nodiscard]] double lo() const { return lo_; }
    [[nodiscard]] double hi() const { return hi_; }
    [[nodiscard]] int size() const { return static_cast<int>(samples_.size()); }
    [[nodiscard]] const std::vector<double>& nodes() const { return nodes_; }
    [[nodiscard]] const std::vector<cplx>& samples() const { return samples_; }

    [[nodiscard]] cplx operator()(double x) const {
        cplx num = 0.0;
        double den = 0.0;
        const int n = size();
        for (int i = 0; i < n; ++i) {
            const double d = x - nodes_[i];
            if (d == 0.0) return samples_[i];
            const double c = weights_[i] / d;
            num += c * samples_[i];
            den += c;
        }
        return num / den;
    }

    /// Chebyshev coefficients a_k with f = sum a_k T_k(mapped x).
    [[nodiscard]] std::vector<cplx> coefficients() const {
        const int n = size();
        const int N = n - 1;
        std::vector<cplx> a(n, 0.0);
        // sample in cos-order: f_j = f(cos(j pi / N)) = samples_[N - j]
        for (int k = 0; k <= N; ++k) {
            cplx s = 0.0;
            for (int j = 0; j <= N; ++j) {
                double c = detail::cos_pi_ratio(static_cast<long>(j) * k, N);
                if (j == 0 || j == N) c *= 0.5;
                s += c * samples_[N - j];
            }
            a[k] = s * (2.0 / N);
        }
        a[0] *= 0.5;
        a[N] *= 0.5;
        return a;
    }

private:
    double lo_ = 0.0;
    double hi_ = 1.0;
    std::vector<cplx> samples_;
    std::vector<double> nodes_;
    std::vector<double> weights_;
};

/// Samples f at n second-kind Chebyshev points of [lo, hi].
template <class F>
[[nodiscard]] ChebInterpolant cheb_fit(F&& f, double lo, double hi, int n) {
    const auto x = chebyshev_points(n, lo, hi);
    std::vector<cplx> v(n);
    for (int i = 0; i < n; ++i) v[i] = cplx(f(x[i]));
    return ChebInterpolant(lo, hi, std::move(v));
}

/// Running integral F(t) = int_lo^t f(s) ds of an interpolant, computed in
/// coefficient space and returned on the same nodes.
[[nodiscard]] inline ChebInterpolant spectral_integrate(const ChebInterpolant& c) {
    const int n = c.size();
    const int N = n - 1;
    const auto a = c.coefficients();
    std::vector<cplx> A(n, 0.0);
    auto coef = [&](int k) -> cplx { return k <= N ? a[k] : cplx(0.0); };
    if (N >= 1) A[1] = coef(0) - 0.5 * coef(2);
    for (int k = 2; k <= N; ++k) A[k] = (coef(k - 1) - coef(k + 1)) / (2.0 * k);
    // fix the constant so that F(lo) = F(x = -1) = 0
    cplx at_minus_one = 0.0;
    for (int k = 1; k <= N; ++k) at_minus_one += (k % 2 == 0 ? 1.0 : -1.0) * A[k];
    A[0] = -at_minus_one;

    const double scale = 0.5 * (c.hi() - c.lo());
    std::vector<cplx> values(n);
    for (int j = 0; j <= N; ++j) {
        cplx s = 0.0;
        for (int k = 0; k <= N; ++k) {
            s += A[k] * detail::cos_pi_ratio(static_cast<long>(j) * k, N);
        }
        values[N - j] = scale * s;
    }
    values.front() = 0.0;
    return ChebInterpolant(c.lo(), c.hi(), std::move(values));
}

}  // namespace cse::numkit
