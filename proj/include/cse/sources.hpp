#pragma once

// Initial data and the source term f_m(t) = a_m(0) - i g int_0^t e^{i Omega s} U_m(s) ds.

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cse/collocation.hpp"
#include "cse/error.hpp"
#include "cse/numkit/quadrature.hpp"
#include "cse/numkit/special.hpp"
#include "cse/parallel.hpp"
#include "cse/physics.hpp"

namespace cse {

/// Modulated Gaussian u_0(x) = (2/(pi beta^2))^{1/4} e^{-(x-x0)^2/beta^2} e^{i xi0 x}.
struct Wavepacket {
    double x0 = -80.0;
    double beta = 12.0;
    double xi0 = 1.0;
};

/// Size of the neglected backward-moving part when U(x,t) is replaced by u_0(x - ct).
[[nodiscard]] inline double translation_error_bound(const Wavepacket& wp) {
    return std::erfc(wp.beta * wp.xi0 / 2.0) / std::pow(8.0 * std::numbers::pi * wp.beta * wp.beta, 0.25);
}

/// Rejects packets for which pure translation is not exact in double precision
/// (xi0 beta >= 12 with beta >= 1). allow_inexact skips the check; callers
/// should then report translation_error_bound.
inline void check_translation(const Wavepacket& wp, bool allow_inexact) {
    if (!(wp.beta > 0.0)) throw std::invalid_argument("wavepacket.beta must be positive");
    if (allow_inexact) return;
    if (wp.beta < 1.0 || wp.xi0 * wp.beta < 12.0) {
        throw std::invalid_argument("wavepacket: xi0*beta=" + std::to_string(wp.xi0 * wp.beta) +
                                    " (beta=" + std::to_string(wp.beta) +
                                    ") violates xi0*beta >= 12, beta >= 1; translation error bound " +
                                    std::to_string(translation_error_bound(wp)));
    }
}

[[nodiscard]] inline cplx initial_field(const Wavepacket& wp, double x) {
    const double amp = std::pow(2.0 / (std::numbers::pi * wp.beta * wp.beta), 0.25);
    const double d = (x - wp.x0) / wp.beta;
    return amp * std::exp(-d * d) * std::polar(1.0, wp.xi0 * x);
}

/// U(x,t) = u_0(x - ct).
[[nodiscard]] inline cplx free_field(const Wavepacket& wp, const Physics& phys, double x, double t,
                                     bool allow_inexact = false) {
    check_translation(wp, allow_inexact);
    return initial_field(wp, x - phys.c * t);
}

/// int_0^t e^{i Omega s} U(x,s) ds in closed form. The erfi difference is
/// rewritten with the Faddeeva function so that the large e^{A^2} factors
/// cancel analytically.
[[nodiscard]] inline cplx time_integral_U(const Wavepacket& wp, const Physics& phys, double x, double t) {
    if (t == 0.0) return 0.0;
    const double c = phys.c;
    const double beta = wp.beta;
    const double A = beta * (phys.omega - wp.xi0 * c) / (2.0 * c);
    const cplx pre = cplx(0.0, std::pow(std::numbers::pi, 0.25) * std::sqrt(beta) / (std::pow(2.0, 0.75) * c)) *
                     std::polar(1.0, wp.xi0 * wp.x0 + phys.omega * (x - wp.x0) / c);
    // e^{-A^2} erfi(A - iB) + i e^{-A^2} = i e^{-B^2 - 2iAB} w(-A + iB)
    auto term = [&](double B) -> cplx {
        const cplx ph = std::exp(cplx(-B * B, -2.0 * A * B));
        if (B >= 0.0) return ph * numkit::faddeeva_w(cplx(-A, B));
        // reflect into the upper half plane: w(z) = 2e^{-z^2} - w(-z)
        return 2.0 * std::exp(-A * A) - ph * numkit::faddeeva_w(cplx(A, -B));
    };
    const double B1 = (x - wp.x0) / beta;
    const double B2 = (x - wp.x0 - c * t) / beta;
    return pre * cplx(0.0, 1.0) * (term(B1) - term(B2));
}

enum class SourceKind { excited_atom, wavepacket };

/// f_m(t) for m = 0..p-1 with an optional per-node cache.
class SourceTerm {
public:
    SourceTerm() = default;

    SourceTerm(SourceKind kind, int p, Eigen::VectorXcd a0, std::function<Eigen::VectorXcd(double)> f)
        : kind_(kind), p_(p), a0_(std::move(a0)), f_(std::move(f)) {}

    [[nodiscard]] SourceKind kind() const { return kind_; }
    [[nodiscard]] int p() const { return p_; }
    [[nodiscard]] const Eigen::VectorXcd& initial() const { return a0_; }
    [[nodiscard]] const Wavepacket* wavepacket() const { return kind_ == SourceKind::wavepacket ? &wp_ : nullptr; }

    [[nodiscard]] Eigen::VectorXcd operator()(double t) const { return f_(t); }

    /// Evaluates and stores f at every collocation node of d.
    void prepare(const Discretization& d, int threads = 1) {
        cache_.assign(d.N, Eigen::MatrixXcd());
        parallel_for(d.N, threads, [&](int i) {
            Eigen::MatrixXcd v(d.q, p_);
            for (int k = 0; k < d.q; ++k) v.row(k) = f_(d.node(i + 1, k)).transpose();
            cache_[i] = std::move(v);
        });
        cache_dt_ = d.dt;
        cache_q_ = d.q;
    }

    /// q x p matrix of f_m(t_{jk}), j = 1..N.
    [[nodiscard]] Eigen::MatrixXcd at_step(const Discretization& d, int j) const {
        if (!cache_.empty() && cache_dt_ == d.dt && cache_q_ == d.q && j <= static_cast<int>(cache_.size())) {
            return cache_[j - 1];
        }
        Eigen::MatrixXcd v(d.q, p_);
        for (int k = 0; k < d.q; ++k) v.row(k) = f_(d.node(j, k)).transpose();
        return v;
    }

    void set_wavepacket(const Wavepacket& wp) { wp_ = wp; }

private:
    SourceKind kind_ = SourceKind::excited_atom;
    int p_ = 1;
    Eigen::VectorXcd a0_;
    std::function<Eigen::VectorXcd(double)> f_;
    Wavepacket wp_{};
    std::vector<Eigen::MatrixXcd> cache_;
    double cache_dt_ = 0.0;
    int cache_q_ = 0;
};

/// a_m(0) = delta_{m0}, U = 0, so f_m(t) = delta_{m0}.
[[nodiscard]] inline SourceTerm excited_atom_source(int p) {
    if (p < 1) throw std::invalid_argument("excited_atom_source: p must be >= 1");
    Eigen::VectorXcd a0 = Eigen::VectorXcd::Zero(p);
    a0[0] = 1.0;
    return SourceTerm(SourceKind::excited_atom, p, a0, [a0](double) { return a0; });
}

struct WavepacketSourceOptions {
    double support = 8.0;  // |x| <= support * sigma
    double tol = 1e-14;
    bool allow_inexact_translation = false;
};

/// f_m(t) = -i g int_{|y|<=8} rho(y) f_m(y) int_0^t e^{i Omega s} U(sigma y, s) ds dy,
/// all m at once through the Hermite recurrence.
[[nodiscard]] inline SourceTerm wavepacket_source(const Wavepacket& wp, const Physics& phys,
                                                  const WavepacketSourceOptions& opt = {}) {
    phys.validate();
    check_translation(wp, opt.allow_inexact_translation);
    const int p = phys.p;
    auto f = [wp, phys, opt, p](double t) -> Eigen::VectorXcd {
        if (t == 0.0) return Eigen::VectorXcd::Zero(p);
        auto integrand = [&](double y) -> Eigen::VectorXcd {
            const auto h = numkit::hermite_f(p - 1, y);
            const cplx inner = time_integral_U(wp, phys, phys.sigma * y, t) * std::exp(-y * y) /
                               std::sqrt(std::numbers::pi);
            Eigen::VectorXcd v(p);
            for (int m = 0; m < p; ++m) v[m] = h[m] * inner;
            return v;
        };
        numkit::QuadOptions qo;
        qo.initial_panels = 8;
        const Eigen::VectorXcd proj = numkit::adaptive_quad(integrand, -opt.support, opt.support, opt.tol, qo);
        return cplx(0.0, -phys.g) * proj;
    };
    SourceTerm s(SourceKind::wavepacket, p, Eigen::VectorXcd::Zero(p), f);
    s.set_wavepacket(wp);
    return s;
}

}  // namespace cse
