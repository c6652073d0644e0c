#pragma once

// Time grid, precomputed current/local/history arrays and the per-step
// system matrix of the collocation scheme.

#include <atomic>
#include <cmath>
#include <complex>
#include <concepts>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cse/error.hpp"
#include "cse/numkit/legendre.hpp"
#include "cse/numkit/linalg.hpp"
#include "cse/numkit/quadrature.hpp"
#include "cse/parallel.hpp"
#include "cse/physics.hpp"
#include "cse/soe.hpp"

namespace cse {

/// Kernel interface consumed by the scheme: K_mn(t) = prefactor(m, n) * reduced(m + n, t).
template <class K>
concept Kernel = ReducedKernelSource<K> && requires(const K& k, int m, int n) {
    { k.prefactor(m, n) } -> std::convertible_to<cplx>;
};

/// Test kernel K_mn = 1 for even m+n.
struct ConstantKernel {
    [[nodiscard]] cplx reduced(int, double) const { return 1.0; }
    [[nodiscard]] cplx prefactor(int m, int n) const { return (m + n) % 2 == 0 ? 1.0 : 0.0; }
};

/// Test kernel K_mn = e^{-lambda t} for even m+n.
struct ExponentialKernel {
    cplx lambda = 1.0;
    [[nodiscard]] cplx reduced(int, double t) const { return std::exp(-lambda * t); }
    [[nodiscard]] cplx prefactor(int m, int n) const { return (m + n) % 2 == 0 ? 1.0 : 0.0; }
};

/// Exact one-mode expansion of ExponentialKernel (the constant mode is zero).
[[nodiscard]] inline SoeK single_mode_soe(cplx lambda, int r_max, double t_start) {
    SoeK s;
    s.lambdas = {lambda, 0.0};
    s.reduced.assign(r_max + 1, std::vector<cplx>{1.0, 0.0});
    s.t_start = t_start;
    return s;
}

struct Discretization {
    double T = 0.0;
    int N = 0;
    int q = 0;
    double dt = 0.0;
    int M = 1;  // window length in steps: current step plus M-1 local steps
    numkit::QuadRule tau;
    numkit::LegendreTransform legendre;

    /// Collocation time t_{jk}, j = 1..N, k = 0..q-1.
    [[nodiscard]] double node(int j, int k) const { return (j - 1) * dt + tau.nodes[k]; }
    [[nodiscard]] int node_count() const { return N * q; }
    /// True when the compressed history is ever used.
    [[nodiscard]] bool history_active() const { return M < N; }
};

[[nodiscard]] inline Discretization build_grid(double T, int N, int q) {
    if (!(T > 0.0)) throw std::invalid_argument("discretization.T must be positive");
    if (N < 1) throw std::invalid_argument("discretization.N must be >= 1");
    if (q < 1) throw std::invalid_argument("discretization.q must be >= 1");
    Discretization d;
    d.T = T;
    d.N = N;
    d.q = q;
    d.dt = T / N;
    d.tau = numkit::gauss_legendre(q, 0.0, d.dt);
    d.legendre = numkit::legendre_transform_pair(q, d.dt);
    d.M = N;
    return d;
}

/// Smallest M with (M-1) dt >= sigma delta / (sqrt2 c), capped at N (no history).
inline void select_window(Discretization& d, const Physics& phys, double delta, double t_max) {
    const double reach = phys.sigma * delta / (std::numbers::sqrt2 * phys.c);
    const double limit = phys.sigma * t_max / (std::numbers::sqrt2 * phys.c);
    if (d.T > limit) {
        throw std::invalid_argument("discretization.T=" + std::to_string(d.T) +
                                    " exceeds sigma*t_max/(sqrt2*c)=" + std::to_string(limit) +
                                    "; rebuild with a larger soe.t_max");
    }
    const double steps = reach / d.dt;
    // tolerate rounding in the ratio so exact multiples do not add a step
    long m = 1 + static_cast<long>(std::ceil(steps * (1.0 - 1e-14)));
    if (m > d.N) m = d.N;
    d.M = static_cast<int>(m);
}

struct IntegralCounters {
    long current = 0;
    long local = 0;
    long history = 0;
};

/// Precomputed arrays. Blocks are stored in reduced form (per kernel index
/// r = m+n, without the (m,n) prefactor) and already composed with the
/// discrete Legendre transform, so they act on nodal values.
struct PrecomputedArrays {
    int p = 0;
    int q = 0;
    int M = 1;
    std::vector<cplx> pref;                       // pref[m*p+n]
    std::vector<Eigen::MatrixXcd> C;              // C[r], r even
    std::vector<std::vector<Eigen::MatrixXcd>> L; // L[r][nu], nu = 0..M-2
    Eigen::MatrixXcd H;                           // (ne*q) x q, row mu*q+k
    std::vector<cplx> decay;                      // e^{-(c/sigma) lambda_mu dt}
    Eigen::MatrixXcd V;                           // reduced weights, (r_max+1) x ne
    int ne = 0;
    int r_soe = -1;                               // highest r with non-constant modes
    numkit::DenseLU lu;
    IntegralCounters counters;

    [[nodiscard]] cplx prefactor(int m, int n) const { return pref[m * p + n]; }
    [[nodiscard]] cplx Centry(int m, int n, int k, int l) const {
        return (m + n) % 2 ? cplx(0.0) : prefactor(m, n) * C[m + n](k, l);
    }
    [[nodiscard]] cplx Lentry(int m, int n, int k, int l, int nu) const {
        return (m + n) % 2 ? cplx(0.0) : prefactor(m, n) * L[m + n][nu](k, l);
    }
    [[nodiscard]] bool history_active() const { return ne > 0; }
};

struct CollocationOptions {
    double quad_tol = 1e-13;
    int threads = 1;
};

namespace detail {

// Legendre-weighted integral of a kernel factor over [lo, hi], all degrees at once.
template <class F>
Eigen::VectorXcd legendre_moments(F&& kernel_factor, double lo, double hi, const Discretization& d, double tol) {
    auto f = [&](double s) -> Eigen::VectorXcd {
        return numkit::legendre_values(d.q, s, d.dt).cast<cplx>() * kernel_factor(s);
    };
    if (hi <= lo) return Eigen::VectorXcd::Zero(d.q);
    return numkit::adaptive_quad(f, lo, hi, tol);
}

}  // namespace detail

/// int_0^{dt} k_r((c/sigma)(d dt + tau_k - s)) P_l(s) ds composed with the
/// Legendre transform; d >= 1 is the step offset.
template <Kernel K>
[[nodiscard]] Eigen::MatrixXcd offset_block(const K& kernel, int r, int offset, const Discretization& d,
                                            const Physics& phys, double tol) {
    const double kappa = phys.time_scale();
    Eigen::MatrixXcd hat(d.q, d.q);
    for (int k = 0; k < d.q; ++k) {
        const double base = offset * d.dt + d.tau.nodes[k];
        hat.row(k) = detail::legendre_moments(
                         [&](double s) { return cplx(kernel.reduced(r, kappa * (base - s))); }, 0.0, d.dt, d, tol)
                         .transpose();
    }
    return hat * d.legendre.inverse;
}

/// Current-step block: int_0^{tau_k} k_r((c/sigma)(tau_k - s)) P_l(s) ds, transformed.
template <Kernel K>
[[nodiscard]] Eigen::MatrixXcd current_block(const K& kernel, int r, const Discretization& d, const Physics& phys,
                                             double tol) {
    const double kappa = phys.time_scale();
    Eigen::MatrixXcd hat(d.q, d.q);
    for (int k = 0; k < d.q; ++k) {
        const double tk = d.tau.nodes[k];
        hat.row(k) = detail::legendre_moments(
                         [&](double s) { return cplx(kernel.reduced(r, kappa * (tk - s))); }, 0.0, tk, d, tol)
                         .transpose();
    }
    return hat * d.legendre.inverse;
}

inline std::vector<cplx> prefactor_table(int p, const auto& kernel) {
    std::vector<cplx> pref(p * p);
    for (int m = 0; m < p; ++m)
        for (int n = 0; n < p; ++n) pref[m * p + n] = (m + n) % 2 ? cplx(0.0) : cplx(kernel.prefactor(m, n));
    return pref;
}

template <Kernel K>
void precompute_C(PrecomputedArrays& a, const K& kernel, const Discretization& d, const Physics& phys,
                  const CollocationOptions& opt = {}) {
    a.C.assign(2 * phys.p - 1, Eigen::MatrixXcd());
    std::vector<int> rs;
    for (int r = 0; r <= 2 * (phys.p - 1); r += 2) rs.push_back(r);
    parallel_for(static_cast<int>(rs.size()), opt.threads,
                 [&](int i) { a.C[rs[i]] = current_block(kernel, rs[i], d, phys, opt.quad_tol); });
    a.counters.current += static_cast<long>(rs.size()) * d.q * d.q;
}

template <Kernel K>
void precompute_L(PrecomputedArrays& a, const K& kernel, const Discretization& d, const Physics& phys,
                  const CollocationOptions& opt = {}) {
    const int nloc = d.M - 1;
    a.L.assign(2 * phys.p - 1, {});
    std::vector<std::pair<int, int>> jobs;
    for (int r = 0; r <= 2 * (phys.p - 1); r += 2) {
        a.L[r].resize(nloc);
        for (int nu = 0; nu < nloc; ++nu) jobs.emplace_back(r, nu);
    }
    parallel_for(static_cast<int>(jobs.size()), opt.threads, [&](int i) {
        const auto [r, nu] = jobs[i];
        a.L[r][nu] = offset_block(kernel, r, d.M - nu - 1, d, phys, opt.quad_tol);
    });
    a.counters.local += static_cast<long>(jobs.size()) * d.q * d.q;
}

/// History arrays for an expansion valid from soe.t_start (kernel time).
inline void precompute_H(PrecomputedArrays& a, const SoeK& soe, const Discretization& d, const Physics& phys,
                         const CollocationOptions& opt = {}) {
    if (!d.history_active()) {
        a.ne = 0;
        return;
    }
    const double kappa = phys.time_scale();
    if (kappa * (d.M - 1) * d.dt < soe.t_start * (1.0 - 1e-12)) {
        throw std::invalid_argument("precompute_H: local window shorter than the expansion's validity start");
    }
    const int ne = soe.size();
    a.ne = ne;
    a.H.setZero(static_cast<Eigen::Index>(ne) * d.q, d.q);
    a.decay.resize(ne);
    for (int mu = 0; mu < ne; ++mu) a.decay[mu] = std::exp(-kappa * soe.lambdas[mu] * d.dt);

    parallel_for(ne, opt.threads, [&](int mu) {
        const cplx lam = kappa * soe.lambdas[mu];
        Eigen::MatrixXcd hat(d.q, d.q);
        for (int k = 0; k < d.q; ++k) {
            const double base = d.M * d.dt + d.tau.nodes[k];
            // modulus bound of the integrand; entries far below it are zero in double
            const double bound = d.dt * std::exp(-lam.real() * (base - d.dt));
            if (!(bound > 1e-300)) {
                hat.row(k).setZero();
                continue;
            }
            hat.row(k) = detail::legendre_moments(
                             [&](double s) {
                                 const cplx e = -lam * (base - s);
                                 return e.real() < -745.0 ? cplx(0.0) : std::exp(e);
                             },
                             0.0, d.dt, d, std::max(bound * 1e-15, 1e-300))
                             .transpose();
        }
        a.H.block(static_cast<Eigen::Index>(mu) * d.q, 0, d.q, d.q) = hat * d.legendre.inverse;
    });
    a.counters.history += static_cast<long>(ne) * d.q * d.q;

    const int r_max = 2 * (phys.p - 1);
    if (static_cast<int>(soe.reduced.size()) <= r_max) {
        throw std::invalid_argument("precompute_H: expansion lacks kernel indices up to 2(p-1)");
    }
    a.V.resize(r_max + 1, ne);
    a.r_soe = -1;
    for (int r = 0; r <= r_max; ++r) {
        for (int mu = 0; mu < ne; ++mu) a.V(r, mu) = soe.reduced[r][mu];
        for (int mu = 0; mu + 1 < ne; ++mu) {
            if (soe.reduced[r][mu] != cplx(0.0)) a.r_soe = r;
        }
    }
}

/// LU of I + (g^2/2 pi c) C with row m*q+k and column n*q+l.
inline numkit::DenseLU build_system(const PrecomputedArrays& a, const Physics& phys) {
    const int p = a.p;
    const int q = a.q;
    Eigen::MatrixXcd A = Eigen::MatrixXcd::Identity(p * q, p * q);
    const double cpl = phys.coupling();
    for (int m = 0; m < p; ++m)
        for (int n = 0; n < p; ++n) {
            if ((m + n) % 2) continue;
            A.block(m * q, n * q, q, q) += cpl * a.prefactor(m, n) * a.C[m + n];
        }
    return numkit::lu_factor(A);
}

/// All arrays for one (kernel, grid) pair. soe may be null when the history
/// never activates.
template <Kernel K>
[[nodiscard]] PrecomputedArrays precompute_all(const K& kernel, const SoeK* soe, const Discretization& d,
                                               const Physics& phys, const CollocationOptions& opt = {}) {
    PrecomputedArrays a;
    a.p = phys.p;
    a.q = d.q;
    a.M = d.M;
    a.pref = prefactor_table(phys.p, kernel);
    precompute_C(a, kernel, d, phys, opt);
    precompute_L(a, kernel, d, phys, opt);
    if (d.history_active()) {
        if (soe == nullptr) throw std::invalid_argument("precompute_all: history active but no expansion given");
        precompute_H(a, *soe, d, phys, opt);
    }
    a.lu = build_system(a, phys);
    return a;
}

}  // namespace cse
