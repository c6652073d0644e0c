#pragma once

// Time marching of the discretized Volterra equation with a local window of
// exactly integrated steps and a sum-of-exponentials history.

#include <chrono>
#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "cse/collocation.hpp"
#include "cse/physics.hpp"
#include "cse/sources.hpp"

namespace cse {

/// Nodal values alpha_{n}(t_{jk}) for every step, stored as q x p blocks.
struct Trajectory {
    Discretization disc;
    double omega = 0.0;
    std::vector<Eigen::MatrixXcd> steps;  // steps[j-1](k, n)

    [[nodiscard]] int p() const { return steps.empty() ? 0 : static_cast<int>(steps.front().cols()); }
    [[nodiscard]] int N() const { return static_cast<int>(steps.size()); }

    [[nodiscard]] cplx alpha(int n, int j, int k) const { return steps.at(j - 1)(k, n); }
    /// a_n(t) = e^{-i Omega t} alpha_n(t) at a node.
    [[nodiscard]] cplx a(int n, int j, int k) const {
        return std::polar(1.0, -omega * disc.node(j, k)) * alpha(n, j, k);
    }

    /// Legendre coefficients of alpha on step j, q x p.
    [[nodiscard]] Eigen::MatrixXcd coefficients(int j) const {
        return disc.legendre.inverse.cast<cplx>() * steps.at(j - 1);
    }

    /// alpha_n at the right end of step j (P_l(dt) = 1).
    [[nodiscard]] Eigen::VectorXcd endpoint(int j) const { return coefficients(j).colwise().sum().transpose(); }

    /// alpha_n(t) for t in [0, T] from the local Legendre expansion.
    [[nodiscard]] Eigen::VectorXcd at(double t) const {
        if (t < 0.0 || t > disc.T * (1.0 + 1e-14)) throw std::out_of_range("Trajectory::at: t outside [0, T]");
        int j = static_cast<int>(std::floor(t / disc.dt)) + 1;
        j = std::clamp(j, 1, N());
        const double tau = t - (j - 1) * disc.dt;
        const Eigen::VectorXcd P = numkit::legendre_values(disc.q, tau, disc.dt).cast<cplx>();
        return coefficients(j).transpose() * P;
    }
};

/// P_a = sum_n |alpha_n|^2 at node (j, k).
[[nodiscard]] inline double atomic_probability(const Trajectory& tr, int j, int k) {
    return tr.steps.at(j - 1).row(k).squaredNorm();
}

/// E(t) = sqrt(sum_n |alpha_n(t) - alpha_ref_n(t)|^2) at a shared step boundary t.
/// Mode counts may differ; the shorter set is padded with zeros.
[[nodiscard]] inline double error_E(const Trajectory& tr, const Trajectory& ref, double t) {
    auto boundary_value = [t](const Trajectory& x) {
        const double steps = t / x.disc.dt;
        const long j = std::lround(steps);
        if (j < 1 || j > x.N() || std::abs(steps - j) > 1e-9 * std::max(1.0, steps)) {
            throw std::invalid_argument("error_E: t is not a step boundary of both runs");
        }
        return x.endpoint(static_cast<int>(j));
    };
    const Eigen::VectorXcd a = boundary_value(tr);
    const Eigen::VectorXcd b = boundary_value(ref);
    const Eigen::Index n = std::max(a.size(), b.size());
    double s = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const cplx x = i < a.size() ? a[i] : cplx(0.0);
        const cplx y = i < b.size() ? b[i] : cplx(0.0);
        s += std::norm(x - y);
    }
    return std::sqrt(s);
}

/// One completed step as seen by an output sink.
struct Checkpoint {
    int j = 0;
    const Discretization* disc = nullptr;
    const Eigen::MatrixXcd* alpha = nullptr;  // q x p
};
using CheckpointSink = std::function<void(const Checkpoint&)>;

/// Marching state: ring buffer of the last M steps and history coefficients.
struct SolverState {
    int j = 0;                          // last completed step
    std::vector<Eigen::MatrixXcd> ring; // ring[(j-1) % M] holds step j
    Eigen::MatrixXcd h;                 // (ne*q) x p, row mu*q+k, column n
    long local_block_products = 0;
    long history_mode_updates = 0;

    [[nodiscard]] const Eigen::MatrixXcd& step_values(int step, int M) const {
        return ring[(step - 1) % M];
    }
};

namespace detail {

// b(:,m) -= cpl * pref(m,n) * (B_{m+n} * alpha(:,n)) for even m+n, where
// block(r) yields B_r.
template <class BlockFn>
void subtract_blocks(Eigen::MatrixXcd& b, const PrecomputedArrays& a, double cpl, const Eigen::MatrixXcd& alpha,
                     BlockFn&& block) {
    const int p = a.p;
    for (int r = 0; r <= 2 * (p - 1); r += 2) {
        const Eigen::MatrixXcd Y = block(r) * alpha;  // q x p
        const int m_lo = std::max(0, r - (p - 1));
        const int m_hi = std::min(p - 1, r);
        for (int m = m_lo; m <= m_hi; ++m) b.col(m) -= (cpl * a.prefactor(m, r - m)) * Y.col(r - m);
    }
}

// Solves the collocation system for the step given its assembled rhs.
inline Eigen::MatrixXcd solve_step(const PrecomputedArrays& a, Eigen::MatrixXcd& b) {
    const Eigen::Map<const Eigen::VectorXcd> flat(b.data(), b.size());  // index n*q+k
    const Eigen::VectorXcd x = a.lu.solve(flat);
    return Eigen::Map<const Eigen::MatrixXcd>(x.data(), a.q, a.p);
}

}  // namespace detail

/// h <- e^{-(c/sigma) lambda dt} h + sum_l H_{k,l,mu} alpha_{n, j-M, l}.
inline void update_history(SolverState& s, const PrecomputedArrays& a, const Eigen::MatrixXcd& oldest) {
    const int q = a.q;
    for (int mu = 0; mu < a.ne; ++mu) s.h.middleRows(static_cast<Eigen::Index>(mu) * q, q) *= a.decay[mu];
    s.h.noalias() += a.H * oldest;
    s.history_mode_updates += a.ne;
}

/// Advances the state by one step and returns the new q x p nodal block.
inline const Eigen::MatrixXcd& step(SolverState& s, const PrecomputedArrays& a, const Physics& phys,
                                    const Discretization& d, const SourceTerm& src) {
    const int j = s.j + 1;
    const int M = d.M;
    const int q = d.q;
    const int p = a.p;
    const double cpl = phys.coupling();
    if (s.ring.empty()) {
        s.ring.assign(M, Eigen::MatrixXcd::Zero(q, p));
        if (a.history_active()) s.h = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(a.ne) * q, p);
    }

    // history through the end of step j-M
    if (a.history_active() && j >= M + 1) update_history(s, a, s.step_values(j - M, M));

    Eigen::MatrixXcd b = src.at_step(d, j);

    for (int nu = std::max(0, M - j); nu <= M - 2; ++nu) {
        const int from = j - M + nu + 1;
        detail::subtract_blocks(b, a, cpl, s.step_values(from, M), [&](int r) -> const Eigen::MatrixXcd& {
            return a.L[r][nu];
        });
        ++s.local_block_products;
    }

    if (a.history_active() && j >= M + 1) {
        // S(:, n*R + r) = sum_mu v_{r,mu} h_{mu}(:, n)
        const int r_max = 2 * (p - 1);
        const int ne = a.ne;
        const int cm = ne - 1;  // constant mode
        const int r_soe = std::min(a.r_soe, r_max);
        for (int n = 0; n < p; ++n) {
            const Eigen::Map<const Eigen::MatrixXcd> hn(s.h.col(n).data(), q, ne);  // column mu
            Eigen::MatrixXcd S(q, r_max + 1);
            if (r_soe >= 0) S.leftCols(r_soe + 1).noalias() = hn * a.V.topRows(r_soe + 1).transpose();
            for (int r = std::max(0, r_soe + 1); r <= r_max; ++r) S.col(r) = a.V(r, cm) * hn.col(cm);
            for (int m = 0; m < p; ++m) {
                if ((m + n) % 2) continue;
                b.col(m) -= (cpl * a.prefactor(m, n)) * S.col(m + n);
            }
        }
    }

    Eigen::MatrixXcd& slot = s.ring[(j - 1) % M];
    slot = detail::solve_step(a, b);
    s.j = j;
    return slot;
}

struct MarchTiming {
    double seconds = 0.0;
};

/// Runs steps 1..N. The sink, if any, sees every completed step.
[[nodiscard]] inline Trajectory march(const PrecomputedArrays& a, const Physics& phys, const Discretization& d,
                                      const SourceTerm& src, const CheckpointSink& sink = {},
                                      MarchTiming* timing = nullptr, SolverState* final_state = nullptr) {
    Trajectory tr;
    tr.disc = d;
    tr.omega = phys.omega;
    tr.steps.reserve(d.N);
    SolverState s;
    const auto t0 = std::chrono::steady_clock::now();
    for (int j = 1; j <= d.N; ++j) {
        const Eigen::MatrixXcd& v = step(s, a, phys, d, src);
        tr.steps.push_back(v);
        if (sink) sink(Checkpoint{j, &d, &v});
    }
    if (timing) timing->seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (final_state) *final_state = std::move(s);
    return tr;
}

}  // namespace cse
