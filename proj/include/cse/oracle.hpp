#pragma once

// Reference solver: the local integral is extended back to t = 0, so every
// step sums over the whole stored history. Quadratic cost in N.

#include <chrono>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cse/collocation.hpp"
#include "cse/stepper.hpp"

namespace cse {

inline constexpr int kDirectMaxSteps = 2000;

struct DenseArrays {
    PrecomputedArrays base;                        // C, prefactors, LU
    std::vector<std::vector<Eigen::MatrixXcd>> D;  // D[r][offset], offset = 1..N-1
};

template <Kernel K>
[[nodiscard]] DenseArrays precompute_dense(const K& kernel, const Discretization& d, const Physics& phys,
                                           const CollocationOptions& opt = {}) {
    if (d.N > kDirectMaxSteps) {
        throw std::invalid_argument("direct solver limited to N <= " + std::to_string(kDirectMaxSteps) +
                                    " (got " + std::to_string(d.N) + ")");
    }
    DenseArrays out;
    auto& a = out.base;
    a.p = phys.p;
    a.q = d.q;
    a.M = d.N;
    a.pref = prefactor_table(phys.p, kernel);
    precompute_C(a, kernel, d, phys, opt);
    out.D.assign(2 * phys.p - 1, {});
    std::vector<std::pair<int, int>> jobs;
    for (int r = 0; r <= 2 * (phys.p - 1); r += 2) {
        out.D[r].resize(d.N);
        for (int off = 1; off < d.N; ++off) jobs.emplace_back(r, off);
    }
    parallel_for(static_cast<int>(jobs.size()), opt.threads, [&](int i) {
        const auto [r, off] = jobs[i];
        out.D[r][off] = offset_block(kernel, r, off, d, phys, opt.quad_tol);
    });
    a.counters.local += static_cast<long>(jobs.size()) * d.q * d.q;
    a.lu = build_system(a, phys);
    return out;
}

/// Marches with the full dense history. Summation runs over earlier steps in
/// increasing order, matching the fast solver's local loop.
[[nodiscard]] inline Trajectory direct_march(const DenseArrays& arr, const Physics& phys, const Discretization& d,
                                             const SourceTerm& src, double* seconds = nullptr) {
    const auto& a = arr.base;
    const double cpl = phys.coupling();
    Trajectory tr;
    tr.disc = d;
    tr.omega = phys.omega;
    tr.steps.reserve(d.N);
    const auto t0 = std::chrono::steady_clock::now();
    for (int j = 1; j <= d.N; ++j) {
        Eigen::MatrixXcd b = src.at_step(d, j);
        for (int from = 1; from < j; ++from) {
            const int off = j - from;
            detail::subtract_blocks(b, a, cpl, tr.steps[from - 1],
                                    [&](int r) -> const Eigen::MatrixXcd& { return arr.D[r][off]; });
        }
        tr.steps.push_back(detail::solve_step(a, b));
    }
    if (seconds) *seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return tr;
}

template <Kernel K>
[[nodiscard]] Trajectory direct_solve(const K& kernel, const Physics& phys, const Discretization& d,
                                      const SourceTerm& src, const CollocationOptions& opt = {}) {
    const auto arr = precompute_dense(kernel, d, phys, opt);
    return direct_march(arr, phys, d, src);
}

}  // namespace cse
