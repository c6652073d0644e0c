#pragma once

// Convenience layer tying kernels, expansion lift, arrays and marching together.

#include <chrono>
#include <stdexcept>
#include <string>

#include "cse/collocation.hpp"
#include "cse/kernels.hpp"
#include "cse/oracle.hpp"
#include "cse/soe.hpp"
#include "cse/stepper.hpp"

namespace cse {

struct FastSetup {
    Discretization disc;
    SoeK soe;
    PrecomputedArrays arrays;
    double seconds = 0.0;
};

[[nodiscard]] inline Discretization make_discretization(const KernelBank& bank, const Physics& phys, double T, int N,
                                                        int q) {
    auto d = build_grid(T, N, q);
    select_window(d, phys, bank.delta(), bank.t_max());
    return d;
}

inline void check_bank(const KernelBank& bank, const Physics& phys) {
    if (bank.n_max() < phys.n_max()) {
        throw std::invalid_argument("kernel bank covers n <= " + std::to_string(bank.n_max()) + " but p=" +
                                    std::to_string(phys.p) + " needs " + std::to_string(phys.n_max()));
    }
    if (bank.physics().kernel_omega() != phys.kernel_omega()) {
        throw std::invalid_argument("kernel bank was built for a different Omega*sigma/c");
    }
}

[[nodiscard]] inline FastSetup prepare_fast(const KernelBank& bank, const Physics& phys, const Discretization& d,
                                            const CollocationOptions& opt = {}) {
    check_bank(bank, phys);
    const auto t0 = std::chrono::steady_clock::now();
    FastSetup s;
    s.disc = d;
    if (d.history_active()) s.soe = lift_soe_to_K(bank.soe(), phys, bank, phys.n_max());
    s.arrays = precompute_all(bank, d.history_active() ? &s.soe : nullptr, d, phys, opt);
    s.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return s;
}

[[nodiscard]] inline Trajectory solve_fast(const KernelBank& bank, const Physics& phys, const Discretization& d,
                                           const SourceTerm& src, const CollocationOptions& opt = {}) {
    const auto s = prepare_fast(bank, phys, d, opt);
    return march(s.arrays, phys, d, src);
}

struct TimingResult {
    double fast = 0.0;          // marching only
    double direct = 0.0;        // marching only
    double fast_setup = 0.0;
    double direct_setup = 0.0;
    long history_values = 0;    // complex values held by the fast solver's history state
};

/// Wall-clock of both solvers on the same problem. Only the marching phase
/// enters fast/direct; array setup is reported separately.
[[nodiscard]] inline TimingResult timing_probe(const KernelBank& bank, const Physics& phys, const Discretization& d,
                                               const SourceTerm& src, const CollocationOptions& opt = {},
                                               int repeats = 1) {
    TimingResult r;
    const auto fs = prepare_fast(bank, phys, d, opt);
    r.fast_setup = fs.seconds;
    r.fast = std::numeric_limits<double>::infinity();
    for (int i = 0; i < std::max(1, repeats); ++i) {
        MarchTiming mt;
        SolverState st;
        (void)march(fs.arrays, phys, d, src, {}, &mt, &st);
        r.fast = std::min(r.fast, mt.seconds);
        long ring = 0;
        for (const auto& m : st.ring) ring += m.size();
        r.history_values = ring + st.h.size();
    }
    const auto t0 = std::chrono::steady_clock::now();
    const auto dense = precompute_dense(bank, d, phys, opt);
    r.direct_setup = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    r.direct = std::numeric_limits<double>::infinity();
    for (int i = 0; i < std::max(1, repeats); ++i) {
        double sec = 0.0;
        (void)direct_march(dense, phys, d, src, &sec);
        r.direct = std::min(r.direct, sec);
    }
    return r;
}

}  // namespace cse
