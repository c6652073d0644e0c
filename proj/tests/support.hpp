#pragma once

// Banks shared by the tests of one binary; building them dominates setup.

#include <map>
#include <memory>
#include <mutex>

#include "cse/kernels.hpp"

namespace testing_support {

/// Bank for the default physics (Omega sigma / c = 0.1) covering n <= n_max,
/// with p = n_max/2 + 1 modes.
inline const cse::KernelBank& bank(int n_max) {
    static std::map<int, std::unique_ptr<cse::KernelBank>> cache;
    static std::mutex mu;
    std::lock_guard lock(mu);
    auto& slot = cache[n_max];
    if (!slot) {
        cse::Physics phys;
        phys.p = n_max / 2 + 1;
        slot = std::make_unique<cse::KernelBank>(cse::build_kernel_bank(phys, n_max));
    }
    return *slot;
}

}  // namespace testing_support
