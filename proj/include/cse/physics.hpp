#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace cse {

/// Model constants. Lengths and times share the units of c.
struct Physics {
    double c = 1.0;
    double omega = 1.0;  // atomic resonance frequency
    double sigma = 0.1;  // cloud width
    double g = 0.2;      // coupling
    int p = 1;           // number of Hermite modes

    void validate() const {
        if (!(c > 0.0)) throw std::invalid_argument("physics.c must be positive");
        if (!(sigma > 0.0)) throw std::invalid_argument("physics.sigma must be positive");
        if (!std::isfinite(omega)) throw std::invalid_argument("physics.omega must be finite");
        if (!std::isfinite(g)) throw std::invalid_argument("physics.g must be finite");
        if (p < 1) throw std::invalid_argument("physics.p must be >= 1");
    }

    /// Frequency of the kernel phase e^{i w s} in dimensionless kernel time.
    [[nodiscard]] double kernel_omega() const { return omega * sigma / c; }
    /// Map from physical time to kernel time.
    [[nodiscard]] double time_scale() const { return c / sigma; }
    /// Coefficient g^2 / (2 pi c) of the integral operator.
    [[nodiscard]] double coupling() const { return g * g / (2.0 * std::numbers::pi * c); }
    /// Highest kernel index needed for p modes.
    [[nodiscard]] int n_max() const { return 2 * (p - 1); }
};

}  // namespace cse
