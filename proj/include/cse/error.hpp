#pragma once

#include <stdexcept>
#include <string>

namespace cse {

/// Raised when a numerical procedure cannot meet its accuracy contract
/// (quadrature non-convergence, singular systems, overflow, failed
/// validation sweeps). Precondition violations use std::invalid_argument.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace cse
