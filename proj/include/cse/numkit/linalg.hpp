#pragma once

#include <complex>
#include <stdexcept>

#include <Eigen/Dense>

#include "cse/error.hpp"

namespace cse::numkit {

/// Partial-pivoting LU of a dense complex matrix (Eigen::PartialPivLU)
/// with an explicit singularity check on the pivots.
class DenseLU {
public:
    DenseLU() = default;

    explicit DenseLU(const Eigen::MatrixXcd& a) {
        if (a.rows() != a.cols()) throw std::invalid_argument("lu_factor: matrix must be square");
        if (a.rows() == 0) throw std::invalid_argument("lu_factor: empty matrix");
        lu_.compute(a);
        const auto diag = lu_.matrixLU().diagonal().cwiseAbs();
        const double scale = a.cwiseAbs().maxCoeff();
        if (!(scale > 0.0) || diag.minCoeff() <= 1e-14 * scale) {
            throw NumericalError("lu_factor: matrix is singular to working precision");
        }
    }

    [[nodiscard]] Eigen::VectorXcd solve(const Eigen::VectorXcd& b) const {
        if (b.size() != lu_.matrixLU().rows()) {
            throw std::invalid_argument("lu_solve: dimension mismatch");
        }
        return lu_.solve(b);
    }

    [[nodiscard]] Eigen::Index size() const { return lu_.matrixLU().rows(); }

private:
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu_;
};

[[nodiscard]] inline DenseLU lu_factor(const Eigen::MatrixXcd& a) { return DenseLU(a); }

[[nodiscard]] inline Eigen::VectorXcd lu_solve(const DenseLU& lu, const Eigen::VectorXcd& b) {
    return lu.solve(b);
}

}  // namespace cse::numkit
