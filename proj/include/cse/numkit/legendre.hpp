#pragma once

#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

#include "cse/error.hpp"
#include "cse/numkit/quadrature.hpp"

namespace cse::numkit {

/// Legendre polynomial of degree l on [0, dt], normalized so P_l(dt) = 1
/// (the affine image of the standard P_l on [-1, 1]).
[[nodiscard]] inline double legendre_eval(int l, double tau, double dt) {
    if (l < 0) throw std::invalid_argument("legendre_eval: degree must be >= 0");
    return detail::legendre_with_derivative(l, 2.0 * tau / dt - 1.0).first;
}

/// Values P_0(tau)..P_{q-1}(tau) on [0, dt].
[[nodiscard]] inline Eigen::VectorXd legendre_values(int q, double tau, double dt) {
    Eigen::VectorXd v(q);
    const double x = 2.0 * tau / dt - 1.0;
    if (q > 0) v[0] = 1.0;
    if (q > 1) v[1] = x;
    for (int k = 2; k < q; ++k) v[k] = ((2.0 * k - 1.0) * x * v[k - 1] - (k - 1.0) * v[k - 2]) / k;
    return v;
}

/// Grid <-> Legendre-coefficient maps on one step of length dt.
/// forward(k, l) = P_l(tau_k); inverse is the discrete Legendre transform.
struct LegendreTransform {
    Eigen::MatrixXd forward;
    Eigen::MatrixXd inverse;
};

/// Builds the pair from the q-point Gauss-Legendre rule on [0, dt]. The
/// inverse uses discrete orthogonality of P_l under the Gauss rule,
/// inverse(l, k) = (2l+1)/dt * w_k * P_l(tau_k), and is checked against
/// the forward map.
[[nodiscard]] inline LegendreTransform legendre_transform_pair(int q, double dt) {
    if (q < 1) throw std::invalid_argument("legendre_transform_pair: q must be >= 1");
    const QuadRule rule = gauss_legendre(q, 0.0, dt);
    LegendreTransform t;
    t.forward.resize(q, q);
    t.inverse.resize(q, q);
    for (int k = 0; k < q; ++k) {
        const Eigen::VectorXd p = legendre_values(q, rule.nodes[k], dt);
        for (int l = 0; l < q; ++l) {
            t.forward(k, l) = p[l];
            t.inverse(l, k) = (2.0 * l + 1.0) / dt * rule.weights[k] * p[l];
        }
    }
    const double residual =
        (t.forward * t.inverse - Eigen::MatrixXd::Identity(q, q)).cwiseAbs().maxCoeff();
    if (residual > 1e-12) {
        throw NumericalError("legendre_transform_pair: inversion residual " +
                             std::to_string(residual));
    }
    return t;
}

}  // namespace cse::numkit
