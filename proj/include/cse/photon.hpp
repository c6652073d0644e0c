#pragma once

// Photon amplitude u(x,t) from the modal trajectory, and P_u(t).

#include <cmath>
#include <complex>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "cse/kernels.hpp"
#include "cse/numkit/quadrature.hpp"
#include "cse/parallel.hpp"
#include "cse/sources.hpp"
#include "cse/stepper.hpp"

namespace cse {

struct PhotonOptions {
    /// Gauss-Legendre nodes per panel; 0 means 2q.
    int order = 0;
    /// largest change of the j_n argument across one panel
    double max_arg_change = 2.0;
};

/// u - U at (x, t):
/// -(ig/2 pi sigma) sum_n (-i)^n 2^{n/2} Gamma((n+1)/2)/sqrt(n!)
///   int_0^t a_n(s) [j_n(2(c(t-s)-x)/sigma) + (-1)^n j_n(2(c(t-s)+x)/sigma)] ds.
[[nodiscard]] inline cplx reconstruct_scattered(const Trajectory& tr, const KernelBank& bank, const Physics& phys,
                                                double x, double t, const PhotonOptions& opt = {},
                                                const JnLargeTable* table = nullptr) {
    const auto& d = tr.disc;
    if (t < 0.0 || t > d.T * (1.0 + 1e-12)) throw std::out_of_range("reconstruct_scattered: t outside trajectory");
    if (t == 0.0 || phys.g == 0.0) return 0.0;
    const int p = tr.p();
    if (bank.n_max() < p - 1) throw std::invalid_argument("reconstruct_scattered: kernel bank too small");

    std::vector<cplx> coef(p);
    for (int n = 0; n < p; ++n) {
        const double mag = std::exp(0.5 * n * std::log(2.0) + std::lgamma(0.5 * (n + 1)) - 0.5 * std::lgamma(n + 1.0));
        coef[n] = std::pow(cplx(0.0, -1.0), n) * mag;
    }
    const int order = opt.order > 0 ? opt.order : 2 * d.q;
    const auto ref = numkit::gauss_legendre(order, 0.0, 1.0);
    const double rate = 2.0 * phys.c / phys.sigma;  // d(arg)/ds
    const double panel_max = opt.max_arg_change / rate;

    cplx total = 0.0;
    const int last = std::min(d.N, static_cast<int>(std::ceil(t / d.dt - 1e-12)));
    for (int j = 1; j <= last; ++j) {
        const double s_lo = (j - 1) * d.dt;
        const double s_hi = std::min(j * d.dt, t);
        if (s_hi <= s_lo) continue;
        const Eigen::MatrixXcd A = tr.coefficients(j);  // q x p Legendre coefficients
        const int panels = std::max(1, static_cast<int>(std::ceil((s_hi - s_lo) / panel_max)));
        const double h = (s_hi - s_lo) / panels;
        for (int pi = 0; pi < panels; ++pi) {
            const double a = s_lo + pi * h;
            for (std::size_t i = 0; i < ref.size(); ++i) {
                const double s = a + h * ref.nodes[i];
                const double w = h * ref.weights[i];
                const Eigen::VectorXcd alpha =
                    A.transpose() * numkit::legendre_values(d.q, s - s_lo, d.dt).cast<cplx>();
                const cplx rot = std::polar(1.0, -phys.omega * s);
                const double u1 = 2.0 * (phys.c * (t - s) - x) / phys.sigma;
                const double u2 = 2.0 * (phys.c * (t - s) + x) / phys.sigma;
                cplx acc = 0.0;
                for (int n = 0; n < p; ++n) {
                    const cplx j1 = table ? (*table)(n, u1) : bank.jn(n, u1);
                    const cplx j2 = table ? (*table)(n, u2) : bank.jn(n, u2);
                    const cplx jj = j1 + (n % 2 == 0 ? 1.0 : -1.0) * j2;
                    acc += coef[n] * alpha[n] * jj;
                }
                total += w * rot * acc;
            }
        }
    }
    return cplx(0.0, -phys.g / (2.0 * std::numbers::pi * phys.sigma)) * total;
}

/// u = U + scattered; U is the translated packet for a wavepacket source and 0 otherwise.
[[nodiscard]] inline cplx total_field(const Trajectory& tr, const KernelBank& bank, const Physics& phys,
                                      const SourceTerm& src, double x, double t, const PhotonOptions& opt = {}) {
    cplx U = 0.0;
    if (const auto* wp = src.wavepacket()) U = initial_field(*wp, x - phys.c * t);
    return U + reconstruct_scattered(tr, bank, phys, x, t, opt);
}

struct FieldGrid {
    std::vector<double> x;
    std::vector<double> times;
    std::vector<cplx> u;          // u[ti * x.size() + xi]
    std::vector<cplx> scattered;  // u - U, same layout

    [[nodiscard]] cplx value(std::size_t ti, std::size_t xi) const { return u[ti * x.size() + xi]; }

    void write_csv(std::ostream& os) const {
        os << "x,t,re_u,im_u,re_u_minus_U,im_u_minus_U\n";
        os.precision(17);
        for (std::size_t ti = 0; ti < times.size(); ++ti)
            for (std::size_t xi = 0; xi < x.size(); ++xi) {
                const cplx v = u[ti * x.size() + xi];
                const cplx s = scattered[ti * x.size() + xi];
                os << x[xi] << ',' << times[ti] << ',' << v.real() << ',' << v.imag() << ',' << s.real() << ','
                   << s.imag() << '\n';
            }
    }
};

[[nodiscard]] inline FieldGrid sample_field(const Trajectory& tr, const KernelBank& bank, const Physics& phys,
                                            const SourceTerm& src, std::vector<double> xs, std::vector<double> times,
                                            int threads = 1, const PhotonOptions& opt = {}) {
    FieldGrid g;
    g.x = std::move(xs);
    g.times = std::move(times);
    const std::size_t nx = g.x.size();
    g.u.resize(nx * g.times.size());
    g.scattered.resize(g.u.size());
    double reach = 0.0;
    for (double t : g.times)
        for (double x : {g.x.front(), g.x.back()}) reach = std::max(reach, 2.0 * (phys.c * t + std::abs(x)) / phys.sigma);
    const JnLargeTable table(bank, tr.p(), reach);
    parallel_for(static_cast<int>(g.u.size()), threads, [&](int idx) {
        const std::size_t ti = idx / nx;
        const std::size_t xi = idx % nx;
        const double x = g.x[xi];
        const double t = g.times[ti];
        const cplx s = reconstruct_scattered(tr, bank, phys, x, t, opt, &table);
        cplx U = 0.0;
        if (const auto* wp = src.wavepacket()) U = initial_field(*wp, x - phys.c * t);
        g.scattered[idx] = s;
        g.u[idx] = U + s;
    });
    return g;
}

struct PhotonProbability {
    double value = 0.0;
    double radius = 0.0;          // max |x| of the grid
    double edge_magnitude = 0.0;  // max |u| at the two grid ends
    /// true when |u|^2 at the edges is not negligible relative to the bulk
    bool truncation_warning = false;
};

/// Trapezoid integral of |u|^2 over the (possibly nonuniform) grid at time index ti.
[[nodiscard]] inline PhotonProbability photon_probability(const FieldGrid& g, std::size_t ti = 0) {
    PhotonProbability r;
    const std::size_t nx = g.x.size();
    if (nx == 0) return r;
    for (std::size_t i = 0; i + 1 < nx; ++i) {
        const double a = std::norm(g.value(ti, i));
        const double b = std::norm(g.value(ti, i + 1));
        r.value += 0.5 * (a + b) * (g.x[i + 1] - g.x[i]);
    }
    r.radius = std::max(std::abs(g.x.front()), std::abs(g.x.back()));
    r.edge_magnitude = std::max(std::abs(g.value(ti, 0)), std::abs(g.value(ti, nx - 1)));
    r.truncation_warning = r.edge_magnitude * r.edge_magnitude * r.radius > 1e-6;
    return r;
}

/// Symmetric grid: step `fine` on |x| <= inner, step `coarse` out to `outer`.
[[nodiscard]] inline std::vector<double> two_level_grid(double inner, double fine, double outer, double coarse) {
    if (!(fine > 0.0) || !(coarse > 0.0) || !(inner >= 0.0) || !(outer >= inner)) {
        throw std::invalid_argument("two_level_grid: invalid extents");
    }
    std::vector<double> pos;
    const long nf = std::lround(inner / fine);
    for (long i = 0; i <= nf; ++i) pos.push_back(i * fine);
    const long nc = std::lround((outer - inner) / coarse);
    for (long i = 1; i <= nc; ++i) pos.push_back(inner + i * coarse);
    std::vector<double> xs;
    for (auto it = pos.rbegin(); it != pos.rend(); ++it)
        if (*it > 0.0) xs.push_back(-*it);
    xs.insert(xs.end(), pos.begin(), pos.end());
    return xs;
}

}  // namespace cse
