#pragma once

// Evaluators for j_n, k_n and K_mn: Chebyshev tables for small arguments,
// sums of exponentials for large ones.

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cse/error.hpp"
#include "cse/numkit/chebyshev.hpp"
#include "cse/physics.hpp"
#include "cse/reference.hpp"
#include "cse/soe.hpp"

namespace cse {

struct KernelOptions {
    SoeOptions soe{};
    int cheb_start = 60;
    int cheb_max = 4000;
    double cheb_tol = 1e-13;
    double sample_tol = 1e-15;
};

/// (-1)^m (-i)^{m+n} Gamma((m+n+1)/2) / sqrt(m! n! / 2) for m+n even, else 0.
[[nodiscard]] inline cplx kernel_prefactor(int m, int n) {
    if (m < 0 || n < 0) throw std::out_of_range("kernel_prefactor: negative index");
    if ((m + n) % 2 != 0) return 0.0;
    const double lmag = std::lgamma(0.5 * (m + n + 1)) -
                        0.5 * (std::lgamma(m + 1.0) + std::lgamma(n + 1.0) - std::log(2.0));
    const double sign = (m % 2 == 0) ? 1.0 : -1.0;
    // (-i)^{m+n} is real for even m+n
    const double ipow = ((m + n) / 2) % 2 == 0 ? 1.0 : -1.0;
    return sign * ipow * std::exp(lmag);
}

/// Raw Chebyshev samples; what the optional on-disk cache stores.
struct KernelTables {
    double omega = 0.0;  // kernel_omega the k tables were built for
    double delta = 20.0;
    int n_max = 0;
    std::vector<std::vector<cplx>> j_samples;  // [n][node], nodes on [0, delta]
    std::vector<std::vector<cplx>> k_samples;  // [n][node], nodes on [0, delta/sqrt2]
};

class KernelBank {
public:
    KernelBank() = default;

    KernelBank(const Physics& phys, int n_max, const KernelTables& tables, SoeJ soe)
        : phys_(phys), n_max_(n_max), soe_(std::move(soe)) {
        if (n_max < 0) throw std::invalid_argument("KernelBank: n_max must be >= 0");
        if (tables.n_max < n_max || tables.delta != soe_.delta ||
            std::abs(tables.omega - phys.kernel_omega()) > 1e-15 * std::max(1.0, std::abs(phys.kernel_omega()))) {
            throw std::invalid_argument("KernelBank: tables do not match the requested bank");
        }
        delta_ = soe_.delta;
        s0_ = delta_ / std::numbers::sqrt2;
        tables_ = tables;
        j_.reserve(n_max + 1);
        k_.reserve(n_max + 1);
        for (int n = 0; n <= n_max; ++n) {
            j_.emplace_back(0.0, delta_, tables.j_samples[n]);
            k_.emplace_back(0.0, s0_, tables.k_samples[n]);
        }
        // tail of k_n past s0: k_n(s0) + sum_mu c_mu (e^{z_mu t} - e^{z_mu s0})
        const double w = phys.kernel_omega();
        const int ne = soe_.size();
        z_.resize(ne);
        for (int mu = 0; mu < ne; ++mu) z_[mu] = cplx(-std::numbers::sqrt2 * soe_.lambdas[mu], w);
        tail_coef_.assign(n_max + 1, std::vector<cplx>(ne, 0.0));
        tail_const_.assign(n_max + 1, 0.0);
        for (int n = 0; n <= n_max; ++n) {
            cplx c0 = k_[n].samples().back();
            if (n <= kSoeMaxN) {
                for (int mu = 0; mu < ne; ++mu) {
                    tail_coef_[n][mu] = soe_.weight(n, mu) / z_[mu];
                    c0 -= tail_coef_[n][mu] * std::exp(z_[mu] * s0_);
                }
            }
            tail_const_[n] = c0;
        }
    }

    [[nodiscard]] const Physics& physics() const { return phys_; }
    [[nodiscard]] int n_max() const { return n_max_; }
    [[nodiscard]] double delta() const { return delta_; }
    [[nodiscard]] double t_max() const { return soe_.t_max; }
    [[nodiscard]] const SoeJ& soe() const { return soe_; }
    [[nodiscard]] const KernelTables& tables() const { return tables_; }
    [[nodiscard]] const numkit::ChebInterpolant& j_table(int n) const { return j_.at(n); }
    [[nodiscard]] const numkit::ChebInterpolant& k_table(int n) const { return k_.at(n); }

    /// j_n(t); negative t by conjugation.
    [[nodiscard]] cplx jn(int n, double t) const {
        check_n(n);
        if (t < 0.0) return std::conj(jn(n, -t));
        if (t <= delta_) return j_[n](t);
        if (t > soe_.t_max) throw std::out_of_range("jn: t=" + std::to_string(t) + " beyond t_max");
        return soe_.eval(n, t);
    }

    /// k_n(t) = int_0^t e^{i w s} j_n(sqrt2 s) ds, t >= 0.
    [[nodiscard]] cplx kn(int n, double t) const {
        check_n(n);
        if (t < 0.0) throw std::invalid_argument("kn: t must be >= 0");
        if (t <= s0_) return k_[n](t);
        if (t > soe_.t_max / std::numbers::sqrt2) {
            throw std::out_of_range("kn: t=" + std::to_string(t) + " beyond t_max/sqrt2");
        }
        cplx s = 0.0;
        if (n <= kSoeMaxN) {
            const auto& c = tail_coef_[n];
            const double w = phys_.kernel_omega();
            for (std::size_t mu = 0; mu < z_.size(); ++mu) {
                const double e = -z_[mu].real() * t;
                if (e < 745.0) s += c[mu] * std::exp(-e);
            }
            s *= std::polar(1.0, w * t);
        }
        return tail_const_[n] + s;
    }

    [[nodiscard]] cplx reduced(int r, double t) const { return kn(r, t); }
    [[nodiscard]] cplx prefactor(int m, int n) const { return kernel_prefactor(m, n); }

    [[nodiscard]] cplx Kmn(int m, int n, double t) const {
        if (m < 0 || n < 0 || m >= phys_.p || n >= phys_.p) {
            throw std::out_of_range("Kmn: mode index outside 0..p-1");
        }
        if ((m + n) % 2 != 0) return 0.0;
        return kernel_prefactor(m, n) * kn(m + n, t);
    }

private:
    void check_n(int n) const {
        if (n < 0 || n > n_max_) throw std::out_of_range("kernel index " + std::to_string(n) + " outside 0..n_max");
    }

    Physics phys_{};
    int n_max_ = 0;
    double delta_ = 20.0;
    double s0_ = 20.0 / std::numbers::sqrt2;
    SoeJ soe_;
    KernelTables tables_;
    std::vector<numkit::ChebInterpolant> j_;
    std::vector<numkit::ChebInterpolant> k_;
    std::vector<cplx> z_;
    std::vector<std::vector<cplx>> tail_coef_;
    std::vector<cplx> tail_const_;
};

/// Piecewise Chebyshev tables of j_n on dyadic panels [delta 2^k, delta 2^{k+1}]
/// covering (delta, t_hi], sampled from the bank. Much cheaper to evaluate
/// than the exponential sum when many large arguments are needed.
class JnLargeTable {
public:
    JnLargeTable() = default;

    JnLargeTable(const KernelBank& bank, int n_count, double t_hi, int nodes = 24, double tol = 1e-13)
        : bank_(&bank), n_count_(n_count), lo_(bank.delta()) {
        if (n_count < 1 || n_count > bank.n_max() + 1) throw std::invalid_argument("JnLargeTable: bad mode count");
        t_hi = std::min(t_hi, bank.t_max());
        double a = lo_;
        while (a < t_hi) {
            const double b = 2.0 * a;
            int n = nodes;
            for (;;) {
                std::vector<numkit::ChebInterpolant> panel;
                for (int m = 0; m < n_count; ++m)
                    panel.push_back(numkit::cheb_fit([&](double t) { return bank.jn(m, t); }, a, b, n));
                double err = 0.0;
                for (int i = 0; i < 2 * n; ++i) {
                    const double t = a + (b - a) * (i + 0.5) / (2 * n);
                    for (int m = 0; m < n_count; ++m) err = std::max(err, std::abs(panel[m](t) - bank.jn(m, t)));
                }
                if (err < tol || n >= 512) {
                    panels_.push_back(std::move(panel));
                    break;
                }
                n *= 2;
            }
            a = b;
        }
        hi_ = a;
    }

    /// j_n(t) for any real t within the bank's range.
    [[nodiscard]] cplx operator()(int n, double t) const {
        if (t < 0.0) return std::conj((*this)(n, -t));
        if (t <= lo_ || t > hi_ || n >= n_count_) return bank_->jn(n, t);
        const int k = std::clamp(static_cast<int>(std::floor(std::log2(t / lo_))), 0,
                                 static_cast<int>(panels_.size()) - 1);
        return panels_[k][n](t);
    }

private:
    const KernelBank* bank_ = nullptr;
    int n_count_ = 0;
    double lo_ = 20.0;
    double hi_ = 20.0;
    std::vector<std::vector<numkit::ChebInterpolant>> panels_;
};

/// Tabulates j_n on [0, delta] by nested doubling of the Chebyshev grid until
/// the new nodes agree with the coarser interpolant to cheb_tol, then k_n on
/// [0, delta/sqrt2] by multiplying with e^{i w s} and integrating spectrally.
[[nodiscard]] inline KernelTables build_kernel_tables(const Physics& phys, int n_max, const KernelOptions& opt = {}) {
    if (n_max < 0) throw std::invalid_argument("build_kernel_tables: n_max must be >= 0");
    const double delta = opt.soe.delta;
    DirectOptions dopt;
    dopt.tol = opt.sample_tol;
    dopt.asymptotic_from = std::numeric_limits<double>::infinity();

    int n = std::max(2, opt.cheb_start);
    std::vector<Eigen::VectorXcd> samples;
    for (double t : numkit::chebyshev_points(n, 0.0, delta)) samples.push_back(jn_direct(n_max, t, dopt));

    auto interpolant = [&](const std::vector<Eigen::VectorXcd>& s, int idx) {
        std::vector<cplx> v(s.size());
        for (std::size_t i = 0; i < s.size(); ++i) v[i] = s[i][idx];
        return numkit::ChebInterpolant(0.0, delta, std::move(v));
    };

    for (;;) {
        const int n2 = 2 * n - 1;
        if (n2 > opt.cheb_max) throw NumericalError("build_kernel_tables: Chebyshev tables did not converge");
        const auto x2 = numkit::chebyshev_points(n2, 0.0, delta);
        std::vector<Eigen::VectorXcd> fine(n2);
        for (int i = 0; i < n; ++i) fine[2 * i] = samples[i];
        double err = 0.0;
        std::vector<numkit::ChebInterpolant> coarse;
        for (int m = 0; m <= n_max; ++m) coarse.push_back(interpolant(samples, m));
        for (int i = 1; i < n2; i += 2) {
            fine[i] = jn_direct(n_max, x2[i], dopt);
            for (int m = 0; m <= n_max; ++m) err = std::max(err, std::abs(coarse[m](x2[i]) - fine[i][m]));
        }
        samples = std::move(fine);
        n = n2;
        if (err < opt.cheb_tol) break;
    }

    for (int m = 0; m <= n_max; ++m) samples.front()[m] = 1.0;

    KernelTables tab;
    tab.omega = phys.kernel_omega();
    tab.delta = delta;
    tab.n_max = n_max;
    tab.j_samples.resize(n_max + 1);
    tab.k_samples.resize(n_max + 1);
    const double w = tab.omega;
    const int dense = std::abs(w) > 5.0 ? static_cast<int>(std::ceil(std::abs(w) / 5.0)) : 1;
    const int nk = (n - 1) * dense + 1;
    const auto sk = numkit::chebyshev_points(nk, 0.0, delta / std::numbers::sqrt2);
    for (int m = 0; m <= n_max; ++m) {
        auto jt = interpolant(samples, m);
        tab.j_samples[m] = jt.samples();
        std::vector<cplx> integrand(nk);
        for (int i = 0; i < nk; ++i) {
            // with dense == 1 the node maps coincide and the samples are reused
            const cplx jv = dense == 1 ? jt.samples()[i] : jt(std::numbers::sqrt2 * sk[i]);
            integrand[i] = std::polar(1.0, w * sk[i]) * jv;
        }
        const auto kt = numkit::spectral_integrate(
            numkit::ChebInterpolant(0.0, delta / std::numbers::sqrt2, std::move(integrand)));
        tab.k_samples[m] = kt.samples();
    }
    return tab;
}

[[nodiscard]] inline KernelBank build_kernel_bank(const Physics& phys, int n_max, const KernelOptions& opt = {}) {
    phys.validate();
    return KernelBank(phys, n_max, build_kernel_tables(phys, n_max, opt), build_soe_j(opt.soe));
}

}  // namespace cse
