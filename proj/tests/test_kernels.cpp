#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "cse/kernels.hpp"
#include "cse/numkit/special.hpp"
#include "oracles.hpp"
#include "support.hpp"

using cse::cplx;
using testing_support::bank;

TEST(KernelBank, JnAtZeroIsExactlyOne) {
    const auto& b = bank(8);
    for (int n = 0; n <= 8; ++n) {
        EXPECT_EQ(b.jn(n, 0.0), cplx(1.0));
        EXPECT_EQ(b.tables().j_samples[n].front(), cplx(1.0));
    }
}

TEST(KernelBank, KnAtZeroVanishes) {
    const auto& b = bank(8);
    for (int n = 0; n <= 8; ++n) EXPECT_LT(std::abs(b.kn(n, 0.0)), 1e-15);
}

TEST(KernelBank, J0ClosedForm) {
    // int_0^inf e^{-xi^2 - i xi t} dxi = (sqrt(pi)/2) e^{-t^2/4} (1 - i erfi(t/2))
    const auto& b = bank(8);
    for (double t : {0.3, 1.0, 4.0, 11.0}) {
        const cplx expect = std::exp(-t * t / 4.0) * (1.0 - cplx(0.0, 1.0) * cse::numkit::erfi(cplx(t / 2.0)));
        EXPECT_LT(std::abs(b.jn(0, t) - expect), 1e-12) << "t=" << t;
    }
}

TEST(KernelBank, JnMatchesQuadratureOnLogGrid) {
    const auto& b = bank(8);
    double worst = 0.0;
    for (double t : oracle::logspace(1e-3, 1e5, 200)) {
        const auto ref = oracle::jn(8, t);
        for (int n = 0; n <= 8; ++n) worst = std::max(worst, std::abs(b.jn(n, t) - ref[n]));
    }
    EXPECT_LE(worst, 1e-11);
}

TEST(KernelBank, Jn4At15) {
    const auto ref = oracle::jn(4, 15.0);
    EXPECT_LT(std::abs(bank(8).jn(4, 15.0) - ref[4]), 1e-11);
}

TEST(KernelBank, NegativeArgumentIsConjugate) {
    const auto& b = bank(8);
    for (int n = 0; n <= 8; ++n)
        for (double t : {0.5, 3.0, 19.9, 20.0, 25.0, 1e3}) {
            const cplx a = b.jn(n, -t);
            const cplx c = std::conj(b.jn(n, t));
            EXPECT_EQ(a.real(), c.real());
            EXPECT_EQ(a.imag(), c.imag());
        }
    const auto ref = oracle::jn(8, 3.0);
    for (int n = 0; n <= 8; ++n) EXPECT_LT(std::abs(b.jn(n, -3.0) - std::conj(ref[n])), 1e-11);
}

TEST(KernelBank, RepresentationsAgreeAtSplit) {
    const auto& b = bank(8);
    const double d = b.delta();
    const double s0 = d / std::numbers::sqrt2;
    for (int n = 0; n <= 8; ++n) {
        EXPECT_LT(std::abs(b.j_table(n)(d) - b.soe().eval(n, d)), 1e-11) << "n=" << n;
        EXPECT_LT(std::abs(b.kn(n, s0) - b.kn(n, std::nextafter(s0, 1e9))), 1e-11) << "n=" << n;
    }
}

TEST(KernelBank, KnDerivativeIsIntegrand) {
    const auto& b = bank(8);
    const double w = b.physics().kernel_omega();
    const double t = 5.0, h = 1e-4;
    const cplx fd = (b.kn(0, t + h) - b.kn(0, t - h)) / (2.0 * h);
    const cplx expect = std::polar(1.0, w * t) * b.jn(0, std::numbers::sqrt2 * t);
    EXPECT_LT(std::abs(fd - expect), 1e-6);
}

TEST(KernelBank, KnMatchesQuadrature) {
    const auto& b = bank(8);
    const double w = b.physics().kernel_omega();
    for (double t : {0.7, 5.0, 14.0, 14.2, 30.0, 250.0, 3000.0}) {
        const auto ref = oracle::kn(8, t, w);
        for (int n = 0; n <= 8; ++n) EXPECT_LT(std::abs(b.kn(n, t) - ref[n]), 1e-11) << "n=" << n << " t=" << t;
    }
}

TEST(KernelBank, KmnParityAndSymmetry) {
    const auto& b = bank(8);
    for (double t : {0.0, 1.0, 13.0, 40.0}) {
        for (int m = 0; m < 5; ++m)
            for (int n = 0; n < 5; ++n) {
                if ((m + n) % 2) {
                    EXPECT_EQ(b.Kmn(m, n, t), cplx(0.0));
                } else {
                    EXPECT_EQ(b.Kmn(m, n, t), b.Kmn(n, m, t));
                }
            }
    }
}

TEST(KernelBank, K00IsRootTwoPiK0) {
    const auto& b = bank(8);
    const double w = b.physics().kernel_omega();
    EXPECT_NEAR(std::abs(cse::kernel_prefactor(0, 0)), std::sqrt(2.0 * std::numbers::pi), 1e-14);
    for (double t : {0.5, 8.0, 60.0}) {
        const auto ref = oracle::kn(0, t, w);
        EXPECT_LT(std::abs(b.Kmn(0, 0, t) - std::sqrt(2.0 * std::numbers::pi) * ref[0]), 1e-10);
    }
}

TEST(KernelBank, PrefactorLargeIndicesStayFinite) {
    const cplx v = cse::kernel_prefactor(100, 120);
    EXPECT_TRUE(std::isfinite(v.real()));
    EXPECT_EQ(cse::kernel_prefactor(3, 4), cplx(0.0));
    // m = n = 1: (-1)(-i)^2 Gamma(3/2)/sqrt(1/2) = sqrt(pi/2)
    EXPECT_NEAR(cse::kernel_prefactor(1, 1).real(), std::sqrt(std::numbers::pi / 2.0), 1e-15);
}

TEST(KernelBank, IndexChecks) {
    const auto& b = bank(8);
    EXPECT_THROW((void)b.jn(9, 1.0), std::out_of_range);
    EXPECT_THROW((void)b.kn(-1, 1.0), std::out_of_range);
    EXPECT_THROW((void)b.Kmn(5, 1, 1.0), std::out_of_range);
    EXPECT_THROW((void)b.kn(0, -1.0), std::invalid_argument);
    EXPECT_THROW((void)b.jn(0, 2e7), std::out_of_range);
}

TEST(KernelBank, BeyondExpansionRangeIsZero) {
    // n = 24 exceeds the expansion; j_24(25) is about 1e-19
    cse::Physics phys;
    phys.p = 13;
    const auto b = cse::build_kernel_bank(phys, 24);
    EXPECT_LT(std::abs(b.jn(24, 25.0)), 1e-16);
    EXPECT_EQ(b.jn(24, 25.0), cplx(0.0));
    const auto ref = oracle::jn(24, 25.0);
    EXPECT_LT(std::abs(ref[24]), 1e-15);  // quadrature roundoff, not the value
}

TEST(KernelBank, DenseGridForFastPhase) {
    cse::Physics phys;
    phys.omega = 70.0;  // kernel frequency 7 > 5
    const auto b = cse::build_kernel_bank(phys, 2);
    EXPECT_GT(b.tables().k_samples[0].size(), b.tables().j_samples[0].size());
    for (double t : {3.0, 9.0, 14.1}) {
        const auto ref = oracle::kn(2, t, phys.kernel_omega());
        for (int n = 0; n <= 2; ++n) EXPECT_LT(std::abs(b.kn(n, t) - ref[n]), 1e-11);
    }
}

TEST(KernelBank, RebuiltFromTablesIsIdentical) {
    const auto& b = bank(8);
    const cse::KernelBank c(b.physics(), 8, b.tables(), b.soe());
    for (int n = 0; n <= 8; ++n)
        for (double t : {0.1, 7.0, 14.5, 33.0}) {
            EXPECT_EQ(b.jn(n, t), c.jn(n, t));
            EXPECT_EQ(b.kn(n, t), c.kn(n, t));
        }
}

TEST(KernelBank, MismatchedTablesRejected) {
    const auto& b = bank(8);
    cse::Physics other = b.physics();
    other.omega = 2.0;
    EXPECT_THROW(cse::KernelBank(other, 8, b.tables(), b.soe()), std::invalid_argument);
    EXPECT_THROW(cse::KernelBank(b.physics(), 10, b.tables(), b.soe()), std::invalid_argument);
}

TEST(JnLargeTable, MatchesBank) {
    const auto& b = bank(8);
    const cse::JnLargeTable tab(b, 9, 5000.0);
    for (double t : {-4000.0, -30.0, -2.0, 0.0, 10.0, 20.0, 21.0, 77.7, 1234.5, 4999.0, 9000.0})
        for (int n = 0; n <= 8; ++n) EXPECT_LT(std::abs(tab(n, t) - b.jn(n, t)), 1e-12) << n << " " << t;
}
