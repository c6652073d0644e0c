#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "cse/numkit/chebyshev.hpp"
#include "cse/numkit/legendre.hpp"
#include "cse/numkit/linalg.hpp"
#include "cse/numkit/quadrature.hpp"
#include "cse/numkit/special.hpp"

using namespace cse::numkit;
using cplx = std::complex<double>;

namespace {

double rel_err(cplx a, cplx b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace

TEST(GaussLegendre, MidpointRule) {
    const auto r = gauss_legendre(1, 0.0, 1.0);
    ASSERT_EQ(r.size(), 1u);
    EXPECT_DOUBLE_EQ(r.nodes[0], 0.5);
    EXPECT_DOUBLE_EQ(r.weights[0], 1.0);
}

TEST(GaussLegendre, TwoPointNodes) {
    const auto r = gauss_legendre(2, 0.0, 1.0);
    EXPECT_NEAR(r.nodes[0], 0.5 - 0.5 / std::sqrt(3.0), 1e-15);
    EXPECT_NEAR(r.nodes[1], 0.5 + 0.5 / std::sqrt(3.0), 1e-15);
}

TEST(GaussLegendre, WeightsSumToLength) {
    for (int q : {1, 2, 3, 4, 8, 16, 33}) {
        const auto r = gauss_legendre(q, 0.0, 0.37);
        double s = 0.0;
        for (double w : r.weights) {
            EXPECT_GT(w, 0.0);
            s += w;
        }
        EXPECT_NEAR(s, 0.37, 1e-15);
        for (std::size_t i = 1; i < r.size(); ++i) EXPECT_LT(r.nodes[i - 1], r.nodes[i]);
        EXPECT_GT(r.nodes.front(), 0.0);
        EXPECT_LT(r.nodes.back(), 0.37);
    }
}

TEST(GaussLegendre, MonomialExactness) {
    for (int q : {1, 2, 4, 8, 16}) {
        const auto r = gauss_legendre(q, 0.5, 2.0);
        for (int d = 0; d <= 2 * q - 1; ++d) {
            const double got = r.integrate([d](double x) { return std::pow(x, d); });
            const double want = (std::pow(2.0, d + 1) - std::pow(0.5, d + 1)) / (d + 1);
            EXPECT_LE(std::abs(got - want), 1e-13 * std::abs(want)) << "q=" << q << " d=" << d;
        }
    }
}

TEST(GaussLegendre, RejectsBadArguments) {
    EXPECT_THROW(gauss_legendre(0, 0.0, 1.0), std::invalid_argument);
    EXPECT_THROW(gauss_legendre(3, 1.0, 1.0), std::invalid_argument);
}

TEST(Legendre, Values) {
    EXPECT_DOUBLE_EQ(legendre_eval(0, 0.3, 2.0), 1.0);
    EXPECT_NEAR(legendre_eval(1, 1.0, 2.0), 0.0, 1e-16);
    EXPECT_DOUBLE_EQ(legendre_eval(3, 2.0, 2.0), 1.0);
    // P_2 on [-1,1] is (3x^2-1)/2
    const double x = 2.0 * 0.3 / 0.7 - 1.0;
    EXPECT_NEAR(legendre_eval(2, 0.3, 0.7), 0.5 * (3 * x * x - 1), 1e-15);
}

TEST(Legendre, TransformPair) {
    for (int q : {1, 2, 4, 8}) {
        const double dt = 0.25;
        const auto tr = legendre_transform_pair(q, dt);
        for (int k = 0; k < q; ++k) EXPECT_DOUBLE_EQ(tr.forward(k, 0), 1.0);
        const Eigen::MatrixXd id = tr.forward * tr.inverse;
        EXPECT_LE((id - Eigen::MatrixXd::Identity(q, q)).cwiseAbs().maxCoeff(), 1e-13);

        // known coefficients are recovered from grid samples
        Eigen::VectorXd coef(q);
        for (int l = 0; l < q; ++l) coef[l] = std::sin(1.0 + l);
        const auto rule = gauss_legendre(q, 0.0, dt);
        Eigen::VectorXd grid(q);
        for (int k = 0; k < q; ++k) {
            double s = 0.0;
            for (int l = 0; l < q; ++l) s += coef[l] * legendre_eval(l, rule.nodes[k], dt);
            grid[k] = s;
        }
        EXPECT_LE((tr.inverse * grid - coef).cwiseAbs().maxCoeff(), 1e-13);
    }
}

TEST(Chebyshev, ConstantAndNodes) {
    const auto c = cheb_fit([](double) { return 1.0; }, -2.0, 3.0, 7);
    for (const auto& s : c.samples()) EXPECT_EQ(s, cplx(1.0));
    for (double x = -2.0; x <= 3.0; x += 0.173) EXPECT_NEAR(std::abs(c(x) - 1.0), 0.0, 1e-15);

    const auto e = cheb_fit([](double x) { return cplx(std::exp(x), x); }, 0.0, 1.0, 12);
    for (int i = 0; i < e.size(); ++i) EXPECT_EQ(e(e.nodes()[i]), e.samples()[i]);
}

TEST(Chebyshev, ExponentialAccuracy) {
    const auto c = cheb_fit([](double x) { return std::exp(x); }, 0.0, 1.0, 30);
    double err = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const double x = (i + 0.5) / 1000.0;
        err = std::max(err, std::abs(c(x) - std::exp(x)));
    }
    EXPECT_LE(err, 1e-13);
}

TEST(Chebyshev, ReproducesPolynomial) {
    const int n = 15;
    auto poly = [](double x) {
        double s = 0.0;
        for (int k = n - 1; k >= 0; --k) s = s * x + std::cos(k);
        return s;
    };
    const auto c = cheb_fit(poly, -1.0, 1.0, n);
    for (int i = 0; i < 1000; ++i) {
        const double x = -1.0 + 2.0 * (i + 0.37) / 1000.0;
        EXPECT_NEAR(std::abs(c(x) - poly(x)), 0.0, 1e-12);
    }
}

TEST(Chebyshev, SpectralIntegration) {
    const auto one = spectral_integrate(cheb_fit([](double) { return 1.0; }, 2.0, 5.0, 9));
    for (double t = 2.0; t <= 5.0; t += 0.1) EXPECT_NEAR(std::abs(one(t) - (t - 2.0)), 0.0, 1e-14);

    const auto F = spectral_integrate(cheb_fit([](double s) { return std::cos(s); }, 0.0, 10.0, 60));
    EXPECT_EQ(F(0.0), cplx(0.0));
    for (int i = 0; i <= 500; ++i) {
        const double t = 10.0 * i / 500.0;
        EXPECT_NEAR(std::abs(F(t) - std::sin(t)), 0.0, 1e-12);
    }
    // central differences recover the integrand
    const double h = 1e-3;
    for (double t : {1.0, 3.3, 7.9}) {
        const cplx d = (F(t + h) - F(t - h)) / (2 * h);
        EXPECT_NEAR(std::abs(d - std::cos(t)), 0.0, 1e-6);
    }
}

TEST(AdaptiveQuad, GaussianIntegrals) {
    const double a = adaptive_quad([](double x) { return std::exp(-x * x); }, 0.0,
                                   std::numeric_limits<double>::infinity(), 1e-14);
    EXPECT_NEAR(a, std::sqrt(std::numbers::pi) / 2, 1e-13);
    const double b = adaptive_quad([](double x) { return x * std::exp(-x * x); }, 0.0,
                                   std::numeric_limits<double>::infinity(), 1e-14);
    EXPECT_NEAR(b, 0.5, 1e-13);
    EXPECT_EQ(adaptive_quad([](double) { return 0.0; }, 0.0, 1.0, 1e-13), 0.0);
}

TEST(AdaptiveQuad, ComplexAndVectorValued) {
    const cplx v = adaptive_quad([](double x) { return std::exp(cplx(0.0, 40.0 * x)); }, 0.0, 1.0, 1e-13);
    const cplx want = (std::exp(cplx(0.0, 40.0)) - 1.0) / cplx(0.0, 40.0);
    EXPECT_LE(std::abs(v - want), 1e-13);

    auto f = [](double x) {
        Eigen::VectorXcd r(3);
        r << 1.0, x, std::exp(cplx(0.0, x));
        return r;
    };
    const Eigen::VectorXcd r = adaptive_quad(f, 0.0, 2.0, 1e-13);
    EXPECT_NEAR(std::abs(r[0] - 2.0), 0.0, 1e-14);
    EXPECT_NEAR(std::abs(r[1] - 2.0), 0.0, 1e-14);
    EXPECT_NEAR(std::abs(r[2] - (std::exp(cplx(0.0, 2.0)) - 1.0) / cplx(0.0, 1.0)), 0.0, 1e-13);
}

TEST(AdaptiveQuad, KronrodPolynomialExactness) {
    // GK21 integrates polynomials of degree <= 31 exactly in a single panel
    for (int d = 0; d <= 31; ++d) {
        auto f = [d](double x) { return std::pow(x, d); };
        const auto p = detail::gk21<decltype(f), double>(f, -1.0, 1.0);
        const double want = (d % 2 == 1) ? 0.0 : 2.0 / (d + 1);
        EXPECT_NEAR(p.value, want, 1e-15) << d;
    }
}

TEST(AdaptiveQuad, ReportsNonConvergence) {
    QuadOptions opt;
    opt.max_intervals = 10;
    EXPECT_THROW(adaptive_quad([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0, 1e-15, opt),
                 cse::NumericalError);
}

struct ErfCase {
    double x, y, erf_re, erf_im, erfc_re, erfc_im, erfi_re, erfi_im;
};

// 30-digit reference values
constexpr ErfCase kErfCases[] = {
    {0.3, 0.2, 0.34123748147213858588, 0.20852883788276887638, 0.65876251852786141412,
     -0.20852883788276887638, 0.3344433234430449196, 0.24309725370761816674},
    {2.0, 1.0, 1.0036063427256517509, -0.011259006028815025076, -0.0036063427256517509129,
     0.011259006028815025076, -5.0491437034470346695, -0.53664356577856503399},
    {-3.0, 0.5, -1.0000280653614764049, -2.6284897222588231396e-7, 2.0000280653614764049,
     2.6284897222588231396e-7, 1172.6091303384732848, 404.8126834851066862},
    {10.0, 5.0, 1.0, -9.5501040228455978471e-36, 1.3451091372462591681e-34,
     9.4959492645580841513e-36, 1.0237174509460146665e+31, -1.5868352152744494064e+31},
    {0.1, -0.3, 0.12298040809618913183, -0.34526497009870288076, 0.87701959190381086817,
     0.34526497009870288076, 0.10340864129817521897, -0.33173512856039807323},
    {0.001, 0.001, 0.0011283799193478393092, 0.0011283784148422831823, 0.99887162008065216069,
     -0.0011283784148422831823, 0.0011283784148422831823, 0.0011283799193478393092},
    {4.5, -2.0, 0.99999999106416486717, 4.2685925123018739167e-9, 8.935835132831977449e-9,
     -4.2685925123018739167e-9, 374604.25677063643711, 1271091.4625551889184},
};

TEST(Special, ErrorFunctionFamily) {
    for (const auto& c : kErfCases) {
        const cplx z(c.x, c.y);
        const auto r = faddeeva_related(z);
        EXPECT_LE(rel_err(r.erf, {c.erf_re, c.erf_im}), 1e-13) << z;
        EXPECT_LE(rel_err(r.erfc, {c.erfc_re, c.erfc_im}), 1e-13) << z;
        EXPECT_LE(rel_err(r.erfi, {c.erfi_re, c.erfi_im}), 1e-13) << z;
    }
    EXPECT_EQ(erfi(cplx(0.0)), cplx(0.0));
    EXPECT_NEAR(erf(cplx(1.0)).real(), 0.842700792949715, 1e-13);
    for (double x = -6.0; x <= 6.0; x += 0.37) {
        EXPECT_NEAR(std::abs(erf(cplx(x)) + erfc(cplx(x)) - 1.0), 0.0, 1e-15);
        EXPECT_NEAR(erf(cplx(x)).real(), std::erf(x), 2e-16);
    }
    // erfi(z) = -i erf(iz) on a sample of the documented domain
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> ux(-50.0, 50.0), uy(-10.0, 10.0);
    for (int i = 0; i < 200; ++i) {
        const cplx z(uy(rng), uy(rng));
        EXPECT_LE(rel_err(erfi(z), cplx(0.0, -1.0) * erf(cplx(0.0, 1.0) * z)), 1e-15);
        const cplx w(ux(rng), uy(rng));
        EXPECT_LE(std::abs(erf(w) + erfc(w) - 1.0), 1e-13 * std::max(1.0, std::abs(erfc(w))));
    }
}

TEST(Special, ErfiOverflowIsSignaled) {
    EXPECT_THROW((void)erfi(cplx(40.0, 9.0)), cse::NumericalError);
}

TEST(Special, Faddeeva) {
    struct W {
        double x, y, re, im;
    };
    constexpr W cases[] = {
        {1.0, 1.0, 0.30474420525691259246, 0.20821893820283162729},
        {0.5, 0.01, 0.77234501841006655062, 0.47121688569118492303},
        {5.0, 0.1, 0.0024069117169427119505, 0.11519442455072768717},
        {-7.0, 2.0, 0.021853396687438291323, -0.075009635935424815468},
        {30.0, 0.5, 0.00031387498369284792189, 0.018811544867725669658},
        {0.0, 3.0, 0.17900115118138995042, 0.0},
        {1.0, -0.5, 0.1555411424543310759, 1.1378372157816863777},
    };
    for (const auto& c : cases) {
        EXPECT_LE(rel_err(faddeeva_w({c.x, c.y}), {c.re, c.im}), 1e-13) << c.x << "," << c.y;
    }
}

TEST(Special, Gamma) {
    EXPECT_NEAR(gamma_fn(1.0), 1.0, 1e-15);
    EXPECT_NEAR(gamma_fn(0.5), std::sqrt(std::numbers::pi), 1e-15);
    for (double x : {0.3, 1.5, 2.5, 7.5, 11.5}) {
        EXPECT_NEAR(gamma_fn(x + 1) / gamma_fn(x), x, 1e-14 * x);
    }
    EXPECT_THROW((void)gamma_fn(0.0), std::invalid_argument);
    EXPECT_THROW((void)gamma_fn(-1.5), std::invalid_argument);
}

TEST(Special, HermiteFunctions) {
    EXPECT_EQ(hermite_f(0, 3.7)[0], 1.0);
    EXPECT_NEAR(hermite_f(1, 2.0)[1], 2.0 * std::sqrt(2.0), 1e-15);

    // explicit physicists' Hermite polynomials via H_{n+1} = 2x H_n - 2n H_{n-1}
    for (int xi = -2; xi <= 2; ++xi) {
        const double x = xi;
        const auto f = hermite_f(10, x);
        double h0 = 1.0, h1 = 2.0 * x;
        double fact = 1.0;
        for (int n = 0; n <= 10; ++n) {
            if (n > 0) fact *= n;
            const double hn = n == 0 ? h0 : h1;
            EXPECT_NEAR(f[n], hn / std::sqrt(std::pow(2.0, n) * fact), 1e-12 * std::max(1.0, std::abs(f[n])));
            if (n > 0) {
                const double h2 = 2.0 * x * h1 - 2.0 * n * h0;
                h0 = h1;
                h1 = h2;
            }
        }
    }

    // orthonormality under exp(-x^2)/sqrt(pi) by 40-point Gauss-Hermite-equivalent quadrature
    const int nmax = 8;
    Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(nmax + 1, nmax + 1);
    const auto rule = gauss_legendre(200, -10.0, 10.0);
    for (std::size_t i = 0; i < rule.size(); ++i) {
        const double x = rule.nodes[i];
        const auto f = hermite_f(nmax, x);
        const double w = rule.weights[i] * std::exp(-x * x) / std::sqrt(std::numbers::pi);
        for (int m = 0; m <= nmax; ++m)
            for (int n = 0; n <= nmax; ++n) gram(m, n) += w * f[m] * f[n];
    }
    EXPECT_LE((gram - Eigen::MatrixXd::Identity(nmax + 1, nmax + 1)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Linalg, IdentityAndPermutation) {
    Eigen::VectorXcd b(4);
    b << cplx(1, 2), cplx(-3, 0), cplx(0, 4), cplx(5, -1);
    EXPECT_EQ(lu_solve(lu_factor(Eigen::MatrixXcd::Identity(4, 4)), b), b);

    Eigen::MatrixXcd P = Eigen::MatrixXcd::Zero(4, 4);
    P(0, 2) = P(1, 0) = P(2, 3) = P(3, 1) = 1.0;
    const Eigen::VectorXcd x = lu_solve(lu_factor(P), b);
    EXPECT_LE((x - P.transpose() * b).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Linalg, RandomSystem) {
    std::mt19937 rng(42);
    std::normal_distribution<double> nd;
    Eigen::MatrixXcd A(8, 8);
    Eigen::VectorXcd x(8);
    for (int i = 0; i < 8; ++i) {
        x[i] = cplx(nd(rng), nd(rng));
        for (int j = 0; j < 8; ++j) A(i, j) = cplx(nd(rng), nd(rng));
    }
    A += 4.0 * Eigen::MatrixXcd::Identity(8, 8);
    const Eigen::VectorXcd b = A * x;
    const Eigen::VectorXcd got = lu_solve(lu_factor(A), b);
    EXPECT_LE((got - x).norm(), 1e-12 * x.norm());
    EXPECT_LE((A * got - b).norm(), 1e-12 * b.norm());
}

TEST(Linalg, SingularIsReported) {
    Eigen::MatrixXcd A = Eigen::MatrixXcd::Ones(3, 3);
    EXPECT_THROW(lu_factor(A), cse::NumericalError);
    EXPECT_THROW(lu_factor(Eigen::MatrixXcd::Zero(2, 3)), std::invalid_argument);
}

TEST(AdaptiveQuad, CancellationStopsAtRoundoff) {
    // int_0^100 sin(x) = 1 - cos(100); |sin| integrates to about 64, so 1e-17 is
    // below what summation can resolve
    const double v = adaptive_quad([](double x) { return std::sin(x); }, 0.0, 100.0, 1e-17);
    EXPECT_NEAR(v, 1.0 - std::cos(100.0), 64.0 * 100.0 * std::numeric_limits<double>::epsilon());
}
