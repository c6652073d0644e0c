// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <thread>
#include <vector>

#include "cse/photon.hpp"
#include "cse/runner.hpp"
#include "cse/solver.hpp"
#include "oracles.hpp"

using namespace cse;

namespace {

struct Verdict {
    bool pass = false;
    std::string detail;
};

std::string sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

int threads() { return static_cast<int>(std::max(1u, std::thread::hardware_concurrency())); }

Physics scenario(int p, double g = 0.2) {
    Physics ph;  // c = Omega = 1, sigma = 0.1
    ph.p = p;
    ph.g = g;
    return ph;
}

double slope(const std::vector<double>& x, const std::vector<double>& y) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

Verdict kernel_fidelity() {
    Physics ph = scenario(5);
    const auto bank = build_kernel_bank(ph, 8);
    double worst = 0.0;
    bool exact = true;
    for (int n = 0; n <= 8; ++n) exact = exact && bank.jn(n, 0.0) == cplx(1.0);
    for (double t : oracle::logspace(1e-3, 1e5, 200)) {
        const auto ref = oracle::jn(8, t);
        for (int n = 0; n <= 8; ++n) worst = std::max(worst, std::abs(bank.jn(n, t) - ref[n]));
    }
    return {worst <= 1e-11 && exact, "max |j_n - quadrature| = " + sci(worst) + ", j_n(0) == 1: " + (exact ? "yes" : "no")};
}

Verdict soe_validity() {
    const auto s = build_soe_j();
    double worst = 0.0;
    for (double t : oracle::logspace(20.0, 1e7, 400)) {
        const auto ref = oracle::jn(23, t);
        for (int n = 0; n <= 23; ++n) worst = std::max(worst, std::abs(s.eval(n, t) - ref[n]));
    }
    bool zero = true;
    for (int n = 24; n <= 40; ++n)
        for (int mu = 0; mu < s.size(); ++mu) zero = zero && s.weight(n, mu) == cplx(0.0);
    const double guard = jn2_bound(5.0, 20.0);
    const bool guard_ok = std::abs(guard - 14.0 * std::exp(-50.0)) <= 1e-3 * guard && std::abs(guard - 2.7e-21) < 0.05e-21;
    return {worst <= 1e-10 && zero && guard_ok, "n_e = " + std::to_string(s.size()) + ", max error = " + sci(worst) +
                                                    ", weights n >= 24 zero: " + (zero ? "yes" : "no") +
                                                    ", guard = " + sci(guard)};
}

Verdict compression() {
    const auto ph = scenario(3);
    const auto bank = build_kernel_bank(ph, ph.n_max());
    const auto d = make_discretization(bank, ph, 50.0, 120, 4);
    const auto src = excited_atom_source(3);
    CollocationOptions co;
    co.threads = threads();
    const auto fast = solve_fast(bank, ph, d, src, co);
    const auto dense = direct_solve(bank, ph, d, src, co);
    double worst = 0.0;
    for (int j = 0; j < d.N; ++j) worst = std::max(worst, (fast.steps[j] - dense.steps[j]).cwiseAbs().maxCoeff());
    return {worst <= 1e-10, "M = " + std::to_string(d.M) + ", max node difference = " + sci(worst)};
}

Verdict wigner_weisskopf() {
    bool ok = true;
    std::string detail;
    for (double g : {0.1, 0.2, 0.3}) {
        const auto ph = scenario(1, g);
        const auto bank = build_kernel_bank(ph, 0);
        const double T = 0.5 / (g * g);
        const int N = std::max(50, static_cast<int>(std::lround(T / 0.25)));
        const auto d = make_discretization(bank, ph, T, N, 4);
        const auto tr = solve_fast(bank, ph, d, excited_atom_source(1));
        std::vector<double> t{0.0}, y{0.0};
        for (int j = 1; j <= N; ++j)
            for (int k = 0; k < d.q; ++k) {
                t.push_back(d.node(j, k));
                y.push_back(std::log(atomic_probability(tr, j, k)));
            }
        const double ratio = slope(t, y) / (-2.0 * g * g);
        ok = ok && std::abs(ratio - 1.0) <= 0.1;
        detail += "g=" + sci(g) + ": slope/(-2g^2) = " + sci(ratio) + "  ";
    }
    return {ok, detail};
}

Verdict convergence_order() {
    // points above the floor; the finest five give four halvings
    bool ok = true;
    std::string detail;
    for (int q : {4, 8}) {
        RunConfig cfg;
        cfg.phys = scenario(1);
        cfg.T = 100.0;
        cfg.N = 100;
        cfg.q = q;
        cfg.converge.t_star = 100.0;
        cfg.converge.N_list = {25, 50, 100, 200, 400, 800, 1600};
        cfg.converge.reference_N = 3200;
        cfg.converge.reference_q = 8;
        cfg.converge.floor = 1e-10;
        const auto rep = converge_runs(cfg, "", threads());
        std::vector<ConvergencePoint> above;
        for (const auto& p : rep.points)
            if (p.E > cfg.converge.floor) above.push_back(p);
        std::sort(above.begin(), above.end(), [](const auto& a, const auto& b) { return a.dt > b.dt; });
        if (above.size() > 5) above.erase(above.begin(), above.end() - 5);
        std::vector<double> x, y;
        for (const auto& p : above) {
            x.push_back(std::log(p.dt));
            y.push_back(std::log(p.E));
        }
        const double order = above.size() >= 2 ? slope(x, y) : std::nan("");
        const bool enough = above.size() == 5;
        const bool pass = enough && (q == 4 ? order >= 3.5 && order <= 4.5 : order >= 7.0);
        ok = ok && pass;
        detail += "q=" + std::to_string(q) + ": order " + sci(order) + " over " + std::to_string(above.size()) +
                  " points above floor (dt " + (above.empty() ? "-" : sci(above.front().dt) + ".." + sci(above.back().dt)) +
                  "); local orders";
        for (std::size_t i = 1; i < rep.points.size(); ++i) {
            const auto& a = rep.points[i - 1];
            const auto& b = rep.points[i];
            detail += " " + sci(std::log(a.E / b.E) / std::log(a.dt / b.dt));
        }
        detail += "  ";
    }
    return {ok, detail};
}

Verdict parity() {
    const auto ph = scenario(8);
    const auto bank = build_kernel_bank(ph, ph.n_max());
    const auto d = make_discretization(bank, ph, 500.0, 1000, 4);
    const auto tr = solve_fast(bank, ph, d, excited_atom_source(8));
    double worst = 0.0;
    for (const auto& s : tr.steps)
        for (int n = 1; n < 8; n += 2) worst = std::max(worst, s.col(n).cwiseAbs().maxCoeff());
    return {worst <= 1e-12, "max |alpha_odd| = " + sci(worst)};
}

Verdict resonance() {
    const auto ph = scenario(1);
    const auto bank = build_kernel_bank(ph, 0);
    const auto d = make_discretization(bank, ph, 250.0, 500, 4);
    std::vector<double> peaks;
    std::string detail;
    for (double xi0 : {0.4, 1.0, 1.6}) {
        Wavepacket wp;
        wp.x0 = -80.0;
        wp.beta = 12.0;
        wp.xi0 = xi0;
        WavepacketSourceOptions so;
        so.allow_inexact_translation = true;  // xi0 = 0.4 gives xi0 beta = 4.8
        auto src = wavepacket_source(wp, ph, so);
        src.prepare(d, threads());
        const auto tr = solve_fast(bank, ph, d, src);
        double peak = 0.0;
        for (int j = 1; j <= d.N; ++j)
            for (int k = 0; k < d.q; ++k) peak = std::max(peak, atomic_probability(tr, j, k));
        peaks.push_back(peak);
        detail += "xi0=" + sci(xi0) + ": max P_a = " + sci(peak) + "  ";
    }
    return {peaks[1] > peaks[0] && peaks[1] > peaks[2], detail};
}

Verdict trapping() {
    RunConfig cfg;
    cfg.phys = scenario(1);
    cfg.T = 200.0;
    cfg.N = 800;
    cfg.p_auto.enabled = true;
    const auto res = solve_config(cfg, "", threads());
    const double p1 = res.p_history.front().P_a_T;
    const double pinf = res.p_history.back().P_a_T;
    const int p_used = res.p_history.back().p;
    return {res.p_converged && pinf >= 2.0 * p1,
            "P_a(200): p=1 " + sci(p1) + ", p=" + std::to_string(p_used) + " " + sci(pinf) +
                (res.p_converged ? " (converged)" : " (not converged)") + ", ratio " + sci(pinf / p1)};
}

Verdict conservation() {
    const auto ph = scenario(1);
    const auto bank = build_kernel_bank(ph, 0);
    const auto d = make_discretization(bank, ph, 5.0, 50, 4);
    const auto src = excited_atom_source(1);
    const auto tr = solve_fast(bank, ph, d, src);
    const auto g = sample_field(tr, bank, ph, src, two_level_grid(10.0, 0.01, 200.0, 0.25), {5.0}, threads());
    const double pu = photon_probability(g).value;
    const double pa = tr.endpoint(d.N).squaredNorm();
    const double total = pa + pu;
    return {total >= 0.99 && total <= 1.01, "P_a = " + sci(pa) + ", P_u = " + sci(pu) + ", sum = " + sci(total)};
}

Verdict complexity() {
    // fixed dt; marching time only; runs for N and 2N interleaved, best of several
    const auto ph = scenario(5);
    const auto bank = build_kernel_bank(ph, ph.n_max());
    const double dt = 0.5;
    const int q = 8;
    const auto src = excited_atom_source(5);
    CollocationOptions co;
    co.threads = threads();
    struct Case {
        Discretization d;
        FastSetup fs;
        DenseArrays dense;
        double fast = 1e300, direct = 1e300;
        long hist = 0;
    };
    std::vector<Case> cases;
    for (int N : {1000, 2000}) {
        Case c;
        c.d = make_discretization(bank, ph, N * dt, N, q);
        c.fs = prepare_fast(bank, ph, c.d, co);
        c.dense = precompute_dense(bank, c.d, ph, co);
        cases.push_back(std::move(c));
    }
    for (int rep = 0; rep < 7; ++rep)
        for (auto& c : cases) {
            MarchTiming mt;
            SolverState st;
            (void)march(c.fs.arrays, ph, c.d, src, {}, &mt, &st);
            c.fast = std::min(c.fast, mt.seconds);
            long ring = 0;
            for (const auto& m : st.ring) ring += m.size();
            c.hist = ring + st.h.size();
        }
    for (int rep = 0; rep < 3; ++rep)
        for (auto& c : cases) {
            double sec = 0.0;
            (void)direct_march(c.dense, ph, c.d, src, &sec);
            c.direct = std::min(c.direct, sec);
        }
    const double rf = cases[1].fast / cases[0].fast;
    const double rd = cases[1].direct / cases[0].direct;
    const bool mem = cases[0].hist == cases[1].hist;
    return {rf >= 1.8 && rf <= 2.6 && rd >= 3.0 && rd <= 6.0 && mem,
            "fast " + sci(cases[0].fast) + "s -> " + sci(cases[1].fast) + "s (ratio " + sci(rf) + "), dense " +
                sci(cases[0].direct) + "s -> " + sci(cases[1].direct) + "s (ratio " + sci(rd) + "), history values " +
                std::to_string(cases[0].hist) + " / " + std::to_string(cases[1].hist)};
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        const char* name;
        double budget;  // seconds, 0 for none
        std::function<Verdict()> run;
    };
    const std::vector<Criterion> all = {
        {1, "kernel fidelity", 60.0, kernel_fidelity},
        {2, "expansion validity", 120.0, soe_validity},
        {3, "compression correctness", 120.0, compression},
        {4, "Wigner-Weisskopf decay", 180.0, wigner_weisskopf},
        {5, "convergence order", 600.0, convergence_order},
        {6, "parity nullity", 0.0, parity},
        {7, "resonance response", 0.0, resonance},
        {8, "trapping", 0.0, trapping},
        {9, "short-time conservation", 0.0, conservation},
        {10, "complexity", 0.0, complexity},
    };
    int failed = 0;
    for (const auto& c : all) {
        const auto t0 = std::chrono::steady_clock::now();
        Verdict v;
        try {
            v = c.run();
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (c.budget > 0.0 && sec > c.budget) {
            v.pass = false;
            v.detail += " [over time budget " + sci(c.budget) + "s]";
        }
        if (!v.pass) ++failed;
        std::printf("criterion %2d %-26s %s  %.1fs  %s\n", c.id, c.name, v.pass ? "PASS" : "FAIL", sec, v.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(all.size()) - failed, all.size());
    return failed == 0 ? 0 : 1;
}
