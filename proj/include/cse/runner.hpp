#pragma once

// Scenario orchestration behind the command line verbs: run, field,
// converge and bench. Data files are CSV with Re/Im column pairs; each
// verb writes a JSON manifest next to them.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

#include "cse/config.hpp"
#include "cse/error.hpp"
#include "cse/kernels.hpp"
#include "cse/oracle.hpp"
#include "cse/photon.hpp"
#include "cse/solver.hpp"
#include "cse/sources.hpp"
#include "cse/stepper.hpp"

namespace cse {

inline constexpr const char* kVersion = "1.0.0";

/// Shortest text that reads back to the same double.
[[nodiscard]] inline std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

namespace fs = std::filesystem;

// ---------------------------------------------------------------- kernel cache

[[nodiscard]] inline std::string kernel_cache_name(const Physics& phys, int n_max, const KernelOptions& opt) {
    char buf[256];
    std::snprintf(buf, sizeof buf, "kernels_n%d_delta%.17g_w%.17g_start%d_tol%.3g.json", n_max, opt.soe.delta,
                  phys.kernel_omega(), opt.cheb_start, opt.cheb_tol);
    return buf;
}

[[nodiscard]] inline json tables_to_json(const KernelTables& t) {
    auto pack = [](const std::vector<std::vector<cplx>>& v) {
        json out = json::array();
        for (const auto& row : v) {
            json re = json::array(), im = json::array();
            for (const cplx& z : row) {
                re.push_back(z.real());
                im.push_back(z.imag());
            }
            out.push_back({{"re", re}, {"im", im}});
        }
        return out;
    };
    return {{"omega", t.omega},
            {"delta", t.delta},
            {"n_max", t.n_max},
            {"j_nodes", t.j_samples.empty() ? 0 : t.j_samples.front().size()},
            {"k_nodes", t.k_samples.empty() ? 0 : t.k_samples.front().size()},
            {"j_samples", pack(t.j_samples)},
            {"k_samples", pack(t.k_samples)}};
}

[[nodiscard]] inline KernelTables tables_from_json(const json& j) {
    KernelTables t;
    t.omega = j.at("omega").get<double>();
    t.delta = j.at("delta").get<double>();
    t.n_max = j.at("n_max").get<int>();
    const auto jn = j.at("j_nodes").get<std::size_t>();
    const auto kn = j.at("k_nodes").get<std::size_t>();
    auto unpack = [](const json& arr, std::size_t nodes) {
        std::vector<std::vector<cplx>> v;
        for (const auto& row : arr) {
            const auto re = row.at("re").get<std::vector<double>>();
            const auto im = row.at("im").get<std::vector<double>>();
            if (re.size() != nodes || im.size() != nodes) throw std::runtime_error("kernel cache: node count mismatch");
            std::vector<cplx> z(nodes);
            for (std::size_t i = 0; i < nodes; ++i) z[i] = cplx(re[i], im[i]);
            v.push_back(std::move(z));
        }
        return v;
    };
    t.j_samples = unpack(j.at("j_samples"), jn);
    t.k_samples = unpack(j.at("k_samples"), kn);
    if (static_cast<int>(t.j_samples.size()) != t.n_max + 1 || static_cast<int>(t.k_samples.size()) != t.n_max + 1) {
        throw std::runtime_error("kernel cache: mode count mismatch");
    }
    return t;
}

enum class CacheUse { off, hit, miss };

[[nodiscard]] inline const char* to_string(CacheUse c) {
    switch (c) {
        case CacheUse::hit: return "hit";
        case CacheUse::miss: return "miss";
        default: return "off";
    }
}

/// Kernel bank, with the Chebyshev samples read from or written to cache_dir
/// when it is non-empty. Unreadable cache files are rebuilt and overwritten.
[[nodiscard]] inline KernelBank build_bank_cached(const Physics& phys, int n_max, const KernelOptions& opt,
                                                  const std::string& cache_dir, CacheUse* use = nullptr) {
    phys.validate();
    if (cache_dir.empty()) {
        if (use) *use = CacheUse::off;
        return build_kernel_bank(phys, n_max, opt);
    }
    const fs::path file = fs::path(cache_dir) / kernel_cache_name(phys, n_max, opt);
    std::optional<KernelTables> tables;
    if (fs::exists(file)) {
        try {
            std::ifstream in(file);
            json j;
            in >> j;
            auto t = tables_from_json(j);
            if (t.n_max == n_max && t.delta == opt.soe.delta && t.omega == phys.kernel_omega()) tables = std::move(t);
        } catch (const std::exception&) {
            tables.reset();
        }
    }
    if (use) *use = tables ? CacheUse::hit : CacheUse::miss;
    if (!tables) {
        tables = build_kernel_tables(phys, n_max, opt);
        fs::create_directories(cache_dir);
        const fs::path tmp = file.string() + ".tmp";
        {
            std::ofstream out(tmp);
            out << tables_to_json(*tables).dump();
        }
        fs::rename(tmp, file);
    }
    return KernelBank(phys, n_max, *tables, build_soe_j(opt.soe));
}

// ---------------------------------------------------------------- writers

inline void write_soe_json(std::ostream& os, const SoeJ& soe, const SoeK* lifted) {
    auto z = [](cplx v) { return json::array({v.real(), v.imag()}); };
    json j;
    j["delta"] = soe.delta;
    j["t_max"] = soe.t_max;
    j["a"] = soe.a;
    j["tol"] = soe.tol;
    j["n_e"] = soe.size();
    j["validation_error"] = soe.validation_error;
    j["lambdas"] = soe.lambdas;
    json w = json::array();
    for (const auto& row : soe.weights) {
        json r = json::array();
        for (const cplx& v : row) r.push_back(z(v));
        w.push_back(r);
    }
    j["weights"] = w;
    if (lifted) {
        json lam = json::array();
        for (const cplx& v : lifted->lambdas) lam.push_back(z(v));
        json red = json::array();
        for (const auto& row : lifted->reduced) {
            json r = json::array();
            for (const cplx& v : row) r.push_back(z(v));
            red.push_back(r);
        }
        j["lifted"] = {{"t_start", lifted->t_start}, {"lambdas", lam}, {"reduced_weights", red}};
    }
    os << j.dump(1) << '\n';
}

/// One row per collocation node: t, step, node, Re/Im alpha_n, P_a.
inline void write_trajectory_csv(std::ostream& os, const Trajectory& tr) {
    const int p = tr.p();
    os << "t,step,node";
    for (int n = 0; n < p; ++n) os << ",re_alpha_" << n << ",im_alpha_" << n;
    os << ",P_a\n";
    for (int j = 1; j <= tr.N(); ++j)
        for (int k = 0; k < tr.disc.q; ++k) {
            os << fmt(tr.disc.node(j, k)) << ',' << j << ',' << k;
            for (int n = 0; n < p; ++n) {
                const cplx v = tr.alpha(n, j, k);
                os << ',' << fmt(v.real()) << ',' << fmt(v.imag());
            }
            os << ',' << fmt(atomic_probability(tr, j, k)) << '\n';
        }
}

/// P_a at t = 0 and at every step boundary.
inline void write_probability_csv(std::ostream& os, const Trajectory& tr, const SourceTerm& src) {
    os << "t,P_a\n";
    os << fmt(0.0) << ',' << fmt(src.initial().squaredNorm()) << '\n';
    for (int j = 1; j <= tr.N(); ++j) os << fmt(j * tr.disc.dt) << ',' << fmt(tr.endpoint(j).squaredNorm()) << '\n';
}

inline void write_field_csv(std::ostream& os, const FieldGrid& g) {
    os << "x,t,re_u,im_u,re_u_minus_U,im_u_minus_U\n";
    for (std::size_t ti = 0; ti < g.times.size(); ++ti)
        for (std::size_t xi = 0; xi < g.x.size(); ++xi) {
            const cplx v = g.u[ti * g.x.size() + xi];
            const cplx s = g.scattered[ti * g.x.size() + xi];
            os << fmt(g.x[xi]) << ',' << fmt(g.times[ti]) << ',' << fmt(v.real()) << ',' << fmt(v.imag()) << ','
               << fmt(s.real()) << ',' << fmt(s.imag()) << '\n';
        }
}

// ---------------------------------------------------------------- solving

[[nodiscard]] inline SourceTerm make_source(const RunConfig& cfg, const Physics& phys) {
    if (cfg.kind == SourceKind::wavepacket) return wavepacket_source(cfg.wp, phys, cfg.source_opt);
    return excited_atom_source(phys.p);
}

struct SolveOutcome {
    Physics phys;
    KernelBank bank;
    Discretization disc;
    SoeK lifted;
    SourceTerm src;
    Trajectory tr;
    CacheUse cache = CacheUse::off;
    double kernel_seconds = 0.0;
    double source_seconds = 0.0;
    double setup_seconds = 0.0;
    double march_seconds = 0.0;
    long history_values = 0;
};

/// One fast solve at the given p and grid.
[[nodiscard]] inline SolveOutcome solve_once(const RunConfig& cfg, int p, double T, int N, int q,
                                             const std::string& cache_dir, int threads,
                                             const KernelBank* reuse = nullptr) {
    SolveOutcome o;
    o.phys = cfg.phys;
    o.phys.p = p;
    auto t0 = std::chrono::steady_clock::now();
    if (reuse && reuse->n_max() >= o.phys.n_max()) {
        o.bank = *reuse;
    } else {
        o.bank = build_bank_cached(o.phys, o.phys.n_max(), cfg.kernels, cache_dir, &o.cache);
    }
    auto t1 = std::chrono::steady_clock::now();
    o.kernel_seconds = std::chrono::duration<double>(t1 - t0).count();

    o.disc = make_discretization(o.bank, o.phys, T, N, q);
    o.src = make_source(cfg, o.phys);
    o.src.prepare(o.disc, threads);
    auto t2 = std::chrono::steady_clock::now();
    o.source_seconds = std::chrono::duration<double>(t2 - t1).count();

    CollocationOptions co;
    co.quad_tol = cfg.quad_tol;
    co.threads = threads;
    auto setup = prepare_fast(o.bank, o.phys, o.disc, co);
    o.setup_seconds = setup.seconds;
    o.lifted = std::move(setup.soe);
    MarchTiming mt;
    SolverState st;
    o.tr = march(setup.arrays, o.phys, o.disc, o.src, {}, &mt, &st);
    o.march_seconds = mt.seconds;
    long ring = 0;
    for (const auto& m : st.ring) ring += m.size();
    o.history_values = ring + st.h.size();
    for (const auto& blk : o.tr.steps) {
        if (!blk.allFinite()) throw NumericalError("solution became non-finite");
    }
    return o;
}

struct PAutoRecord {
    int p = 0;
    double P_a_T = 0.0;
    double change = std::numeric_limits<double>::quiet_NaN();
};

struct SolveResult {
    SolveOutcome final;
    std::vector<PAutoRecord> p_history;
    bool p_converged = true;
};

/// Fixed-p solve, or p doubling until P_a(T) moves by less than p_auto.tol.
/// Next mode count in the p_auto sequence. For the excited atom the odd modes
/// vanish, so a step that adds no even mode is lengthened by one.
[[nodiscard]] inline int next_mode_count(int p, SourceKind kind, int p_max) {
    int next = 2 * p;
    if (kind == SourceKind::excited_atom && (next + 1) / 2 == (p + 1) / 2) ++next;
    return std::min(next, p_max);
}

[[nodiscard]] inline SolveResult solve_config(const RunConfig& cfg, const std::string& cache_dir, int threads) {
    SolveResult r;
    if (!cfg.p_auto.enabled) {
        r.final = solve_once(cfg, cfg.phys.p, cfg.T, cfg.N, cfg.q, cache_dir, threads);
        r.p_history.push_back({cfg.phys.p, r.final.tr.endpoint(cfg.N).squaredNorm()});
        return r;
    }
    r.p_converged = false;
    double prev = std::numeric_limits<double>::quiet_NaN();
    for (int p = cfg.phys.p;; p = next_mode_count(p, cfg.kind, cfg.p_auto.p_max)) {
        auto o = solve_once(cfg, p, cfg.T, cfg.N, cfg.q, cache_dir, threads);
        PAutoRecord rec{p, o.tr.endpoint(cfg.N).squaredNorm()};
        if (!std::isnan(prev)) rec.change = std::abs(rec.P_a_T - prev);
        r.p_history.push_back(rec);
        prev = rec.P_a_T;
        r.final = std::move(o);
        if (!std::isnan(rec.change) && rec.change < cfg.p_auto.tol) {
            r.p_converged = true;
            break;
        }
        if (p >= cfg.p_auto.p_max) break;
    }
    return r;
}

// ---------------------------------------------------------------- verbs

struct VerbOptions {
    std::string out_dir = ".";
    std::string cache_dir;
    int threads = 0;  // 0: use the config value
};

namespace detail {

inline json manifest_base(const RunConfig& cfg, const std::string& verb, int threads) {
    json m;
    m["manifest_version"] = 1;
    m["verb"] = verb;
    m["config"] = to_json(cfg);
    m["software"] = {{"name", "cse_sim"},
                     {"version", kVersion},
                     {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) +
                                   "." + std::to_string(EIGEN_MINOR_VERSION)},
                     {"json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                  std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                  std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
                     {"compiler", __VERSION__}};
    m["threads"] = threads;
    if (cfg.kind == SourceKind::wavepacket && cfg.source_opt.allow_inexact_translation) {
        const double bound = translation_error_bound(cfg.wp);
        m["translation_error_bound"] = bound;
        std::fprintf(stderr, "warning: inexact packet translation, error bound %.3g\n", bound);
    }
    return m;
}

inline std::ofstream open_out(const std::string& dir, const std::string& name) {
    fs::create_directories(dir);
    std::ofstream f(fs::path(dir) / name);
    if (!f) throw std::runtime_error("cannot write " + (fs::path(dir) / name).string());
    return f;
}

inline void write_manifest(const std::string& dir, const std::string& name, const json& m) {
    auto f = open_out(dir, name);
    f << m.dump(2) << '\n';
}

}  // namespace detail

/// run and field: trajectory, optional probability series, field grid and
/// expansion dump, plus the manifest. Returns the process exit status.
inline int run_verb(RunConfig cfg, const VerbOptions& vo, bool field_verb) {
    const int threads = vo.threads > 0 ? vo.threads : cfg.threads;
    if (field_verb) cfg.out.field.enabled = true;
    const auto t0 = std::chrono::steady_clock::now();
    const SolveResult res = solve_config(cfg, vo.cache_dir, threads);
    const auto& o = res.final;

    json files = json::array();
    {
        auto f = detail::open_out(vo.out_dir, cfg.out.trajectory);
        write_trajectory_csv(f, o.tr);
        files.push_back(cfg.out.trajectory);
    }
    if (!cfg.out.probability.empty()) {
        auto f = detail::open_out(vo.out_dir, cfg.out.probability);
        write_probability_csv(f, o.tr, o.src);
        files.push_back(cfg.out.probability);
    }
    if (!cfg.out.soe_dump.empty()) {
        auto f = detail::open_out(vo.out_dir, cfg.out.soe_dump);
        write_soe_json(f, o.bank.soe(), o.disc.history_active() ? &o.lifted : nullptr);
        files.push_back(cfg.out.soe_dump);
    }
    json photon = json::array();
    double field_seconds = 0.0;
    if (cfg.out.field.enabled) {
        const auto& fsp = cfg.out.field;
        std::vector<double> times = fsp.times.empty() ? std::vector<double>{cfg.T} : fsp.times;
        const auto xs = two_level_grid(fsp.inner, fsp.fine, fsp.outer, fsp.coarse);
        PhotonOptions po;
        po.order = fsp.order;
        const auto tf = std::chrono::steady_clock::now();
        const FieldGrid g = sample_field(o.tr, o.bank, o.phys, o.src, xs, times, threads, po);
        field_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - tf).count();
        auto f = detail::open_out(vo.out_dir, fsp.path);
        write_field_csv(f, g);
        files.push_back(fsp.path);
        for (std::size_t ti = 0; ti < times.size(); ++ti) {
            const auto pu = photon_probability(g, ti);
            const double t = times[ti];
            double pa = o.src.initial().squaredNorm();
            if (t > 0.0) pa = o.tr.at(t).squaredNorm();
            photon.push_back({{"t", t},
                              {"P_u", pu.value},
                              {"P_a", pa},
                              {"total", pu.value + pa},
                              {"radius", pu.radius},
                              {"edge_magnitude", pu.edge_magnitude},
                              {"truncation_warning", pu.truncation_warning}});
        }
    }

    json m = detail::manifest_base(cfg, field_verb ? "field" : "run", threads);
    m["outputs"] = files;
    m["p_used"] = o.phys.p;
    json ph = json::array();
    for (const auto& r : res.p_history)
        ph.push_back({{"p", r.p}, {"P_a_T", r.P_a_T}, {"change", std::isnan(r.change) ? json(nullptr) : json(r.change)}});
    m["p_history"] = ph;
    m["p_converged"] = res.p_converged;
    m["discretization"] = {{"dt", o.disc.dt}, {"M", o.disc.M}, {"history_active", o.disc.history_active()}};
    m["soe"] = {{"n_e", o.bank.soe().size()},
                {"n_e_lifted", o.disc.history_active() ? o.lifted.size() : 0},
                {"validation_error", o.bank.soe().validation_error}};
    m["kernel_cache"] = to_string(o.cache);
    m["history_values"] = o.history_values;
    m["P_a_T"] = o.tr.endpoint(o.disc.N).squaredNorm();
    if (!photon.empty()) m["photon_probability"] = photon;
    m["timings"] = {{"kernels", o.kernel_seconds},
                    {"source", o.source_seconds},
                    {"setup", o.setup_seconds},
                    {"march", o.march_seconds},
                    {"field", field_seconds},
                    {"total", std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()}};
    detail::write_manifest(vo.out_dir, cfg.out.manifest, m);
    if (!res.p_converged) {
        std::fprintf(stderr, "p doubling reached p_max=%d without P_a(T) settling below %g\n", cfg.p_auto.p_max,
                     cfg.p_auto.tol);
        return 3;
    }
    return 0;
}

struct ConvergencePoint {
    int N = 0;
    double dt = 0.0;
    double E = 0.0;
};

struct ConvergenceReport {
    double t_star = 0.0;
    std::vector<ConvergencePoint> points;
    double order = std::numeric_limits<double>::quiet_NaN();
    int fit_points = 0;
    double floor_estimate = 0.0;
};

/// Least-squares slope of log E against log dt over the points above floor.
[[nodiscard]] inline ConvergenceReport fit_order(std::vector<ConvergencePoint> pts, double floor) {
    ConvergenceReport r;
    r.points = pts;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    r.floor_estimate = std::numeric_limits<double>::infinity();
    for (const auto& p : pts) {
        r.floor_estimate = std::min(r.floor_estimate, p.E);
        if (!(p.E > floor)) continue;
        const double x = std::log(p.dt), y = std::log(p.E);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++n;
    }
    r.fit_points = n;
    if (n >= 2) r.order = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    return r;
}

/// E(t*) for each N against a finer reference run; all runs end at t*.
[[nodiscard]] inline ConvergenceReport converge_runs(const RunConfig& cfg, const std::string& cache_dir,
                                                     int threads) {
    const double t_star = cfg.converge.t_star > 0.0 ? cfg.converge.t_star : cfg.T;
    if (cfg.converge.N_list.empty()) throw ConfigError("converge.N_list: must list at least one N");
    const int ref_q = cfg.converge.reference_q > 0 ? cfg.converge.reference_q : cfg.q;
    int max_n = 0;
    for (int n : cfg.converge.N_list) max_n = std::max(max_n, n);
    if (cfg.converge.reference_N <= max_n) {
        throw ConfigError("converge.reference_N: must exceed every entry of converge.N_list");
    }
    const auto ref = solve_once(cfg, cfg.phys.p, t_star, cfg.converge.reference_N, ref_q, cache_dir, threads);
    std::vector<ConvergencePoint> pts;
    for (int n : cfg.converge.N_list) {
        const auto o = solve_once(cfg, cfg.phys.p, t_star, n, cfg.q, cache_dir, threads, &ref.bank);
        pts.push_back({n, t_star / n, error_E(o.tr, ref.tr, t_star)});
    }
    auto r = fit_order(std::move(pts), cfg.converge.floor);
    r.t_star = t_star;
    return r;
}

inline int converge_verb(const RunConfig& cfg, const VerbOptions& vo) {
    const int threads = vo.threads > 0 ? vo.threads : cfg.threads;
    const auto r = converge_runs(cfg, vo.cache_dir, threads);
    {
        auto f = detail::open_out(vo.out_dir, cfg.converge.path);
        f << "N,dt,E\n";
        for (const auto& p : r.points) f << p.N << ',' << fmt(p.dt) << ',' << fmt(p.E) << '\n';
    }
    json pts = json::array();
    for (const auto& p : r.points) pts.push_back({{"N", p.N}, {"dt", p.dt}, {"E", p.E}});
    json rep = {{"t_star", r.t_star},
                {"q", cfg.q},
                {"reference_N", cfg.converge.reference_N},
                {"reference_q", cfg.converge.reference_q > 0 ? cfg.converge.reference_q : cfg.q},
                {"points", pts},
                {"order", std::isnan(r.order) ? json(nullptr) : json(r.order)},
                {"fit_points", r.fit_points},
                {"floor", cfg.converge.floor},
                {"floor_estimate", r.floor_estimate}};
    {
        auto f = detail::open_out(vo.out_dir, cfg.converge.report);
        f << rep.dump(2) << '\n';
    }
    json m = detail::manifest_base(cfg, "converge", threads);
    m["outputs"] = {cfg.converge.path, cfg.converge.report};
    m["report"] = rep;
    detail::write_manifest(vo.out_dir, cfg.out.manifest, m);
    return 0;
}

struct BenchRow {
    int N = 0;
    double T = 0.0;
    int M = 0;
    TimingResult timing;
    bool direct_run = false;
};

/// Timing of both solvers at a fixed step size, T = N dt, dt from the config.
[[nodiscard]] inline std::vector<BenchRow> bench_runs(const RunConfig& cfg, const std::string& cache_dir,
                                                      int threads) {
    if (cfg.bench.N_list.empty()) throw ConfigError("bench.N_list: must list at least one N");
    const double dt = cfg.T / cfg.N;
    Physics phys = cfg.phys;
    const auto bank = build_bank_cached(phys, phys.n_max(), cfg.kernels, cache_dir);
    CollocationOptions co;
    co.quad_tol = cfg.quad_tol;
    co.threads = threads;
    std::vector<BenchRow> rows;
    for (int n : cfg.bench.N_list) {
        BenchRow row;
        row.N = n;
        row.T = n * dt;
        const auto d = make_discretization(bank, phys, row.T, n, cfg.q);
        row.M = d.M;
        auto src = make_source(cfg, phys);
        src.prepare(d, threads);
        if (n <= kDirectMaxSteps) {
            row.timing = timing_probe(bank, phys, d, src, co, cfg.bench.repeats);
            row.direct_run = true;
        } else {
            const auto fs_ = prepare_fast(bank, phys, d, co);
            row.timing.fast_setup = fs_.seconds;
            row.timing.fast = std::numeric_limits<double>::infinity();
            for (int i = 0; i < cfg.bench.repeats; ++i) {
                MarchTiming mt;
                SolverState st;
                (void)march(fs_.arrays, phys, d, src, {}, &mt, &st);
                row.timing.fast = std::min(row.timing.fast, mt.seconds);
                long ring = 0;
                for (const auto& m : st.ring) ring += m.size();
                row.timing.history_values = ring + st.h.size();
            }
            row.timing.direct = std::numeric_limits<double>::quiet_NaN();
        }
        rows.push_back(row);
    }
    return rows;
}

inline int bench_verb(const RunConfig& cfg, const VerbOptions& vo) {
    const int threads = vo.threads > 0 ? vo.threads : cfg.threads;
    const auto rows = bench_runs(cfg, vo.cache_dir, threads);
    auto f = detail::open_out(vo.out_dir, cfg.bench.path);
    f << "N,T,dt,M,fast_seconds,direct_seconds,fast_setup_seconds,direct_setup_seconds,history_values\n";
    json jr = json::array();
    for (const auto& r : rows) {
        f << r.N << ',' << fmt(r.T) << ',' << fmt(r.T / r.N) << ',' << r.M << ',' << fmt(r.timing.fast) << ','
          << (r.direct_run ? fmt(r.timing.direct) : "nan") << ',' << fmt(r.timing.fast_setup) << ','
          << (r.direct_run ? fmt(r.timing.direct_setup) : "nan") << ',' << r.timing.history_values << '\n';
        jr.push_back({{"N", r.N},
                      {"M", r.M},
                      {"fast", r.timing.fast},
                      {"direct", r.direct_run ? json(r.timing.direct) : json(nullptr)},
                      {"history_values", r.timing.history_values}});
    }
    json m = detail::manifest_base(cfg, "bench", threads);
    m["outputs"] = {cfg.bench.path};
    m["rows"] = jr;
    detail::write_manifest(vo.out_dir, cfg.out.manifest, m);
    return 0;
}

}  // namespace cse
