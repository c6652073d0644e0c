#pragma once

// Run configuration: JSON schema, defaults and validation. Every error names
// the offending field as a dotted path.

#include <cmath>
#include <fstream>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "cse/kernels.hpp"
#include "cse/physics.hpp"
#include "cse/soe.hpp"
#include "cse/sources.hpp"

namespace cse {

using json = nlohmann::json;

class ConfigError : public std::invalid_argument {
public:
    explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

struct FieldSpec {
    bool enabled = false;
    std::string path = "field.csv";
    double inner = 10.0;   // |x| with the fine step
    double fine = 0.01;
    double outer = 200.0;  // grid half-width
    double coarse = 0.25;
    std::vector<double> times;  // empty: t = T
    int order = 0;              // quadrature nodes per panel, 0 means 2q
};

struct OutputSpec {
    std::string trajectory = "trajectory.csv";
    std::string probability;  // empty: not written
    std::string manifest = "manifest.json";
    std::string soe_dump;     // empty: not written
    FieldSpec field;
};

struct PAutoSpec {
    bool enabled = false;
    double tol = 1e-8;
    int p_max = 64;
};

struct ConvergeSpec {
    double t_star = 0.0;  // 0 means T
    std::vector<int> N_list;
    int reference_N = 0;
    int reference_q = 0;  // 0 means q
    double floor = 1e-10;
    std::string path = "convergence.csv";
    std::string report = "convergence.json";
};

struct BenchSpec {
    std::vector<int> N_list;
    int repeats = 3;
    std::string path = "bench.csv";
};

struct RunConfig {
    Physics phys{};
    PAutoSpec p_auto;
    double T = 500.0;
    int N = 1000;
    int q = 4;
    SourceKind kind = SourceKind::excited_atom;
    Wavepacket wp{};
    WavepacketSourceOptions source_opt{};
    KernelOptions kernels{};
    double quad_tol = 1e-13;
    OutputSpec out;
    ConvergeSpec converge;
    BenchSpec bench;
    int threads = 1;
};

namespace detail {

inline std::string join(const std::string& a, const std::string& b) { return a.empty() ? b : a + "." + b; }

inline void reject_unknown(const json& j, const std::string& path, std::initializer_list<const char*> keys) {
    if (!j.is_object()) throw ConfigError(path + ": expected an object");
    std::set<std::string> allowed(keys.begin(), keys.end());
    for (const auto& [k, v] : j.items()) {
        (void)v;
        if (!allowed.count(k)) throw ConfigError(join(path, k) + ": unknown key");
    }
}

inline double get_number(const json& j, const std::string& path, const char* key, double fallback) {
    if (!j.contains(key)) return fallback;
    const auto& v = j.at(key);
    if (!v.is_number()) throw ConfigError(join(path, key) + ": expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw ConfigError(join(path, key) + ": must be finite");
    return x;
}

inline int get_int(const json& j, const std::string& path, const char* key, int fallback) {
    if (!j.contains(key)) return fallback;
    const auto& v = j.at(key);
    if (!v.is_number_integer()) throw ConfigError(join(path, key) + ": expected an integer");
    return v.get<int>();
}

inline bool get_bool(const json& j, const std::string& path, const char* key, bool fallback) {
    if (!j.contains(key)) return fallback;
    const auto& v = j.at(key);
    if (!v.is_boolean()) throw ConfigError(join(path, key) + ": expected true or false");
    return v.get<bool>();
}

inline std::string get_string(const json& j, const std::string& path, const char* key, const std::string& fallback) {
    if (!j.contains(key)) return fallback;
    const auto& v = j.at(key);
    if (v.is_null()) return "";
    if (!v.is_string()) throw ConfigError(join(path, key) + ": expected a string or null");
    return v.get<std::string>();
}

template <class T>
std::vector<T> get_list(const json& j, const std::string& path, const char* key, std::vector<T> fallback) {
    if (!j.contains(key)) return fallback;
    const auto& v = j.at(key);
    if (!v.is_array()) throw ConfigError(join(path, key) + ": expected an array");
    std::vector<T> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const std::string p = join(path, key) + "[" + std::to_string(i) + "]";
        if constexpr (std::is_integral_v<T>) {
            if (!v[i].is_number_integer()) throw ConfigError(p + ": expected an integer");
        } else {
            if (!v[i].is_number()) throw ConfigError(p + ": expected a number");
        }
        out.push_back(v[i].get<T>());
    }
    return out;
}

inline void require(bool ok, const std::string& path, const std::string& msg) {
    if (!ok) throw ConfigError(path + ": " + msg);
}

}  // namespace detail

/// Parses a configuration object. A run manifest is accepted too; its
/// "config" member is used.
[[nodiscard]] inline RunConfig parse_config(const json& root_in) {
    using namespace detail;
    const json& root = (root_in.is_object() && root_in.contains("manifest_version")) ? root_in.at("config") : root_in;
    reject_unknown(root, "", {"physics", "discretization", "scenario", "soe", "kernels", "collocation", "outputs",
                              "converge", "bench", "threads"});
    RunConfig c;
    const json empty = json::object();
    auto section = [&](const char* key) -> const json& { return root.contains(key) ? root.at(key) : empty; };

    const json& ph = section("physics");
    reject_unknown(ph, "physics", {"c", "omega", "sigma", "g", "p", "p_auto"});
    c.phys.c = get_number(ph, "physics", "c", 1.0);
    c.phys.omega = get_number(ph, "physics", "omega", 1.0);
    c.phys.sigma = get_number(ph, "physics", "sigma", 0.1);
    c.phys.g = get_number(ph, "physics", "g", 0.2);
    c.phys.p = get_int(ph, "physics", "p", 1);
    require(c.phys.c > 0.0, "physics.c", "must be positive");
    require(c.phys.sigma > 0.0, "physics.sigma", "must be positive");
    require(c.phys.p >= 1, "physics.p", "must be >= 1");
    if (ph.contains("p_auto")) {
        const json& pa = ph.at("p_auto");
        reject_unknown(pa, "physics.p_auto", {"enabled", "tol", "p_max"});
        c.p_auto.enabled = get_bool(pa, "physics.p_auto", "enabled", false);
        c.p_auto.tol = get_number(pa, "physics.p_auto", "tol", 1e-8);
        c.p_auto.p_max = get_int(pa, "physics.p_auto", "p_max", 64);
        require(c.p_auto.tol > 0.0, "physics.p_auto.tol", "must be positive");
        require(c.p_auto.p_max >= c.phys.p, "physics.p_auto.p_max", "must be >= physics.p");
    }

    const json& sc = section("scenario");
    reject_unknown(sc, "scenario", {"kind", "wavepacket"});
    const std::string kind = get_string(sc, "scenario", "kind", "excited_atom");
    if (kind == "excited_atom") {
        c.kind = SourceKind::excited_atom;
    } else if (kind == "wavepacket") {
        c.kind = SourceKind::wavepacket;
    } else {
        throw ConfigError("scenario.kind: expected \"excited_atom\" or \"wavepacket\", got \"" + kind + "\"");
    }
    if (sc.contains("wavepacket")) {
        const json& wp = sc.at("wavepacket");
        reject_unknown(wp, "scenario.wavepacket", {"x0", "beta", "xi0", "allow_inexact", "support", "tol"});
        c.wp.x0 = get_number(wp, "scenario.wavepacket", "x0", -80.0);
        c.wp.beta = get_number(wp, "scenario.wavepacket", "beta", 12.0);
        c.wp.xi0 = get_number(wp, "scenario.wavepacket", "xi0", 1.0);
        c.source_opt.allow_inexact_translation = get_bool(wp, "scenario.wavepacket", "allow_inexact", false);
        c.source_opt.support = get_number(wp, "scenario.wavepacket", "support", 8.0);
        c.source_opt.tol = get_number(wp, "scenario.wavepacket", "tol", 1e-14);
        require(c.wp.beta > 0.0, "scenario.wavepacket.beta", "must be positive");
        require(c.source_opt.support > 0.0, "scenario.wavepacket.support", "must be positive");
        require(c.source_opt.tol > 0.0, "scenario.wavepacket.tol", "must be positive");
    }
    if (c.kind == SourceKind::wavepacket && !c.source_opt.allow_inexact_translation) {
        if (c.wp.beta < 1.0 || c.wp.xi0 * c.wp.beta < 12.0) {
            throw ConfigError("scenario.wavepacket: xi0*beta >= 12 and beta >= 1 required for exact translation "
                              "(set allow_inexact to accept an error bound of " +
                              std::to_string(translation_error_bound(c.wp)) + ")");
        }
    }

    const json& di = section("discretization");
    reject_unknown(di, "discretization", {"T", "N", "q"});
    c.T = get_number(di, "discretization", "T", c.kind == SourceKind::wavepacket ? 250.0 : 500.0);
    c.N = get_int(di, "discretization", "N", c.kind == SourceKind::wavepacket ? 500 : 1000);
    c.q = get_int(di, "discretization", "q", 4);
    require(c.T > 0.0, "discretization.T", "must be positive");
    require(c.N >= 1, "discretization.N", "must be >= 1");
    require(c.q >= 1, "discretization.q", "must be >= 1");

    const json& so = section("soe");
    reject_unknown(so, "soe", {"t_max", "tol", "delta", "a", "panel_order"});
    c.kernels.soe.t_max = get_number(so, "soe", "t_max", 1e7);
    c.kernels.soe.tol = get_number(so, "soe", "tol", 1e-12);
    c.kernels.soe.delta = get_number(so, "soe", "delta", 20.0);
    c.kernels.soe.a = get_number(so, "soe", "a", 5.0);
    c.kernels.soe.panel_order = get_int(so, "soe", "panel_order", 16);
    require(c.kernels.soe.t_max > c.kernels.soe.delta, "soe.t_max", "must exceed soe.delta");
    require(c.kernels.soe.tol > 0.0, "soe.tol", "must be positive");
    require(c.kernels.soe.a > 0.0, "soe.a", "must be positive");
    require(c.kernels.soe.panel_order >= 1, "soe.panel_order", "must be >= 1");
    const double limit = c.phys.sigma * c.kernels.soe.t_max / (std::sqrt(2.0) * c.phys.c);
    require(c.T <= limit, "discretization.T",
            "exceeds sigma*t_max/(sqrt2*c) = " + std::to_string(limit) + "; raise soe.t_max");

    const json& ke = section("kernels");
    reject_unknown(ke, "kernels", {"cheb_start", "cheb_max", "cheb_tol"});
    c.kernels.cheb_start = get_int(ke, "kernels", "cheb_start", 60);
    c.kernels.cheb_max = get_int(ke, "kernels", "cheb_max", 4000);
    c.kernels.cheb_tol = get_number(ke, "kernels", "cheb_tol", 1e-13);
    require(c.kernels.cheb_start >= 2, "kernels.cheb_start", "must be >= 2");
    require(c.kernels.cheb_max >= c.kernels.cheb_start, "kernels.cheb_max", "must be >= kernels.cheb_start");
    require(c.kernels.cheb_tol > 0.0, "kernels.cheb_tol", "must be positive");

    const json& co = section("collocation");
    reject_unknown(co, "collocation", {"quad_tol"});
    c.quad_tol = get_number(co, "collocation", "quad_tol", 1e-13);
    require(c.quad_tol > 0.0, "collocation.quad_tol", "must be positive");

    const json& ou = section("outputs");
    reject_unknown(ou, "outputs", {"trajectory", "probability", "manifest", "soe_dump", "field"});
    c.out.trajectory = get_string(ou, "outputs", "trajectory", "trajectory.csv");
    c.out.probability = get_string(ou, "outputs", "probability", "");
    c.out.manifest = get_string(ou, "outputs", "manifest", "manifest.json");
    c.out.soe_dump = get_string(ou, "outputs", "soe_dump", "");
    require(!c.out.trajectory.empty(), "outputs.trajectory", "must name a file");
    require(!c.out.manifest.empty(), "outputs.manifest", "must name a file");
    if (ou.contains("field") && !ou.at("field").is_null()) {
        const json& fi = ou.at("field");
        const std::string p = "outputs.field";
        reject_unknown(fi, p, {"path", "inner", "fine", "outer", "coarse", "times", "order"});
        auto& f = c.out.field;
        f.enabled = true;
        f.path = get_string(fi, p, "path", "field.csv");
        f.inner = get_number(fi, p, "inner", 10.0);
        f.fine = get_number(fi, p, "fine", 0.01);
        f.outer = get_number(fi, p, "outer", 200.0);
        f.coarse = get_number(fi, p, "coarse", 0.25);
        f.times = get_list<double>(fi, p, "times", {});
        f.order = get_int(fi, p, "order", 0);
        require(!f.path.empty(), p + ".path", "must name a file");
        require(f.fine > 0.0, p + ".fine", "must be positive");
        require(f.coarse > 0.0, p + ".coarse", "must be positive");
        require(f.inner >= 0.0, p + ".inner", "must be >= 0");
        require(f.outer >= f.inner, p + ".outer", "must be >= inner");
        require(f.order >= 0, p + ".order", "must be >= 0");
        for (std::size_t i = 0; i < f.times.size(); ++i)
            require(f.times[i] >= 0.0 && f.times[i] <= c.T, p + ".times[" + std::to_string(i) + "]",
                    "must lie in [0, T]");
    }

    const json& cv = section("converge");
    reject_unknown(cv, "converge", {"t_star", "N_list", "reference_N", "reference_q", "floor", "path", "report"});
    c.converge.t_star = get_number(cv, "converge", "t_star", 0.0);
    c.converge.N_list = get_list<int>(cv, "converge", "N_list", {});
    c.converge.reference_N = get_int(cv, "converge", "reference_N", 0);
    c.converge.reference_q = get_int(cv, "converge", "reference_q", 0);
    c.converge.floor = get_number(cv, "converge", "floor", 1e-10);
    c.converge.path = get_string(cv, "converge", "path", "convergence.csv");
    c.converge.report = get_string(cv, "converge", "report", "convergence.json");
    require(c.converge.t_star >= 0.0 && c.converge.t_star <= c.T, "converge.t_star", "must lie in [0, T]");
    for (std::size_t i = 0; i < c.converge.N_list.size(); ++i)
        require(c.converge.N_list[i] >= 1, "converge.N_list[" + std::to_string(i) + "]", "must be >= 1");
    require(c.converge.reference_q >= 0, "converge.reference_q", "must be >= 0");

    const json& be = section("bench");
    reject_unknown(be, "bench", {"N_list", "repeats", "path"});
    c.bench.N_list = get_list<int>(be, "bench", "N_list", {});
    c.bench.repeats = get_int(be, "bench", "repeats", 3);
    c.bench.path = get_string(be, "bench", "path", "bench.csv");
    require(c.bench.repeats >= 1, "bench.repeats", "must be >= 1");
    for (std::size_t i = 0; i < c.bench.N_list.size(); ++i)
        require(c.bench.N_list[i] >= 1, "bench.N_list[" + std::to_string(i) + "]", "must be >= 1");

    c.threads = get_int(root, "", "threads", 1);
    require(c.threads >= 1, "threads", "must be >= 1");
    return c;
}

/// Fully resolved configuration, suitable for echoing into a manifest and
/// parsing back.
[[nodiscard]] inline json to_json(const RunConfig& c) {
    json j;
    j["physics"] = {{"c", c.phys.c}, {"omega", c.phys.omega}, {"sigma", c.phys.sigma}, {"g", c.phys.g},
                    {"p", c.phys.p},
                    {"p_auto", {{"enabled", c.p_auto.enabled}, {"tol", c.p_auto.tol}, {"p_max", c.p_auto.p_max}}}};
    j["discretization"] = {{"T", c.T}, {"N", c.N}, {"q", c.q}};
    j["scenario"] = {{"kind", c.kind == SourceKind::wavepacket ? "wavepacket" : "excited_atom"},
                     {"wavepacket",
                      {{"x0", c.wp.x0},
                       {"beta", c.wp.beta},
                       {"xi0", c.wp.xi0},
                       {"allow_inexact", c.source_opt.allow_inexact_translation},
                       {"support", c.source_opt.support},
                       {"tol", c.source_opt.tol}}}};
    j["soe"] = {{"t_max", c.kernels.soe.t_max},
                {"tol", c.kernels.soe.tol},
                {"delta", c.kernels.soe.delta},
                {"a", c.kernels.soe.a},
                {"panel_order", c.kernels.soe.panel_order}};
    j["kernels"] = {{"cheb_start", c.kernels.cheb_start},
                    {"cheb_max", c.kernels.cheb_max},
                    {"cheb_tol", c.kernels.cheb_tol}};
    j["collocation"] = {{"quad_tol", c.quad_tol}};
    auto opt_str = [](const std::string& s) { return s.empty() ? json(nullptr) : json(s); };
    j["outputs"] = {{"trajectory", c.out.trajectory},
                    {"probability", opt_str(c.out.probability)},
                    {"manifest", c.out.manifest},
                    {"soe_dump", opt_str(c.out.soe_dump)}};
    if (c.out.field.enabled) {
        const auto& f = c.out.field;
        j["outputs"]["field"] = {{"path", f.path},   {"inner", f.inner}, {"fine", f.fine},  {"outer", f.outer},
                                 {"coarse", f.coarse}, {"times", f.times}, {"order", f.order}};
    } else {
        j["outputs"]["field"] = nullptr;
    }
    j["converge"] = {{"t_star", c.converge.t_star},     {"N_list", c.converge.N_list},
                     {"reference_N", c.converge.reference_N}, {"reference_q", c.converge.reference_q},
                     {"floor", c.converge.floor},       {"path", c.converge.path},
                     {"report", c.converge.report}};
    j["bench"] = {{"N_list", c.bench.N_list}, {"repeats", c.bench.repeats}, {"path", c.bench.path}};
    j["threads"] = c.threads;
    return j;
}

[[nodiscard]] inline RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw ConfigError(path + ": " + e.what());
    }
    return parse_config(j);
}

}  // namespace cse
