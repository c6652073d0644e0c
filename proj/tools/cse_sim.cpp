// cse_sim: command line driver for the collective emission solver.
//
//   cse_sim run      --config cfg.json [--out dir] [--cache dir] [--threads n]
//   cse_sim field    ...
//   cse_sim converge ...
//   cse_sim bench    ...
//
// Exit status: 0 ok, 2 configuration error, 3 numerical failure.

#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "cse/config.hpp"
#include "cse/error.hpp"
#include "cse/runner.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Single-photon collective emission in a 1-D Gaussian atomic cloud"};
    app.set_version_flag("--version", cse::kVersion);
    app.require_subcommand(1, 1);

    std::string config_path;
    cse::VerbOptions vo;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON configuration (a run manifest is accepted)")->required();
        sub->add_option("--out", vo.out_dir, "output directory")->capture_default_str();
        sub->add_option("--cache", vo.cache_dir, "kernel table cache directory");
        sub->add_option("--threads", vo.threads, "worker threads (overrides the config)")->check(CLI::PositiveNumber);
    };
    auto* run = app.add_subcommand("run", "solve and write the trajectory");
    auto* field = app.add_subcommand("field", "solve and sample the photon field");
    auto* converge = app.add_subcommand("converge", "error against a refined reference");
    auto* bench = app.add_subcommand("bench", "timing of the fast and dense-history solvers");
    for (auto* s : {run, field, converge, bench}) add_common(s);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitConfig;
    }

    cse::RunConfig cfg;
    try {
        cfg = cse::load_config(config_path);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    }

    try {
        if (run->parsed()) return cse::run_verb(cfg, vo, false);
        if (field->parsed()) return cse::run_verb(cfg, vo, true);
        if (converge->parsed()) return cse::converge_verb(cfg, vo);
        return cse::bench_verb(cfg, vo);
    } catch (const cse::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return kExitNumerical;
    }
}
