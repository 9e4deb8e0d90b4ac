#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "geofield/config.hpp"
#include "geofield/errors.hpp"
#include "geofield/runner.hpp"

using namespace geofield;

namespace {

double parse_slice(const std::string& spec) {
    if (spec.rfind("z=", 0) != 0) throw ConfigError("--slice", "expected z=<metres>, got " + spec);
    std::size_t used = 0;
    double z = 0.0;
    try {
        z = std::stod(spec.substr(2), &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != spec.size() - 2) throw ConfigError("--slice", "expected z=<metres>, got " + spec);
    return z;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Borehole heat exchanger field simulation and placement optimisation"};
    std::string config_path;
    std::string out_dir;
    std::string command;
    std::vector<std::string> slices;
    std::uint64_t seed = 0;
    bool strict = false;

    app.add_option("--config", config_path, "JSON configuration file")->required();
    app.add_option("--out", out_dir, "output directory (default: out)");
    app.add_option("--command", command,
                   "simulate-fd | simulate-analytic | compare | optimize | validate-single");
    auto* slice_opt = app.add_option("--slice", slices, "horizontal slice to write, z=<m>; repeatable");
    auto* seed_opt = app.add_option("--seed", seed, "seed recorded with the run");
    app.add_flag("--strict", strict, "treat unknown configuration keys as errors");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitUsage;
    }

    RunConfig cfg;
    try {
        cfg = load_config(config_path, strict);
        if (!command.empty()) {
            const auto c = parse_command(command);
            if (!c) {
                std::fprintf(stderr, "unknown command: %s\n", command.c_str());
                return kExitUsage;
            }
            cfg.plan.command = *c;
        }
        if (!out_dir.empty()) cfg.plan.out_dir = out_dir;
        if (slice_opt->count() > 0) {
            cfg.plan.slices_z.clear();
            for (const auto& s : slices) cfg.plan.slices_z.push_back(parse_slice(s));
        }
        if (seed_opt->count() > 0) cfg.plan.seed = seed;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    } catch (const IoError& e) {
        std::fprintf(stderr, "io error: %s\n", e.what());
        return kExitIo;
    }
    for (const auto& w : cfg.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());

    std::string message;
    const int rc = execute(cfg, &message);
    if (rc != kExitOk) {
        std::fprintf(stderr, "%s\n", message.c_str());
    } else {
        std::printf("%s finished; outputs in %s\n", to_string(cfg.plan.command).c_str(),
                    cfg.plan.out_dir.string().c_str());
    }
    return rc;
}
