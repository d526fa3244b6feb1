#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "wavehf/shell/commands.hpp"
#include "wavehf/shell/config.hpp"

namespace {

struct Options {
    std::string config_path;
    std::optional<double> dt;
    std::optional<double> T;
    bool exchange = false;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
};

void add_common(CLI::App& cmd, Options& o) {
    cmd.add_option("--config", o.config_path, "Flat JSON run configuration")->required();
    cmd.add_option("--dt", o.dt, "Override the time step");
    cmd.add_option("--T", o.T, "Override the final time");
    cmd.add_flag("--exchange", o.exchange, "Include the exchange term");
    cmd.add_option("--seed", o.seed, "Override the random seed");
    cmd.add_option("--out", o.out, "Output path (CSV for evolve, JSON report otherwise)");
}

}  // namespace

int main(int argc, char** argv) {
    using namespace wavehf::shell;

    CLI::App app{"Wave-matrix Hartree-Fock dynamics and verification"};
    app.require_subcommand(1);
    Options options;

    auto* evolve = app.add_subcommand("evolve", "Propagate and record a trajectory");
    auto* groundstate = app.add_subcommand("groundstate", "Compare SCF and wave-matrix ground states");
    auto* gradcheck = app.add_subcommand("gradcheck", "Check the analytic gradient against finite differences");
    auto* vncheck = app.add_subcommand("vncheck", "Check agreement with the von Neumann equation");
    for (auto* cmd : {evolve, groundstate, gradcheck, vncheck}) {
        add_common(*cmd, options);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfig;
    }

    return run_guarded(
        [&] {
            RunConfig config = load_config(options.config_path);
            apply_overrides(config, Overrides{options.dt, options.T, options.exchange, options.seed});
            std::optional<std::filesystem::path> out;
            if (options.out) {
                out = *options.out;
            }
            if (evolve->parsed()) {
                return cmd_evolve(config, out, std::cout);
            }
            if (groundstate->parsed()) {
                return cmd_groundstate(config, out, std::cout);
            }
            if (gradcheck->parsed()) {
                return cmd_gradcheck(config, out, std::cout);
            }
            return cmd_vncheck(config, out, std::cout);
        },
        std::cerr);
}
