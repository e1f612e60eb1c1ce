// nvlev — levitated-nanodiamond spin interference toolkit, command line
//
// Exit codes: 0 success, 2 configuration error, 3 numerical guard
// (truncation or degeneracy), 4 input/output error.

#include <cstdint>
#include <iostream>

#include "CLI11.hpp"
#include "commands.hpp"
#include "nvlev/trapdata.hpp"
#include "nvlev/version.hpp"

namespace {

using namespace nvlev;
using namespace nvlev::cli;

struct Flags {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<int> jobs;
    std::optional<std::string> out;
};

RunConfig resolve(const Flags& flags) {
    RunConfig cfg = load_config(flags.config);
    if (flags.seed) {
        cfg.seed             = *flags.seed;
        cfg.resolved["seed"] = *flags.seed;
    }
    if (flags.jobs) {
        if (*flags.jobs < 1) throw ConfigError("config error at jobs: must be >= 1");
        cfg.jobs             = *flags.jobs;
        cfg.resolved["jobs"] = *flags.jobs;
    }
    if (flags.out) {
        cfg.out             = *flags.out;
        cfg.resolved["out"] = *flags.out;
    }
    return cfg;
}

void add_common(CLI::App* cmd, Flags& flags) {
    cmd->add_option("--config", flags.config, "configuration file (JSON, nested sections)");
    cmd->add_option("--seed", flags.seed, "random seed override");
    cmd->add_option("--jobs", flags.jobs, "worker threads for grid sweeps");
    cmd->add_option("--out", flags.out, "output directory");
}

int run(int argc, char** argv) {
    CLI::App app{"levitated-nanodiamond NV spin interference toolkit"};
    app.set_version_flag("--version", std::string("nvlev ") + version);
    app.require_subcommand(1);

    Flags flags;
    using Command = std::vector<std::string> (*)(const RunConfig&);
    struct Sub {
        const char* name;
        const char* help;
        Command fn;
    };
    const Sub subs[] = {
        {"fringe", "interference fringes over tilt angle and NV orientation", &cmd_fringe},
        {"fidelity-grid", "transverse-coupling fidelity over a lambda/gamma grid",
         &cmd_fidelity_grid},
        {"ramsey", "a single interference sequence", &cmd_ramsey},
        {"psd", "power spectral density and peak fits of a trace file", &cmd_psd},
        {"synth", "synthesize a trap time series", &cmd_synth},
    };
    Command selected = nullptr;
    for (const Sub& s : subs) {
        CLI::App* cmd = app.add_subcommand(s.name, s.help);
        add_common(cmd, flags);
        cmd->callback([&selected, fn = s.fn] { selected = fn; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        const RunConfig cfg = resolve(flags);
        for (const std::string& path : selected(cfg)) std::cout << path << "\n";
        return 0;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const TruncationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const DegeneracyError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const EmptyInputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    }
}

}  // namespace

int main(int argc, char** argv) { return run(argc, argv); }
