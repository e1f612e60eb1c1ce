// config.hpp — structured run configuration for the command-line front end
//
// One JSON file with nested sections (physical, couplings, sequence,
// truncation, fringe, fidelity_grid, psd, synth). Unknown keys are rejected
// with their full path. Precedence: built-in defaults < "physical" (when
// present) < "couplings" overrides < command-line flags.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "nvlev/model.hpp"
#include "nvlev/ramsey.hpp"

namespace nvlev::cli {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct FringeConfig {
    double theta_min = pi / 2 - pi / 20;
    double theta_max = pi / 2;
    int theta_points = 60;
    std::vector<double> cx{0.0};
    // dlambda / cos(theta); defaults to the K = 10 working point for the
    // resolved lambda when absent.
    std::optional<double> dlambda_over_cos;
};

struct FidelityGridConfig {
    std::vector<double> lambda{0.025, 0.05, 0.1};
    std::vector<double> gamma{0.1, 0.2, 0.32, 0.4};
    double dlambda    = 0.1;
    double zfs        = 2.5;
    Complex beta{0.0, 0.0};
    bool convergence  = true;  // re-run at doubled truncation, report the delta
};

struct PsdConfig {
    std::string input;
    int segment_length = 8192;
    double overlap     = 0.5;
    int n_peaks        = 3;
};

struct SynthConfig {
    std::vector<double> freqs_hz{60e3, 65e3, 11e3};
    std::vector<double> damping_hz{150.0, 150.0, 60.0};
    double temperature_scale = 1e-3;
    double sample_rate_hz    = 400e3;
    double duration_s        = 2.0;
    bool two_column          = false;
    std::string output       = "trace.tsv";
};

struct RunConfig {
    std::uint64_t seed = 0;
    int jobs           = 1;
    std::string out    = ".";

    CouplingSet couplings;
    std::optional<CouplingDiagnostics> physical_diag;  // set when "physical" was given
    SequenceSpec sequence;
    bool sequence_model_given = false;
    ThermalMethod thermal_method = ThermalMethod::p_sample;
    int thermal_samples          = 256;

    FringeConfig fringe;
    FidelityGridConfig fidelity_grid;
    PsdConfig psd;
    SynthConfig synth;

    nlohmann::json resolved;  // full configuration after defaults and overrides
};

// Parses and validates a configuration document. Throws ConfigError with a
// dotted key path on unknown keys or ill-typed values.
RunConfig parse_config(const nlohmann::json& doc);

// Convenience wrapper: empty path gives an all-defaults configuration.
RunConfig load_config(const std::string& path);

Model model_from_string(const std::string& name);
std::string model_to_string(Model m);

}  // namespace nvlev::cli
