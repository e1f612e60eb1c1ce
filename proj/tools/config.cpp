#include "config.hpp"

#include <fstream>
#include <set>

namespace nvlev::cli {

using nlohmann::json;

namespace {

void reject_unknown(const json& obj, const std::string& path,
                    const std::set<std::string>& known) {
    if (!obj.is_object()) throw ConfigError("config error at " + path + ": expected an object");
    for (const auto& [key, value] : obj.items()) {
        if (!known.count(key))
            throw ConfigError("config error at " + (path.empty() ? key : path + "." + key) +
                              ": unknown key");
        (void)value;
    }
}

template <typename T>
T take(const json& obj, const std::string& path, const char* key, T fallback) {
    if (!obj.contains(key)) return fallback;
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError("config error at " + path + "." + key + ": " + e.what());
    }
}

std::vector<double> take_list(const json& obj, const std::string& path, const char* key,
                              std::vector<double> fallback) {
    if (!obj.contains(key)) return fallback;
    try {
        auto v = obj.at(key).get<std::vector<double>>();
        if (v.empty())
            throw ConfigError("config error at " + path + "." + key + ": empty list");
        return v;
    } catch (const json::exception& e) {
        throw ConfigError("config error at " + path + "." + key + ": " + e.what());
    }
}

PhysicalParams parse_physical(const json& obj) {
    reject_unknown(obj, "physical",
                   {"omega_x", "omega_y", "omega_z", "mass", "radius", "density", "theta",
                    "theta_x", "theta_y", "magnet_radius", "magnetization", "magnet_distance",
                    "zero_field_splitting", "g_nv", "c_x", "c_y", "c_z"});
    PhysicalParams p;
    p.omega_x = take(obj, "physical", "omega_x", 0.0);
    p.omega_y = take(obj, "physical", "omega_y", 0.0);
    p.omega_z = take(obj, "physical", "omega_z", 0.0);
    p.mass    = take(obj, "physical", "mass", 0.0);
    p.radius  = take(obj, "physical", "radius", 0.0);
    p.density = take(obj, "physical", "density", p.density);
    p.theta   = take(obj, "physical", "theta", p.theta);
    p.theta_x = take(obj, "physical", "theta_x", p.theta_x);
    p.theta_y = take(obj, "physical", "theta_y", p.theta_y);
    p.magnet_radius        = take(obj, "physical", "magnet_radius", p.magnet_radius);
    p.magnetization        = take(obj, "physical", "magnetization", p.magnetization);
    p.magnet_distance      = take(obj, "physical", "magnet_distance", p.magnet_distance);
    p.zero_field_splitting = take(obj, "physical", "zero_field_splitting", p.zero_field_splitting);
    p.g_nv = take(obj, "physical", "g_nv", p.g_nv);
    p.c_x  = take(obj, "physical", "c_x", p.c_x);
    p.c_y  = take(obj, "physical", "c_y", p.c_y);
    p.c_z  = take(obj, "physical", "c_z", p.c_z);
    return p;
}

void apply_coupling_overrides(const json& obj, CouplingSet& c) {
    reject_unknown(obj, "couplings",
                   {"lambda", "dlambda", "dlambda_x", "dlambda_y", "omega_x_ratio",
                    "omega_y_ratio", "zfs", "c_x", "c_y", "c_z"});
    c.lambda_       = take(obj, "couplings", "lambda", c.lambda_);
    c.dlambda       = take(obj, "couplings", "dlambda", c.dlambda);
    c.dlambda_x     = take(obj, "couplings", "dlambda_x", c.dlambda_x);
    c.dlambda_y     = take(obj, "couplings", "dlambda_y", c.dlambda_y);
    c.omega_x_ratio = take(obj, "couplings", "omega_x_ratio", c.omega_x_ratio);
    c.omega_y_ratio = take(obj, "couplings", "omega_y_ratio", c.omega_y_ratio);
    c.zfs           = take(obj, "couplings", "zfs", c.zfs);
    c.c_x           = take(obj, "couplings", "c_x", c.c_x);
    c.c_y           = take(obj, "couplings", "c_y", c.c_y);
    c.c_z           = take(obj, "couplings", "c_z", c.c_z);
}

}  // namespace

Model model_from_string(const std::string& name) {
    if (name == "analytic1d") return Model::analytic1d;
    if (name == "exact1d") return Model::exact1d;
    if (name == "exact3d") return Model::exact3d;
    if (name == "perturb3d") return Model::perturb3d;
    if (name == "misaligned") return Model::misaligned;
    if (name == "misaligned_exact") return Model::misaligned_exact;
    throw ConfigError("config error at sequence.model: unknown model '" + name + "'");
}

std::string model_to_string(Model m) {
    switch (m) {
        case Model::analytic1d: return "analytic1d";
        case Model::exact1d: return "exact1d";
        case Model::exact3d: return "exact3d";
        case Model::perturb3d: return "perturb3d";
        case Model::misaligned: return "misaligned";
        case Model::misaligned_exact: return "misaligned_exact";
    }
    return "?";
}

RunConfig parse_config(const json& doc) {
    reject_unknown(doc, "",
                   {"seed", "jobs", "out", "physical", "couplings", "sequence", "truncation",
                    "fringe", "fidelity_grid", "psd", "synth"});
    RunConfig cfg;
    cfg.seed = take<std::uint64_t>(doc, "", "seed", 0);
    cfg.jobs = take(doc, "", "jobs", 1);
    cfg.out  = take<std::string>(doc, "", "out", ".");
    if (cfg.jobs < 1) throw ConfigError("config error at jobs: must be >= 1");

    if (doc.contains("physical")) {
        CouplingDiagnostics diag;
        cfg.couplings     = couplings_from_physical(parse_physical(doc.at("physical")), &diag);
        cfg.physical_diag = diag;
    }
    if (doc.contains("couplings")) apply_coupling_overrides(doc.at("couplings"), cfg.couplings);
    cfg.couplings.validate();

    if (doc.contains("sequence")) {
        const json& s = doc.at("sequence");
        reject_unknown(s, "sequence",
                       {"model", "initial", "beta_re", "beta_im", "nbar", "hold_time", "cycles",
                        "pulse", "pulse_omega", "thermal_method", "thermal_samples", "eps_degen"});
        if (s.contains("model")) {
            cfg.sequence.model       = model_from_string(take<std::string>(s, "sequence", "model", ""));
            cfg.sequence_model_given = true;
        }
        const std::string initial = take<std::string>(s, "sequence", "initial", "vacuum");
        if (initial == "vacuum")
            cfg.sequence.initial_motion = InitialMotion::vacuum;
        else if (initial == "coherent")
            cfg.sequence.initial_motion = InitialMotion::coherent;
        else if (initial == "thermal")
            cfg.sequence.initial_motion = InitialMotion::thermal;
        else
            throw ConfigError("config error at sequence.initial: unknown value '" + initial + "'");
        cfg.sequence.beta = Complex(take(s, "sequence", "beta_re", 0.0),
                                    take(s, "sequence", "beta_im", 0.0));
        cfg.sequence.nbar      = take(s, "sequence", "nbar", 0.0);
        cfg.sequence.hold_time = take(s, "sequence", "hold_time", period);
        cfg.sequence.cycles    = take(s, "sequence", "cycles", 1);
        const std::string pulse = take<std::string>(s, "sequence", "pulse", "ideal");
        if (pulse == "ideal")
            cfg.sequence.pulse = PulseMode::ideal;
        else if (pulse == "finite")
            cfg.sequence.pulse = PulseMode::finite;
        else
            throw ConfigError("config error at sequence.pulse: unknown value '" + pulse + "'");
        cfg.sequence.pulse_omega = take(s, "sequence", "pulse_omega", 0.0);
        cfg.sequence.eps_degen   = take(s, "sequence", "eps_degen", 1e-6);
        const std::string method = take<std::string>(s, "sequence", "thermal_method", "p_sample");
        if (method == "p_sample")
            cfg.thermal_method = ThermalMethod::p_sample;
        else if (method == "density_exact")
            cfg.thermal_method = ThermalMethod::density_exact;
        else
            throw ConfigError("config error at sequence.thermal_method: unknown value '" + method +
                              "'");
        cfg.thermal_samples = take(s, "sequence", "thermal_samples", 256);
    }

    if (doc.contains("truncation")) {
        const json& t = doc.at("truncation");
        reject_unknown(t, "truncation", {"n_x", "n_y", "n_z"});
        auto spec = [&](const char* key, int fallback) {
            const int n = take(t, "truncation", key, fallback);
            if (n < 2)
                throw ConfigError(std::string("config error at truncation.") + key +
                                  ": must be >= 2");
            return FockSpec(n);
        };
        cfg.sequence.n_x = spec("n_x", cfg.sequence.n_x.n_levels);
        cfg.sequence.n_y = spec("n_y", cfg.sequence.n_y.n_levels);
        cfg.sequence.n_z = spec("n_z", cfg.sequence.n_z.n_levels);
    }

    if (doc.contains("fringe")) {
        const json& f = doc.at("fringe");
        reject_unknown(f, "fringe",
                       {"theta_min", "theta_max", "theta_points", "cx", "dlambda_over_cos"});
        cfg.fringe.theta_min    = take(f, "fringe", "theta_min", cfg.fringe.theta_min);
        cfg.fringe.theta_max    = take(f, "fringe", "theta_max", cfg.fringe.theta_max);
        cfg.fringe.theta_points = take(f, "fringe", "theta_points", cfg.fringe.theta_points);
        cfg.fringe.cx           = take_list(f, "fringe", "cx", cfg.fringe.cx);
        if (f.contains("dlambda_over_cos"))
            cfg.fringe.dlambda_over_cos = take(f, "fringe", "dlambda_over_cos", 0.0);
        if (cfg.fringe.theta_points < 1)
            throw ConfigError("config error at fringe.theta_points: must be >= 1");
    }

    if (doc.contains("fidelity_grid")) {
        const json& g = doc.at("fidelity_grid");
        reject_unknown(g, "fidelity_grid",
                       {"lambda", "gamma", "dlambda", "zfs", "beta_re", "beta_im", "convergence"});
        cfg.fidelity_grid.lambda  = take_list(g, "fidelity_grid", "lambda", cfg.fidelity_grid.lambda);
        cfg.fidelity_grid.gamma   = take_list(g, "fidelity_grid", "gamma", cfg.fidelity_grid.gamma);
        cfg.fidelity_grid.dlambda = take(g, "fidelity_grid", "dlambda", cfg.fidelity_grid.dlambda);
        cfg.fidelity_grid.zfs     = take(g, "fidelity_grid", "zfs", cfg.fidelity_grid.zfs);
        cfg.fidelity_grid.beta    = Complex(take(g, "fidelity_grid", "beta_re", 0.0),
                                            take(g, "fidelity_grid", "beta_im", 0.0));
        cfg.fidelity_grid.convergence =
            take(g, "fidelity_grid", "convergence", cfg.fidelity_grid.convergence);
    }

    if (doc.contains("psd")) {
        const json& p = doc.at("psd");
        reject_unknown(p, "psd", {"input", "segment_length", "overlap", "n_peaks"});
        cfg.psd.input          = take<std::string>(p, "psd", "input", "");
        cfg.psd.segment_length = take(p, "psd", "segment_length", cfg.psd.segment_length);
        cfg.psd.overlap        = take(p, "psd", "overlap", cfg.psd.overlap);
        cfg.psd.n_peaks        = take(p, "psd", "n_peaks", cfg.psd.n_peaks);
    }

    if (doc.contains("synth")) {
        const json& s = doc.at("synth");
        reject_unknown(s, "synth",
                       {"freqs_hz", "damping_hz", "temperature_scale", "sample_rate_hz",
                        "duration_s", "two_column", "output"});
        cfg.synth.freqs_hz   = take_list(s, "synth", "freqs_hz", cfg.synth.freqs_hz);
        cfg.synth.damping_hz = take_list(s, "synth", "damping_hz", cfg.synth.damping_hz);
        cfg.synth.temperature_scale =
            take(s, "synth", "temperature_scale", cfg.synth.temperature_scale);
        cfg.synth.sample_rate_hz = take(s, "synth", "sample_rate_hz", cfg.synth.sample_rate_hz);
        cfg.synth.duration_s     = take(s, "synth", "duration_s", cfg.synth.duration_s);
        cfg.synth.two_column     = take(s, "synth", "two_column", cfg.synth.two_column);
        cfg.synth.output         = take<std::string>(s, "synth", "output", cfg.synth.output);
    }

    cfg.resolved = doc;
    return cfg;
}

RunConfig load_config(const std::string& path) {
    if (path.empty()) return parse_config(json::object());
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config '" + path + "'");
    json doc;
    try {
        doc = json::parse(in, nullptr, true, true);  // allow comments
    } catch (const json::exception& e) {
        throw ConfigError("config error in '" + path + "': " + e.what());
    }
    return parse_config(doc);
}

}  // namespace nvlev::cli
