#include "commands.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "nvlev/analytic.hpp"
#include "nvlev/parallel.hpp"
#include "nvlev/trapdata.hpp"
#include "nvlev/version.hpp"

namespace nvlev::cli {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

class TableWriter {
public:
    TableWriter(const RunConfig& cfg, const std::string& command, const std::string& filename)
        : path_((std::filesystem::path(cfg.out) / filename).string()) {
        std::filesystem::create_directories(cfg.out);
        out_.open(path_);
        if (!out_) throw std::runtime_error("cannot open '" + path_ + "' for writing");
        out_ << "# nvlev " << version << "\n";
        out_ << "# command " << command << "\n";
        out_ << "# config " << cfg.resolved.dump() << "\n";
        out_ << "# seed " << cfg.seed << "\n";
        out_ << "# truncation n_x=" << cfg.sequence.n_x.n_levels
             << " n_y=" << cfg.sequence.n_y.n_levels << " n_z=" << cfg.sequence.n_z.n_levels
             << "\n";
        if (cfg.physical_diag) {
            out_ << "# physical magnetic_moment_A_m2 " << fmt(cfg.physical_diag->magnetic_moment)
                 << " field_gradient_T_m " << fmt(cfg.physical_diag->field_gradient)
                 << " k_parameter " << fmt(cfg.physical_diag->k_parameter) << "\n";
        }
    }

    void comment(const std::string& line) { out_ << "# " << line << "\n"; }

    void columns(const std::vector<std::string>& names) {
        out_ << "# columns";
        for (const auto& n : names) out_ << " " << n;
        out_ << "\n";
    }

    void row(const std::vector<std::string>& cells) {
        for (std::size_t k = 0; k < cells.size(); ++k) out_ << (k ? "\t" : "") << cells[k];
        out_ << "\n";
    }

    std::string close() {
        out_.close();
        if (!out_) throw std::runtime_error("write failed for '" + path_ + "'");
        return path_;
    }

private:
    std::string path_;
    std::ofstream out_;
};

double fringe_dlambda_over_cos(const RunConfig& cfg) {
    if (cfg.fringe.dlambda_over_cos) return *cfg.fringe.dlambda_over_cos;
    if (cfg.couplings.lambda_ <= 0)
        throw ConfigError("config error at fringe.dlambda_over_cos: required when lambda = 0");
    // default working point K = 8 lambda (dlambda/cos) t0 = 10
    return 10.0 / (16.0 * pi * cfg.couplings.lambda_);
}

}  // namespace

std::vector<std::string> cmd_fringe(const RunConfig& cfg) {
    FringeConfig f = cfg.fringe;
    RealVector thetas(f.theta_points);
    for (int k = 0; k < f.theta_points; ++k)
        thetas[k] = f.theta_points == 1
                        ? f.theta_min
                        : f.theta_min + (f.theta_max - f.theta_min) * k / (f.theta_points - 1.0);
    RealVector cxs(static_cast<Index>(f.cx.size()));
    for (std::size_t k = 0; k < f.cx.size(); ++k) cxs[static_cast<Index>(k)] = f.cx[k];

    SequenceSpec spec = cfg.sequence;
    if (!cfg.sequence_model_given) {
        const bool aligned_only = cxs.size() == 1 && cxs[0] == 0.0;
        spec.model              = aligned_only ? Model::exact1d : Model::misaligned;
        if (spec.model == Model::misaligned && spec.n_z.n_levels < 40) spec.n_z = FockSpec(40);
    }

    CouplingSet base = cfg.couplings;
    base.dlambda     = fringe_dlambda_over_cos(cfg);
    if (base.lambda_ == 0.0)
        throw ConfigError("config error at couplings.lambda: fringe scan needs lambda > 0");

    const FringeScan scan = fringe_scan(thetas, cxs, spec, base, cfg.jobs);

    TableWriter table(cfg, "fringe", "fringe.tsv");
    table.comment("model " + model_to_string(spec.model));
    table.comment("dlambda_over_cos " + fmt(base.dlambda));
    table.comment("k_parameter " + fmt(8.0 * base.lambda_ * base.dlambda * period));
    table.columns({"theta_rad", "c_x", "p0"});
    for (Index r = 0; r < cxs.size(); ++r)
        for (Index t = 0; t < thetas.size(); ++t)
            table.row({fmt(thetas[t]), fmt(cxs[r]), fmt(scan.p0(r, t))});

    TableWriter vis(cfg, "fringe", "visibility.tsv");
    vis.columns({"c_x", "visibility"});
    for (Index r = 0; r < cxs.size(); ++r) vis.row({fmt(cxs[r]), fmt(scan.visibility[r])});

    return {table.close(), vis.close()};
}

std::vector<std::string> cmd_fidelity_grid(const RunConfig& cfg) {
    const FidelityGridConfig& g = cfg.fidelity_grid;
    FidelityOptions opts;
    opts.dlambda = g.dlambda;
    opts.zfs     = g.zfs;

    struct Point {
        double lambda, gamma, fidelity, delta_double;
    };
    std::vector<Point> points;
    for (double lambda : g.lambda)
        for (double gamma : g.gamma) points.push_back({lambda, gamma, 0.0, 0.0});

    const FockSpec nx = cfg.sequence.n_x, ny = cfg.sequence.n_y, nz = cfg.sequence.n_z;
    parallel_for_index(static_cast<Index>(points.size()), cfg.jobs, [&](Index k) {
        Point& p   = points[static_cast<std::size_t>(k)];
        p.fidelity = perturbation_fidelity(p.lambda, p.gamma, p.gamma, g.beta, nx, ny, nz, opts);
        if (g.convergence) {
            const double refined = perturbation_fidelity(
                p.lambda, p.gamma, p.gamma, g.beta, FockSpec(2 * nx.n_levels),
                FockSpec(2 * ny.n_levels), FockSpec(2 * nz.n_levels), opts);
            p.delta_double = std::abs(refined - p.fidelity);
        }
    });

    TableWriter table(cfg, "fidelity-grid", "fidelity.tsv");
    table.comment("dlambda " + fmt(g.dlambda) + " zfs " + fmt(g.zfs));
    if (g.convergence)
        table.columns({"lambda", "gamma_x", "gamma_y", "fidelity", "delta_double"});
    else
        table.columns({"lambda", "gamma_x", "gamma_y", "fidelity"});
    for (const Point& p : points) {
        std::vector<std::string> cells{fmt(p.lambda), fmt(p.gamma), fmt(p.gamma),
                                       fmt(p.fidelity)};
        if (g.convergence) cells.push_back(fmt(p.delta_double));
        table.row(cells);
    }
    return {table.close()};
}

std::vector<std::string> cmd_ramsey(const RunConfig& cfg) {
    TableWriter table(cfg, "ramsey", "ramsey.tsv");
    table.comment("model " + model_to_string(cfg.sequence.model));
    const double dphi = gravitational_phase(cfg.couplings);
    if (cfg.sequence.initial_motion == InitialMotion::thermal) {
        const ThermalResult t = thermal_p0(cfg.sequence, cfg.couplings, cfg.thermal_method,
                                           cfg.thermal_samples, cfg.seed);
        table.columns({"p0", "spread", "samples", "dphi_analytic"});
        table.row({fmt(t.mean_p0), fmt(t.spread), std::to_string(t.samples), fmt(dphi)});
    } else {
        const RunResult r = run_sequence(cfg.sequence, cfg.couplings);
        table.columns({"p0", "pop_plus", "pop_zero", "pop_minus", "dphi_analytic"});
        table.row({fmt(r.p0), fmt(r.populations[0]), fmt(r.populations[1]),
                   fmt(r.populations[2]), fmt(dphi)});
    }
    return {table.close()};
}

std::vector<std::string> cmd_psd(const RunConfig& cfg) {
    if (cfg.psd.input.empty())
        throw ConfigError("config error at psd.input: an input trace file is required");
    const TimeSeries ts = load_time_series(cfg.psd.input);
    const PSDRecord rec = psd(ts, cfg.psd.segment_length, cfg.psd.overlap);
    const auto fits     = fit_peaks(rec, cfg.psd.n_peaks);

    TableWriter table(cfg, "psd", "psd.tsv");
    table.comment("input " + cfg.psd.input);
    table.comment("window " + rec.window + " segments " + std::to_string(rec.segments));
    table.columns({"freq_hz", "power"});
    for (std::size_t k = 0; k < rec.freqs.size(); ++k)
        table.row({fmt(rec.freqs[k]), fmt(rec.power[k])});

    TableWriter peaks(cfg, "psd", "peaks.tsv");
    peaks.columns({"center_hz", "width_hz", "amplitude", "converged", "iterations"});
    for (const PeakFit& p : fits)
        peaks.row({fmt(p.center_hz), fmt(p.width_hz), fmt(p.amplitude),
                   p.converged ? "1" : "0", std::to_string(p.iterations)});
    return {table.close(), peaks.close()};
}

std::vector<std::string> cmd_synth(const RunConfig& cfg) {
    const SynthConfig& s = cfg.synth;
    const TimeSeries ts  = synthesize_trace(s.freqs_hz, s.damping_hz, s.temperature_scale,
                                            s.sample_rate_hz, s.duration_s, cfg.seed);
    std::filesystem::create_directories(cfg.out);
    const std::string path = (std::filesystem::path(cfg.out) / s.output).string();
    save_time_series(ts, path, s.two_column);
    return {path};
}

}  // namespace nvlev::cli
