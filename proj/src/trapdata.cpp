#include "nvlev/trapdata.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <unsupported/Eigen/FFT>
#include <unsupported/Eigen/MatrixFunctions>

#include "nvlev/rng.hpp"

namespace nvlev {

namespace {

// Exact one-step propagator of  s' = A s + B xi  over dt: s_{k+1} = F s_k + w,
// w ~ N(0, Q), with F and Q from the Van Loan block exponential.
struct StepModel {
    Eigen::Matrix2d f;
    Eigen::Matrix2d noise_l;  // Cholesky factor of Q (zero when undriven)
};

StepModel discretize(double omega0, double gamma, double sigma, double dt) {
    Eigen::Matrix2d a;
    a << 0.0, 1.0, -omega0 * omega0, -gamma;
    Eigen::Matrix2d bbt = Eigen::Matrix2d::Zero();
    bbt(1, 1) = sigma * sigma;

    Eigen::Matrix4d m = Eigen::Matrix4d::Zero();
    m.topLeftCorner<2, 2>()     = a;
    m.topRightCorner<2, 2>()    = bbt;
    m.bottomRightCorner<2, 2>() = -a.transpose();
    const Eigen::Matrix4d e = (m * dt).exp();

    StepModel out;
    out.f = e.topLeftCorner<2, 2>();
    Eigen::Matrix2d q = e.topRightCorner<2, 2>() * out.f.transpose();
    q = 0.5 * (q + q.transpose());
    if (sigma == 0.0) {
        out.noise_l.setZero();
        return out;
    }
    Eigen::LLT<Eigen::Matrix2d> llt(q);
    if (llt.info() != Eigen::Success) {
        // fall back through an eigenvalue square root for marginal cases
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(q);
        Eigen::Vector2d ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
        out.noise_l = es.eigenvectors() * ev.asDiagonal();
    } else {
        out.noise_l = llt.matrixL();
    }
    return out;
}

}  // namespace

TimeSeries synthesize_trace(std::span<const double> freqs_hz, std::span<const double> damping_hz,
                            double temperature_scale, double sample_rate, double duration,
                            std::uint64_t seed) {
    if (freqs_hz.empty() || freqs_hz.size() != damping_hz.size())
        throw std::invalid_argument("synthesize_trace: frequency and damping lists must be "
                                    "non-empty and of equal length");
    if (sample_rate <= 0 || duration <= 0)
        throw std::invalid_argument("synthesize_trace: sample_rate and duration must be positive");
    if (temperature_scale < 0)
        throw std::invalid_argument("synthesize_trace: temperature_scale must be >= 0");
    for (double f : freqs_hz)
        if (f <= 0 || f >= sample_rate / 2)
            throw std::invalid_argument("synthesize_trace: oscillator at " + std::to_string(f) +
                                        " Hz violates the sampling theorem at sample_rate = " +
                                        std::to_string(sample_rate));
    for (double g : damping_hz)
        if (g <= 0)
            throw std::invalid_argument("synthesize_trace: damping rates must be positive");

    const double dt = 1.0 / sample_rate;
    const auto n    = static_cast<std::size_t>(std::llround(duration * sample_rate));
    TimeSeries ts;
    ts.samples.assign(n, 0.0);
    ts.sample_rate = sample_rate;

    SeededRng rng(seed);
    for (std::size_t osc = 0; osc < freqs_hz.size(); ++osc) {
        const double w0    = 2.0 * pi * freqs_hz[osc];
        const double gamma = 2.0 * pi * damping_hz[osc];
        const double sigma = temperature_scale * w0;
        const StepModel sm = discretize(w0, gamma, sigma, dt);

        Eigen::Vector2d s = Eigen::Vector2d::Zero();
        const auto burn = temperature_scale > 0
                              ? static_cast<std::size_t>(std::ceil(5.0 / (gamma * dt)))
                              : 0;
        for (std::size_t k = 0; k < burn; ++k)
            s = sm.f * s + sm.noise_l * Eigen::Vector2d(rng.gaussian(), rng.gaussian());
        for (std::size_t k = 0; k < n; ++k) {
            s = sm.f * s + sm.noise_l * Eigen::Vector2d(rng.gaussian(), rng.gaussian());
            ts.samples[k] += s[0];
        }
    }
    ts.metadata["generator"] = "langevin";
    ts.metadata["seed"]      = std::to_string(seed);
    return ts;
}

PSDRecord psd(const TimeSeries& ts, int segment_length, double overlap) {
    const auto n = static_cast<Index>(ts.samples.size());
    if (ts.sample_rate <= 0) throw std::invalid_argument("psd: sample_rate must be positive");
    if (segment_length < 8 || segment_length > n)
        throw std::invalid_argument("psd: segment_length must lie in [8, series length]");
    const Index bins = segment_length / 2 + 1;
    if (n < 2 * bins)
        throw std::invalid_argument("psd: series length " + std::to_string(n) +
                                    " is shorter than twice the bin count " +
                                    std::to_string(bins));
    if (overlap < 0.0 || overlap >= 1.0)
        throw std::invalid_argument("psd: overlap fraction must lie in [0, 1)");

    double mean = 0;
    for (double v : ts.samples) mean += v;
    mean /= static_cast<double>(n);

    std::vector<double> window(segment_length);
    double w2 = 0;
    for (int k = 0; k < segment_length; ++k) {
        window[k] = 0.5 - 0.5 * std::cos(2.0 * pi * k / segment_length);
        w2 += window[k] * window[k];
    }

    const auto hop = std::max<Index>(1, static_cast<Index>(std::llround(segment_length * (1.0 - overlap))));
    const Index n_segments = (n - segment_length) / hop + 1;

    Eigen::FFT<double> fft;
    std::vector<double> buf(segment_length);
    std::vector<Complex> spec(segment_length);
    std::vector<double> acc(bins, 0.0);
    for (Index seg = 0; seg < n_segments; ++seg) {
        const Index off = seg * hop;
        for (int k = 0; k < segment_length; ++k)
            buf[k] = (ts.samples[off + k] - mean) * window[k];
        fft.fwd(spec, buf);
        for (Index k = 0; k < bins; ++k) {
            double p = std::norm(spec[k]) / (ts.sample_rate * w2);
            if (k != 0 && k != segment_length / 2) p *= 2.0;  // one-sided
            acc[k] += p;
        }
    }

    PSDRecord rec;
    rec.freqs.resize(bins);
    rec.power.resize(bins);
    for (Index k = 0; k < bins; ++k) {
        rec.freqs[k] = static_cast<double>(k) * ts.sample_rate / segment_length;
        rec.power[k] = acc[k] / static_cast<double>(n_segments);
    }
    rec.window   = "hann";
    rec.segments = static_cast<int>(n_segments);
    return rec;
}

namespace {

struct LorentzParams {
    double center, hwhm, amplitude, baseline;
};

double lorentz(const LorentzParams& p, double x) {
    const double d = x - p.center;
    return p.amplitude * p.hwhm * p.hwhm / (d * d + p.hwhm * p.hwhm) + p.baseline;
}

// Damped Gauss-Newton on (center, hwhm, amplitude, baseline).
PeakFit fit_lorentzian(const std::vector<double>& x, const std::vector<double>& y,
                       LorentzParams p) {
    const auto n = static_cast<Index>(x.size());
    auto cost = [&](const LorentzParams& q) {
        double c = 0;
        for (Index j = 0; j < n; ++j) {
            const double r = lorentz(q, x[j]) - y[j];
            c += r * r;
        }
        return c;
    };

    double mu        = 1e-6;
    double best      = cost(p);
    bool converged   = false;
    int iterations   = 0;
    const double hwhm_floor = 1e-9 * std::max(1.0, std::abs(p.center));
    for (; iterations < 200; ++iterations) {
        Eigen::Matrix4d jtj = Eigen::Matrix4d::Zero();
        Eigen::Vector4d jtr = Eigen::Vector4d::Zero();
        for (Index j = 0; j < n; ++j) {
            const double d     = x[j] - p.center;
            const double denom = d * d + p.hwhm * p.hwhm;
            const double l     = p.hwhm * p.hwhm / denom;
            Eigen::Vector4d grad;
            grad[0] = p.amplitude * p.hwhm * p.hwhm * 2.0 * d / (denom * denom);
            grad[1] = 2.0 * p.amplitude * p.hwhm * d * d / (denom * denom);
            grad[2] = l;
            grad[3] = 1.0;
            const double r = p.amplitude * l + p.baseline - y[j];
            jtj += grad * grad.transpose();
            jtr += grad * r;
        }
        Eigen::Matrix4d damped = jtj;
        damped.diagonal() += mu * jtj.diagonal().cwiseMax(1e-300);
        Eigen::Vector4d step = damped.ldlt().solve(-jtr);
        LorentzParams trial = p;
        trial.center += step[0];
        trial.hwhm = std::max(hwhm_floor, trial.hwhm + step[1]);
        trial.amplitude += step[2];
        trial.baseline += step[3];
        const double c = cost(trial);
        if (c <= best) {
            const double rel = step.cwiseAbs().maxCoeff() /
                               std::max({std::abs(p.center), p.hwhm, std::abs(p.amplitude), 1e-30});
            p    = trial;
            best = c;
            mu   = std::max(mu * 0.3, 1e-12);
            if (rel < 1e-10) {
                converged = true;
                break;
            }
        } else {
            mu *= 10.0;
            if (mu > 1e12) break;
        }
    }

    PeakFit out;
    out.center_hz  = p.center;
    out.width_hz   = 2.0 * p.hwhm;
    out.amplitude  = p.amplitude;
    out.converged  = converged;
    out.iterations = iterations;
    return out;
}

}  // namespace

std::vector<PeakFit> fit_peaks(const PSDRecord& rec, int n_peaks) {
    if (n_peaks < 1) throw std::invalid_argument("fit_peaks: n_peaks must be >= 1");
    const auto n = static_cast<Index>(rec.power.size());
    if (n < 8) throw std::invalid_argument("fit_peaks: PSD too short");
    const double df = rec.freqs.size() > 1 ? rec.freqs[1] - rec.freqs[0] : 1.0;

    std::vector<Index> maxima;
    for (Index i = 1; i + 1 < n; ++i)
        if (rec.power[i] > rec.power[i - 1] && rec.power[i] >= rec.power[i + 1])
            maxima.push_back(i);
    std::sort(maxima.begin(), maxima.end(),
              [&](Index a, Index b) { return rec.power[a] > rec.power[b]; });

    // quarter-power half width in bins, used both for exclusion and windows
    auto reach = [&](Index i, int dir, double frac, Index cap) {
        Index k = i;
        const double target = rec.power[i] * frac;
        while (k + dir >= 0 && k + dir < n && std::llabs(k + dir - i) < cap &&
               rec.power[k + dir] > target)
            k += dir;
        return std::max<Index>(1, std::llabs(k - i));
    };

    std::vector<PeakFit> fits;
    std::vector<std::pair<Index, Index>> claimed;  // [lo, hi] exclusion zones
    for (Index i : maxima) {
        if (static_cast<int>(fits.size()) == n_peaks) break;
        const Index r = std::max(reach(i, +1, 0.25, 200), reach(i, -1, 0.25, 200));
        const Index excl = 4 * r;
        bool taken = false;
        for (const auto& [lo, hi] : claimed)
            if (i >= lo && i <= hi) taken = true;
        if (taken) continue;
        claimed.emplace_back(i > excl ? i - excl : 0, std::min(n - 1, i + excl));

        const Index wl = std::min<Index>(std::max<Index>(3, 4 * reach(i, -1, 0.1, 200)), i);
        const Index wr = std::min<Index>(std::max<Index>(3, 4 * reach(i, +1, 0.1, 200)), n - 1 - i);
        std::vector<double> xs, ys;
        for (Index k = i - wl; k <= i + wr; ++k) {
            xs.push_back(rec.freqs[k]);
            ys.push_back(rec.power[k]);
        }

        LorentzParams init;
        init.baseline = std::min(ys.front(), ys.back());
        init.amplitude = rec.power[i] - init.baseline;
        // parabolic refinement of the maximum
        double x0 = rec.freqs[i];
        if (i > 0 && i + 1 < n) {
            const double a = rec.power[i - 1], b = rec.power[i], c = rec.power[i + 1];
            const double den = a - 2 * b + c;
            if (std::abs(den) > 0) x0 += 0.5 * (a - c) / den * df;
        }
        init.center = x0;
        init.hwhm = std::max(0.5, static_cast<double>(reach(i, +1, 0.5, 200) +
                                                      reach(i, -1, 0.5, 200)) / 2.0) * df;
        fits.push_back(fit_lorentzian(xs, ys, init));
    }
    return fits;
}

namespace {

double parse_number(const std::string& token, int line_no) {
    double value = 0;
    const char* begin = token.data();
    const char* end   = token.data() + token.size();
    auto [ptr, ec]    = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end)
        throw ParseError("unparseable number '" + token + "' at line " + std::to_string(line_no),
                         line_no);
    return value;
}

}  // namespace

TimeSeries load_time_series(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "' for reading");

    TimeSeries ts;
    std::vector<double> times;
    std::vector<double> values;
    double header_rate = 0;
    int columns        = 0;  // decided by the first data line
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view sv(line);
        while (!sv.empty() && (sv.back() == '\r' || sv.back() == ' ' || sv.back() == '\t'))
            sv.remove_suffix(1);
        while (!sv.empty() && (sv.front() == ' ' || sv.front() == '\t')) sv.remove_prefix(1);
        if (sv.empty()) continue;
        if (sv.front() == '#') {
            std::istringstream meta(std::string(sv.substr(1)));
            std::string key;
            meta >> key;
            if (key == "sample_rate_hz") {
                std::string v;
                meta >> v;
                header_rate = parse_number(v, line_no);
            } else if (!key.empty()) {
                std::string rest;
                std::getline(meta, rest);
                const auto pos   = rest.find_first_not_of(' ');
                ts.metadata[key] = pos == std::string::npos ? "" : rest.substr(pos);
            }
            continue;
        }
        std::istringstream fields{std::string(sv)};
        std::vector<std::string> tokens;
        std::string tok;
        while (fields >> tok) tokens.push_back(tok);
        if (columns == 0) columns = static_cast<int>(tokens.size());
        if (static_cast<int>(tokens.size()) != columns || columns < 1 || columns > 2)
            throw ParseError("expected " + std::to_string(columns) + " column(s) at line " +
                             std::to_string(line_no) + ", got " + std::to_string(tokens.size()),
                             line_no);
        if (columns == 2) {
            times.push_back(parse_number(tokens[0], line_no));
            values.push_back(parse_number(tokens[1], line_no));
        } else {
            values.push_back(parse_number(tokens[0], line_no));
        }
    }
    if (values.empty()) throw EmptyInputError("empty input: '" + path + "' has no data lines");

    if (columns == 2) {
        if (values.size() < 2) throw ParseError("need at least two samples to infer the rate", 0);
        std::vector<double> dts(times.size() - 1);
        for (std::size_t k = 0; k + 1 < times.size(); ++k) dts[k] = times[k + 1] - times[k];
        std::vector<double> sorted = dts;
        std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2, sorted.end());
        const double dt = sorted[sorted.size() / 2];
        if (dt <= 0) throw ParseError("non-increasing timestamps", 0);
        for (std::size_t k = 0; k < dts.size(); ++k)
            if (std::abs(dts[k] - dt) > 1e-6 * dt)
                throw ParseError("non-uniform time step at line " + std::to_string(k + 2) +
                                 " (got " + std::to_string(dts[k]) + ", expected " +
                                 std::to_string(dt) + ")",
                                 static_cast<int>(k + 2));
        ts.sample_rate = 1.0 / dt;
    } else {
        if (header_rate <= 0)
            throw ParseError("single-column input needs a '# sample_rate_hz <value>' header", 0);
        ts.sample_rate = header_rate;
    }
    ts.samples = std::move(values);
    return ts;
}

void save_time_series(const TimeSeries& ts, const std::string& path, bool two_column) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    char buf[64];
    if (two_column) {
        const double dt = 1.0 / ts.sample_rate;
        for (std::size_t k = 0; k < ts.samples.size(); ++k) {
            std::snprintf(buf, sizeof buf, "%.17g\t%.17g\n", k * dt, ts.samples[k]);
            out << buf;
        }
    } else {
        std::snprintf(buf, sizeof buf, "# sample_rate_hz %.17g\n", ts.sample_rate);
        out << buf;
        for (double v : ts.samples) {
            std::snprintf(buf, sizeof buf, "%.17g\n", v);
            out << buf;
        }
    }
    if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

}  // namespace nvlev
