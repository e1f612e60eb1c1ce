// trapdata.hpp — trap time-series synthesis, PSD estimation, peak fitting
//
// Stands in for the laboratory side: generate (or load) a position signal,
// estimate its power spectral density with an averaged periodogram, and fit
// Lorentzians to the oscillation peaks.

#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "nvlev/types.hpp"

namespace nvlev {

struct TimeSeries {
    std::vector<double> samples;  // position signal, arbitrary units
    double sample_rate = 0;       // Hz
    std::map<std::string, std::string> metadata;
};

struct PSDRecord {
    std::vector<double> freqs;  // Hz, ascending, one-sided
    std::vector<double> power;  // signal^2 / Hz
    std::string window;
    int segments = 0;
};

struct PeakFit {
    double center_hz  = 0;
    double width_hz   = 0;  // full width at half maximum
    double amplitude  = 0;
    bool converged    = false;
    int iterations    = 0;
};

// Sum of independent damped harmonic oscillators driven by white noise,
// integrated with the exact one-step propagator of the linear Langevin
// system (no frequency warping at finite sample rate). Deterministic per
// seed. Oscillators start from rest after a discarded burn-in of ~5 damping
// times; temperature_scale = 0 gives an all-zero trace.
TimeSeries synthesize_trace(std::span<const double> freqs_hz, std::span<const double> damping_hz,
                            double temperature_scale, double sample_rate, double duration,
                            std::uint64_t seed);

// Averaged periodogram with a periodic Hann window and fractional segment
// overlap. One-sided normalization: sum(power) * df reproduces the signal
// variance for stationary input.
PSDRecord psd(const TimeSeries& ts, int segment_length, double overlap = 0.5);

// Lorentzian least-squares fits (with a constant baseline) around the
// n_peaks largest non-overlapping local maxima, strongest first.
// Non-convergence is reported per peak via the converged flag.
std::vector<PeakFit> fit_peaks(const PSDRecord& rec, int n_peaks);

// Parse failure in a trace file; line is 1-based, 0 for file-level issues.
struct ParseError : std::runtime_error {
    int line;
    ParseError(const std::string& msg, int line_number)
        : std::runtime_error(msg), line(line_number) {}
};

struct EmptyInputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Two accepted formats:
//   A) two columns "time_s signal" per line (sample rate from the median
//      time step, which must be uniform to 1e-6 relative);
//   B) a header line "# sample_rate_hz <value>" followed by one signal
//      value per line.
// '#' comment lines and blank lines are ignored elsewhere too.
TimeSeries load_time_series(const std::string& path);

// Writes format B (with format A available for two_column = true).
void save_time_series(const TimeSeries& ts, const std::string& path, bool two_column = false);

}  // namespace nvlev
