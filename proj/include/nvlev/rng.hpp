// rng.hpp — seeded random source with reproducible output
//
// mt19937_64 is bit-exact across implementations, but the standard
// distributions are not; Box-Muller over raw uniforms keeps synthesized
// traces and thermal samples byte-identical between toolchains.

#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "nvlev/types.hpp"

namespace nvlev {

class SeededRng {
public:
    explicit SeededRng(std::uint64_t seed) : gen_(seed) {}

    // uniform in [0, 1)
    double uniform() {
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double r  = std::sqrt(-2.0 * std::log(u1));
        spare_      = r * std::sin(2.0 * pi * u2);
        have_spare_ = true;
        return r * std::cos(2.0 * pi * u2);
    }

    // Sample from the Glauber-P function of a thermal state: a complex
    // Gaussian with <|beta|^2> = nbar.
    Complex thermal_beta(double nbar) {
        const double s = std::sqrt(nbar / 2.0);
        return {s * gaussian(), s * gaussian()};
    }

private:
    std::mt19937_64 gen_;
    double spare_      = 0.0;
    bool   have_spare_ = false;
};

}  // namespace nvlev
