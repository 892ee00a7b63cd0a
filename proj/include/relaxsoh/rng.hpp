#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace relaxsoh {

// Deterministic Gaussian/uniform source. Uses a fixed 53-bit uniform and
// Box-Muller transform so streams are reproducible across platforms and
// standard-library versions (std::normal_distribution is not portable).
class GaussianRng {
public:
    explicit GaussianRng(std::uint64_t seed) : engine_(seed) {}

    // Uniform in [0, 1) with 53 random bits.
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    // Standard normal via Box-Muller; caches the second deviate.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = uniform(), u2 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        double mag = std::sqrt(-2.0 * std::log(u1));
        double ang = 2.0 * M_PI * u2;
        spare_ = mag * std::sin(ang);
        has_spare_ = true;
        return mag * std::cos(ang);
    }

    double normal(double mean, double sigma) { return mean + sigma * normal(); }

    std::uint64_t next_u64() { return engine_(); }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

// Stable per-stream seed derivation (golden-ratio mix of a base seed and a
// stream index).
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
    return base ^ (0x9E3779B97F4A7C15ULL * (stream + 1));
}

} // namespace relaxsoh
