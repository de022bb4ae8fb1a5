#pragma once

// Deterministic random source for artifacts that must be byte-identical
// across runs and standard libraries. mt19937_64 output is fully specified;
// the distributions in <random> are not, so draws are derived by hand.

#include <cmath>
#include <cstdint>
#include <random>
#include <string>

namespace gaas::detail {

class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed), seed_(seed) {}

    /// derives an independent stream for a named component of a run
    Rng fork(const std::string& label) const {
        std::uint64_t h = 1469598103934665603ull;  // FNV-1a over the label
        for (unsigned char c : label) {
            h ^= c;
            h *= 1099511628211ull;
        }
        return Rng(seed_ ^ h);
    }

    std::uint64_t next_u64() { return eng_(); }

    /// uniform in [0, 1) with 53 bits of entropy
    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {  // inclusive bounds
        const auto span = static_cast<std::uint64_t>(hi - lo + 1);
        return lo + static_cast<std::int64_t>(eng_() % span);
    }

    /// standard normal via Box-Muller (fully specified, unlike std::normal_distribution)
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = uniform(), u2 = uniform();
        while (u1 <= 1e-300) u1 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double th = 2.0 * 3.14159265358979323846 * u2;
        spare_ = r * std::sin(th);
        has_spare_ = true;
        return r * std::cos(th);
    }

private:
    std::mt19937_64 eng_;
    std::uint64_t seed_{0};
    double spare_{0.0};
    bool has_spare_{false};
};

}  // namespace gaas::detail
