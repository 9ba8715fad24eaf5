#pragma once

#include <cmath>
#include <cstdint>

namespace treelearn {

// Counter-based splittable random stream. Output i of stream k is
// mix(key_k + i*GAMMA) (SplitMix64), so substreams derived from
// (master seed, index) are independent of evaluation order and can be
// handed to concurrent workers. All distributions below are generated
// from raw bits by hand so that output is bit-identical across
// platforms and standard-library versions.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) : key_(mix(seed ^ kKeyTweak)) {}

    // Independent stream addressed by (this stream, index).
    RandomStream substream(std::uint64_t index) const {
        RandomStream s(0);
        s.key_ = mix(key_ ^ mix(index + kStreamTweak));
        s.counter_ = 0;
        s.has_spare_ = false;
        return s;
    }

    std::uint64_t next_u64() { return mix(key_ + (++counter_) * kGamma); }

    // Uniform on [0, 1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return uniform() < p; }

    // Uniform on {0, ..., n-1}, exact (rejection on the biased tail).
    std::uint64_t uniform_int(std::uint64_t n) {
        const std::uint64_t threshold = (0 - n) % n;
        for (;;) {
            const std::uint64_t r = next_u64();
            if (r >= threshold) return r % n;
        }
    }

    int sign() { return (next_u64() >> 63) ? 1 : -1; }

    // Standard normal via Box-Muller; the second value of each pair is cached.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53; // (0, 1]
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

private:
    static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;
    static constexpr std::uint64_t kKeyTweak = 0xD1B54A32D192ED03ULL;
    static constexpr std::uint64_t kStreamTweak = 0x8CB92BA72F3D8DD7ULL;

    static std::uint64_t mix(std::uint64_t z) {
        z += kGamma;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    std::uint64_t key_ = 0;
    std::uint64_t counter_ = 0;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace treelearn
