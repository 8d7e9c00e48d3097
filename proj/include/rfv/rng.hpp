#pragma once

#include <cmath>
#include <cstdint>

namespace rfv {

inline constexpr double kPi = 3.14159265358979323846;

// SplitMix64 finalizer; bijective on 64-bit words.
inline std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ull;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBull;
    z ^= z >> 31;
    return z;
}

enum class StreamPurpose : std::uint64_t {
    data = 1,
    features = 2,
    noise = 3,
    test = 4,
};

// Key for the stream identified by (master seed, replication index, purpose).
// Pure function of its inputs, so any thread can rebuild any stream.
inline std::uint64_t derive_stream_key(std::uint64_t master_seed,
                                       std::uint64_t replication,
                                       StreamPurpose purpose) {
    std::uint64_t h = mix64(master_seed ^ 0x6A09E667F3BCC909ull);
    h = mix64(h ^ mix64(replication ^ 0xBB67AE8584CAA73Bull));
    h = mix64(h ^ mix64(static_cast<std::uint64_t>(purpose) ^ 0x3C6EF372FE94F82Bull));
    return h;
}

// Sub-seed for one replication of one sweep point.
inline std::uint64_t derive_subseed(std::uint64_t master_seed,
                                    std::uint64_t point_index,
                                    std::uint64_t replication) {
    std::uint64_t h = mix64(master_seed ^ 0xA54FF53A5F1D36F1ull);
    h = mix64(h ^ mix64(point_index ^ 0x510E527FADE682D1ull));
    h = mix64(h ^ mix64(replication ^ 0x9B05688C2B3E6C1Full));
    return h;
}

// Counter-based stream: output k is mix64(key + k*gamma), the SplitMix64
// sequence seeded at `key`. Draw order is part of the reproducibility
// contract; streams never share state, so scheduling cannot reorder draws.
class RngStream {
public:
    explicit RngStream(std::uint64_t key) : state_(key) {}

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ull;
        return mix64(state_);
    }

    // [0, 1)
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // (0, 1]
    double uniform_open() {
        return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    }

    // Standard normal via Box-Muller; pairs are cached.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = uniform_open();
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double th = 2.0 * kPi * u2;
        spare_ = r * std::sin(th);
        has_spare_ = true;
        return r * std::cos(th);
    }

private:
    std::uint64_t state_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace rfv
