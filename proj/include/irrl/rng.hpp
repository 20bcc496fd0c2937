#pragma once

#include <cmath>
#include <cstdint>

#include "irrl/vec2.hpp"

namespace irrl {

/// SplitMix64 step; used for seeding and for deriving independent sub-streams.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Mix a seed with a stream index into a fresh 64-bit seed.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t s = seed ^ (0x632be59bd9b4e019ULL * (stream + 1));
    std::uint64_t out = splitmix64(s);
    out ^= splitmix64(s);
    return out;
}

/// xoshiro256++ stream with explicit, serializable state.
///
/// The standard library distributions are implementation-defined, so all draws
/// (uniform, normal, disc) are generated here to keep runs reproducible across
/// toolchains and to make the full generator state checkpointable.
class RngStream {
public:
    RngStream() : RngStream(0) {}

    explicit RngStream(std::uint64_t seed) { reseed(seed); }

    void reseed(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& word : state_) word = splitmix64(sm);
        has_spare_ = false;
        spare_ = 0.0;
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform double in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Standard normal via Box-Muller; the spare is cached (and serialized).
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

    /// Random unit vector.
    Vec2 unit_vec2() {
        const double a = uniform(0.0, 6.283185307179586476925286766559);
        return {std::cos(a), std::sin(a)};
    }

    /// Uniform point in the disc of radius `r`.
    Vec2 disc(double r) {
        const double rad = r * std::sqrt(uniform());
        return unit_vec2() * rad;
    }

    struct State {
        std::uint64_t s[4] = {0, 0, 0, 0};
        bool has_spare = false;
        double spare = 0.0;

        bool operator==(const State&) const = default;
    };

    State save() const {
        State st;
        for (int i = 0; i < 4; ++i) st.s[i] = state_[i];
        st.has_spare = has_spare_;
        st.spare = spare_;
        return st;
    }

    void restore(const State& st) {
        for (int i = 0; i < 4; ++i) state_[i] = st.s[i];
        has_spare_ = st.has_spare;
        spare_ = st.spare;
    }

private:
    static std::uint64_t rotl(std::uint64_t v, int k) { return (v << k) | (v >> (64 - k)); }

    std::uint64_t state_[4] = {};
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace irrl
