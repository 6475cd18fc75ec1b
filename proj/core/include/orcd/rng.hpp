#pragma once

#include <cmath>
#include <cstdint>

namespace orcd {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Counter-free xoshiro256++ stream. All randomness in the artifact flows
/// through explicitly owned streams so that replays are bit-exact and
/// per-node streams stay independent under any evaluation order.
class RngStream {
  public:
    RngStream() : RngStream(0) {}

    explicit RngStream(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& w : state_) w = splitmix64(sm);
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
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return uniform01() < p; }

    /// Uniform integer in [0, n).
    std::uint64_t uniform_int(std::uint64_t n) {
        // Rejection-free modulo is fine here; n is tiny relative to 2^64.
        return n == 0 ? 0 : next_u64() % n;
    }

    /// Knuth's product method; all rates in this artifact are small.
    int poisson(double lambda) {
        if (lambda <= 0.0) return 0;
        const double limit = std::exp(-lambda);
        int k = 0;
        double prod = uniform01();
        while (prod > limit) {
            ++k;
            prod *= uniform01();
        }
        return k;
    }

  private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    std::uint64_t state_[4];
};

/// Derives an independent substream from a master seed. `purpose` namespaces
/// the stream (channel, arrivals, mac, ...) and `index` is typically a node id.
inline RngStream derive_stream(std::uint64_t master_seed, std::uint64_t purpose, std::uint64_t index) {
    std::uint64_t s = master_seed;
    std::uint64_t a = splitmix64(s);
    s ^= purpose * 0x9e3779b97f4a7c15ULL;
    std::uint64_t b = splitmix64(s);
    s ^= (index + 1) * 0xd1b54a32d192ed03ULL;
    std::uint64_t c = splitmix64(s);
    return RngStream(a ^ (b * 0x2545f4914f6cdd1dULL) ^ c);
}

namespace stream_purpose {
constexpr std::uint64_t kChannel = 1;
constexpr std::uint64_t kArrivals = 2;
constexpr std::uint64_t kMac = 3;
constexpr std::uint64_t kControlLoss = 4;
constexpr std::uint64_t kProbes = 5;
}  // namespace stream_purpose

}  // namespace orcd
