#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

namespace platsim {

/// One step of the splitmix64 sequence; advances `x` and returns the output.
inline std::uint64_t splitmix64_next(std::uint64_t& x) {
    x += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Deterministic per-replicate random stream (xoshiro256++ core).
///
/// A stream is fully determined by (master_seed, stream_id): replicate i's
/// trajectory never depends on how many threads run or which replicates ran
/// before it. Streams are decorrelated by avalanching the stream id into the
/// splitmix64 state used to fill the initial generator state.
class RngStream {
public:
    RngStream(std::uint64_t master_seed, std::uint64_t stream_id)
        : stream_id_(stream_id) {
        std::uint64_t h = stream_id + 0x9e3779b97f4a7c15ULL;
        h = (h ^ (h >> 30)) * 0xbf58476d1ce4e5b9ULL;
        h = (h ^ (h >> 27)) * 0x94d049bb133111ebULL;
        h ^= h >> 31;
        std::uint64_t x = master_seed ^ h;
        for (auto& w : state_) w = splitmix64_next(x);
        bool all_zero = true;
        for (auto w : state_) all_zero &= (w == 0);
        if (all_zero) state_[0] = 0x1ULL;
    }

    std::uint64_t stream_id() const { return stream_id_; }

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

    /// Uniform double in [0, 1), 53 random bits.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Unbiased integer in [0, bound) via Lemire's multiply-with-rejection.
    std::uint64_t uniform_below(std::uint64_t bound) {
        if (bound == 0) throw std::invalid_argument("uniform_below: bound must be positive");
        while (true) {
            std::uint64_t x = next_u64();
            __uint128_t m = static_cast<__uint128_t>(x) * bound;
            auto lo = static_cast<std::uint64_t>(m);
            if (lo < bound) {
                std::uint64_t threshold = (0 - bound) % bound;
                if (lo < threshold) continue;
            }
            return static_cast<std::uint64_t>(m >> 64);
        }
    }

    /// Standard normal via Box-Muller; the second deviate of each pair is cached.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = 1.0 - uniform();  // (0, 1]: keeps log() finite
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double theta = 2.0 * kPi * u2;
        spare_ = r * std::sin(theta);
        has_spare_ = true;
        return r * std::cos(theta);
    }

    /// Bivariate normal draw via the Cholesky factor of the 2x2 covariance.
    std::pair<double, double> normal_pair(double mean1, double mean2, double sd1,
                                          double sd2, double rho) {
        if (!(sd1 > 0.0) || !(sd2 > 0.0))
            throw std::invalid_argument("normal_pair: standard deviations must be positive");
        if (!(rho >= -1.0 && rho <= 1.0))
            throw std::invalid_argument("normal_pair: correlation must lie in [-1, 1]");
        double z1 = normal();
        double z2 = normal();
        double y1 = mean1 + sd1 * z1;
        double y2 = mean2 + sd2 * (rho * z1 + std::sqrt(1.0 - rho * rho) * z2);
        return {y1, y2};
    }

    /// Fisher-Yates shuffle, deterministic for a given stream state.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(uniform_below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    static constexpr double kPi = 3.14159265358979323846;

    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    std::array<std::uint64_t, 4> state_{};
    std::uint64_t stream_id_ = 0;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

/// Stream for replicate `replicate_index` under `master_seed`.
inline RngStream derive_stream(std::uint64_t master_seed, std::uint64_t replicate_index) {
    return RngStream(master_seed, replicate_index);
}

}  // namespace platsim
