#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace dscale {

/// Deterministic counter-based generator (splitmix64 core). Identical seeds
/// give identical sequences on every platform, which the replay guarantees
/// depend on; std::uniform_* distributions are not pinned by the standard, so
/// the uniform/categorical helpers live here too.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed, std::uint64_t stream_id = 0)
        : state_(mix(seed ^ mix(stream_id + 0x9e3779b97f4a7c15ULL))) {}

    /// Independent substream for an entity (demand, job, trial, ...).
    RngStream substream(std::uint64_t entity_id) const {
        return RngStream(state_, entity_id + 1);
    }

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ULL;
        return mix(state_);
    }

    /// Uniform in [0, 1).
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform integer in [0, n).
    std::uint64_t next_below(std::uint64_t n) {
        if (n == 0) throw std::invalid_argument("RngStream::next_below(0)");
        return next_u64() % n;
    }

    /// Index drawn with probability weights[i] / sum(weights). Weights must be
    /// nonnegative with a positive sum.
    std::size_t categorical(std::span<const double> weights) {
        double total = 0.0;
        for (double w : weights) total += w;
        if (!(total > 0.0)) throw std::invalid_argument("categorical: nonpositive weight sum");
        double u = next_double() * total;
        double acc = 0.0;
        for (std::size_t i = 0; i < weights.size(); ++i) {
            acc += weights[i];
            if (u < acc) return i;
        }
        // Rounding can push u past the last accumulated value.
        for (std::size_t i = weights.size(); i-- > 0;)
            if (weights[i] > 0.0) return i;
        throw std::invalid_argument("categorical: all-zero weights");
    }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t state_;
};

}  // namespace dscale
