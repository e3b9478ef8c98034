#pragma once

#include <cstdint>
#include <limits>

namespace subwalk {

/// SplitMix64 with explicit stream splitting. Streams derived from
/// (seed, stream_id) are independent for practical purposes, which lets
/// Monte-Carlo chunks run in parallel while staying reproducible: results
/// depend only on (seed, chunk index), never on thread scheduling.
class Rng {
  public:
    using result_type = std::uint64_t;

    explicit Rng(std::uint64_t seed = 0)
        : base_(mix(seed ^ 0x9e3779b97f4a7c15ull)), state_(base_) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() {
        return std::numeric_limits<result_type>::max();
    }

    result_type operator()() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    /// independent generator for (this generator's seed basis, stream)
    Rng substream(std::uint64_t stream) const {
        Rng r(0);
        r.base_ = mix(base_ ^ mix(stream + 0x632be59bd9b4e019ull));
        r.state_ = r.base_;
        return r;
    }

    /// uniform double in (0,1); never returns 0 or 1
    double uniform() {
        return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
    }

  private:
    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 33)) * 0xff51afd7ed558ccdull;
        z = (z ^ (z >> 33)) * 0xc4ceb9fe1a85ec53ull;
        return z ^ (z >> 33);
    }

    std::uint64_t base_ = 0;
    std::uint64_t state_ = 0;
};

} // namespace subwalk
