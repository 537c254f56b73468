#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace fsl {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace detail

/**
 * Counter-based stream: output i is a pure function of (seed, stream, i), so
 * draws are reproducible regardless of which thread owns the stream and
 * distinct streams never share state. Parallel code assigns one stream per
 * unit of work (path, ladder rung) and derives it from a base stream id.
 */
class RngStream {
  public:
    RngStream(std::uint64_t seed, std::uint64_t stream)
        : seed_(seed), stream_(stream),
          key_(detail::splitmix64(detail::splitmix64(seed) + stream)) {}

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream() const { return stream_; }

    std::uint64_t next() {
        counter_ += 0x9e3779b97f4a7c15ULL;
        return detail::splitmix64(key_ + counter_);
    }

    // strictly inside (0,1): 53-bit mantissa offset by half an ulp
    double uniform() { return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53; }

    double normal() {
        double u = uniform();
        double v = uniform();
        return std::sqrt(-2.0 * std::log(u)) * std::cos(2.0 * std::numbers::pi * v);
    }

    // unit-rate exponential
    double exponential() { return -std::log(uniform()); }

  private:
    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t key_;
    std::uint64_t counter_{0};
};

}  // namespace fsl
