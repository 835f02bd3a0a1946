#ifndef FLOWLAB_RNG_HPP
#define FLOWLAB_RNG_HPP

#include <cstdint>
#include <cmath>

namespace flowlab {

/** Counter-based splittable generator.
 *
 * Output i of stream (seed, stream) is mix64(key + i*GOLDEN) where mix64 is
 * the SplitMix64 finalizer (Stafford variant 13) and key itself is derived by
 * mixing seed and stream id.  Streams are statistically independent for
 * distinct (seed, stream) pairs and every draw depends only on (seed, stream,
 * counter), which is what makes task-level parallelism reproducible: tasks
 * derive their stream from their task id and never share generator state.
 */
class Rng {
  public:
    Rng(std::uint64_t seed, std::uint64_t stream)
        : key_(mix64(mix64(seed + GOLDEN) ^ mix64(stream + FLEA))), ctr_(0) {}

    std::uint64_t next_u64() { return mix64(key_ + GOLDEN * ++ctr_); }

    /// Uniform double in [0,1) with 53 random bits.
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform double in [a,b).
    double uniform(double a, double b) { return a + (b - a) * uniform(); }

    /// Standard exponential via inversion; never returns 0.
    double exponential() {
        double u = uniform();
        return -std::log1p(-u + 0x1.0p-54);
    }

    /// Derive a child stream; independent of this stream's future output.
    Rng split(std::uint64_t substream) const {
        Rng r(0, 0);
        r.key_ = mix64(key_ ^ mix64(substream + GOLDEN));
        r.ctr_ = 0;
        return r;
    }

  private:
    static constexpr std::uint64_t GOLDEN = 0x9E3779B97F4A7C15ull;
    static constexpr std::uint64_t FLEA = 0xBF58476D1CE4E5B9ull;

    static std::uint64_t mix64(std::uint64_t z) {
        z ^= z >> 30;
        z *= 0xBF58476D1CE4E5B9ull;
        z ^= z >> 27;
        z *= 0x94D049BB133111EBull;
        z ^= z >> 31;
        return z;
    }

    std::uint64_t key_;
    std::uint64_t ctr_;
};

}  // namespace flowlab

#endif
