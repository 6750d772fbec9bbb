#pragma once

#include <cstdint>
#include <random>

namespace sentrade {

/// Seeded random stream with fully specified output.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the
/// standard. The standard library distributions are implementation-defined,
/// so every transform below is written out explicitly:
///   uniform()   53 high bits of one engine draw, scaled to [0, 1)
///   normal()    Box-Muller on two uniforms, cosine branch only (no caching)
///   index(n)    floor(uniform() * n)
///   poisson(l)  Knuth multiplication for l <= 500, rounded normal above
///
/// Independent series derive their seeds from (seed, stream id) through
/// SplitMix64, so adding a new stream never perturbs an existing one.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}
    Rng(std::uint64_t seed, std::uint64_t stream) : engine_(stream_seed(seed, stream)) {}

    static std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream);

    std::uint64_t next_u64() { return engine_(); }
    double uniform();
    double normal();
    std::size_t index(std::size_t n);
    bool bernoulli(double p) { return uniform() < p; }
    std::uint64_t poisson(double lambda);

private:
    std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace sentrade
