#pragma once

#include <cstdint>
#include <random>

namespace clsiv {

/// Derives the key of the index-th substream of a parent key. SplitMix64
/// finalizer over key + (index+1)*golden-gamma; keys chain, so nested
/// derivations (seed -> replicate -> draw) stay collision-resistant.
std::uint64_t substream(std::uint64_t key, std::uint64_t index);

/// Deterministic random stream. The engine is std::mt19937_64 (fully
/// specified by the standard), all output mappings are hand-rolled, so a
/// given key produces bitwise-identical values on every platform.
///
/// Normal variates use Wichura's PPND16 inverse-CDF algorithm (AS 241),
/// applied to uniforms strictly inside (0,1).
class RngStream {
public:
    explicit RngStream(std::uint64_t key) : engine_(key) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on the open interval (0,1); 53-bit resolution, never 0 or 1.
    double uniform01();

    /// Standard normal via inverse CDF.
    double normal();

    /// Uniform integer in [0, n). Unbiased (Lemire rejection), n >= 1.
    std::uint64_t uniform_below(std::uint64_t n);

private:
    std::mt19937_64 engine_;
};

/// Inverse of the standard normal CDF (Wichura AS 241, PPND16).
/// Requires 0 < p < 1.
double inverse_normal_cdf(double p);

}  // namespace clsiv
