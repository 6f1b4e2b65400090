#ifndef DINCL_SAMPLING_HPP
#define DINCL_SAMPLING_HPP

#include <cstdint>
#include <random>
#include <vector>

#include "dincl/vector.hpp"

namespace dincl {

/// Randomly rotated Halton sequence on [0,1)^dim. The rotation is drawn from
/// `seed`, so the same (dim, seed) always yields the same points.
class HaltonSequence {
public:
    HaltonSequence(std::size_t dim, std::uint64_t seed);

    /// Point `index` of the sequence (index 0 is valid).
    std::vector<double> point(std::uint64_t index) const;
    std::size_t dim() const noexcept { return shift_.size(); }

private:
    std::vector<double> shift_;
};

/// Deterministic point sets over a box: every corner, the center, then
/// `samples` rotated Halton points.
std::vector<Vector> box_samples(const Box& box, std::size_t samples, std::uint64_t seed);

/// Stable per-stream seed from a base seed and two stream coordinates
/// (e.g. start cell and run index). Independent of platform and thread count.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b);

/// Uniform double in [0, 1) from the top 53 bits of one engine draw.
double uniform01(std::mt19937_64& rng);

/// Weights uniformly distributed on the (n-1)-simplex.
std::vector<double> simplex_weights(std::size_t n, std::mt19937_64& rng);

} // namespace dincl

#endif // DINCL_SAMPLING_HPP
