#include "dincl/sampling.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "dincl/errors.hpp"

namespace dincl {

namespace {

constexpr std::array<std::uint32_t, 16> kPrimes{2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53};

double radical_inverse(std::uint64_t index, std::uint32_t base)
{
    const double inv_base = 1.0 / base;
    double f = inv_base;
    double r = 0.0;
    while (index > 0) {
        r += f * static_cast<double>(index % base);
        index /= base;
        f *= inv_base;
    }
    return r;
}

} // namespace

HaltonSequence::HaltonSequence(std::size_t dim, std::uint64_t seed)
{
    if (dim == 0 || dim > kPrimes.size()) {
        throw ContractViolation("HaltonSequence: unsupported dimension " + std::to_string(dim));
    }
    std::mt19937_64 rng(derive_seed(seed, 0x48616c746f6eULL, dim));
    shift_.resize(dim);
    for (double& s : shift_) {
        s = uniform01(rng);
    }
}

std::vector<double> HaltonSequence::point(std::uint64_t index) const
{
    std::vector<double> p(shift_.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double v = radical_inverse(index + 1, kPrimes[i]) + shift_[i];
        p[i] = v - std::floor(v);
    }
    return p;
}

std::vector<Vector> box_samples(const Box& box, std::size_t samples, std::uint64_t seed)
{
    std::vector<Vector> out = box.corners();
    out.push_back(box.center());
    const HaltonSequence seq(box.dim(), seed);
    for (std::size_t s = 0; s < samples; ++s) {
        std::vector<double> u = seq.point(s);
        for (std::size_t i = 0; i < u.size(); ++i) {
            u[i] = box.lo()[i] + u[i] * box.extent(i);
        }
        out.emplace_back(std::move(u));
    }
    return out;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b)
{
    // seed_seq's mixing algorithm is fixed by the standard, so this is portable.
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                      static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
    std::mt19937_64 rng(seq);
    return rng();
}

double uniform01(std::mt19937_64& rng)
{
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::vector<double> simplex_weights(std::size_t n, std::mt19937_64& rng)
{
    // Normalized unit exponentials are Dirichlet(1, ..., 1).
    std::vector<double> w(n);
    double total = 0.0;
    for (double& x : w) {
        x = -std::log1p(-uniform01(rng));
        total += x;
    }
    if (total <= 0.0) {
        std::fill(w.begin(), w.end(), 1.0 / static_cast<double>(n));
        return w;
    }
    for (double& x : w) {
        x /= total;
    }
    return w;
}

} // namespace dincl
