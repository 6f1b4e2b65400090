#include "dincl/set_valued_map.hpp"

#include <algorithm>
#include <cmath>

#include "dincl/errors.hpp"
#include "dincl/sampling.hpp"

namespace dincl {

namespace {

ConvexSet evaluate_at(const SetValuedMap& f, const Vector& x)
{
    try {
        return f.evaluate(x);
    } catch (const EvaluationError&) {
        throw;
    } catch (const std::exception& e) {
        throw EvaluationError("evaluation failed at x = " + to_string(x) + ": " + e.what());
    }
}

// Points of the closed delta-ball around x: x itself, the axis extremes and
// `count` Halton points mapped into the ball.
std::vector<Vector> ball_samples(const Vector& x, double delta, std::size_t count, std::uint64_t seed)
{
    const std::size_t dim = x.dim();
    std::vector<Vector> out;
    out.reserve(1 + 2 * dim + count);
    out.push_back(x);
    for (std::size_t i = 0; i < dim; ++i) {
        for (double sign : {-1.0, 1.0}) {
            Vector e(dim);
            e.at_mut(i) = sign * delta;
            out.push_back(x + e);
        }
    }
    const HaltonSequence seq(dim, seed);
    for (std::size_t s = 0; s < count; ++s) {
        std::vector<double> u = seq.point(s);
        double norm2 = 0.0;
        for (double& c : u) {
            c = 2.0 * c - 1.0;
            norm2 += c * c;
        }
        const double norm = std::sqrt(norm2);
        const double scale = norm > 1.0 ? delta / norm : delta;
        for (std::size_t i = 0; i < dim; ++i) {
            u[i] = x[i] + scale * u[i];
        }
        out.emplace_back(std::move(u));
    }
    return out;
}

} // namespace

double estimate_bound(const SetValuedMap& f, const Box& region, std::size_t samples, std::uint64_t seed)
{
    if (samples < 1) {
        throw ContractViolation("estimate_bound: samples must be at least 1");
    }
    double m = 0.0;
    for (const Vector& x : box_samples(region, samples, seed)) {
        m = std::max(m, evaluate_at(f, x).max_norm());
    }
    return m;
}

double safe_bound(const SetValuedMap& f, const Box& region, std::size_t samples, std::uint64_t seed)
{
    return kBoundSafetyFactor * estimate_bound(f, region, samples, seed);
}

std::optional<double> usc_probe(const SetValuedMap& f, const Vector& x, double eps,
                                std::span<const double> delta_grid, std::size_t probe_samples, std::uint64_t seed)
{
    if (!(eps > 0.0)) {
        throw ContractViolation("usc_probe: eps must be positive");
    }
    for (std::size_t i = 0; i < delta_grid.size(); ++i) {
        if (!(delta_grid[i] > 0.0) || (i > 0 && !(delta_grid[i] < delta_grid[i - 1]))) {
            throw ContractViolation("usc_probe: delta grid must be positive and strictly decreasing");
        }
    }
    const ConvexSet at_x = evaluate_at(f, x);
    for (double delta : delta_grid) {
        bool ok = true;
        for (const Vector& y : ball_samples(x, delta, probe_samples, seed)) {
            const ConvexSet at_y = evaluate_at(f, f.domain().clamp(y));
            ok = std::all_of(at_y.vertices().begin(), at_y.vertices().end(),
                             [&](const Vector& v) { return hull_contains(at_x, v, eps); });
            if (!ok) {
                break;
            }
        }
        if (ok) {
            return delta;
        }
    }
    return std::nullopt;
}

} // namespace dincl
