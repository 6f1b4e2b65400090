#ifndef DINCL_SET_VALUED_MAP_HPP
#define DINCL_SET_VALUED_MAP_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <span>

#include "dincl/convex_set.hpp"
#include "dincl/vector.hpp"

namespace dincl {

/// Safety factor applied to estimate_bound before it is used as a speed bound.
inline constexpr double kBoundSafetyFactor = 1.25;

/// Right-hand side of a differential inclusion x' in F(x).
class SetValuedMap {
public:
    virtual ~SetValuedMap() = default;

    /// F(x); must be total on domain().
    virtual ConvexSet evaluate(const Vector& x) const = 0;
    virtual const Box& domain() const = 0;

    /// Velocity that keeps a solution on a switching surface through x, when
    /// the map knows of one. Used by the sliding-aware selection strategy.
    virtual std::optional<Vector> sliding_velocity(const Vector& /*x*/) const { return std::nullopt; }

    std::size_t dim() const { return domain().dim(); }
};

/// Adapts a callable to SetValuedMap.
class FunctionMap final : public SetValuedMap {
public:
    using Fn = std::function<ConvexSet(const Vector&)>;

    FunctionMap(Box domain, Fn fn) : domain_(std::move(domain)), fn_(std::move(fn)) {}

    ConvexSet evaluate(const Vector& x) const override { return fn_(x); }
    const Box& domain() const override { return domain_; }

private:
    Box domain_;
    Fn fn_;
};

/// Sampled lower estimate of sup_{x in region} |F(x)|. Always samples every
/// corner and the center of `region` plus `samples` low-discrepancy points.
/// Evaluation failures are rethrown as EvaluationError naming the point.
double estimate_bound(const SetValuedMap& f, const Box& region, std::size_t samples, std::uint64_t seed);

/// kBoundSafetyFactor * estimate_bound(...), the speed bound used by the solver.
double safe_bound(const SetValuedMap& f, const Box& region, std::size_t samples = 256, std::uint64_t seed = 0);

/// Probes upper semicontinuity of F at x in closed-neighborhood form: returns
/// the largest delta of `delta_grid` (strictly decreasing, positive) such that
/// every vertex of F(y) is within eps of hull(F(x)) for all sampled y with
/// |y - x| <= delta, or nullopt when no grid value passes. Samples are x,
/// the 2*dim axis extremes of the ball, and `probe_samples` points inside it,
/// all clamped to the domain.
std::optional<double> usc_probe(const SetValuedMap& f, const Vector& x, double eps,
                                std::span<const double> delta_grid, std::size_t probe_samples,
                                std::uint64_t seed = 0);

} // namespace dincl

#endif // DINCL_SET_VALUED_MAP_HPP
