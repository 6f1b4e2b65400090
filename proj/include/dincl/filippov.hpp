#ifndef DINCL_FILIPPOV_HPP
#define DINCL_FILIPPOV_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "dincl/convex_set.hpp"
#include "dincl/expression.hpp"
#include "dincl/set_valued_map.hpp"
#include "dincl/vector.hpp"

namespace dincl {

using ScalarFunction = std::function<double(std::span<const double>)>;

/// Step of the central difference used when no analytic gradient is given.
inline constexpr double kGradientStep = 1e-6;

/// Threshold below which the sliding selection is treated as having a zero denominator.
inline constexpr double kSlidingDegeneracyTol = 1e-12;

/// Scalar function sigma whose zero set is part of the splitting boundary.
struct SwitchingFunction {
    ScalarFunction value;
    /// Analytic gradient components; empty means central finite differences.
    std::vector<ScalarFunction> gradient;
    std::string label;

    static SwitchingFunction from_expression(const Expression& expr, std::vector<Expression> gradient = {});

    Vector gradient_at(const Vector& x) const;
};

enum class Sign : std::int8_t { Minus = -1, Any = 0, Plus = 1 };

char sign_char(Sign s);
/// Parses '+', '-' or '*' (any).
Sign parse_sign(char c);

/// One smooth piece x' = f_i(x), valid where the switching functions have the given signs.
struct Region {
    int id = 0;
    std::vector<Sign> signs;
    std::vector<ScalarFunction> field;
    std::vector<std::string> field_labels;

    static Region from_expressions(int id, std::vector<Sign> signs, const std::vector<Expression>& field);
};

struct Interior {
    int region;
    friend bool operator==(const Interior&, const Interior&) = default;
};

/// Point within boundary_tol of some switching surface; `regions` are the ids
/// (ascending) of every region consistent with resolving the ambiguous signs.
struct Boundary {
    std::vector<int> regions;
    friend bool operator==(const Boundary&, const Boundary&) = default;
};

using Classification = std::variant<Interior, Boundary>;

enum class SlidingStatus { Sliding, Crossing, Degenerate, Unsupported };

struct SlidingOutcome {
    SlidingStatus status = SlidingStatus::Unsupported;
    /// Weight of the plus-side field; meaningful only when Sliding.
    double alpha = 0.0;
    std::optional<Vector> velocity;
};

/// Piecewise-continuous system convexified on its splitting boundary.
///
/// The boundary is the band |sigma_j(x)| <= boundary_tol. Off the band F(x)
/// is the single field of the owning region; inside it F(x) is the convex hull
/// of the fields of every adjacent region.
class FilippovSystem final : public SetValuedMap {
public:
    /// Validates the description: region ids unique, one sign per switching
    /// function, one field component per dimension, no sign pattern claimed
    /// twice, and no pattern reachable at `coverage_samples` domain samples
    /// left unclaimed. Throws ConfigError otherwise.
    FilippovSystem(std::vector<SwitchingFunction> switching, std::vector<Region> regions, double boundary_tol,
                   Box domain, std::size_t coverage_samples = 512, std::uint64_t seed = 0);

    Classification classify(const Vector& x) const;
    ConvexSet evaluate(const Vector& x) const override;
    const Box& domain() const override { return domain_; }

    /// Solves grad sigma(x) . (alpha f+(x) + (1 - alpha) f-(x)) = 0 across the
    /// single switching function separating the two regions.
    SlidingOutcome sliding_selection(const Vector& x, int minus_id, int plus_id) const;

    /// Sliding velocity at two-region boundary points, nullopt elsewhere.
    std::optional<Vector> sliding_velocity(const Vector& x) const override;

    /// f_i(x) for the region with the given id.
    Vector field(int region_id, const Vector& x) const;
    double switching_value(std::size_t j, const Vector& x) const;

    const std::vector<SwitchingFunction>& switching() const noexcept { return switching_; }
    const std::vector<Region>& regions() const noexcept { return regions_; }
    double boundary_tol() const noexcept { return boundary_tol_; }

private:
    std::size_t region_index(int id) const;
    int claimant(std::uint32_t pattern) const;
    std::string pattern_string(std::uint32_t pattern) const;
    /// Index of the unique switching function with opposite definite signs in
    /// the two regions, if any.
    std::optional<std::size_t> separating_function(const Region& minus, const Region& plus) const;

    std::vector<SwitchingFunction> switching_;
    std::vector<Region> regions_;
    double boundary_tol_;
    Box domain_;
    /// Region index for each full sign pattern (bit j set = sigma_j positive); -1 when unclaimed.
    std::vector<int> pattern_owner_;
};

} // namespace dincl

#endif // DINCL_FILIPPOV_HPP
