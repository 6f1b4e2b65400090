#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cmath>
#include <stdexcept>

#include "dincl/errors.hpp"
#include "dincl/set_valued_map.hpp"

using namespace dincl;

namespace {

const std::array<double, 6> kGrid{0.1, 0.05, 0.025, 0.0125, 0.00625, 0.003125};

FunctionMap jump_map()
{
    return FunctionMap(Box(Vector{-1.0}, Vector{1.0}), [](const Vector& x) {
        if (x[0] > 0.0) {
            return ConvexSet::singleton(Vector{-1.0});
        }
        if (x[0] < 0.0) {
            return ConvexSet::singleton(Vector{1.0});
        }
        return ConvexSet({Vector{-1.0}, Vector{1.0}});
    });
}

} // namespace

TEST_CASE("bound estimate sees corners and applies the safety factor")
{
    const FunctionMap id(Box(Vector{-1.0, 0.0}, Vector{2.0, 1.0}),
                         [](const Vector& x) { return ConvexSet::singleton(x); });
    CHECK(estimate_bound(id, id.domain(), 16, 0) == doctest::Approx(std::sqrt(5.0)));
    CHECK(safe_bound(id, id.domain()) == doctest::Approx(1.25 * std::sqrt(5.0)));
    CHECK_THROWS_AS(estimate_bound(id, id.domain(), 0, 0), ContractViolation);
}

TEST_CASE("evaluation failures name the point")
{
    const FunctionMap bad(Box(Vector{0.0}, Vector{1.0}), [](const Vector& x) -> ConvexSet {
        if (x[0] > 0.5) {
            throw std::runtime_error("boom");
        }
        return ConvexSet::singleton(x);
    });
    try {
        estimate_bound(bad, bad.domain(), 4, 0);
        FAIL("expected an EvaluationError");
    } catch (const EvaluationError& e) {
        CHECK(std::string(e.what()).find("boom") != std::string::npos);
    }
}

TEST_CASE("usc probe on a continuous map returns the largest grid value")
{
    const FunctionMap smooth(Box(Vector{-1.0}, Vector{1.0}),
                             [](const Vector& x) { return ConvexSet::singleton(Vector{0.5 * x[0]}); });
    const auto d = usc_probe(smooth, Vector{0.3}, 0.1, kGrid, 32);
    REQUIRE(d.has_value());
    CHECK(*d == 0.1);
}

TEST_CASE("usc probe on a jump map")
{
    const FunctionMap f = jump_map();
    // At the jump the value already contains both one-sided limits.
    const auto at_jump = usc_probe(f, Vector{0.0}, 0.1, kGrid, 32);
    REQUIRE(at_jump.has_value());
    CHECK(*at_jump == 0.1);
    // Nearby, the ball must shrink below the distance to the jump.
    const auto near = usc_probe(f, Vector{0.04}, 0.1, kGrid, 32);
    REQUIRE(near.has_value());
    CHECK(*near < 0.04);
    CHECK(*near > 0.0);
}

TEST_CASE("usc probe detects a map that is not upper semicontinuous")
{
    // Value at 0 misses the right-hand limit.
    const FunctionMap f(Box(Vector{-1.0}, Vector{1.0}), [](const Vector& x) {
        return ConvexSet::singleton(Vector{x[0] > 0.0 ? 1.0 : 0.0});
    });
    CHECK_FALSE(usc_probe(f, Vector{0.0}, 0.1, kGrid, 32).has_value());
}

TEST_CASE("usc probe validates its arguments")
{
    const FunctionMap f = jump_map();
    const std::array<double, 2> rising{0.01, 0.1};
    CHECK_THROWS_AS(usc_probe(f, Vector{0.0}, 0.0, kGrid, 8), ContractViolation);
    CHECK_THROWS_AS(usc_probe(f, Vector{0.0}, 0.1, rising, 8), ContractViolation);
}
