#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "dincl/errors.hpp"
#include "dincl/io/number_format.hpp"
#include "dincl/sampling.hpp"
#include "dincl/vector.hpp"

using namespace dincl;

TEST_CASE("vector arithmetic and norms")
{
    const Vector a{3.0, -4.0};
    const Vector b{1.0, 1.0};
    CHECK(a.norm() == doctest::Approx(5.0));
    CHECK(a.norm_inf() == 4.0);
    CHECK(a.dot(b) == -1.0);
    CHECK((a + b) == Vector{4.0, -3.0});
    CHECK((a - b) == Vector{2.0, -5.0});
    CHECK((2.0 * b) == Vector{2.0, 2.0});
    CHECK(distance(a, b) == doctest::Approx(std::sqrt(4.0 + 25.0)));
    CHECK(distance_inf(a, b) == 5.0);
}

TEST_CASE("vector rejects non-finite input and mismatched dimensions")
{
    CHECK_THROWS_AS((Vector{1.0, std::numeric_limits<double>::quiet_NaN()}), ContractViolation);
    CHECK_THROWS_AS(Vector(std::vector<double>{std::numeric_limits<double>::infinity()}), ContractViolation);
    CHECK_THROWS_AS((Vector{1.0}.dot(Vector{1.0, 2.0})), ContractViolation);
    CHECK_THROWS_AS((Vector{1.0} + Vector{1.0, 2.0}), ContractViolation);
}

TEST_CASE("box geometry")
{
    const Box box(Vector{-1.0, 0.0}, Vector{1.0, 2.0});
    CHECK(box.contains(Vector{0.0, 1.0}));
    CHECK_FALSE(box.contains(Vector{1.1, 1.0}));
    CHECK(box.contains(Vector{1.1, 1.0}, 0.2));
    CHECK(box.clamp(Vector{5.0, -3.0}) == Vector{1.0, 0.0});
    CHECK(box.center() == Vector{0.0, 1.0});
    const auto corners = box.corners();
    REQUIRE(corners.size() == 4);
    CHECK(corners[0] == Vector{-1.0, 0.0});
    CHECK(corners[1] == Vector{1.0, 0.0});
    CHECK(corners[2] == Vector{-1.0, 2.0});
    CHECK(box.distance_to_boundary(Vector{0.5, 1.0}) == doctest::Approx(0.5));
    CHECK(box.distance_to_boundary(Vector{2.0, 1.0}) < 0.0);
    CHECK(box.encloses(Box(Vector{0.0, 0.5}, Vector{0.5, 1.0})));
    CHECK_FALSE(box.encloses(Box(Vector{0.0, 0.5}, Vector{1.5, 1.0})));
    CHECK(to_string(box) == "-1:1,0:2");
    CHECK_THROWS_AS(Box(Vector{1.0}, Vector{0.0}), ContractViolation);
}

TEST_CASE("shortest double formatting round-trips")
{
    std::mt19937_64 rng(7);
    for (int i = 0; i < 20000; ++i) {
        const double x = std::ldexp(uniform01(rng) - 0.5, static_cast<int>(rng() % 200) - 100);
        CHECK(io::parse_double(io::format_double(x), "x") == x);
    }
    CHECK(io::format_double(0.1) == "0.1");
    CHECK(io::format_double(2.0) == "2");
    CHECK(io::parse_double(" +1.5 ", "x") == 1.5);
    CHECK_THROWS_AS(io::parse_double("1.5x", "x"), ConfigError);
    CHECK_THROWS_AS(io::parse_double("", "x"), ConfigError);
}

TEST_CASE("seed derivation is stable and sensitive to every coordinate")
{
    CHECK(derive_seed(1, 2, 3) == derive_seed(1, 2, 3));
    CHECK(derive_seed(1, 2, 3) != derive_seed(1, 3, 2));
    CHECK(derive_seed(1, 2, 3) != derive_seed(2, 2, 3));
    std::mt19937_64 rng(3);
    for (int n = 1; n <= 6; ++n) {
        const auto w = simplex_weights(static_cast<std::size_t>(n), rng);
        double sum = 0.0;
        for (double x : w) {
            CHECK(x >= 0.0);
            sum += x;
        }
        CHECK(sum == doctest::Approx(1.0));
    }
}

TEST_CASE("box samples start with corners and center and stay inside")
{
    const Box box(Vector{0.0, 0.0, 0.0}, Vector{1.0, 2.0, 3.0});
    const auto pts = box_samples(box, 100, 5);
    REQUIRE(pts.size() == 8 + 1 + 100);
    CHECK(pts[8] == box.center());
    for (const Vector& p : pts) {
        CHECK(box.contains(p));
    }
    CHECK(box_samples(box, 100, 5) == pts);
}
