#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "battery.hpp"
#include "dincl/errors.hpp"
#include "dincl/sampling.hpp"
#include "dincl/solver.hpp"

using namespace dincl;

namespace {

const std::vector<SelectionStrategy> kFour{VertexIndex{0}, VertexIndex{1}, RandomSeeded{3}, SlidingAware{}};

Vector random_point(std::mt19937_64& rng, const Box& box)
{
    std::vector<double> x(box.dim());
    for (std::size_t i = 0; i < x.size(); ++i) {
        x[i] = box.lo()[i] + uniform01(rng) * box.extent(i);
    }
    return Vector(x);
}

} // namespace

TEST_CASE("constant field gives a linear trajectory")
{
    const auto cfg = battery::load("constant");
    const StepPlan plan = StepPlan::fixed(100, 1.0, 1.25);
    const Trajectory tr = euler_delta_solution(*cfg.system, Vector{-0.5}, plan, Centroid{}, cfg.system->domain());
    REQUIRE(tr.size() == 101);
    for (std::size_t i = 0; i < tr.size(); ++i) {
        CHECK(tr.states[i][0] == doctest::Approx(-0.5 + tr.times[i]).epsilon(1e-14));
    }
    CHECK(tr.final_time() == doctest::Approx(1.0));
    CHECK_FALSE(tr.exit.has_value());
    CHECK(tr.delta == doctest::Approx(0.01 * 2.25));
}

TEST_CASE("leaving the domain stops on the crossed face")
{
    const auto cfg = battery::load("constant");
    const StepPlan plan = StepPlan::fixed(64, 5.0, 1.25);
    const Trajectory tr = euler_delta_solution(*cfg.system, Vector{0.5}, plan, Centroid{}, cfg.system->domain());
    REQUIRE(tr.exit.has_value());
    CHECK(face_name(*tr.exit) == "x1+");
    CHECK(tr.exit->time == doctest::Approx(1.5));
    CHECK(tr.final_state()[0] == doctest::Approx(2.0));
    CHECK(tr.at(10.0)[0] == doctest::Approx(2.0));
}

TEST_CASE("relay converges onto the sliding surface")
{
    const auto cfg = battery::load("relay");
    const StepPlan plan = StepPlan::fixed(2000, 2.0, 1.25);
    const Trajectory tr = euler_delta_solution(*cfg.system, Vector{1.0}, plan, SlidingAware{}, cfg.system->domain());
    double worst = 0.0;
    for (std::size_t i = 0; i < tr.size(); ++i) {
        worst = std::max(worst, std::abs(tr.states[i][0] - std::max(1.0 - tr.times[i], 0.0)));
    }
    CHECK(worst <= 2.0 * plan.h);
}

TEST_CASE("smooth decay converges with order one")
{
    const auto cfg = battery::load("decay");
    double prev = 0.0;
    for (int k : {100, 200, 400, 800}) {
        const StepPlan plan = StepPlan::fixed(k, 1.0, 2.5);
        const Trajectory tr = euler_delta_solution(*cfg.system, Vector{1.0}, plan, Centroid{}, cfg.system->domain());
        const double err = std::abs(tr.final_state()[0] - std::exp(-1.0));
        if (prev > 0.0) {
            CHECK(err / prev >= 0.4);
            CHECK(err / prev <= 0.6);
        }
        prev = err;
    }
}

TEST_CASE("existence legs stay inside the ball of radius r")
{
    std::mt19937_64 rng(41);
    for (const char* name : battery::kNames) {
        const auto cfg = battery::load(name);
        const FilippovSystem& f = *cfg.system;
        const double m = safe_bound(f, f.domain());
        for (int trial = 0; trial < 20; ++trial) {
            const Vector x0 = random_point(rng, cfg.K);
            const double r = f.domain().distance_to_boundary(x0);
            const StepPlan plan = StepPlan::from_radius(50, r, m);
            for (const SelectionStrategy& s : kFour) {
                const Trajectory tr = euler_delta_solution(f, x0, plan, s, f.domain());
                CHECK_FALSE(tr.exit.has_value());
                for (const Vector& x : tr.states) {
                    CHECK(distance(x, x0) <= r);
                }
            }
        }
    }
}

TEST_CASE("euler broken lines are delta-solutions")
{
    for (const char* name : battery::kNames) {
        const auto cfg = battery::load(name);
        const FilippovSystem& f = *cfg.system;
        const double m = safe_bound(f, f.domain());
        for (int k : {10, 100}) {
            for (const SelectionStrategy& s : kFour) {
                CAPTURE(name);
                CAPTURE(k);
                const StepPlan plan = StepPlan::fixed(k, 1.0, m);
                const Trajectory tr = euler_delta_solution(f, cfg.K.center() + Vector(f.dim(), 0.3), plan, s,
                                                           f.domain());
                const DeltaSolutionReport rep = verify_delta_solution(tr, f);
                CHECK(rep.ok());
                CHECK(rep.intervals == tr.velocities.size());
            }
        }
    }
}

TEST_CASE("verification flags a velocity outside F")
{
    const auto cfg = battery::load("relay");
    const StepPlan plan = StepPlan::fixed(10, 1.0, 1.25);
    Trajectory tr = euler_delta_solution(*cfg.system, Vector{1.0}, plan, VertexIndex{0}, cfg.system->domain());
    tr.velocities[3] = Vector{3.0};
    const DeltaSolutionReport rep = verify_delta_solution(tr, *cfg.system);
    CHECK(rep.failures == 1);
    CHECK_FALSE(rep.passed[3]);
    REQUIRE_FALSE(rep.worst.empty());
    CHECK(rep.worst.front().interval == 3);
}

TEST_CASE("funnels are equicontinuous and deterministic across thread counts")
{
    for (const char* name : battery::kNames) {
        const auto cfg = battery::load(name);
        const FilippovSystem& f = *cfg.system;
        const double est = estimate_bound(f, f.domain(), 256, 0);
        const StepPlan plan = StepPlan::fixed(50, 0.5, 1.25 * est);
        const auto strategies = default_strategy_cycle();
        const auto a = funnel(f, cfg.K.center(), plan, strategies, 24, 9, f.domain(), 1);
        const auto b = funnel(f, cfg.K.center(), plan, strategies, 24, 9, f.domain(), 4);
        REQUIRE(a.size() == b.size());
        for (std::size_t i = 0; i < a.size(); ++i) {
            CHECK(a[i].states == b[i].states);
        }
        const EquicontinuityReport rep = equicontinuity_check(a, 1.25 * est + 1e-9);
        CHECK(rep.ok());
        CHECK(rep.max_ratio <= est + 1e-9);
    }
}

TEST_CASE("equicontinuity check reports violations")
{
    Trajectory tr;
    tr.times = {0.0, 1.0, 2.0};
    tr.states = {Vector{0.0}, Vector{1.0}, Vector{4.0}};
    tr.velocities = {Vector{1.0}, Vector{3.0}};
    const std::vector<Trajectory> ts{tr};
    const EquicontinuityReport rep = equicontinuity_check(ts, 2.0);
    CHECK(rep.max_ratio == doctest::Approx(3.0));
    REQUIRE(rep.violations.size() == 1);
    CHECK(rep.violations[0].i == 1);
    CHECK(rep.violations[0].j == 2);
    CHECK(equicontinuity_check(ts, 3.0).ok());
}

TEST_CASE("bang-bang vertex selections reach the extremes; random ones keep a fixed mixture")
{
    const auto cfg = battery::load("bangbang");
    const FilippovSystem& f = *cfg.system;
    const StepPlan plan = StepPlan::fixed(100, 1.0, 1.25);
    CHECK(euler_delta_solution(f, Vector{0.0}, plan, VertexIndex{0}, f.domain()).final_state()[0] ==
          doctest::Approx(-1.0));
    CHECK(euler_delta_solution(f, Vector{0.0}, plan, VertexIndex{1}, f.domain()).final_state()[0] ==
          doctest::Approx(1.0));
    const Trajectory r = euler_delta_solution(f, Vector{0.0}, plan, RandomSeeded{17}, f.domain());
    for (const Vector& v : r.velocities) {
        CHECK(v == r.velocities.front());
    }
    const Trajectory r2 = euler_delta_solution(f, Vector{0.0}, plan, RandomSeeded{17}, f.domain());
    CHECK(r.states == r2.states);
}

TEST_CASE("continuation reaches the boundary")
{
    const auto cfg = battery::load("constant");
    const Trajectory tr = continue_to_boundary(*cfg.system, Vector{0.0}, cfg.system->domain(), 10, Centroid{}, 100.0);
    REQUIRE(tr.exit.has_value());
    CHECK(face_name(*tr.exit) == "x1+");
    CHECK(tr.final_state()[0] == doctest::Approx(2.0).epsilon(1e-8));
    CHECK(tr.exit->time == doctest::Approx(2.0).epsilon(1e-8));
    for (std::size_t i = 0; i + 1 < tr.size(); ++i) {
        CHECK(tr.times[i + 1] - tr.times[i] <= tr.step_bound * (1.0 + 1e-12));
    }
    const Trajectory capped =
        continue_to_boundary(*cfg.system, Vector{0.0}, cfg.system->domain(), 10, Centroid{}, 0.5);
    CHECK_FALSE(capped.exit.has_value());
    CHECK(capped.final_time() == doctest::Approx(0.5));
}

TEST_CASE("refinement converges on the smooth system")
{
    const auto cfg = battery::load("decay");
    const auto schedule = default_k_schedule();
    const RefineResult res = refine(*cfg.system, Vector{1.0}, 1.0, Centroid{}, cfg.system->domain(), schedule, 1e-3);
    CHECK(res.report.converged);
    REQUIRE(res.report.converged_at.has_value());
    for (std::size_t i = 1; i < res.report.sup_distances.size(); ++i) {
        CHECK(res.report.sup_distances[i] < res.report.sup_distances[i - 1]);
    }
    const std::vector<int> bad{100, 50};
    CHECK_THROWS_AS(refine(*cfg.system, Vector{1.0}, 1.0, Centroid{}, cfg.system->domain(), bad, 1e-3),
                    ContractViolation);
}

TEST_CASE("strategy names round-trip")
{
    for (const SelectionStrategy& s :
         {SelectionStrategy{VertexIndex{2}}, SelectionStrategy{Centroid{}}, SelectionStrategy{RandomSeeded{99}},
          SelectionStrategy{SlidingAware{}}}) {
        CHECK(parse_strategy(to_string(s)) == s);
    }
    CHECK(parse_strategy("random") == SelectionStrategy{RandomSeeded{0}});
    CHECK_THROWS_AS(parse_strategy("vertex:x"), ConfigError);
    CHECK_THROWS_AS(parse_strategy("fastest"), ConfigError);
    CHECK(with_seed(RandomSeeded{1}, 5) == SelectionStrategy{RandomSeeded{5}});
    CHECK(with_seed(Centroid{}, 5) == SelectionStrategy{Centroid{}});
}

TEST_CASE("sup distance over the common window")
{
    Trajectory a;
    a.times = {0.0, 1.0};
    a.states = {Vector{0.0}, Vector{1.0}};
    a.velocities = {Vector{1.0}};
    Trajectory b;
    b.times = {0.0, 0.5, 2.0};
    b.states = {Vector{0.0}, Vector{0.0}, Vector{3.0}};
    b.velocities = {Vector{0.0}, Vector{2.0}};
    CHECK(sup_distance(a, b) == doctest::Approx(0.5));
}
