#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>

#include "battery.hpp"
#include "dincl/errors.hpp"
#include "dincl/multiflow.hpp"
#include "dincl/sampling.hpp"

using namespace dincl;

namespace {

Relation random_relation(std::mt19937_64& rng, const Grid& g, std::size_t max_pairs)
{
    std::vector<CellPair> pairs;
    const std::size_t n = rng() % (max_pairs + 1);
    for (std::size_t i = 0; i < n; ++i) {
        pairs.emplace_back(static_cast<CellIndex>(rng() % g.size()), static_cast<CellIndex>(rng() % g.size()));
    }
    return Relation(g, 0.0, pairs);
}

// Composition straight from the definition.
std::set<CellPair> compose_oracle(const Relation& r_t, const Relation& r_s)
{
    std::set<CellPair> out;
    for (const auto& [x, y] : r_s.pairs()) {
        for (const auto& [y2, z] : r_t.pairs()) {
            if (y == y2) {
                out.emplace(x, z);
            }
        }
    }
    return out;
}

double directed_oracle(const Relation& from, const Relation& to)
{
    double worst = 0.0;
    for (const auto& [a, b] : from.pairs()) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& [c, d] : to.pairs()) {
            best = std::min(best, std::max(distance_inf(from.grid().point(a), to.grid().point(c)),
                                           distance_inf(from.grid().point(b), to.grid().point(d))));
        }
        worst = std::max(worst, best);
    }
    return worst;
}

} // namespace

TEST_CASE("grid indexing")
{
    const Grid g(Box(Vector{-1.0, 0.0}, Vector{1.0, 1.0}), std::vector<double>{0.5, 0.25});
    CHECK(g.counts() == std::vector<std::size_t>{5, 5});
    CHECK(g.size() == 25);
    CHECK(g.point(0) == Vector{-1.0, 0.0});
    CHECK(g.point(24) == Vector{1.0, 1.0});
    CHECK(g.point(7) == Vector{0.0, 0.25});
    for (std::size_t i = 0; i < g.size(); ++i) {
        CHECK(g.snap(g.point(i)) == i);
        CHECK(g.linear_index(g.multi_index(i)) == i);
    }
    CHECK(g.snap(Vector{-0.76, 0.13}) == g.linear_index(std::vector<std::size_t>{0, 1}));
    CHECK(g.snap(Vector{5.0, -5.0}) == 4);
    CHECK_THROWS_AS(Grid(Box(Vector{0.0}, Vector{1.0}), 0.3), ContractViolation);
    CHECK_THROWS_AS(Grid(Box(Vector{0.0}, Vector{1.0}), -0.5), ContractViolation);
    const Grid fine(Box(Vector{-1.0}, Vector{1.0}), 0.02);
    CHECK(fine.size() == 101);
    CHECK(fine.point(50)[0] == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("relations are sorted sets")
{
    const Grid g(Box(Vector{0.0}, Vector{1.0}), 0.25);
    const Relation r(g, 0.5, {{3, 1}, {0, 2}, {3, 1}, {0, 1}});
    CHECK(r.size() == 3);
    CHECK(r.pairs().front() == CellPair{0, 1});
    CHECK(r.contains({3, 1}));
    CHECK_FALSE(r.contains({1, 3}));
    CHECK(r.image(0) == std::vector<CellIndex>{1, 2});
    CHECK_THROWS_AS(Relation(g, 0.0, {{0, 5}}), ContractViolation);
}

TEST_CASE("composition: definition, associativity and identity on random relations")
{
    std::mt19937_64 rng(51);
    const Grid g(Box(Vector{0.0, 0.0}, Vector{1.0, 1.0}), 0.25);
    const Relation id = identity_relation(g);
    for (int trial = 0; trial < 1000; ++trial) {
        const Relation a = random_relation(rng, g, 40);
        const Relation b = random_relation(rng, g, 40);
        const Relation c = random_relation(rng, g, 40);
        CHECK(compose(compose(a, b), c).pairs() == compose(a, compose(b, c)).pairs());
        CHECK(compose(id, a).pairs() == a.pairs());
        CHECK(compose(a, id).pairs() == a.pairs());
        const std::set<CellPair> want = compose_oracle(a, b);
        const Relation ab = compose(a, b);
        CHECK(std::set<CellPair>(ab.pairs().begin(), ab.pairs().end()) == want);
    }
    const Grid other(Box(Vector{0.0, 0.0}, Vector{1.0, 1.0}), 0.5);
    CHECK_THROWS_AS(compose(id, identity_relation(other)), ContractViolation);
}

TEST_CASE("relation distance matches a brute-force oracle")
{
    std::mt19937_64 rng(52);
    const Grid coarse(Box(Vector{-1.0, -1.0}, Vector{1.0, 1.0}), 0.25);
    const Grid fine(Box(Vector{-1.0, -1.0}, Vector{1.0, 1.0}), 0.125);
    for (int trial = 0; trial < 200; ++trial) {
        const Relation a = random_relation(rng, coarse, 30);
        const Relation b = random_relation(rng, trial % 2 ? fine : coarse, 30);
        const double want = b.empty() && !a.empty() ? std::numeric_limits<double>::infinity() : directed_oracle(a, b);
        CHECK(directed_distance(a, b) == want);
        CHECK(relation_distance(a, b) == relation_distance(b, a));
    }
    const Relation a = random_relation(rng, coarse, 30);
    CHECK(directed_distance(a, a) == 0.0);
}

TEST_CASE("reach at time zero is the identity on every battery system")
{
    for (const char* name : battery::kNames) {
        const auto cfg = battery::load(name);
        const Grid g(cfg.K, cfg.reach.pitch);
        CHECK(reach_relation(*cfg.system, g, 0.0, ReachParams{}) == identity_relation(g));
        ReachParams p;
        p.budget = 2;
        const MultiflowApprox approx = build_multiflow(*cfg.system, g, {0.5}, p);
        CHECK(approx.at(0.0) == identity_relation(g));
    }
}

TEST_CASE("translation flow composes exactly")
{
    // x' = 1 with pitch = h = 1/64: every run moves one cell per step.
    const auto cfg = battery::load("constant");
    const Grid g(cfg.K, 1.0 / 64.0);
    ReachParams p;
    p.k = 32;
    p.budget = 1;
    p.strategies = {Centroid{}};
    const MultiflowApprox approx = build_multiflow(*cfg.system, g, {0.25, 0.5}, p);
    CHECK(approx.provenance.h == 1.0 / 64.0);
    const Relation& quarter = approx.at(0.25);
    CHECK(quarter.image(0) == std::vector<CellIndex>{16});
    CHECK(quarter.image(static_cast<CellIndex>(g.size() - 1)).empty());
    CHECK(compose(quarter, quarter).pairs() == approx.at(0.5).pairs());
}

TEST_CASE("building is deterministic across thread counts")
{
    const auto cfg = battery::load("sliding2d");
    const Grid g(cfg.K, 0.25);
    ReachParams p;
    p.budget = 6;
    p.k = 40;
    p.seed = 77;
    const MultiflowApprox one = build_multiflow(*cfg.system, g, {0.5, 1.0}, p);
    p.threads = 4;
    const MultiflowApprox four = build_multiflow(*cfg.system, g, {0.5, 1.0}, p);
    REQUIRE(one.relations.size() == four.relations.size());
    for (std::size_t i = 0; i < one.relations.size(); ++i) {
        CHECK(one.relations[i] == four.relations[i]);
    }
}

TEST_CASE("relay pasting defect stays within pitch plus h m")
{
    const auto cfg = battery::load("relay");
    const Grid g(cfg.K, 0.05);
    ReachParams p;
    p.k = 100;
    p.budget = 20;
    const MonoidDefect d = monoid_defect(*cfg.system, g, 0.5, 0.5, p);
    CHECK(d.defect_fwd <= 0.05 + d.approx.provenance.h * d.approx.provenance.m);
    CHECK(std::isfinite(d.defect_bwd));
}

TEST_CASE("closure report flags non-decreasing distances")
{
    const Grid g(Box(Vector{0.0}, Vector{1.0}), 0.25);
    auto level = [&](std::vector<CellPair> pairs) {
        MultiflowApprox a{g, {0.0, 1.0}, {identity_relation(g), Relation(g, 1.0, std::move(pairs))}, {}};
        return a;
    };
    const std::vector<MultiflowApprox> shrinking{level({{0, 4}}), level({{0, 2}}), level({{0, 1}})};
    const ClosureReport ok = closure_defect(shrinking);
    CHECK(ok.distances[1] == std::vector<double>{0.5, 0.25});
    CHECK_FALSE(ok.all_decreasing());
    CHECK(ok.flagged_times == std::vector<double>{0.0});

    const std::vector<MultiflowApprox> growing{level({{0, 2}}), level({{0, 1}}), level({{0, 4}})};
    const ClosureReport bad = closure_defect(growing);
    CHECK(std::find(bad.flagged_times.begin(), bad.flagged_times.end(), 1.0) != bad.flagged_times.end());
    CHECK_THROWS_AS(closure_defect(std::span<const MultiflowApprox>(shrinking.data(), 1)), ContractViolation);
}
