#ifndef DINCL_MULTIFLOW_HPP
#define DINCL_MULTIFLOW_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dincl/set_valued_map.hpp"
#include "dincl/solver.hpp"
#include "dincl/vector.hpp"

namespace dincl {

/// Regular lattice over a compact box K. Nodes sit at lo + i * pitch on each
/// axis, from lo through hi inclusive, so every point of K is within pitch/2
/// (per axis) of a node. Linear indices run with axis 0 fastest.
class Grid {
public:
    /// The extent of every axis must be an integer multiple of its pitch
    /// (within 1e-9 relative); throws ContractViolation otherwise.
    Grid(Box box, std::vector<double> pitch);
    Grid(Box box, double pitch);

    std::size_t dim() const noexcept { return box_.dim(); }
    std::size_t size() const noexcept { return size_; }
    const Box& box() const noexcept { return box_; }
    const std::vector<double>& pitch() const noexcept { return pitch_; }
    const std::vector<std::size_t>& counts() const noexcept { return counts_; }

    Vector point(std::size_t index) const;
    std::vector<std::size_t> multi_index(std::size_t index) const;
    std::size_t linear_index(std::span<const std::size_t> multi) const;
    /// Node nearest to x (coordinates clamped to the lattice range).
    std::size_t snap(const Vector& x) const;
    std::size_t snap_axis(std::size_t axis, double coord) const;

    friend bool operator==(const Grid&, const Grid&) = default;

private:
    Box box_;
    std::vector<double> pitch_;
    std::vector<std::size_t> counts_;
    std::size_t size_ = 0;
};

using CellIndex = std::uint32_t;
using CellPair = std::pair<CellIndex, CellIndex>;

/// Finite relation on the nodes of a grid, approximating Phi^t.
/// Pairs are kept sorted and unique.
class Relation {
public:
    Relation(Grid grid, double t, std::vector<CellPair> pairs);

    const Grid& grid() const noexcept { return grid_; }
    double t() const noexcept { return t_; }
    const std::vector<CellPair>& pairs() const noexcept { return pairs_; }
    std::size_t size() const noexcept { return pairs_.size(); }
    bool empty() const noexcept { return pairs_.empty(); }
    bool contains(CellPair p) const;
    /// End cells b with (a, b) in the relation.
    std::vector<CellIndex> image(CellIndex a) const;

    friend bool operator==(const Relation&, const Relation&) = default;

private:
    Grid grid_;
    double t_;
    std::vector<CellPair> pairs_;
};

Relation identity_relation(const Grid& grid);

/// r_t o r_s: (x, z) such that (x, y) in r_s and (y, z) in r_t for some y.
/// The result's time is r_t.t() + r_s.t().
Relation compose(const Relation& r_t, const Relation& r_s);

struct ReachParams {
    /// Euler steps over the longest requested time.
    int k = 100;
    /// Runs per start node.
    std::size_t budget = 20;
    std::vector<SelectionStrategy> strategies = default_strategy_cycle();
    std::uint64_t seed = 0;
    unsigned threads = 1;
    /// Speed bound m; defaults to safe_bound over K.
    std::optional<double> bound;
};

struct Provenance {
    int k = 0;
    double h = 0.0;
    double m = 0.0;
    double delta = 0.0;
    std::vector<std::string> strategies;
    std::size_t budget = 0;
    std::uint64_t seed = 0;
};

/// Relations Phi^t for a list of times, all built from the same runs.
struct MultiflowApprox {
    Grid grid;
    std::vector<double> times;
    std::vector<Relation> relations;
    Provenance provenance;

    /// Relation for time t (matched within 1e-12); throws ContractViolation if absent.
    const Relation& at(double t) const;
};

/// Samples solutions from every node of the grid: `budget` runs per node to
/// the largest time (strategies cycled, random seeds derived from
/// (seed, node, run)), each stopped where it leaves K. A run contributes
/// (a, snap(x(tau))) to every listed time tau it reaches inside K. The time
/// list is sorted, deduplicated and always contains 0.
MultiflowApprox build_multiflow(const SetValuedMap& f, const Grid& grid, std::vector<double> times,
                                const ReachParams& params);

/// Phi^t alone; k steps span [0, t].
Relation reach_relation(const SetValuedMap& f, const Grid& grid, double t, const ReachParams& params);

/// Largest distance (max-norm on K x K, state units) from a pair of `from`
/// to the nearest pair of `to`; 0 when every pair of `from` is in `to`,
/// infinity when `to` is empty and `from` is not. The relations may live on
/// different grids over boxes of the same dimension.
double directed_distance(const Relation& from, const Relation& to);

/// max(directed_distance(a, b), directed_distance(b, a)).
double relation_distance(const Relation& a, const Relation& b);

struct MonoidDefect {
    double defect_fwd = 0.0;
    double defect_bwd = 0.0;
    /// Phi^t o Phi^s.
    Relation composed;
    /// Holds Phi^0, Phi^s, Phi^t and Phi^{t+s}.
    MultiflowApprox approx;
};

/// Compares Phi^t o Phi^s with Phi^{t+s}, all from one build_multiflow call.
/// defect_fwd = directed_distance(composition, Phi^{t+s}); defect_bwd the reverse.
MonoidDefect monoid_defect(const SetValuedMap& f, const Grid& grid, double t, double s, const ReachParams& params);

struct ClosureReport {
    std::vector<double> times;
    /// distances[i][l]: relation_distance between levels l and l + 1 at times[i].
    std::vector<std::vector<double>> distances;
    /// Times where some consecutive distance fails to strictly decrease.
    std::vector<double> flagged_times;

    bool all_decreasing() const noexcept { return flagged_times.empty(); }
};

/// Stabilization of the relations under refinement. Levels are ordered from
/// coarse to fine and must share the time list.
ClosureReport closure_defect(std::span<const MultiflowApprox> levels);

} // namespace dincl

#endif // DINCL_MULTIFLOW_HPP
