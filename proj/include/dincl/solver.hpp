#ifndef DINCL_SOLVER_HPP
#define DINCL_SOLVER_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "dincl/convex_set.hpp"
#include "dincl/set_valued_map.hpp"
#include "dincl/vector.hpp"

namespace dincl {

/// Distance from the domain boundary at which continuation stops.
inline constexpr double kBoundarySnap = 1e-9;

/// Tolerance for the velocity-membership check of verify_delta_solution.
inline constexpr double kResidualTol = 1e-9;

/// Where a trajectory met the boundary of its domain box.
struct ExitInfo {
    double time = 0.0;
    std::size_t axis = 0;
    bool upper = false;
};

std::string face_name(const ExitInfo& e);

/// Piecewise-linear delta-solution. velocities[i] is constant on [times[i], times[i+1]].
struct Trajectory {
    std::vector<double> times;
    std::vector<Vector> states;
    std::vector<Vector> velocities;
    double delta = 0.0;
    /// Longest interval allowed by the plan(s) that produced the trajectory.
    double step_bound = 0.0;
    std::optional<ExitInfo> exit;

    std::size_t size() const noexcept { return times.size(); }
    const Vector& final_state() const { return states.back(); }
    double final_time() const { return times.back(); }
    /// Linear interpolation; t is clamped to [times.front(), times.back()].
    Vector at(double t) const;
};

/// Sup over the common time window of |a(t) - b(t)|, evaluated on the union
/// of both breakpoint grids.
double sup_distance(const Trajectory& a, const Trajectory& b);

struct VertexIndex {
    std::size_t index = 0;
    friend bool operator==(const VertexIndex&, const VertexIndex&) = default;
};
struct Centroid {
    friend bool operator==(const Centroid&, const Centroid&) = default;
};
/// Fixed mixture of the vertices with weights drawn once per run (per vertex
/// count) from the uniform distribution on the simplex.
struct RandomSeeded {
    std::uint64_t seed = 0;
    friend bool operator==(const RandomSeeded&, const RandomSeeded&) = default;
};
/// Sliding velocity on two-region boundaries, centroid elsewhere.
struct SlidingAware {
    friend bool operator==(const SlidingAware&, const SlidingAware&) = default;
};

using SelectionStrategy = std::variant<VertexIndex, Centroid, RandomSeeded, SlidingAware>;

/// "vertex:<j>", "centroid", "random:<seed>", "sliding".
std::string to_string(const SelectionStrategy& s);
/// Inverse of to_string; "random" without a seed means seed 0. Throws ConfigError.
SelectionStrategy parse_strategy(std::string_view text);

/// Strategy with any RandomSeeded seed replaced by `seed`.
SelectionStrategy with_seed(const SelectionStrategy& s, std::uint64_t seed);

/// Strategy cycle used by funnels and reachability sampling when none is given.
std::vector<SelectionStrategy> default_strategy_cycle();

/// Stateful velocity chooser. The same strategy and call sequence always
/// yields the same velocities.
class Selector {
public:
    explicit Selector(SelectionStrategy strategy);

    Vector select(const SetValuedMap& f, const Vector& x, const ConvexSet& value);
    const SelectionStrategy& strategy() const noexcept { return strategy_; }

private:
    SelectionStrategy strategy_;
    std::mt19937_64 rng_;
    std::map<std::size_t, std::vector<double>> weights_;
};

/// Step schedule of one Euler broken line: k intervals of length h = c / k.
struct StepPlan {
    int k = 1;
    double c = 0.0;
    double h = 0.0;
    /// Radius of the ball the construction stays in (c * m when built from a horizon).
    double r = 0.0;
    double m = 0.0;

    /// Horizon-driven plan.
    static StepPlan fixed(int k, double horizon, double m);
    /// c = r / m, the horizon for which speed m cannot leave the r-ball.
    static StepPlan from_radius(int k, double r, double m);
};

/// Euler broken line x_{i+1} = x_i + (t_{i+1} - t_i) v_i with v_i chosen from
/// F(x_i) by `selector`, t_i = t0 + i h. delta is h (1 + m). Stops at the
/// first step leaving `domain`, with the last state moved back along the step
/// to the crossed face.
Trajectory euler_delta_solution(const SetValuedMap& f, const Vector& x0, const StepPlan& plan, Selector& selector,
                                const Box& domain, double t0 = 0.0);
Trajectory euler_delta_solution(const SetValuedMap& f, const Vector& x0, const StepPlan& plan,
                                const SelectionStrategy& strategy, const Box& domain, double t0 = 0.0);

std::vector<int> default_k_schedule();

struct RefineReport {
    std::vector<int> ks;
    /// sup_distance between the runs for ks[i] and ks[i + 1].
    std::vector<double> sup_distances;
    bool converged = false;
    std::optional<int> converged_at;
};

struct RefineResult {
    Trajectory finest;
    RefineReport report;
};

/// Runs the Euler construction for each k of `k_schedule` (strictly
/// increasing) and reports consecutive sup-distances. Convergence means some
/// consecutive distance is <= tol; failing to converge is not an error.
/// `bound` defaults to safe_bound over the domain.
RefineResult refine(const SetValuedMap& f, const Vector& x0, double horizon, const SelectionStrategy& strategy,
                    const Box& domain, std::span<const int> k_schedule, double tol,
                    std::optional<double> bound = std::nullopt);

/// Chains existence legs of length c = r / m, r being the current distance to
/// the boundary of `domain`, until the state is within kBoundarySnap of the
/// boundary (exit set) or time reaches t_max (exit absent).
Trajectory continue_to_boundary(const SetValuedMap& f, const Vector& x0, const Box& domain, int k_per_leg,
                                const SelectionStrategy& strategy, double t_max,
                                std::optional<double> bound = std::nullopt);

struct IntervalResidual {
    std::size_t interval = 0;
    double residual = 0.0;
};

struct DeltaSolutionReport {
    std::size_t intervals = 0;
    std::size_t failures = 0;
    std::vector<bool> passed;
    /// Largest residuals, descending.
    std::vector<IntervalResidual> worst;

    bool ok() const noexcept { return failures == 0; }
};

/// Checks each velocity against the delta-inflated hull of F sampled at the
/// interval's endpoints and midpoint.
DeltaSolutionReport verify_delta_solution(const Trajectory& traj, const SetValuedMap& f, std::size_t report_worst = 5);

struct LipschitzViolation {
    std::size_t trajectory = 0;
    std::size_t i = 0;
    std::size_t j = 0;
    double ratio = 0.0;
};

struct EquicontinuityReport {
    double max_ratio = 0.0;
    std::vector<LipschitzViolation> violations;

    bool ok() const noexcept { return violations.empty(); }
};

/// |x(s1) - x(s2)| <= bound |s1 - s2| over every breakpoint pair of every trajectory.
EquicontinuityReport equicontinuity_check(std::span<const Trajectory> trajs, double bound);

/// n_runs Euler solutions from x0; run r uses strategies[r % size] with
/// random seeds derived from (seed, r). Runs are distributed over `threads`.
std::vector<Trajectory> funnel(const SetValuedMap& f, const Vector& x0, const StepPlan& plan,
                               std::span<const SelectionStrategy> strategies, std::size_t n_runs,
                               std::uint64_t seed, const Box& domain, unsigned threads = 1);

} // namespace dincl

#endif // DINCL_SOLVER_HPP
