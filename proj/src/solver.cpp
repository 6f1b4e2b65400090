#include "dincl/solver.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>

#include "dincl/errors.hpp"
#include "dincl/parallel.hpp"
#include "dincl/sampling.hpp"

namespace dincl {

namespace {

// Breakpoints this far outside the domain (relative to its scale) count as inside.
constexpr double kDomainTol = 1e-12;

// Consecutive legs shorter than kStagnationTime before continuation gives up.
constexpr int kStagnationLegs = 10000;
constexpr double kStagnationTime = 1e-12;

double domain_tolerance(const Box& domain)
{
    return kDomainTol * (1.0 + std::max(domain.lo().norm_inf(), domain.hi().norm_inf()));
}

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

Vector mixture(const ConvexSet& value, const std::vector<double>& weights)
{
    Vector v(value.dim());
    for (std::size_t i = 0; i < value.size(); ++i) {
        v += weights[i] * value.vertex(i);
    }
    return v;
}

std::uint64_t parse_u64(std::string_view text, std::string_view what)
{
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        throw ConfigError(std::string(what) + ": expected a non-negative integer, got '" + std::string(text) + "'");
    }
    return v;
}

} // namespace

std::string face_name(const ExitInfo& e)
{
    return "x" + std::to_string(e.axis + 1) + (e.upper ? "+" : "-");
}

Vector Trajectory::at(double t) const
{
    if (times.empty()) {
        throw ContractViolation("Trajectory::at: empty trajectory");
    }
    if (t <= times.front()) {
        return states.front();
    }
    if (t >= times.back()) {
        return states.back();
    }
    const auto it = std::upper_bound(times.begin(), times.end(), t);
    const auto i = static_cast<std::size_t>(it - times.begin()) - 1;
    if (t == times[i]) {
        return states[i];
    }
    return states[i] + (t - times[i]) * velocities[i];
}

double sup_distance(const Trajectory& a, const Trajectory& b)
{
    const double lo = std::max(a.times.front(), b.times.front());
    const double hi = std::min(a.times.back(), b.times.back());
    if (lo > hi) {
        throw ContractViolation("sup_distance: trajectories share no time window");
    }
    std::vector<double> grid{lo, hi};
    for (const auto* tr : {&a, &b}) {
        for (double t : tr->times) {
            if (t > lo && t < hi) {
                grid.push_back(t);
            }
        }
    }
    double d = 0.0;
    for (double t : grid) {
        d = std::max(d, distance(a.at(t), b.at(t)));
    }
    return d;
}

std::string to_string(const SelectionStrategy& s)
{
    return std::visit(Overloaded{
                          [](const VertexIndex& v) { return "vertex:" + std::to_string(v.index); },
                          [](const Centroid&) { return std::string("centroid"); },
                          [](const RandomSeeded& r) { return "random:" + std::to_string(r.seed); },
                          [](const SlidingAware&) { return std::string("sliding"); },
                      },
                      s);
}

SelectionStrategy parse_strategy(std::string_view text)
{
    const auto colon = text.find(':');
    const std::string_view head = text.substr(0, colon);
    const std::string_view arg = colon == std::string_view::npos ? std::string_view{} : text.substr(colon + 1);
    if (head == "vertex") {
        if (arg.empty()) {
            throw ConfigError("strategy 'vertex' needs an index, e.g. vertex:0");
        }
        return VertexIndex{static_cast<std::size_t>(parse_u64(arg, "vertex index"))};
    }
    if (head == "random") {
        return RandomSeeded{arg.empty() ? 0 : parse_u64(arg, "random seed")};
    }
    if (!arg.empty()) {
        throw ConfigError("strategy '" + std::string(head) + "' takes no argument");
    }
    if (head == "centroid") {
        return Centroid{};
    }
    if (head == "sliding") {
        return SlidingAware{};
    }
    throw ConfigError("unknown selection strategy '" + std::string(text) +
                      "' (expected vertex:<j>, centroid, random[:<seed>] or sliding)");
}

SelectionStrategy with_seed(const SelectionStrategy& s, std::uint64_t seed)
{
    if (std::holds_alternative<RandomSeeded>(s)) {
        return RandomSeeded{seed};
    }
    return s;
}

std::vector<SelectionStrategy> default_strategy_cycle()
{
    std::vector<SelectionStrategy> cycle{VertexIndex{0}, VertexIndex{1}, SlidingAware{}};
    cycle.insert(cycle.end(), 7, RandomSeeded{0});
    return cycle;
}

Selector::Selector(SelectionStrategy strategy) : strategy_(strategy)
{
    if (const auto* r = std::get_if<RandomSeeded>(&strategy_)) {
        rng_.seed(r->seed);
    }
}

Vector Selector::select(const SetValuedMap& f, const Vector& x, const ConvexSet& value)
{
    if (value.size() == 1) {
        return value.vertex(0);
    }
    return std::visit(Overloaded{
                          [&](const VertexIndex& v) { return value.vertex(v.index % value.size()); },
                          [&](const Centroid&) { return value.centroid(); },
                          [&](const RandomSeeded&) {
                              auto it = weights_.find(value.size());
                              if (it == weights_.end()) {
                                  it = weights_.emplace(value.size(), simplex_weights(value.size(), rng_)).first;
                              }
                              return mixture(value, it->second);
                          },
                          [&](const SlidingAware&) {
                              if (auto v = f.sliding_velocity(x)) {
                                  return *std::move(v);
                              }
                              return value.centroid();
                          },
                      },
                      strategy_);
}

StepPlan StepPlan::fixed(int k, double horizon, double m)
{
    if (k < 1) {
        throw ContractViolation("StepPlan: k must be positive");
    }
    if (!(horizon > 0.0) || !std::isfinite(horizon)) {
        throw ContractViolation("StepPlan: horizon must be positive and finite");
    }
    if (!(m >= 0.0) || !std::isfinite(m)) {
        throw ContractViolation("StepPlan: bound m must be finite and non-negative");
    }
    return StepPlan{k, horizon, horizon / k, horizon * m, m};
}

StepPlan StepPlan::from_radius(int k, double r, double m)
{
    if (!(r > 0.0) || !(m > 0.0)) {
        throw ContractViolation("StepPlan::from_radius: r and m must be positive");
    }
    const double c = r / m;
    StepPlan plan = fixed(k, c, m);
    plan.r = r;
    return plan;
}

Trajectory euler_delta_solution(const SetValuedMap& f, const Vector& x0, const StepPlan& plan, Selector& selector,
                                const Box& domain, double t0)
{
    require_same_dim(domain.lo(), x0, "euler_delta_solution");
    const double tol = domain_tolerance(domain);
    if (!domain.contains(x0, tol)) {
        throw ContractViolation("euler_delta_solution: x0 = " + to_string(x0) + " is outside the domain");
    }
    const auto k = static_cast<std::size_t>(plan.k);
    Trajectory traj;
    traj.times.reserve(k + 1);
    traj.states.reserve(k + 1);
    traj.velocities.reserve(k);
    traj.times.push_back(t0);
    traj.states.push_back(x0);
    traj.delta = plan.h * (1.0 + plan.m);
    traj.step_bound = plan.h;

    for (std::size_t i = 0; i < k; ++i) {
        const Vector& x = traj.states.back();
        const double t = traj.times.back();
        Vector v = selector.select(f, x, f.evaluate(x));
        const double t_next = t0 + static_cast<double>(i + 1) * plan.h;
        Vector next = x + (t_next - t) * v;
        if (!next.all_finite()) {
            throw SolverError("non-finite state after step " + std::to_string(i) + " from x = " + to_string(x));
        }
        if (domain.contains(next, tol)) {
            traj.times.push_back(t_next);
            traj.states.push_back(std::move(next));
            traj.velocities.push_back(std::move(v));
            continue;
        }

        ExitInfo exit;
        double theta = 1.0;
        for (std::size_t d = 0; d < next.dim(); ++d) {
            const double step = next[d] - x[d];
            if (next[d] > domain.hi()[d] + tol && step != 0.0) {
                const double th = (domain.hi()[d] - x[d]) / step;
                if (th < theta) {
                    theta = th;
                    exit.axis = d;
                    exit.upper = true;
                }
            } else if (next[d] < domain.lo()[d] - tol && step != 0.0) {
                const double th = (domain.lo()[d] - x[d]) / step;
                if (th < theta) {
                    theta = th;
                    exit.axis = d;
                    exit.upper = false;
                }
            }
        }
        theta = std::clamp(theta, 0.0, 1.0);
        const double t_exit = t + theta * (t_next - t);
        exit.time = t_exit;
        traj.states.push_back(domain.clamp(x + (t_exit - t) * v));
        traj.times.push_back(t_exit);
        traj.velocities.push_back(std::move(v));
        traj.exit = exit;
        break;
    }
    return traj;
}

Trajectory euler_delta_solution(const SetValuedMap& f, const Vector& x0, const StepPlan& plan,
                                const SelectionStrategy& strategy, const Box& domain, double t0)
{
    Selector selector(strategy);
    return euler_delta_solution(f, x0, plan, selector, domain, t0);
}

std::vector<int> default_k_schedule()
{
    std::vector<int> ks;
    for (int j = 0; j <= 6; ++j) {
        ks.push_back(100 << j);
    }
    return ks;
}

RefineResult refine(const SetValuedMap& f, const Vector& x0, double horizon, const SelectionStrategy& strategy,
                    const Box& domain, std::span<const int> k_schedule, double tol, std::optional<double> bound)
{
    if (k_schedule.empty()) {
        throw ContractViolation("refine: empty k schedule");
    }
    for (std::size_t i = 1; i < k_schedule.size(); ++i) {
        if (k_schedule[i] <= k_schedule[i - 1]) {
            throw ContractViolation("refine: k schedule must be strictly increasing");
        }
    }
    const double m = bound ? *bound : safe_bound(f, domain);
    RefineResult result;
    std::optional<Trajectory> previous;
    for (int k : k_schedule) {
        Trajectory traj = euler_delta_solution(f, x0, StepPlan::fixed(k, horizon, m), strategy, domain);
        result.report.ks.push_back(k);
        if (previous) {
            const double d = sup_distance(*previous, traj);
            result.report.sup_distances.push_back(d);
            if (d <= tol && !result.report.converged) {
                result.report.converged = true;
                result.report.converged_at = k;
            }
        }
        previous = std::move(traj);
    }
    result.finest = std::move(*previous);
    return result;
}

Trajectory continue_to_boundary(const SetValuedMap& f, const Vector& x0, const Box& domain, int k_per_leg,
                                const SelectionStrategy& strategy, double t_max, std::optional<double> bound)
{
    if (!(domain.distance_to_boundary(x0) > 0.0)) {
        throw ContractViolation("continue_to_boundary: x0 = " + to_string(x0) + " is not strictly inside the domain");
    }
    if (!(t_max > 0.0)) {
        throw ContractViolation("continue_to_boundary: t_max must be positive");
    }
    const double m = bound ? *bound : safe_bound(f, domain);
    Selector selector(strategy);

    Trajectory out;
    out.times.push_back(0.0);
    out.states.push_back(x0);
    int short_legs = 0;
    for (;;) {
        const Vector x = out.states.back();
        const double t = out.times.back();
        const double r = domain.distance_to_boundary(x);
        if (r <= kBoundarySnap) {
            ExitInfo exit;
            exit.time = t;
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t d = 0; d < x.dim(); ++d) {
                if (x[d] - domain.lo()[d] < best) {
                    best = x[d] - domain.lo()[d];
                    exit.axis = d;
                    exit.upper = false;
                }
                if (domain.hi()[d] - x[d] < best) {
                    best = domain.hi()[d] - x[d];
                    exit.axis = d;
                    exit.upper = true;
                }
            }
            out.exit = exit;
            break;
        }
        const double remaining = t_max - t;
        if (remaining <= 0.0) {
            break;
        }
        const bool last = m <= 0.0 || r / m >= remaining;
        const double c = last ? remaining : r / m;
        StepPlan plan = StepPlan::fixed(k_per_leg, c, m);
        plan.r = r;

        Trajectory leg = euler_delta_solution(f, x, plan, selector, domain, t);
        out.delta = std::max(out.delta, leg.delta);
        out.step_bound = std::max(out.step_bound, leg.step_bound);
        out.times.insert(out.times.end(), leg.times.begin() + 1, leg.times.end());
        out.states.insert(out.states.end(), leg.states.begin() + 1, leg.states.end());
        out.velocities.insert(out.velocities.end(), leg.velocities.begin(), leg.velocities.end());
        if (leg.exit) {
            out.exit = leg.exit;
            break;
        }
        if (last) {
            break;
        }
        if (leg.final_time() - t < kStagnationTime) {
            if (++short_legs >= kStagnationLegs) {
                throw SolverError("continuation stagnated near x = " + to_string(leg.final_state()) +
                                  " (speed bound m = " + std::to_string(m) + " may be underestimated)");
            }
        } else {
            short_legs = 0;
        }
    }
    return out;
}

DeltaSolutionReport verify_delta_solution(const Trajectory& traj, const SetValuedMap& f, std::size_t report_worst)
{
    DeltaSolutionReport report;
    report.intervals = traj.velocities.size();
    report.passed.resize(report.intervals);
    std::vector<IntervalResidual> residuals;
    residuals.reserve(report.intervals);
    const Box& dom = f.domain();
    for (std::size_t i = 0; i < report.intervals; ++i) {
        const Vector& a = traj.states[i];
        const Vector& b = traj.states[i + 1];
        const Vector mid = 0.5 * (a + b);
        std::vector<Vector> verts;
        for (const Vector* y : {&a, &mid, &b}) {
            const ConvexSet fy = f.evaluate(dom.clamp(*y));
            verts.insert(verts.end(), fy.vertices().begin(), fy.vertices().end());
        }
        const ConvexSet inflated = inflate(ConvexSet(std::move(verts)), traj.delta);
        const double residual = distance_to_hull(inflated, traj.velocities[i]);
        report.passed[i] = residual <= kResidualTol;
        if (!report.passed[i]) {
            ++report.failures;
        }
        residuals.push_back({i, residual});
    }
    const std::size_t keep = std::min(report_worst, residuals.size());
    std::partial_sort(residuals.begin(), residuals.begin() + static_cast<std::ptrdiff_t>(keep), residuals.end(),
                      [](const IntervalResidual& x, const IntervalResidual& y) { return x.residual > y.residual; });
    report.worst.assign(residuals.begin(), residuals.begin() + static_cast<std::ptrdiff_t>(keep));
    return report;
}

EquicontinuityReport equicontinuity_check(std::span<const Trajectory> trajs, double bound)
{
    EquicontinuityReport report;
    const double limit = bound + 1e-9;
    for (std::size_t n = 0; n < trajs.size(); ++n) {
        const Trajectory& tr = trajs[n];
        for (std::size_t i = 0; i < tr.size(); ++i) {
            const double* xi = tr.states[i].data();
            const std::size_t dim = tr.states[i].dim();
            for (std::size_t j = i + 1; j < tr.size(); ++j) {
                const double* xj = tr.states[j].data();
                double d2 = 0.0;
                for (std::size_t c = 0; c < dim; ++c) {
                    const double d = xi[c] - xj[c];
                    d2 += d * d;
                }
                const double dx = std::sqrt(d2);
                const double dt = std::abs(tr.times[j] - tr.times[i]);
                double ratio = 0.0;
                if (dt > 0.0) {
                    ratio = dx / dt;
                } else if (dx > 0.0) {
                    ratio = std::numeric_limits<double>::infinity();
                }
                report.max_ratio = std::max(report.max_ratio, ratio);
                if (ratio > limit) {
                    report.violations.push_back({n, i, j, ratio});
                }
            }
        }
    }
    return report;
}

std::vector<Trajectory> funnel(const SetValuedMap& f, const Vector& x0, const StepPlan& plan,
                               std::span<const SelectionStrategy> strategies, std::size_t n_runs,
                               std::uint64_t seed, const Box& domain, unsigned threads)
{
    if (strategies.empty()) {
        throw ContractViolation("funnel: no strategies given");
    }
    std::vector<Trajectory> runs(n_runs);
    parallel_for(n_runs, threads, [&](std::size_t r) {
        const SelectionStrategy s = with_seed(strategies[r % strategies.size()], derive_seed(seed, 0, r));
        runs[r] = euler_delta_solution(f, x0, plan, s, domain);
    });
    return runs;
}

} // namespace dincl
