#include "dincl/multiflow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dincl/errors.hpp"
#include "dincl/parallel.hpp"
#include "dincl/sampling.hpp"

namespace dincl {

namespace {

constexpr double kTimeMatchTol = 1e-12;

// Pair (a, b) of `rel` as a point of K x K, stored flat.
void pair_point(const Grid& g, CellPair p, std::vector<double>& out)
{
    out.clear();
    for (CellIndex c : {p.first, p.second}) {
        const Vector x = g.point(c);
        out.insert(out.end(), x.coords().begin(), x.coords().end());
    }
}

double flat_distance_inf(std::span<const double> a, std::span<const double> b)
{
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        d = std::max(d, std::abs(a[i] - b[i]));
    }
    return d;
}

// Nearest-pair search over the lattice of `to`, in expanding max-norm shells
// around the node pair closest to `p`. Falls back to a scan of all pairs once
// the shells would visit more candidates than the relation holds.
class NearestPair {
public:
    explicit NearestPair(const Relation& to) : to_(to), dims_(2 * to.grid().dim())
    {
        flat_.reserve(to.size() * dims_);
        std::vector<double> buf;
        for (const CellPair& p : to.pairs()) {
            pair_point(to.grid(), p, buf);
            flat_.insert(flat_.end(), buf.begin(), buf.end());
        }
        min_spacing_ = std::numeric_limits<double>::infinity();
        for (std::size_t d = 0; d < to.grid().dim(); ++d) {
            const auto n = to.grid().counts()[d];
            const double spacing = n > 1 ? to.grid().box().extent(d) / static_cast<double>(n - 1)
                                         : std::numeric_limits<double>::infinity();
            min_spacing_ = std::min(min_spacing_, spacing);
        }
        for (std::size_t d = 0; d < dims_; ++d) {
            max_radius_ = std::max(max_radius_, to.grid().counts()[d % to.grid().dim()]);
        }
    }

    double distance(std::span<const double> p, bool inside_box) const
    {
        if (to_.empty()) {
            return std::numeric_limits<double>::infinity();
        }
        if (!inside_box || !std::isfinite(min_spacing_)) {
            return scan(p);
        }
        const Grid& g = to_.grid();
        const std::size_t n = g.dim();
        std::vector<long> center(dims_);
        for (std::size_t d = 0; d < dims_; ++d) {
            center[d] = static_cast<long>(g.snap_axis(d % n, p[d]));
        }
        double best = std::numeric_limits<double>::infinity();
        std::size_t visited = 0;
        std::vector<long> offset(dims_);
        std::vector<std::size_t> multi(n);
        std::vector<double> q(dims_);
        for (std::size_t r = 0; r <= max_radius_; ++r) {
            const double shell = std::pow(2.0 * static_cast<double>(r) + 1.0, static_cast<double>(dims_));
            if (static_cast<double>(visited) + shell > 4.0 * static_cast<double>(to_.size()) + 64.0) {
                return std::min(best, scan(p));
            }
            const long rr = static_cast<long>(r);
            std::fill(offset.begin(), offset.end(), -rr);
            for (;;) {
                long chebyshev = 0;
                for (long o : offset) {
                    chebyshev = std::max(chebyshev, std::abs(o));
                }
                if (chebyshev == rr) {
                    ++visited;
                    probe(center, offset, multi, q, p, best);
                }
                std::size_t d = 0;
                while (d < dims_ && offset[d] == rr) {
                    offset[d] = -rr;
                    ++d;
                }
                if (d == dims_) {
                    break;
                }
                ++offset[d];
            }
            if (best <= (static_cast<double>(r) + 0.5) * min_spacing_) {
                return best;
            }
        }
        return best;
    }

private:
    void probe(const std::vector<long>& center, const std::vector<long>& offset, std::vector<std::size_t>& multi,
               std::vector<double>& q, std::span<const double> p, double& best) const
    {
        const Grid& g = to_.grid();
        const std::size_t n = g.dim();
        CellIndex cells[2] = {0, 0};
        for (std::size_t half = 0; half < 2; ++half) {
            for (std::size_t d = 0; d < n; ++d) {
                const long idx = center[half * n + d] + offset[half * n + d];
                if (idx < 0 || idx >= static_cast<long>(g.counts()[d])) {
                    return;
                }
                multi[d] = static_cast<std::size_t>(idx);
            }
            cells[half] = static_cast<CellIndex>(g.linear_index(multi));
        }
        if (!to_.contains({cells[0], cells[1]})) {
            return;
        }
        for (std::size_t half = 0; half < 2; ++half) {
            const Vector x = g.point(cells[half]);
            std::copy(x.coords().begin(), x.coords().end(), q.begin() + static_cast<std::ptrdiff_t>(half * n));
        }
        best = std::min(best, flat_distance_inf(p, q));
    }

    double scan(std::span<const double> p) const
    {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < to_.size(); ++i) {
            best = std::min(best, flat_distance_inf(p, std::span<const double>(flat_.data() + i * dims_, dims_)));
        }
        return best;
    }

    const Relation& to_;
    std::size_t dims_;
    std::vector<double> flat_;
    double min_spacing_ = 0.0;
    std::size_t max_radius_ = 0;
};

std::vector<double> normalize_times(std::vector<double> times)
{
    for (double t : times) {
        if (!(t >= 0.0) || !std::isfinite(t)) {
            throw ContractViolation("times must be finite and non-negative");
        }
    }
    times.push_back(0.0);
    std::sort(times.begin(), times.end());
    std::vector<double> out;
    for (double t : times) {
        if (out.empty() || t - out.back() > kTimeMatchTol) {
            out.push_back(t);
        }
    }
    return out;
}

} // namespace

Grid::Grid(Box box, std::vector<double> pitch) : box_(std::move(box)), pitch_(std::move(pitch))
{
    if (pitch_.size() != box_.dim()) {
        throw ContractViolation("Grid: expected " + std::to_string(box_.dim()) + " pitch values");
    }
    counts_.resize(box_.dim());
    double total = 1.0;
    for (std::size_t d = 0; d < box_.dim(); ++d) {
        if (!(pitch_[d] > 0.0) || !std::isfinite(pitch_[d])) {
            throw ContractViolation("Grid: pitch must be positive");
        }
        const double cells = box_.extent(d) / pitch_[d];
        const double rounded = std::round(cells);
        if (std::abs(cells - rounded) > 1e-9 * std::max(1.0, cells)) {
            throw ContractViolation("Grid: extent " + std::to_string(box_.extent(d)) + " of axis " +
                                    std::to_string(d + 1) + " is not a multiple of pitch " +
                                    std::to_string(pitch_[d]));
        }
        counts_[d] = static_cast<std::size_t>(rounded) + 1;
        total *= static_cast<double>(counts_[d]);
    }
    if (total > static_cast<double>(std::numeric_limits<CellIndex>::max())) {
        throw ContractViolation("Grid: too many nodes");
    }
    size_ = static_cast<std::size_t>(total);
}

Grid::Grid(Box box, double pitch) : Grid(box, std::vector<double>(box.dim(), pitch)) {}

std::vector<std::size_t> Grid::multi_index(std::size_t index) const
{
    if (index >= size_) {
        throw ContractViolation("Grid: index " + std::to_string(index) + " out of range");
    }
    std::vector<std::size_t> m(dim());
    for (std::size_t d = 0; d < dim(); ++d) {
        m[d] = index % counts_[d];
        index /= counts_[d];
    }
    return m;
}

std::size_t Grid::linear_index(std::span<const std::size_t> multi) const
{
    std::size_t index = 0;
    std::size_t stride = 1;
    for (std::size_t d = 0; d < dim(); ++d) {
        index += multi[d] * stride;
        stride *= counts_[d];
    }
    return index;
}

Vector Grid::point(std::size_t index) const
{
    const std::vector<std::size_t> m = multi_index(index);
    std::vector<double> x(dim());
    for (std::size_t d = 0; d < dim(); ++d) {
        const std::size_t last = counts_[d] - 1;
        if (last == 0 || m[d] == 0) {
            x[d] = box_.lo()[d];
        } else if (m[d] == last) {
            x[d] = box_.hi()[d];
        } else {
            x[d] = box_.lo()[d] + box_.extent(d) * (static_cast<double>(m[d]) / static_cast<double>(last));
        }
    }
    return Vector(std::move(x));
}

std::size_t Grid::snap_axis(std::size_t axis, double coord) const
{
    const std::size_t last = counts_[axis] - 1;
    if (last == 0) {
        return 0;
    }
    const double u = (coord - box_.lo()[axis]) / box_.extent(axis) * static_cast<double>(last);
    const double r = std::round(u);
    if (r <= 0.0) {
        return 0;
    }
    return std::min(static_cast<std::size_t>(r), last);
}

std::size_t Grid::snap(const Vector& x) const
{
    require_same_dim(box_.lo(), x, "Grid::snap");
    std::vector<std::size_t> m(dim());
    for (std::size_t d = 0; d < dim(); ++d) {
        m[d] = snap_axis(d, x[d]);
    }
    return linear_index(m);
}

Relation::Relation(Grid grid, double t, std::vector<CellPair> pairs)
    : grid_(std::move(grid)), t_(t), pairs_(std::move(pairs))
{
    for (const CellPair& p : pairs_) {
        if (p.first >= grid_.size() || p.second >= grid_.size()) {
            throw ContractViolation("Relation: pair (" + std::to_string(p.first) + ", " + std::to_string(p.second) +
                                    ") outside grid of " + std::to_string(grid_.size()) + " nodes");
        }
    }
    std::sort(pairs_.begin(), pairs_.end());
    pairs_.erase(std::unique(pairs_.begin(), pairs_.end()), pairs_.end());
}

bool Relation::contains(CellPair p) const
{
    return std::binary_search(pairs_.begin(), pairs_.end(), p);
}

std::vector<CellIndex> Relation::image(CellIndex a) const
{
    std::vector<CellIndex> out;
    auto it = std::lower_bound(pairs_.begin(), pairs_.end(), CellPair{a, 0});
    for (; it != pairs_.end() && it->first == a; ++it) {
        out.push_back(it->second);
    }
    return out;
}

Relation identity_relation(const Grid& grid)
{
    std::vector<CellPair> pairs(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        pairs[i] = {static_cast<CellIndex>(i), static_cast<CellIndex>(i)};
    }
    return Relation(grid, 0.0, std::move(pairs));
}

Relation compose(const Relation& r_t, const Relation& r_s)
{
    if (!(r_t.grid() == r_s.grid())) {
        throw ContractViolation("compose: relations live on different grids");
    }
    const auto& second = r_t.pairs();
    std::vector<CellPair> out;
    for (const auto& [x, y] : r_s.pairs()) {
        auto it = std::lower_bound(second.begin(), second.end(), CellPair{y, 0});
        for (; it != second.end() && it->first == y; ++it) {
            out.emplace_back(x, it->second);
        }
    }
    return Relation(r_t.grid(), r_t.t() + r_s.t(), std::move(out));
}

const Relation& MultiflowApprox::at(double t) const
{
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (std::abs(times[i] - t) <= kTimeMatchTol) {
            return relations[i];
        }
    }
    throw ContractViolation("MultiflowApprox: no relation for t = " + std::to_string(t));
}

MultiflowApprox build_multiflow(const SetValuedMap& f, const Grid& grid, std::vector<double> times,
                                const ReachParams& params)
{
    if (params.budget < 1) {
        throw ContractViolation("build_multiflow: budget must be at least 1");
    }
    if (params.strategies.empty()) {
        throw ContractViolation("build_multiflow: no selection strategies");
    }
    if (!f.domain().encloses(grid.box(), 1e-12)) {
        throw ContractViolation("build_multiflow: K = " + to_string(grid.box()) + " is not inside the domain " +
                                to_string(f.domain()));
    }
    times = normalize_times(std::move(times));
    const double horizon = times.back();
    const double m = params.bound ? *params.bound : safe_bound(f, grid.box());

    MultiflowApprox approx{grid, times, {}, {}};
    approx.provenance.k = params.k;
    approx.provenance.m = m;
    approx.provenance.budget = params.budget;
    approx.provenance.seed = params.seed;
    for (const SelectionStrategy& s : params.strategies) {
        approx.provenance.strategies.push_back(to_string(s));
    }
    if (horizon == 0.0) {
        approx.relations.push_back(identity_relation(grid));
        return approx;
    }
    const StepPlan plan = StepPlan::fixed(params.k, horizon, m);
    approx.provenance.h = plan.h;
    approx.provenance.delta = plan.h * (1.0 + m);
    const double slack = 1e-9 * plan.h;

    // ends[a][i]: end cells reached from node a at times[i].
    std::vector<std::vector<std::vector<CellIndex>>> ends(grid.size());
    parallel_for(grid.size(), params.threads, [&](std::size_t a) {
        auto& mine = ends[a];
        mine.assign(times.size(), {});
        mine[0].push_back(static_cast<CellIndex>(a));
        const Vector x0 = grid.point(a);
        for (std::size_t run = 0; run < params.budget; ++run) {
            const SelectionStrategy s = with_seed(params.strategies[run % params.strategies.size()],
                                                  derive_seed(params.seed, a, run));
            const Trajectory traj = euler_delta_solution(f, x0, plan, s, grid.box());
            const double reached = traj.exit ? traj.exit->time : traj.final_time();
            for (std::size_t i = 1; i < times.size(); ++i) {
                if (times[i] <= reached + slack) {
                    mine[i].push_back(static_cast<CellIndex>(grid.snap(traj.at(times[i]))));
                }
            }
        }
        for (auto& cells : mine) {
            std::sort(cells.begin(), cells.end());
            cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
        }
    });

    for (std::size_t i = 0; i < times.size(); ++i) {
        std::vector<CellPair> pairs;
        for (std::size_t a = 0; a < grid.size(); ++a) {
            for (CellIndex b : ends[a][i]) {
                pairs.emplace_back(static_cast<CellIndex>(a), b);
            }
        }
        approx.relations.emplace_back(grid, times[i], std::move(pairs));
    }
    return approx;
}

Relation reach_relation(const SetValuedMap& f, const Grid& grid, double t, const ReachParams& params)
{
    if (t == 0.0) {
        return identity_relation(grid);
    }
    MultiflowApprox approx = build_multiflow(f, grid, {t}, params);
    return approx.at(t);
}

double directed_distance(const Relation& from, const Relation& to)
{
    if (from.grid().dim() != to.grid().dim()) {
        throw ContractViolation("directed_distance: relations have different dimensions");
    }
    if (from.empty()) {
        return 0.0;
    }
    const bool same_grid = from.grid() == to.grid();
    const bool same_box = from.grid().box() == to.grid().box();
    const NearestPair nearest(to);
    double worst = 0.0;
    std::vector<double> p;
    for (const CellPair& pair : from.pairs()) {
        if (same_grid && to.contains(pair)) {
            continue;
        }
        pair_point(from.grid(), pair, p);
        worst = std::max(worst, nearest.distance(p, same_box));
        if (std::isinf(worst)) {
            break;
        }
    }
    return worst;
}

double relation_distance(const Relation& a, const Relation& b)
{
    return std::max(directed_distance(a, b), directed_distance(b, a));
}

MonoidDefect monoid_defect(const SetValuedMap& f, const Grid& grid, double t, double s, const ReachParams& params)
{
    if (!(t >= 0.0) || !(s >= 0.0)) {
        throw ContractViolation("monoid_defect: t and s must be non-negative");
    }
    MultiflowApprox approx = build_multiflow(f, grid, {t, s, t + s}, params);
    Relation composed = compose(approx.at(t), approx.at(s));
    const Relation& whole = approx.at(t + s);
    const double fwd = directed_distance(composed, whole);
    const double bwd = directed_distance(whole, composed);
    return MonoidDefect{fwd, bwd, std::move(composed), std::move(approx)};
}

ClosureReport closure_defect(std::span<const MultiflowApprox> levels)
{
    if (levels.size() < 2) {
        throw ContractViolation("closure_defect: need at least two refinement levels");
    }
    const auto& times = levels.front().times;
    for (const MultiflowApprox& level : levels) {
        if (level.times.size() != times.size()) {
            throw ContractViolation("closure_defect: levels have different time lists");
        }
        for (std::size_t i = 0; i < times.size(); ++i) {
            if (std::abs(level.times[i] - times[i]) > kTimeMatchTol) {
                throw ContractViolation("closure_defect: levels have different time lists");
            }
        }
    }
    ClosureReport report;
    report.times = times;
    for (std::size_t i = 0; i < times.size(); ++i) {
        std::vector<double> row;
        for (std::size_t l = 0; l + 1 < levels.size(); ++l) {
            row.push_back(relation_distance(levels[l].relations[i], levels[l + 1].relations[i]));
        }
        for (std::size_t l = 1; l < row.size(); ++l) {
            if (!(row[l] < row[l - 1])) {
                report.flagged_times.push_back(times[i]);
                break;
            }
        }
        report.distances.push_back(std::move(row));
    }
    return report;
}

} // namespace dincl
