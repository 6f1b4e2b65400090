#include "dincl/filippov.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "dincl/errors.hpp"
#include "dincl/sampling.hpp"

namespace dincl {

namespace {

constexpr std::size_t kMaxSwitchingFunctions = 16;

} // namespace

SwitchingFunction SwitchingFunction::from_expression(const Expression& expr, std::vector<Expression> gradient)
{
    SwitchingFunction s;
    s.value = expr;
    s.label = expr.source();
    for (Expression& g : gradient) {
        s.gradient.emplace_back(std::move(g));
    }
    return s;
}

Vector SwitchingFunction::gradient_at(const Vector& x) const
{
    std::vector<double> g(x.dim());
    if (!gradient.empty()) {
        if (gradient.size() != x.dim()) {
            throw ContractViolation("switching function '" + label + "': gradient has wrong dimension");
        }
        for (std::size_t i = 0; i < g.size(); ++i) {
            g[i] = gradient[i](x.coords());
        }
    } else {
        std::vector<double> probe(x.coords().begin(), x.coords().end());
        for (std::size_t i = 0; i < g.size(); ++i) {
            const double saved = probe[i];
            probe[i] = saved + kGradientStep;
            const double up = value(probe);
            probe[i] = saved - kGradientStep;
            const double down = value(probe);
            probe[i] = saved;
            g[i] = (up - down) / (2.0 * kGradientStep);
        }
    }
    Vector out(std::span<const double>(g.data(), g.size()));
    return out;
}

char sign_char(Sign s)
{
    switch (s) {
    case Sign::Minus:
        return '-';
    case Sign::Plus:
        return '+';
    case Sign::Any:
        return '*';
    }
    return '?';
}

Sign parse_sign(char c)
{
    switch (c) {
    case '-':
        return Sign::Minus;
    case '+':
        return Sign::Plus;
    case '*':
        return Sign::Any;
    default:
        throw ConfigError(std::string("invalid sign '") + c + "' (expected '+', '-' or '*')");
    }
}

Region Region::from_expressions(int id, std::vector<Sign> signs, const std::vector<Expression>& field)
{
    Region r;
    r.id = id;
    r.signs = std::move(signs);
    for (const Expression& e : field) {
        r.field.emplace_back(e);
        r.field_labels.push_back(e.source());
    }
    return r;
}

FilippovSystem::FilippovSystem(std::vector<SwitchingFunction> switching, std::vector<Region> regions,
                               double boundary_tol, Box domain, std::size_t coverage_samples, std::uint64_t seed)
    : switching_(std::move(switching)),
      regions_(std::move(regions)),
      boundary_tol_(boundary_tol),
      domain_(std::move(domain))
{
    if (!(boundary_tol_ > 0.0)) {
        throw ConfigError("boundary_tol must be positive");
    }
    if (regions_.empty()) {
        throw ConfigError("a Filippov system needs at least one region");
    }
    if (switching_.size() > kMaxSwitchingFunctions) {
        throw ConfigError("at most " + std::to_string(kMaxSwitchingFunctions) + " switching functions are supported");
    }
    std::set<int> ids;
    for (const Region& r : regions_) {
        if (!ids.insert(r.id).second) {
            throw ConfigError("duplicate region id " + std::to_string(r.id));
        }
        if (r.signs.size() != switching_.size()) {
            throw ConfigError("region " + std::to_string(r.id) + ": expected " + std::to_string(switching_.size()) +
                              " signs, got " + std::to_string(r.signs.size()));
        }
        if (r.field.size() != domain_.dim()) {
            throw ConfigError("region " + std::to_string(r.id) + ": field has " + std::to_string(r.field.size()) +
                              " components, dimension is " + std::to_string(domain_.dim()));
        }
    }

    const std::uint32_t patterns = 1U << switching_.size();
    pattern_owner_.assign(patterns, -1);
    for (std::uint32_t p = 0; p < patterns; ++p) {
        for (std::size_t r = 0; r < regions_.size(); ++r) {
            bool match = true;
            for (std::size_t j = 0; j < switching_.size(); ++j) {
                const Sign want = (p >> j) & 1U ? Sign::Plus : Sign::Minus;
                if (regions_[r].signs[j] != Sign::Any && regions_[r].signs[j] != want) {
                    match = false;
                    break;
                }
            }
            if (!match) {
                continue;
            }
            if (pattern_owner_[p] >= 0) {
                throw ConfigError("sign pattern " + pattern_string(p) + " is claimed by regions " +
                                  std::to_string(regions_[static_cast<std::size_t>(pattern_owner_[p])].id) +
                                  " and " + std::to_string(regions_[r].id));
            }
            pattern_owner_[p] = static_cast<int>(r);
        }
    }

    // Gaps only matter where the pattern is reachable; classify() raises on them.
    for (const Vector& x : box_samples(domain_, coverage_samples, seed)) {
        classify(x);
    }
}

std::string FilippovSystem::pattern_string(std::uint32_t pattern) const
{
    std::string s;
    for (std::size_t j = 0; j < switching_.size(); ++j) {
        s += (pattern >> j) & 1U ? '+' : '-';
    }
    return "'" + s + "'";
}

int FilippovSystem::claimant(std::uint32_t pattern) const
{
    const int owner = pattern_owner_[pattern];
    if (owner < 0) {
        throw ConfigError("no region claims sign pattern " + pattern_string(pattern));
    }
    return owner;
}

double FilippovSystem::switching_value(std::size_t j, const Vector& x) const
{
    const double v = switching_.at(j).value(x.coords());
    if (!std::isfinite(v)) {
        throw EvaluationError("switching function '" + switching_[j].label + "' is not finite at x = " +
                              to_string(x));
    }
    return v;
}

Classification FilippovSystem::classify(const Vector& x) const
{
    require_same_dim(domain_.lo(), x, "FilippovSystem::classify");
    std::uint32_t definite = 0;
    std::uint32_t ambiguous = 0;
    for (std::size_t j = 0; j < switching_.size(); ++j) {
        const double v = switching_value(j, x);
        if (std::abs(v) <= boundary_tol_) {
            ambiguous |= 1U << j;
        } else if (v > 0.0) {
            definite |= 1U << j;
        }
    }
    if (ambiguous == 0) {
        return Interior{regions_[static_cast<std::size_t>(claimant(definite))].id};
    }
    std::vector<int> ids;
    // Enumerate every subset of the ambiguous bits.
    std::uint32_t sub = 0;
    do {
        const int owner = claimant(definite | sub);
        ids.push_back(regions_[static_cast<std::size_t>(owner)].id);
        sub = (sub - ambiguous) & ambiguous;
    } while (sub != 0);
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    return Boundary{std::move(ids)};
}

std::size_t FilippovSystem::region_index(int id) const
{
    for (std::size_t r = 0; r < regions_.size(); ++r) {
        if (regions_[r].id == id) {
            return r;
        }
    }
    throw ContractViolation("unknown region id " + std::to_string(id));
}

Vector FilippovSystem::field(int region_id, const Vector& x) const
{
    const Region& r = regions_[region_index(region_id)];
    std::vector<double> v(r.field.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        v[i] = r.field[i](x.coords());
        if (!std::isfinite(v[i])) {
            throw EvaluationError("region " + std::to_string(region_id) + ": field component " +
                                  std::to_string(i + 1) + " is not finite at x = " + to_string(x));
        }
    }
    return Vector(std::move(v));
}

ConvexSet FilippovSystem::evaluate(const Vector& x) const
{
    const Classification c = classify(x);
    if (const auto* in = std::get_if<Interior>(&c)) {
        return ConvexSet::singleton(field(in->region, x));
    }
    const auto& ids = std::get<Boundary>(c).regions;
    std::vector<Vector> verts;
    verts.reserve(ids.size());
    for (int id : ids) {
        verts.push_back(field(id, x));
    }
    return ConvexSet(std::move(verts));
}

std::optional<std::size_t> FilippovSystem::separating_function(const Region& minus, const Region& plus) const
{
    std::optional<std::size_t> found;
    for (std::size_t j = 0; j < switching_.size(); ++j) {
        if (minus.signs[j] == Sign::Minus && plus.signs[j] == Sign::Plus) {
            if (found) {
                return std::nullopt;
            }
            found = j;
        }
    }
    return found;
}

SlidingOutcome FilippovSystem::sliding_selection(const Vector& x, int minus_id, int plus_id) const
{
    SlidingOutcome out;
    const Classification c = classify(x);
    const auto* b = std::get_if<Boundary>(&c);
    if (b == nullptr || b->regions.size() != 2 ||
        !std::binary_search(b->regions.begin(), b->regions.end(), minus_id) ||
        !std::binary_search(b->regions.begin(), b->regions.end(), plus_id) || minus_id == plus_id) {
        return out;
    }
    const Region& minus = regions_[region_index(minus_id)];
    const Region& plus = regions_[region_index(plus_id)];
    const auto j = separating_function(minus, plus);
    if (!j || std::abs(switching_value(*j, x)) > boundary_tol_) {
        return out;
    }

    const Vector f_minus = field(minus_id, x);
    const Vector f_plus = field(plus_id, x);
    const Vector grad = switching_[*j].gradient_at(x);
    const double along_minus = grad.dot(f_minus);
    const double denom = grad.dot(f_plus) - along_minus;
    if (std::abs(denom) <= kSlidingDegeneracyTol) {
        // Zero denominator: no root unless the whole segment is tangent.
        out.status = std::abs(along_minus) <= kSlidingDegeneracyTol ? SlidingStatus::Degenerate
                                                                     : SlidingStatus::Crossing;
        return out;
    }
    double alpha = -along_minus / denom;
    if (alpha < -kSlidingDegeneracyTol || alpha > 1.0 + kSlidingDegeneracyTol) {
        out.status = SlidingStatus::Crossing;
        return out;
    }
    alpha = std::clamp(alpha, 0.0, 1.0);
    out.status = SlidingStatus::Sliding;
    out.alpha = alpha;
    out.velocity = alpha * f_plus + (1.0 - alpha) * f_minus;
    return out;
}

std::optional<Vector> FilippovSystem::sliding_velocity(const Vector& x) const
{
    const Classification c = classify(x);
    const auto* b = std::get_if<Boundary>(&c);
    if (b == nullptr || b->regions.size() != 2) {
        return std::nullopt;
    }
    const Region& r0 = regions_[region_index(b->regions[0])];
    const Region& r1 = regions_[region_index(b->regions[1])];
    SlidingOutcome s;
    if (separating_function(r0, r1)) {
        s = sliding_selection(x, r0.id, r1.id);
    } else if (separating_function(r1, r0)) {
        s = sliding_selection(x, r1.id, r0.id);
    }
    if (s.status == SlidingStatus::Sliding) {
        return s.velocity;
    }
    return std::nullopt;
}

} // namespace dincl
