#include "dincl/convex_set.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Dense>

#include "dincl/errors.hpp"

namespace dincl {

namespace {

double cross(const Vector& o, const Vector& a, const Vector& b)
{
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
}

// Andrew's monotone chain on lexicographically sorted, deduplicated points.
// Returns the extreme points in counter-clockwise order.
std::vector<Vector> hull_2d(const std::vector<Vector>& sorted)
{
    if (sorted.size() < 3) {
        return sorted;
    }
    std::vector<Vector> h(2 * sorted.size());
    std::size_t k = 0;
    for (const Vector& p : sorted) {
        while (k >= 2 && cross(h[k - 2], h[k - 1], p) <= 0.0) {
            --k;
        }
        h[k++] = p;
    }
    const std::size_t lower = k + 1;
    for (auto it = sorted.rbegin() + 1; it != sorted.rend(); ++it) {
        while (k >= lower && cross(h[k - 2], h[k - 1], *it) <= 0.0) {
            --k;
        }
        h[k++] = *it;
    }
    h.resize(k - 1);
    return h;
}

std::vector<Vector> canonicalize(std::vector<Vector> pts)
{
    std::sort(pts.begin(), pts.end());
    std::vector<Vector> unique;
    unique.reserve(pts.size());
    for (Vector& p : pts) {
        const bool dup = std::any_of(unique.begin(), unique.end(),
                                     [&](const Vector& q) { return distance_inf(p, q) <= kVertexMergeTol; });
        if (!dup) {
            unique.push_back(std::move(p));
        }
    }
    const std::size_t dim = unique.front().dim();
    if (dim == 1 && unique.size() > 2) {
        return {unique.front(), unique.back()};
    }
    if (dim == 2 && unique.size() > 2) {
        std::vector<Vector> h = hull_2d(unique);
        std::sort(h.begin(), h.end());
        return h;
    }
    return unique;
}

double segment_distance(const Vector& a, const Vector& b, const Vector& v)
{
    const Vector ab = b - a;
    const double len2 = ab.dot(ab);
    if (len2 == 0.0) {
        return distance(a, v);
    }
    const double s = std::clamp((v - a).dot(ab) / len2, 0.0, 1.0);
    return distance(a + s * ab, v);
}

double distance_2d(const std::vector<Vector>& sorted, const Vector& v)
{
    if (sorted.size() == 1) {
        return distance(sorted.front(), v);
    }
    if (sorted.size() == 2) {
        return segment_distance(sorted[0], sorted[1], v);
    }
    const std::vector<Vector> poly = hull_2d(sorted);
    if (poly.size() < 3) {
        return segment_distance(poly.front(), poly.back(), v);
    }
    bool inside = true;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const Vector& a = poly[i];
        const Vector& b = poly[(i + 1) % poly.size()];
        if (cross(a, b, v) < 0.0) {
            inside = false;
        }
        best = std::min(best, segment_distance(a, b, v));
    }
    return inside ? 0.0 : best;
}

// Wolfe's minimum-norm-point algorithm applied to the translated points p_i - v.
double distance_wolfe(const std::vector<Vector>& pts, const Vector& v)
{
    const std::size_t n = pts.size();
    const std::size_t dim = v.dim();
    Eigen::MatrixXd q(dim, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t d = 0; d < dim; ++d) {
            q(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(i)) = pts[i][d] - v[d];
        }
    }
    const double scale = std::max(1.0, q.colwise().squaredNorm().maxCoeff());
    constexpr double kTol = 1e-14;

    Eigen::Index start = 0;
    q.colwise().squaredNorm().minCoeff(&start);
    std::vector<Eigen::Index> corral{start};
    std::vector<double> lambda{1.0};
    Eigen::VectorXd x = q.col(start);

    for (int major = 0; major < 1000; ++major) {
        Eigen::Index j = 0;
        (x.transpose() * q).minCoeff(&j);
        if (x.squaredNorm() - x.dot(q.col(j)) <= kTol * scale) {
            break;
        }
        if (std::find(corral.begin(), corral.end(), j) != corral.end()) {
            break;
        }
        corral.push_back(j);
        lambda.push_back(0.0);

        for (int minor = 0; minor < 1000; ++minor) {
            const auto m = static_cast<Eigen::Index>(corral.size());
            Eigen::MatrixXd sys = Eigen::MatrixXd::Zero(m + 1, m + 1);
            for (Eigen::Index a = 0; a < m; ++a) {
                for (Eigen::Index b = 0; b < m; ++b) {
                    sys(a, b) = q.col(corral[a]).dot(q.col(corral[b]));
                }
                sys(a, m) = 1.0;
                sys(m, a) = 1.0;
            }
            Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m + 1);
            rhs(m) = 1.0;
            const Eigen::VectorXd sol = sys.fullPivLu().solve(rhs);
            const Eigen::VectorXd mu = sol.head(m);

            if ((mu.array() > kTol).all()) {
                for (Eigen::Index a = 0; a < m; ++a) {
                    lambda[static_cast<std::size_t>(a)] = mu(a);
                }
                break;
            }
            double theta = 1.0;
            for (Eigen::Index a = 0; a < m; ++a) {
                const double la = lambda[static_cast<std::size_t>(a)];
                if (mu(a) <= kTol && la - mu(a) > 0.0) {
                    theta = std::min(theta, la / (la - mu(a)));
                }
            }
            std::vector<Eigen::Index> next_corral;
            std::vector<double> next_lambda;
            for (Eigen::Index a = 0; a < m; ++a) {
                const double la = lambda[static_cast<std::size_t>(a)];
                const double updated = la + theta * (mu(a) - la);
                if (updated > kTol) {
                    next_corral.push_back(corral[static_cast<std::size_t>(a)]);
                    next_lambda.push_back(updated);
                }
            }
            if (next_corral.empty()) {
                next_corral.push_back(corral.back());
                next_lambda.push_back(1.0);
            }
            corral = std::move(next_corral);
            lambda = std::move(next_lambda);
        }
        double total = 0.0;
        for (double l : lambda) {
            total += l;
        }
        x.setZero(static_cast<Eigen::Index>(dim));
        for (std::size_t a = 0; a < corral.size(); ++a) {
            x += (lambda[a] / total) * q.col(corral[a]);
        }
    }
    return x.norm();
}

} // namespace

ConvexSet::ConvexSet(std::vector<Vector> vertices)
{
    if (vertices.empty()) {
        throw ContractViolation("ConvexSet: vertex list is empty");
    }
    const std::size_t dim = vertices.front().dim();
    if (dim == 0) {
        throw ContractViolation("ConvexSet: dimension must be positive");
    }
    for (const Vector& v : vertices) {
        require_same_dim(vertices.front(), v, "ConvexSet");
    }
    vertices_ = canonicalize(std::move(vertices));
}

ConvexSet ConvexSet::singleton(Vector v)
{
    std::vector<Vector> one;
    one.push_back(std::move(v));
    return ConvexSet(std::move(one));
}

Vector ConvexSet::centroid() const
{
    Vector sum(dim());
    for (const Vector& v : vertices_) {
        sum += v;
    }
    sum *= 1.0 / static_cast<double>(vertices_.size());
    return sum;
}

double ConvexSet::max_norm() const noexcept
{
    double m = 0.0;
    for (const Vector& v : vertices_) {
        m = std::max(m, v.norm());
    }
    return m;
}

double distance_to_hull(const ConvexSet& c, const Vector& v)
{
    if (c.dim() != v.dim()) {
        throw ContractViolation("distance_to_hull: dimension mismatch (" + std::to_string(c.dim()) + " vs " +
                                std::to_string(v.dim()) + ")");
    }
    const auto& verts = c.vertices();
    if (verts.size() == 1) {
        return distance(verts.front(), v);
    }
    if (c.dim() == 1) {
        const double lo = verts.front()[0];
        const double hi = verts.back()[0];
        return std::max({lo - v[0], v[0] - hi, 0.0});
    }
    if (c.dim() == 2) {
        return distance_2d(verts, v);
    }
    return distance_wolfe(verts, v);
}

bool hull_contains(const ConvexSet& c, const Vector& v, double tol)
{
    if (tol < 0.0) {
        throw ContractViolation("hull_contains: negative tolerance");
    }
    return distance_to_hull(c, v) <= tol;
}

double hausdorff_distance(const ConvexSet& a, const ConvexSet& b)
{
    if (a.dim() != b.dim()) {
        throw ContractViolation("hausdorff_distance: dimension mismatch");
    }
    double d = 0.0;
    for (const Vector& v : a.vertices()) {
        d = std::max(d, distance_to_hull(b, v));
    }
    for (const Vector& v : b.vertices()) {
        d = std::max(d, distance_to_hull(a, v));
    }
    return d;
}

double inflation_overshoot(std::size_t dim, int facets)
{
    if (dim <= 1) {
        return 0.0;
    }
    if (dim == 2) {
        return 1.0 / std::cos(std::numbers::pi / facets) - 1.0;
    }
    return std::sqrt(static_cast<double>(dim)) - 1.0;
}

ConvexSet inflate(const ConvexSet& c, double delta, int facets)
{
    if (!(delta >= 0.0) || !std::isfinite(delta)) {
        throw ContractViolation("inflate: delta must be a finite non-negative number");
    }
    if (facets < 4) {
        throw ContractViolation("inflate: facets must be at least 4");
    }
    if (delta == 0.0) {
        return c;
    }
    const std::size_t dim = c.dim();
    if (dim == 1) {
        return ConvexSet({Vector{c.vertices().front()[0] - delta}, Vector{c.vertices().back()[0] + delta}});
    }

    std::vector<Vector> ball;
    if (dim == 2) {
        const double radius = delta / std::cos(std::numbers::pi / facets);
        for (int j = 0; j < facets; ++j) {
            const double angle = std::numbers::pi / facets + 2.0 * std::numbers::pi * j / facets;
            ball.push_back(Vector{radius * std::cos(angle), radius * std::sin(angle)});
        }
    } else {
        Box cube(Vector(dim, -delta), Vector(dim, delta));
        ball = cube.corners();
    }

    std::vector<Vector> sum;
    sum.reserve(c.size() * ball.size());
    for (const Vector& p : c.vertices()) {
        for (const Vector& b : ball) {
            sum.push_back(p + b);
        }
    }
    return ConvexSet(std::move(sum));
}

} // namespace dincl
