#ifndef DINCL_CONVEX_SET_HPP
#define DINCL_CONVEX_SET_HPP

#include <cstddef>
#include <vector>

#include "dincl/vector.hpp"

namespace dincl {

/// Vertices closer than this (max-norm) are merged during canonicalization.
inline constexpr double kVertexMergeTol = 1e-12;

/// A nonempty convex polytope stored as the convex hull of finitely many vertices.
///
/// Vertices are canonicalized on construction: near-duplicates are merged and
/// the list is sorted lexicographically. In one and two dimensions the list is
/// further reduced to the extreme points, so equal hulls compare equal there.
class ConvexSet {
public:
    explicit ConvexSet(std::vector<Vector> vertices);
    static ConvexSet singleton(Vector v);

    std::size_t dim() const noexcept { return vertices_.front().dim(); }
    std::size_t size() const noexcept { return vertices_.size(); }
    const std::vector<Vector>& vertices() const noexcept { return vertices_; }
    const Vector& vertex(std::size_t i) const { return vertices_[i]; }

    /// Arithmetic mean of the vertices (a point of the hull).
    Vector centroid() const;
    /// Largest Euclidean vertex norm, i.e. sup |v| over the hull.
    double max_norm() const noexcept;

    friend bool operator==(const ConvexSet&, const ConvexSet&) = default;

private:
    std::vector<Vector> vertices_;
};

/// Euclidean distance from v to hull(C). Exact up to rounding in dimensions 1
/// and 2; Wolfe's minimum-norm-point iteration above that.
double distance_to_hull(const ConvexSet& c, const Vector& v);

/// True iff distance_to_hull(c, v) <= tol.
bool hull_contains(const ConvexSet& c, const Vector& v, double tol);

/// Symmetric Hausdorff distance between two hulls. For polytopes the
/// supremum over each set is attained at a vertex.
double hausdorff_distance(const ConvexSet& a, const ConvexSet& b);

/// Outer polytopal approximation of hull(c) + closed ball(delta).
///
/// 1-D is exact. 2-D uses the regular `facets`-gon circumscribing the disk.
/// Higher dimensions use the circumscribed cube (facets is only validated).
ConvexSet inflate(const ConvexSet& c, double delta, int facets = 16);

/// Relative radius excess of the ball approximation used by inflate:
/// hull(inflate(c, d)) is inside hull(c) + ball(d * (1 + overshoot)).
double inflation_overshoot(std::size_t dim, int facets);

} // namespace dincl

#endif // DINCL_CONVEX_SET_HPP
