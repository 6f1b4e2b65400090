#ifndef DINCL_VECTOR_HPP
#define DINCL_VECTOR_HPP

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace dincl {

/// A point or velocity in R^n.
///
/// Constructors taking user data reject NaN/Inf. Arithmetic results are not
/// re-checked; call all_finite() where a computed value crosses an API boundary.
class Vector {
public:
    Vector() = default;
    explicit Vector(std::size_t dim, double fill = 0.0);
    Vector(std::initializer_list<double> coords);
    explicit Vector(std::vector<double> coords);
    explicit Vector(std::span<const double> coords);

    std::size_t dim() const noexcept { return coords_.size(); }
    double operator[](std::size_t i) const { return coords_[i]; }
    std::span<const double> coords() const noexcept { return coords_; }
    const double* data() const noexcept { return coords_.data(); }

    bool all_finite() const noexcept;

    double norm() const noexcept;
    double norm_inf() const noexcept;
    double dot(const Vector& other) const;

    Vector& operator+=(const Vector& other);
    Vector& operator-=(const Vector& other);
    Vector& operator*=(double s) noexcept;

    /// Mutable access for builders; the library never mutates a Vector it has handed out.
    double& at_mut(std::size_t i) { return coords_[i]; }

    friend bool operator==(const Vector&, const Vector&) = default;
    friend auto operator<=>(const Vector&, const Vector&) = default;

private:
    std::vector<double> coords_;
};

Vector operator+(Vector a, const Vector& b);
Vector operator-(Vector a, const Vector& b);
Vector operator*(double s, Vector v);
Vector operator*(Vector v, double s);

double distance(const Vector& a, const Vector& b);
double distance_inf(const Vector& a, const Vector& b);

std::string to_string(const Vector& v);

/// Throws ContractViolation unless both operands have the same dimension.
void require_same_dim(const Vector& a, const Vector& b, const char* what);

/// Axis-aligned closed box [lo, hi].
class Box {
public:
    Box() = default;
    Box(Vector lo, Vector hi);

    std::size_t dim() const noexcept { return lo_.dim(); }
    const Vector& lo() const noexcept { return lo_; }
    const Vector& hi() const noexcept { return hi_; }

    bool contains(const Vector& x, double tol = 0.0) const;
    Vector clamp(const Vector& x) const;
    Vector center() const;
    /// All 2^dim corners, axis 0 varying fastest.
    std::vector<Vector> corners() const;
    /// Smallest distance from x to any face; negative when x lies outside.
    double distance_to_boundary(const Vector& x) const;
    /// True when `inner` lies inside this box.
    bool encloses(const Box& inner, double tol = 0.0) const;
    double extent(std::size_t axis) const { return hi_[axis] - lo_[axis]; }

    friend bool operator==(const Box&, const Box&) = default;

private:
    Vector lo_;
    Vector hi_;
};

std::string to_string(const Box& b);

} // namespace dincl

#endif // DINCL_VECTOR_HPP
