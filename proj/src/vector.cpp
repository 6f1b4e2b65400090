#include "dincl/vector.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "dincl/errors.hpp"
#include "dincl/io/number_format.hpp"

namespace dincl {

namespace {

void require_finite(std::span<const double> coords)
{
    for (double c : coords) {
        if (!std::isfinite(c)) {
            throw ContractViolation("vector coordinate is not finite");
        }
    }
}

} // namespace

Vector::Vector(std::size_t dim, double fill) : coords_(dim, fill)
{
    require_finite(coords_);
}

Vector::Vector(std::initializer_list<double> coords) : coords_(coords)
{
    require_finite(coords_);
}

Vector::Vector(std::vector<double> coords) : coords_(std::move(coords))
{
    require_finite(coords_);
}

Vector::Vector(std::span<const double> coords) : coords_(coords.begin(), coords.end())
{
    require_finite(coords_);
}

bool Vector::all_finite() const noexcept
{
    return std::all_of(coords_.begin(), coords_.end(), [](double c) { return std::isfinite(c); });
}

double Vector::norm() const noexcept
{
    double s = 0.0;
    for (double c : coords_) {
        s += c * c;
    }
    return std::sqrt(s);
}

double Vector::norm_inf() const noexcept
{
    double m = 0.0;
    for (double c : coords_) {
        m = std::max(m, std::abs(c));
    }
    return m;
}

double Vector::dot(const Vector& other) const
{
    require_same_dim(*this, other, "dot");
    double s = 0.0;
    for (std::size_t i = 0; i < coords_.size(); ++i) {
        s += coords_[i] * other.coords_[i];
    }
    return s;
}

Vector& Vector::operator+=(const Vector& other)
{
    require_same_dim(*this, other, "operator+=");
    for (std::size_t i = 0; i < coords_.size(); ++i) {
        coords_[i] += other.coords_[i];
    }
    return *this;
}

Vector& Vector::operator-=(const Vector& other)
{
    require_same_dim(*this, other, "operator-=");
    for (std::size_t i = 0; i < coords_.size(); ++i) {
        coords_[i] -= other.coords_[i];
    }
    return *this;
}

Vector& Vector::operator*=(double s) noexcept
{
    for (double& c : coords_) {
        c *= s;
    }
    return *this;
}

Vector operator+(Vector a, const Vector& b)
{
    a += b;
    return a;
}

Vector operator-(Vector a, const Vector& b)
{
    a -= b;
    return a;
}

Vector operator*(double s, Vector v)
{
    v *= s;
    return v;
}

Vector operator*(Vector v, double s)
{
    v *= s;
    return v;
}

double distance(const Vector& a, const Vector& b)
{
    require_same_dim(a, b, "distance");
    double s = 0.0;
    for (std::size_t i = 0; i < a.dim(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return std::sqrt(s);
}

double distance_inf(const Vector& a, const Vector& b)
{
    require_same_dim(a, b, "distance_inf");
    double m = 0.0;
    for (std::size_t i = 0; i < a.dim(); ++i) {
        m = std::max(m, std::abs(a[i] - b[i]));
    }
    return m;
}

std::string to_string(const Vector& v)
{
    std::string out = "(";
    for (std::size_t i = 0; i < v.dim(); ++i) {
        if (i > 0) {
            out += ", ";
        }
        out += io::format_double(v[i]);
    }
    out += ")";
    return out;
}

void require_same_dim(const Vector& a, const Vector& b, const char* what)
{
    if (a.dim() != b.dim()) {
        std::ostringstream msg;
        msg << what << ": dimension mismatch (" << a.dim() << " vs " << b.dim() << ")";
        throw ContractViolation(msg.str());
    }
}

Box::Box(Vector lo, Vector hi) : lo_(std::move(lo)), hi_(std::move(hi))
{
    require_same_dim(lo_, hi_, "Box");
    if (lo_.dim() == 0) {
        throw ContractViolation("Box: dimension must be positive");
    }
    for (std::size_t i = 0; i < lo_.dim(); ++i) {
        if (lo_[i] > hi_[i]) {
            throw ContractViolation("Box: lo exceeds hi on axis " + std::to_string(i));
        }
    }
}

bool Box::contains(const Vector& x, double tol) const
{
    require_same_dim(lo_, x, "Box::contains");
    for (std::size_t i = 0; i < x.dim(); ++i) {
        if (x[i] < lo_[i] - tol || x[i] > hi_[i] + tol) {
            return false;
        }
    }
    return true;
}

Vector Box::clamp(const Vector& x) const
{
    require_same_dim(lo_, x, "Box::clamp");
    std::vector<double> c(x.dim());
    for (std::size_t i = 0; i < x.dim(); ++i) {
        c[i] = std::clamp(x[i], lo_[i], hi_[i]);
    }
    return Vector(std::move(c));
}

Vector Box::center() const
{
    std::vector<double> c(dim());
    for (std::size_t i = 0; i < dim(); ++i) {
        c[i] = 0.5 * (lo_[i] + hi_[i]);
    }
    return Vector(std::move(c));
}

std::vector<Vector> Box::corners() const
{
    const std::size_t n = dim();
    std::vector<Vector> out;
    out.reserve(std::size_t{1} << n);
    for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
        std::vector<double> c(n);
        for (std::size_t i = 0; i < n; ++i) {
            c[i] = (mask >> i) & 1U ? hi_[i] : lo_[i];
        }
        out.emplace_back(std::move(c));
    }
    return out;
}

double Box::distance_to_boundary(const Vector& x) const
{
    require_same_dim(lo_, x, "Box::distance_to_boundary");
    double d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < x.dim(); ++i) {
        d = std::min({d, x[i] - lo_[i], hi_[i] - x[i]});
    }
    return d;
}

bool Box::encloses(const Box& inner, double tol) const
{
    return contains(inner.lo(), tol) && contains(inner.hi(), tol);
}

std::string to_string(const Box& b)
{
    std::string out;
    for (std::size_t i = 0; i < b.dim(); ++i) {
        if (i > 0) {
            out += ",";
        }
        out += io::format_double(b.lo()[i]) + ":" + io::format_double(b.hi()[i]);
    }
    return out;
}

} // namespace dincl
