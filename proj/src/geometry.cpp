#include "frameflow/geometry.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "frameflow/errors.hpp"

namespace frameflow {

namespace {

constexpr double kPoleTolerance = 1e-14;

bool finite(Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

std::string format_complex(Complex z) {
    return "(" + std::to_string(z.real()) + ", " + std::to_string(z.imag()) + ")";
}

// Circle through three distinct points.
Disk circumcircle(Complex p1, Complex p2, Complex p3) {
    const Complex u = p2 - p1;
    const Complex v = p3 - p1;
    const double denom = 2.0 * (u.real() * v.imag() - u.imag() * v.real());
    if (std::abs(denom) < 1e-300) {
        throw PoleOnBoundary("image points are collinear; image circle degenerates to a line");
    }
    const double uu = std::norm(u);
    const double vv = std::norm(v);
    const Complex offset((v.imag() * uu - u.imag() * vv) / denom,
                         (u.real() * vv - v.real() * uu) / denom);
    return Disk(p1 + offset, std::abs(offset));
}

}  // namespace

PoleAt::PoleAt(std::complex<double> z)
    : Error("evaluation at the pole of a Moebius map, z = " + format_complex(z)), point(z) {}

NoConvergence::NoConvergence(const std::string& what, double right, double left)
    : NumericError(what), residual_right(right), residual_left(left) {}

double wrap_angle(double angle) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    double r = std::fmod(angle, two_pi);
    if (r <= -std::numbers::pi) r += two_pi;
    if (r > std::numbers::pi) r -= two_pi;
    return r;
}

MoebiusMap::MoebiusMap(Complex a, Complex b, Complex c, Complex d, Raw)
    : a_(a), b_(b), c_(c), d_(d) {}

MoebiusMap::MoebiusMap(Complex a, Complex b, Complex c, Complex d) {
    if (!finite(a) || !finite(b) || !finite(c) || !finite(d)) {
        throw std::invalid_argument("Moebius map entries must be finite");
    }
    const Complex det = a * d - b * c;
    const double scale = std::max({std::abs(a), std::abs(b), std::abs(c), std::abs(d)});
    if (std::abs(det) <= 1e-14 * scale * scale || scale == 0.0) {
        throw std::invalid_argument("Moebius map matrix is singular");
    }
    const Complex root = std::sqrt(det);
    a_ = a / root;
    b_ = b / root;
    c_ = c / root;
    d_ = d / root;
}

MoebiusMap MoebiusMap::identity() { return MoebiusMap(1.0, 0.0, 0.0, 1.0, Raw{}); }

Complex MoebiusMap::apply(Complex z) const {
    const Complex denom = c_ * z + d_;
    if (std::abs(denom) < kPoleTolerance) throw PoleAt(z);
    return (a_ * z + b_) / denom;
}

Complex MoebiusMap::derivative(Complex z) const {
    const Complex denom = c_ * z + d_;
    if (std::abs(denom) < kPoleTolerance) throw PoleAt(z);
    return 1.0 / (denom * denom);
}

MoebiusMap MoebiusMap::inverse() const { return MoebiusMap(d_, -b_, -c_, a_, Raw{}); }

bool MoebiusMap::approx_equal(const MoebiusMap& other, double tol) const {
    auto close = [&](double sign) {
        return std::abs(a_ - sign * other.a_) <= tol && std::abs(b_ - sign * other.b_) <= tol &&
               std::abs(c_ - sign * other.c_) <= tol && std::abs(d_ - sign * other.d_) <= tol;
    };
    return close(1.0) || close(-1.0);
}

MoebiusMap operator*(const MoebiusMap& lhs, const MoebiusMap& rhs) {
    // No renormalization: for long words the entries grow like exp(length / 2)
    // and a recomputed determinant would be dominated by cancellation.
    return MoebiusMap(lhs.a_ * rhs.a_ + lhs.b_ * rhs.c_, lhs.a_ * rhs.b_ + lhs.b_ * rhs.d_,
                      lhs.c_ * rhs.a_ + lhs.d_ * rhs.c_, lhs.c_ * rhs.b_ + lhs.d_ * rhs.d_,
                      MoebiusMap::Raw{});
}

Disk::Disk(Complex c, double r) : center(c), radius(r) {
    if (!(r > 0.0) || !std::isfinite(r) || !finite(c)) {
        throw std::invalid_argument("disk needs a finite center and a positive radius");
    }
}

LoxodromicData loxodromic_data(const MoebiusMap& m) {
    const Complex tr = m.trace();
    if (std::abs(tr.imag()) < 1e-12 && std::abs(tr.real()) <= 2.0 + 1e-12) {
        throw NotLoxodromic("trace " + format_complex(tr) + " is not loxodromic");
    }
    const Complex disc = std::sqrt(tr * tr - 4.0);
    Complex mu = 0.5 * (tr + disc);
    const Complex other = 0.5 * (tr - disc);
    if (std::abs(other) > std::abs(mu)) mu = other;
    return {2.0 * std::log(std::abs(mu)), wrap_angle(2.0 * std::arg(mu))};
}

Disk image_disk(const MoebiusMap& m, const Disk& d) {
    if (m.has_finite_pole()) {
        const double dist = std::abs(m.pole() - d.center);
        const double tol = 1e-12 * std::max(1.0, d.radius);
        if (std::abs(dist - d.radius) <= tol) {
            throw PoleOnBoundary("pole lies on the disk boundary");
        }
        if (dist < d.radius) throw PoleInside("pole lies inside the disk");
    }
    auto boundary = [&](double angle) { return d.center + d.radius * std::polar(1.0, angle); };
    constexpr double third = 2.0 * std::numbers::pi / 3.0;
    const Disk image = circumcircle(m.apply(boundary(0.0)), m.apply(boundary(third)),
                                    m.apply(boundary(2.0 * third)));

    const double tol = 1e-10 * (1.0 + std::abs(image.center) + image.radius);
    for (int i = 0; i < 64; ++i) {
        const Complex w = m.apply(boundary(2.0 * std::numbers::pi * i / 64.0));
        if (std::abs(std::abs(w - image.center) - image.radius) > tol) {
            throw std::logic_error("sampled boundary point is off the image circle");
        }
    }
    return image;
}

bool is_real(const MoebiusMap& m) {
    const std::array<Complex, 4> entries{m.a(), m.b(), m.c(), m.d()};
    const auto largest = *std::max_element(entries.begin(), entries.end(), [](Complex x, Complex y) {
        return std::abs(x) < std::abs(y);
    });
    const Complex phase = std::abs(largest) / largest;
    return std::all_of(entries.begin(), entries.end(),
                       [&](Complex e) { return std::abs((e * phase).imag()) <= 1e-12; });
}

}  // namespace frameflow
