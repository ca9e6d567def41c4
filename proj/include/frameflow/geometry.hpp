#pragma once

#include <complex>

namespace frameflow {

using Complex = std::complex<double>;

/// Wraps an angle into (-pi, pi].
double wrap_angle(double angle);

/// Orientation-preserving isometry of H^3 (or H^2 when all entries are real),
/// stored as a unimodular 2x2 complex matrix. The matrix is only defined up to
/// a global sign.
class MoebiusMap {
public:
    /// Normalizes the matrix so that ad - bc = 1. Throws std::invalid_argument
    /// for singular or non-finite input.
    MoebiusMap(Complex a, Complex b, Complex c, Complex d);

    static MoebiusMap identity();

    Complex a() const { return a_; }
    Complex b() const { return b_; }
    Complex c() const { return c_; }
    Complex d() const { return d_; }

    Complex determinant() const { return a_ * d_ - b_ * c_; }
    Complex trace() const { return a_ + d_; }

    /// (az + b) / (cz + d); throws PoleAt when |cz + d| < 1e-14.
    Complex apply(Complex z) const;

    /// Conformal derivative 1 / (cz + d)^2; throws PoleAt like apply().
    Complex derivative(Complex z) const;

    /// Point sent to infinity. Only meaningful when c != 0.
    Complex pole() const { return -d_ / c_; }
    bool has_finite_pole() const { return c_ != Complex(0.0); }

    MoebiusMap inverse() const;

    /// Equality in PSL(2, C): entries agree up to a global sign.
    bool approx_equal(const MoebiusMap& other, double tol = 1e-12) const;

    /// Composition (m1 * m2)(z) = m1(m2(z)).
    friend MoebiusMap operator*(const MoebiusMap& lhs, const MoebiusMap& rhs);

private:
    struct Raw {};
    MoebiusMap(Complex a, Complex b, Complex c, Complex d, Raw);

    Complex a_, b_, c_, d_;
};

struct Disk {
    Complex center;
    double radius;

    /// Throws std::invalid_argument unless radius > 0 and the center is finite.
    Disk(Complex center, double radius);

    bool contains(Complex z) const { return std::abs(z - center) < radius; }
};

struct LoxodromicData {
    double translation_length;
    double rotation_angle;
};

/// Translation length 2 log|mu| and rotation 2 arg(mu) for the multiplier mu
/// with |mu| > 1. Throws NotLoxodromic for elliptic, parabolic or trivial maps.
LoxodromicData loxodromic_data(const MoebiusMap& m);

/// Image of a disk under m, as the circumcircle of three mapped boundary
/// points. The result is checked against 64 sampled boundary points.
Disk image_disk(const MoebiusMap& m, const Disk& d);

/// True when some phase normalization makes all entries real (within 1e-12),
/// i.e. the map preserves the extended real line.
bool is_real(const MoebiusMap& m);

}  // namespace frameflow
