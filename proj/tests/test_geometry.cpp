#include <doctest.h>

#include <numbers>
#include <random>

#include "frameflow/errors.hpp"
#include "frameflow/geometry.hpp"
#include "oracles.hpp"

using namespace frameflow;

namespace {

const Complex I(0.0, 1.0);

MoebiusMap random_map(std::mt19937_64& rng) {
    std::normal_distribution<double> n;
    while (true) {
        const Complex a(n(rng), n(rng)), b(n(rng), n(rng)), c(n(rng), n(rng)), d(n(rng), n(rng));
        if (std::abs(a * d - b * c) > 0.1) return MoebiusMap(a, b, c, d);
    }
}

}  // namespace

TEST_CASE("apply on closed-form maps") {
    CHECK(std::abs(MoebiusMap::identity().apply(I) - I) < 1e-15);
    CHECK(std::abs(MoebiusMap(0, 1, -1, 0).apply(2.0) - Complex(-0.5)) < 1e-15);
    CHECK(std::abs(MoebiusMap(2, 0, 0, 0.5).apply(Complex(1, 1)) - Complex(4, 4)) < 1e-14);
    CHECK_THROWS_AS(MoebiusMap(0, 1, -1, 0).apply(0.0), PoleAt);
}

TEST_CASE("constructor normalizes and rejects singular input") {
    const MoebiusMap m(2, 3, 1, 5);
    CHECK(std::abs(m.determinant() - 1.0) < 1e-12);
    CHECK_THROWS_AS(MoebiusMap(1, 2, 2, 4), std::invalid_argument);
    CHECK_THROWS_AS(MoebiusMap(std::nan(""), 0, 0, 1), std::invalid_argument);
}

TEST_CASE("derivative") {
    CHECK(std::abs(MoebiusMap::identity().derivative(Complex(0.3, -2)) - 1.0) < 1e-15);
    CHECK(std::abs(MoebiusMap(0, 1, -1, 0).derivative(2.0) - 0.25) < 1e-15);
    CHECK_THROWS_AS(MoebiusMap(0, 1, -1, 0).derivative(0.0), PoleAt);

    std::mt19937_64 rng(5);
    std::normal_distribution<double> n;
    int checked = 0;
    while (checked < 100) {
        const MoebiusMap m1 = random_map(rng), m2 = random_map(rng);
        const Complex z(n(rng), n(rng));
        const MoebiusMap m12 = m1 * m2;
        Complex w;
        try {
            w = m2.apply(z);
            if (std::abs(m1.c() * w + m1.d()) < 1e-3 || std::abs(m2.c() * z + m2.d()) < 1e-3) continue;
        } catch (const PoleAt&) {
            continue;
        }
        const Complex chain = m1.derivative(w) * m2.derivative(z);
        const Complex direct = m12.derivative(z);
        CHECK(std::abs(chain - direct) <= 1e-10 * std::max(1.0, std::abs(direct)));
        CHECK(std::abs(m12.apply(z) - m1.apply(w)) <= 1e-10 * std::max(1.0, std::abs(m1.apply(w))));
        const Complex fd = oracle::numeric_derivative([&](Complex u) { return m2.apply(u); }, z);
        CHECK(std::abs(fd - m2.derivative(z)) <= 1e-5 * std::max(1.0, std::abs(fd)));
        ++checked;
    }
}

TEST_CASE("determinant preserved by compose and inverse") {
    std::mt19937_64 rng(9);
    for (int i = 0; i < 50; ++i) {
        const MoebiusMap m1 = random_map(rng), m2 = random_map(rng);
        CHECK(std::abs((m1 * m2).determinant() - 1.0) < 1e-12);
        CHECK(std::abs(m1.inverse().determinant() - 1.0) < 1e-12);
        CHECK((m1 * m1.inverse()).approx_equal(MoebiusMap::identity(), 1e-10));
    }
}

TEST_CASE("approx_equal ignores the global sign") {
    const MoebiusMap m(2, 1, 1, 1);
    CHECK(m.approx_equal(MoebiusMap(-2, -1, -1, -1)));
    CHECK_FALSE(m.approx_equal(MoebiusMap(2, -1, -1, 1)));
}

TEST_CASE("loxodromic data") {
    const LoxodromicData real = loxodromic_data(MoebiusMap(2, 0, 0, 0.5));
    CHECK(real.translation_length == doctest::Approx(2 * std::log(2.0)).epsilon(1e-14));
    CHECK(std::abs(real.rotation_angle) < 1e-14);

    const Complex e = std::polar(1.0, std::numbers::pi / 4);
    const LoxodromicData lox = loxodromic_data(MoebiusMap(2.0 * e, 0, 0, 0.5 / e));
    CHECK(lox.translation_length == doctest::Approx(2 * std::log(2.0)).epsilon(1e-14));
    CHECK(lox.rotation_angle == doctest::Approx(std::numbers::pi / 2).epsilon(1e-13));

    CHECK_THROWS_AS(loxodromic_data(MoebiusMap::identity()), NotLoxodromic);
    CHECK_THROWS_AS(loxodromic_data(MoebiusMap(1, 1, 0, 1)), NotLoxodromic);
    CHECK_THROWS_AS(loxodromic_data(MoebiusMap(0, 1, -1, 0)), NotLoxodromic);
}

TEST_CASE("loxodromic data is conjugation invariant and scales with powers") {
    std::mt19937_64 rng(3);
    const MoebiusMap m(Complex(2.5, 0.7), 1, 1, Complex(0.8, -0.1));
    const LoxodromicData base = loxodromic_data(m);
    CHECK(base.translation_length == doctest::Approx(oracle::translation_length_from_trace(m.trace())).epsilon(1e-12));
    for (int i = 0; i < 20; ++i) {
        const MoebiusMap g = random_map(rng);
        const LoxodromicData c = loxodromic_data(g * m * g.inverse());
        CHECK(std::abs(c.translation_length - base.translation_length) < 1e-9);
        CHECK(std::abs(wrap_angle(c.rotation_angle - base.rotation_angle)) < 1e-9);
    }
    MoebiusMap power = m;
    for (int k = 2; k <= 5; ++k) {
        power = power * m;
        CHECK(std::abs(loxodromic_data(power).translation_length - k * base.translation_length) < 1e-9);
        CHECK(std::abs(wrap_angle(loxodromic_data(power).rotation_angle - k * base.rotation_angle)) < 1e-9);
    }
}

TEST_CASE("image_disk") {
    const Disk unit = image_disk(MoebiusMap::identity(), Disk(0.0, 1.0));
    CHECK(std::abs(unit.center) < 1e-14);
    CHECK(unit.radius == doctest::Approx(1.0).epsilon(1e-14));

    const Disk scaled = image_disk(MoebiusMap(2, 0, 0, 0.5), Disk(1.0, 0.5));
    CHECK(std::abs(scaled.center - 4.0) < 1e-13);
    CHECK(scaled.radius == doctest::Approx(2.0).epsilon(1e-13));

    // Boundary sampling oracle for z -> -1/z on D(3, 1).
    const MoebiusMap inv(0, 1, -1, 0);
    const Disk d(3.0, 1.0);
    const Disk img = image_disk(inv, d);
    for (int i = 0; i < 64; ++i) {
        const Complex z = d.center + d.radius * std::polar(1.0, 2 * std::numbers::pi * i / 64.0);
        CHECK(std::abs(std::abs(inv.apply(z) - img.center) - img.radius) < 1e-12);
    }
    CHECK(img.contains(inv.apply(3.0)));

    CHECK_THROWS_AS(image_disk(inv, Disk(1.0, 1.0)), PoleOnBoundary);
    CHECK_THROWS_AS(image_disk(inv, Disk(0.0, 1.0)), PoleInside);
}

TEST_CASE("is_real") {
    CHECK(is_real(MoebiusMap(2, 0, 0, 0.5)));
    const Complex e = std::polar(1.0, std::numbers::pi / 4);
    CHECK_FALSE(is_real(MoebiusMap(2.0 * e, 0, 0, 0.5 / e)));
    CHECK(is_real(MoebiusMap(-2, -1, -3, -2)));
    CHECK(is_real(MoebiusMap(2.0 * I, 1.0 * I, 3.0 * I, 2.0 * I)));
}

TEST_CASE("disk and angle helpers") {
    CHECK_THROWS_AS(Disk(0.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(Disk(0.0, -1.0), std::invalid_argument);
    CHECK(wrap_angle(std::numbers::pi) == doctest::Approx(std::numbers::pi));
    CHECK(wrap_angle(-std::numbers::pi) == doctest::Approx(std::numbers::pi));
    CHECK(wrap_angle(3 * std::numbers::pi / 2) == doctest::Approx(-std::numbers::pi / 2));
}
