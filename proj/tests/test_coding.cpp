#include <doctest.h>

#include <numbers>
#include <set>

#include "floors.hpp"
#include "frameflow/errors.hpp"
#include "frameflow/fixtures.hpp"
#include "oracles.hpp"

using namespace frameflow;

TEST_CASE("fixtures validate") {
    for (const SchottkyScheme& s : {fixture_a(), fixture_b()}) {
        const ValidationReport r = s.validate();
        CHECK(r.ok);
        CHECK(r.failures.empty());
        CHECK(r.disjointness_margin > 0.0);
        CHECK(r.contraction_depth >= 1);
        CHECK(r.contraction_depth <= 3);
        for (double res : r.pairing_residuals) CHECK(res < 1e-9);
        CHECK_NOTHROW(s.require_valid());
    }
    CHECK(fixture_a().all_real());
    CHECK_FALSE(fixture_b().all_real());
}

TEST_CASE("validate flags overlaps, bad pairings and rank one") {
    const auto overlap = SchottkyScheme::from_pairings({{0.0, 1.0, 1.0}, {Complex(0, 5), Complex(0, -5), 1.0}});
    const ValidationReport r1 = overlap.validate();
    CHECK_FALSE(r1.ok);
    CHECK(r1.disjointness_margin < 0.0);
    CHECK_THROWS_AS(overlap.require_valid(), ValidationError);

    // Swap source and target disks of the second generator of FIX-B.
    std::vector<Generator> gens = fixture_b().generators();
    const Generator g = pairing_generator(Complex(0, -1.5), Complex(0, 1.5), 0.5);
    gens[1] = Generator{g.map, g.target, g.source};
    const ValidationReport r2 = SchottkyScheme(gens).validate();
    CHECK_FALSE(r2.ok);
    CHECK(r2.pairing_residuals.size() == 2);
    CHECK(r2.pairing_residuals[1] > 1e-9);

    const auto rank1 = SchottkyScheme::from_pairings({{-3.0, 3.0, 0.6}});
    CHECK_FALSE(rank1.validate().ok);
}

TEST_CASE("words") {
    CHECK_THROWS_AS(Word({0, 1}), InadmissibleBranch);
    CHECK_THROWS_AS(Word({-1}), InadmissibleBranch);
    const Word w({0, 2, 1});
    CHECK(w.to_string() == "0.2.1");
    CHECK(w.inverse().symbols() == std::vector<Symbol>{0, 3, 1});
    CHECK_FALSE(w.cyclically_reduced());
    CHECK(Word({0, 2, 0}).cyclically_reduced());
}

TEST_CASE("branch lands in the target disk") {
    const SchottkyScheme s = fixture_a();
    // Symbol 0 is g_0 with target D(3, 0.6).
    const Complex z = s.branch(0, s.disk(2).center);
    CHECK(s.disk(0).contains(z));
    const Disk img = image_disk(s.map(0), s.disk(2));
    CHECK(img.contains(z));
    CHECK(std::abs(s.disk(0).center - 3.0) < 1e-15);
    CHECK_THROWS_AS(s.branch(0, -3.0), InadmissibleBranch);
    CHECK_THROWS_AS(s.branch(0, 10.0), OutsideCoding);
    CHECK_THROWS_AS(s.cocycle(0, 10.0), OutsideCoding);
}

TEST_CASE("cocycle conventions") {
    const SchottkyScheme a = fixture_a();
    for (Symbol x = 0; x < 4; ++x) {
        for (Symbol y = 0; y < 4; ++y) {
            if (y == bar(x)) continue;
            CHECK(std::abs(a.cocycle(x, a.disk(y).center + 0.1 * a.disk(y).radius).theta) < 1e-12);
        }
    }
    const BranchCocycle expand = map_cocycle(MoebiusMap(2, 0, 0, 0.5), 1.0);
    CHECK(expand.tau == doctest::Approx(-std::log(4.0)).epsilon(1e-14));
    CHECK(std::abs(expand.theta) < 1e-15);

    const SchottkyScheme b = fixture_b();
    const Complex u = b.disk(0).center + Complex(0.1, 0.05);
    CHECK(b.word_cocycle(Word(), u).tau == 0.0);
    CHECK(b.word_cocycle(Word(), u).theta == 0.0);
    CHECK(b.word_cocycle(Word({0}), u).tau == doctest::Approx(b.cocycle(0, u).tau).epsilon(1e-15));

    // Stepwise accumulation, innermost branch first.
    const Word w({0, 2, 2, 0, 3});
    double tau = 0, theta = 0;
    Complex z = u;
    for (std::size_t i = w.size(); i-- > 0;) {
        const Complex g = b.map(w[i]).derivative(z);
        tau += -std::log(std::abs(g));
        theta += -std::arg(g);
        z = b.map(w[i]).apply(z);
    }
    const BranchCocycle c = b.word_cocycle(w, u);
    CHECK(std::abs(c.tau - tau) < 1e-10);
    CHECK(std::abs(wrap_angle(c.theta - theta)) < 1e-10);
    CHECK(std::abs(b.apply(w, u) - z) < 1e-12);
}

TEST_CASE("cylinders") {
    const SchottkyScheme s = fixture_b();
    CHECK(cylinders(s, 1).size() == 4);
    CHECK(cylinders(s, 3).size() == 36);
    CHECK(cylinder_count(4, 3) == oracle::admissible_words(4, 3, false).size());
    CHECK(cylinder_count(6, 4) == oracle::admissible_words(6, 4, false).size());
    CHECK_THROWS_AS(cylinders(s, 5, 100), CapacityExceeded);

    const CylinderTable t = cylinders(s, 4);
    const WordIndex idx = t.index();
    for (std::size_t i = 0; i < t.size(); ++i) {
        const Word w = t.word(i);
        CHECK(idx.index(w) == i);
        CHECK(s.disk(w[0]).contains(t.representative[i]));
    }
    // Lexicographic order follows the oracle enumeration.
    const auto all = oracle::admissible_words(4, 4, false);
    for (std::size_t i = 0; i < all.size(); ++i) CHECK(t.word(i).symbols() == all[i]);

    for (double th : cylinders(fixture_a(), 5).theta) CHECK(std::abs(th) < 1e-12);
}

TEST_CASE("transition matrix is primitive with N = 2") {
    for (int alphabet : {4, 6}) {
        std::vector<int> m(static_cast<std::size_t>(alphabet * alphabet));
        for (int x = 0; x < alphabet; ++x) {
            for (int y = 0; y < alphabet; ++y) m[static_cast<std::size_t>(x * alphabet + y)] = y != bar(x);
        }
        bool some_zero = false, all_pos = true;
        for (int x = 0; x < alphabet; ++x) {
            for (int y = 0; y < alphabet; ++y) {
                int sq = 0;
                for (int z = 0; z < alphabet; ++z) {
                    sq += m[static_cast<std::size_t>(x * alphabet + z)] * m[static_cast<std::size_t>(z * alphabet + y)];
                }
                all_pos = all_pos && sq > 0;
                some_zero = some_zero || m[static_cast<std::size_t>(x * alphabet + y)] == 0;
            }
        }
        CHECK(some_zero);
        CHECK(all_pos);
    }
}

TEST_CASE("limit points") {
    for (Complex z : limit_points(fixture_a(), 2000, 40, 1)) CHECK(std::abs(z.imag()) < 1e-9);
    const auto p1 = limit_points(fixture_b(), 100, 40, 1);
    const auto p2 = limit_points(fixture_b(), 100, 40, 2);
    CHECK(p1 != p2);
    CHECK(p1 == limit_points(fixture_b(), 100, 40, 1));
}

TEST_CASE("ncp spread") {
    const SchottkyScheme a = fixture_a(), b = fixture_b();
    const auto pa = limit_points(a, 200000, 40, 7);
    const auto pb = limit_points(b, 200000, 40, 7);
    const auto ca = limit_points(a, 8, 40, 11);
    const auto cb = limit_points(b, 8, 40, 11);
    for (double eps : {0.1, 0.01}) {
        for (Complex x : ca) {
            CHECK(ncp_spread(pa, x, Complex(0, 1), eps) < 1e-8);
            CHECK(ncp_spread(pa, x, 1.0, eps) > floors::ncp_fix_a_real);
        }
        for (Complex x : cb) {
            CHECK(ncp_spread(pb, x, 1.0, eps) > floors::ncp_fix_b);
            CHECK(ncp_spread(pb, x, Complex(0, 1), eps) > floors::ncp_fix_b);
        }
    }
    CHECK_THROWS_AS(ncp_spread(pa, Complex(0, 50), 1.0, 0.01), EmptyBall);
}

TEST_CASE("closed geodesics") {
    const SchottkyScheme b = fixture_b();
    // Systole by brute force over cyclically reduced words of length <= 3.
    double systole = std::numeric_limits<double>::infinity();
    for (int n = 1; n <= 3; ++n) {
        for (const auto& w : oracle::admissible_words(4, n, true)) {
            systole = std::min(systole, oracle::translation_length_from_trace(oracle::word_trace(b, w)));
        }
    }
    CHECK(closed_geodesics(b, 0.99 * systole).empty());
    const auto shortest = closed_geodesics(b, 1.0001 * systole);
    REQUIRE_FALSE(shortest.empty());
    CHECK(shortest.front().length == doctest::Approx(systole).epsilon(1e-10));

    const auto classes = closed_geodesics(b, 12.0);
    for (int i = 0; i < b.rank(); ++i) {
        const double len = loxodromic_data(b.generators()[static_cast<std::size_t>(i)].map).translation_length;
        int hits = 0;
        for (const auto& g : classes) {
            if (g.word.size() == 1 && (g.word[0] == 2 * i || g.word[0] == 2 * i + 1)) {
                ++hits;
                CHECK(g.length == doctest::Approx(len).epsilon(1e-12));
            }
        }
        CHECK(hits == 1);
    }

    std::set<std::vector<Symbol>> seen;
    for (std::size_t i = 0; i < classes.size(); ++i) {
        const auto& g = classes[i];
        CHECK(g.class_id == i);
        CHECK(g.length <= 12.0);
        if (i > 0) CHECK(classes[i - 1].length <= g.length);
        CHECK(seen.insert(g.word.symbols()).second);
        const Complex z = b.periodic_point(g.word);
        const BranchCocycle c = b.word_cocycle(g.word, z);
        CHECK(std::abs(c.tau - g.length) < 1e-8);
        CHECK(std::abs(wrap_angle(c.theta - g.angle)) < 1e-8);
    }
    CHECK_THROWS_AS(closed_geodesics(b, 30.0, 100), CapacityExceeded);
    for (const auto& g : closed_geodesics(fixture_a(), 15.0)) CHECK(std::abs(g.angle) < 1e-9);
}

TEST_CASE("periodic orbit sums match the multiplier") {
    for (const SchottkyScheme& s : {fixture_a(), fixture_b()}) {
        std::size_t count = 0;
        for (int n = 1; n <= 6; ++n) {
            for (const auto& symbols : oracle::admissible_words(4, n, true)) {
                const Word w(symbols);
                const LoxodromicData lox = loxodromic_data(s.element(w));
                const BranchCocycle c = s.word_cocycle(w, s.periodic_point(w));
                CHECK(std::abs(c.tau - lox.translation_length) < 1e-8);
                CHECK(std::abs(wrap_angle(c.theta - lox.rotation_angle)) < 1e-8);
                CHECK(std::abs(lox.translation_length - oracle::translation_length_from_trace(oracle::word_trace(s, symbols))) < 1e-8);
                ++count;
            }
        }
        CHECK(count >= 400);
    }
}
