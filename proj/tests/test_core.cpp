#include "fairmap/core.hpp"
#include "fairmap/numeric.hpp"
#include "fairmap/rng.hpp"

#include <doctest.h>

#include <cmath>

using namespace fairmap;

TEST_SUITE("core") {

TEST_CASE("validate accepts a stochastic matrix") {
    auto u = validate(Matrix{{0.5, 0.5}, {0.5, 0.5}});
    CHECK(u.n() == 2);
    CHECK(u.m() == 2);
    CHECK(u(1, 0) == 0.5);
}

TEST_CASE("validate reports the offending row sum") {
    try {
        validate(Matrix{{0.5, 0.6}, {0.5, 0.5}});
        FAIL("expected RowSumViolation");
    } catch (const RowSumViolation& e) {
        CHECK(e.row == 0);
        CHECK(e.actual == doctest::Approx(1.1).epsilon(1e-12));
        CHECK(e.code() == "RowSumViolation");
        CHECK(exit_code(e.kind()) == 2);
    }
}

TEST_CASE("validate rejects bad shapes and entries") {
    try {
        validate(Matrix{{0.5, 0.5}, {0.5, 0.5}, {0.5, 0.5}});
        FAIL("expected BadDimensions");
    } catch (const BadDimensions& e) {
        CHECK(e.n == 3);
        CHECK(e.m == 2);
    }
    CHECK_THROWS_AS(validate(Matrix{{1.0, 0.0, 0.0}}), BadDimensions);
    try {
        validate(Matrix{{1.5, -0.5}, {0.5, 0.5}});
        FAIL("expected NegativeEntry");
    } catch (const NegativeEntry& e) {
        CHECK(e.row == 0);
        CHECK(e.col == 1);
    }
    CHECK_THROWS_WITH_AS(validate(Matrix{{NAN, 1.0}, {0.5, 0.5}}), doctest::Contains("not finite"), ValidationError);
}

TEST_CASE("validate renormalizes rows that are off by less than the tolerance") {
    auto u = validate(Matrix{{0.5 + 4e-10, 0.5}, {0.25, 0.75}});
    CHECK(u(0, 0) + u(0, 1) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(u(0, 0) != 0.5 + 4e-10);
    CHECK(u(1, 0) == 0.25); // exact rows untouched
}

TEST_CASE("validate keeps already normalized rows bit for bit") {
    Rng rng(11);
    for (int t = 0; t < 200; ++t) {
        Matrix raw(3, 7);
        for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t j = 0; j < 7; ++j) raw(i, j) = rng.uniform01();
        auto once = normalize_rows(raw);
        auto again = validate(once.values());
        CHECK(again == once);
    }
}

TEST_CASE("normalize_rows divides by row sums") {
    auto u = normalize_rows(Matrix{{2, 4, 6, 8}, {3, 3, 6, 8}});
    const double expect[2][4] = {{0.1, 0.2, 0.3, 0.4}, {0.15, 0.15, 0.3, 0.4}};
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 4; ++j) CHECK(u(i, j) == doctest::Approx(expect[i][j]).epsilon(1e-15));
}

TEST_CASE("normalize_rows leaves stochastic input unchanged and rejects zero rows") {
    Matrix sto{{0.25, 0.75, 0.0}, {0.5, 0.25, 0.25}};
    CHECK(normalize_rows(sto).values() == sto);
    try {
        normalize_rows(Matrix{{0.0, 0.0}, {1.0, 1.0}});
        FAIL("expected ZeroRow");
    } catch (const ZeroRow& e) {
        CHECK(e.row == 0);
    }
}

TEST_CASE("normalize_rows output validates and is idempotent") {
    Rng rng(3);
    for (int t = 0; t < 500; ++t) {
        const std::size_t n = 2 + rng.below(4), m = n + rng.below(5);
        Matrix raw(n, m);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < m; ++j) raw(i, j) = rng.uniform01() * 100.0 * (1 + rng.below(3));
        auto once = normalize_rows(raw);
        CHECK_NOTHROW(validate(once.values()));
        auto twice = normalize_rows(once.values());
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < m; ++j) CHECK(std::abs(once(i, j) - twice(i, j)) <= 1e-12);
    }
}

TEST_CASE("source parameters are range-checked") {
    auto u = validate(Matrix{{0.5, 0.5}, {0.5, 0.5}});
    CHECK_THROWS_AS(make_record("x", u, ResamplingSource{1.5, 0.2}), ValidationError);
    CHECK_THROWS_AS(make_record("x", u, AttributesSource{0}), ValidationError);
    auto r = make_record("x", u, ResamplingSource{0.2, 0.8}, 7u);
    CHECK(describe(r.source) == "resampling(p=0.2,phi=0.8)");
    CHECK(source_category(r.source) == "resampling");
    CHECK(*r.seed == 7u);
}

TEST_CASE("kind names round-trip") {
    for (auto k : {CharacteristicKind::IND, CharacteristicKind::SEP, CharacteristicKind::CON, CharacteristicKind::WSEP,
                   CharacteristicKind::WSEPf, CharacteristicKind::BIC})
        CHECK(parse_characteristic(to_string(k)) == k);
    CHECK(!parse_characteristic("FOO"));
    CHECK(parse_iid_dist("exponential") == IidDist::Exponential);
}

TEST_CASE("exact sum is correctly rounded and order independent") {
    std::vector<double> xs{1e16, 1.0, -1e16, 3.0};
    CHECK(exact_sum(xs) == 4.0);
    std::vector<double> ys{0.1, 0.2, 0.3};
    std::vector<double> zs{0.3, 0.1, 0.2};
    CHECK(exact_sum(ys) == exact_sum(zs));
    CHECK(exact_sum(ys) == 0.6);
    std::vector<double> tiny{1.0, 0x1p-53, 0x1p-106};
    CHECK(exact_sum(tiny) == 1.0 + 0x1p-52);
}

TEST_CASE("pearson") {
    std::vector<double> x{1, 2, 3, 4}, y{2, 4, 6, 8}, z{4, 3, 2, 1}, c{1, 1, 1, 1};
    CHECK(pearson(x, y) == doctest::Approx(1.0));
    CHECK(pearson(x, z) == doctest::Approx(-1.0));
    CHECK(std::isnan(pearson(x, c)));
}

TEST_CASE("child streams are fixed functions of (seed, index)") {
    CHECK(child_seed(1, 0) != child_seed(1, 1));
    CHECK(child_seed(1, 0) != child_seed(2, 0));
    Rng a = Rng::child(5, 3), b = Rng::child(5, 3);
    for (int i = 0; i < 10; ++i) CHECK(a.next_u64() == b.next_u64());
    Rng r(1);
    for (int i = 0; i < 1000; ++i) {
        const double u = r.uniform01();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        CHECK(r.below(7) < 7u);
    }
}

} // TEST_SUITE
