#include "fairmap/embedding.hpp"
#include "fairmap/generators.hpp"
#include "fairmap/rng.hpp"

#include <doctest.h>

#include <cmath>

using namespace fairmap;

namespace {

double dist(Point2 a, Point2 b) { return std::hypot(a[0] - b[0], a[1] - b[1]); }

DistanceMatrix uniform_matrix(std::size_t k, double value) {
    DistanceMatrix d;
    for (std::size_t i = 0; i < k; ++i) d.labels.push_back("p" + std::to_string(i));
    d.d = Matrix(k, k, value);
    for (std::size_t i = 0; i < k; ++i) d.d(i, i) = 0.0;
    return d;
}

DistanceMatrix random_planar(std::size_t k, std::uint64_t seed, std::vector<Point2>* truth = nullptr) {
    Rng rng(seed);
    std::vector<Point2> pts(k);
    for (auto& p : pts) p = {rng.uniform01() * 4, rng.uniform01() * 4};
    DistanceMatrix d = uniform_matrix(k, 0.0);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) d.d(i, j) = dist(pts[i], pts[j]);
    if (truth) *truth = pts;
    return d;
}

} // namespace

TEST_SUITE("embedding") {

TEST_CASE("stress examples") {
    Matrix d{{0, 3}, {3, 0}};
    std::vector<Point2> pts{{0, 0}, {1, 0}};
    CHECK(stress(d, pts) == 4.0);
    std::vector<Point2> truth;
    auto planar = random_planar(6, 3, &truth);
    CHECK(stress(planar.d, truth) <= 1e-20);
    CHECK_THROWS_AS(stress(d, std::vector<Point2>{{0, 0}}), ValidationError);

    Rng rng(4);
    std::vector<Point2> guess(6);
    for (auto& p : guess) p = {rng.uniform01(), rng.uniform01()};
    double direct = 0.0;
    for (std::size_t i = 0; i < 6; ++i)
        for (std::size_t j = i + 1; j < 6; ++j) {
            const double r = planar.d(i, j) - dist(guess[i], guess[j]);
            direct += r * r;
        }
    CHECK(stress(planar.d, guess) == doctest::Approx(direct).epsilon(1e-14));
}

TEST_CASE("equidistant triple becomes a near-equilateral triangle") {
    auto e = mds_embed(uniform_matrix(3, 8.0));
    const double a = dist(e.points[0], e.points[1]), b = dist(e.points[1], e.points[2]), c = dist(e.points[0], e.points[2]);
    CHECK(std::abs(a / b - 1) <= 0.01);
    CHECK(std::abs(a / c - 1) <= 0.01);
    CHECK(std::abs(a - 8) <= 0.08);
}

TEST_CASE("two points are placed at their distance") {
    auto e = mds_embed(uniform_matrix(2, 2.5));
    CHECK(std::abs(dist(e.points[0], e.points[1]) - 2.5) <= 1e-6);
}

TEST_CASE("all-zero input is degenerate") {
    auto e = mds_embed(uniform_matrix(3, 0.0));
    CHECK(e.degenerate);
    CHECK(e.stress == 0.0);
    for (const auto& p : e.points) CHECK((p[0] == 0.0 && p[1] == 0.0));
}

TEST_CASE("stress trace is monotone and the run is deterministic") {
    auto d = random_planar(25, 9);
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        MdsOptions opt;
        opt.seed = seed;
        auto e = mds_embed(d, opt);
        for (std::size_t k = 1; k < e.stress_trace.size(); ++k) CHECK(e.stress_trace[k] <= e.stress_trace[k - 1] + 1e-12);
        CHECK(e.stress == doctest::Approx(stress(d.d, e.points)).epsilon(1e-12));
        auto again = mds_embed(d, opt);
        CHECK(again.points == e.points);
        CHECK(again.stress == e.stress);
        CHECK(e.stress < 1e-6); // exactly planar input
    }
}

TEST_CASE("output is centred and canonically rotated") {
    auto e = mds_embed(random_planar(10, 1));
    double cx = 0, cy = 0, far = -1;
    std::size_t arg = 0;
    for (std::size_t i = 0; i < e.points.size(); ++i) {
        cx += e.points[i][0], cy += e.points[i][1];
        const double r = std::hypot(e.points[i][0], e.points[i][1]);
        if (r > far) far = r, arg = i;
    }
    CHECK(std::abs(cx) <= 1e-9);
    CHECK(std::abs(cy) <= 1e-9);
    CHECK(e.points[arg][0] > 0);
    CHECK(std::abs(e.points[arg][1]) <= 1e-9);
}

TEST_CASE("rigid motions leave stress unchanged") {
    auto d = random_planar(12, 5);
    Rng rng(6);
    std::vector<Point2> pts(12);
    for (auto& p : pts) p = {rng.uniform01() * 3, rng.uniform01() * 3};
    const double base = stress(d.d, pts);
    for (int t = 0; t < 20; ++t) {
        const double angle = rng.uniform01() * 6.283185307179586, tx = rng.uniform01() * 10, ty = rng.uniform01() * 10;
        std::vector<Point2> moved(12);
        for (std::size_t i = 0; i < 12; ++i)
            moved[i] = {std::cos(angle) * pts[i][0] - std::sin(angle) * pts[i][1] + tx,
                        std::sin(angle) * pts[i][0] + std::cos(angle) * pts[i][1] + ty};
        CHECK(std::abs(stress(d.d, moved) - base) <= 1e-9);
    }
}

TEST_CASE("restarts keep the best stress and do not depend on threads") {
    auto d = random_planar(15, 2);
    for (std::size_t i = 0; i < 15; ++i)
        for (std::size_t j = 0; j < 15; ++j)
            if (i != j) d.d(i, j) += 0.5; // no exact planar layout
    MdsOptions one, many;
    one.seed = many.seed = 3;
    many.restarts = 6;
    many.threads = 1;
    auto single = mds_embed(d, one);
    auto best = mds_embed(d, many);
    many.threads = 4;
    auto best4 = mds_embed(d, many);
    CHECK(best.points == best4.points);
    for (std::size_t r = 0; r < 6; ++r) {
        MdsOptions o;
        o.seed = child_seed(3, r);
        CHECK(best.stress <= mds_embed(d, o).stress);
    }
    CHECK(best.stress <= single.stress * (1 + 1e-9) + 1e-9);
}

TEST_CASE("input validation") {
    auto d = uniform_matrix(3, 1.0);
    d.d(0, 1) = 2.0;
    CHECK_THROWS_AS(mds_embed(d), ValidationError);
    CHECK_THROWS_AS(mds_embed(uniform_matrix(1, 0.0)), ValidationError);
    MdsOptions bad;
    bad.tol = 0;
    CHECK_THROWS_AS(mds_embed(uniform_matrix(3, 1.0), bad), ValidationError);
}

} // TEST_SUITE
