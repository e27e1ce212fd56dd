#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "gmi/bin_grid.hpp"
#include "gmi/rng.hpp"
#include "test_support.hpp"

using namespace gmi;

namespace {

// the test oracle: exhaustive distance scan
std::vector<int> brute_radius(const PointSet& ps, Vec2 q, double radius) {
    std::vector<int> out;
    for (int i = 0; i < ps.size(); ++i) {
        if (squared_norm(q - ps.positions[i]) <= radius * radius) {
            out.push_back(i);
        }
    }
    return out;
}

int brute_nearest(const PointSet& ps, Vec2 q) {
    int best = 0;
    double best_d2 = squared_norm(q - ps.positions[0]);
    for (int i = 1; i < ps.size(); ++i) {
        const double d2 = squared_norm(q - ps.positions[i]);
        if (d2 < best_d2) {
            best = i;
            best_d2 = d2;
        }
    }
    return best;
}

}  // namespace

TEST_CASE("build_bin_grid indexes every point exactly once") {
    SUBCASE("single point") {
        const PointSet ps = gmi_test::single_point(0, 0, 0.5);
        const BinGrid grid = build_bin_grid(ps, 1.0);
        CHECK(grid.point_index.size() == 1);
        CHECK(query_radius(grid, ps, {0, 0}, 0.5) == std::vector<int>{0});
    }
    SUBCASE("four corners of a 10x10 square, one cell spans it") {
        PointSet ps;
        ps.channels = 1;
        ps.positions = {{0, 0}, {10, 0}, {0, 10}, {10, 10}};
        ps.colors = {0.1, 0.2, 0.3, 0.4};
        const BinGrid grid = build_bin_grid(ps, 10.0);
        CHECK(grid.bin_start.back() == 4);
        for (int i = 0; i < 4; ++i) {
            const auto hits = query_radius(grid, ps, ps.positions[i], 0.1);
            CHECK(hits == std::vector<int>{i});
        }
    }
    SUBCASE("1000 random points, conservation of count") {
        Rng rng(77);
        PointSet ps;
        ps.channels = 1;
        for (int i = 0; i < 1000; ++i) {
            ps.positions.push_back(
                {rng.uniform(0, 64), rng.uniform(0, 64)});
            ps.colors.push_back(0.5);
        }
        const BinGrid grid = build_bin_grid(ps, 4.0);
        CHECK(grid.bin_start.back() == 1000);
        CHECK(grid.point_index.size() == 1000);
        // every index present exactly once
        std::vector<int> sorted = grid.point_index;
        std::sort(sorted.begin(), sorted.end());
        bool ok = true;
        for (int i = 0; i < 1000; ++i) {
            ok = ok && sorted[i] == i;
        }
        CHECK(ok);
    }
}

TEST_CASE("build_bin_grid rejects bad cell sizes") {
    const PointSet ps = gmi_test::single_point(0, 0, 0.5);
    CHECK_THROWS_AS(build_bin_grid(ps, 0.0), Error);
    CHECK_THROWS_AS(build_bin_grid(ps, -1.0), Error);
    CHECK_THROWS_AS(build_bin_grid(ps, std::nan("")), Error);
}

TEST_CASE("query_radius basics") {
    PointSet ps;
    ps.channels = 1;
    ps.positions = {{0, 0}, {10, 10}};
    ps.colors = {0.0, 1.0};
    const BinGrid grid = build_bin_grid(ps, 3.0);
    CHECK(query_radius(grid, ps, {0, 0}, 1.0) == std::vector<int>{0});
    CHECK(query_radius(grid, ps, {5, 5}, 1.0).empty());
    // closed ball: a point exactly at the radius is included
    CHECK(query_radius(grid, ps, {3, 0}, 3.0) == std::vector<int>{0});
}

TEST_CASE("query_radius matches the brute-force scan") {
    Rng rng(123);
    const PointSet ps = gmi_test::random_points(rng, 200, 1, 32.0);
    const double sigma = 1.1;
    const BinGrid grid = build_bin_grid(ps, 3.0 * sigma);
    for (int k = 0; k < 50; ++k) {
        const Vec2 q{rng.uniform(-2, 34), rng.uniform(-2, 34)};
        CHECK(query_radius(grid, ps, q, 3.0 * sigma) ==
              brute_radius(ps, q, 3.0 * sigma));
    }
}

TEST_CASE("query_radius monotonicity and cell-size independence") {
    Rng rng(321);
    const PointSet ps = gmi_test::random_points(rng, 120, 1, 20.0);
    const BinGrid fine = build_bin_grid(ps, 0.7);
    const BinGrid coarse = build_bin_grid(ps, 9.0);
    for (int k = 0; k < 40; ++k) {
        const Vec2 q{rng.uniform(-3, 23), rng.uniform(-3, 23)};
        const double r1 = rng.uniform(0.1, 4.0);
        const double r2 = r1 + rng.uniform(0.0, 4.0);
        const auto small = query_radius(fine, ps, q, r1);
        const auto large = query_radius(fine, ps, q, r2);
        CHECK(std::includes(large.begin(), large.end(), small.begin(),
                            small.end()));
        CHECK(query_radius(coarse, ps, q, r1) == small);
    }
}

TEST_CASE("nearest_point basics") {
    SUBCASE("single point") {
        const PointSet ps = gmi_test::single_point(5, 5, 0.5);
        const BinGrid grid = build_bin_grid(ps, 1.0);
        CHECK(nearest_point(grid, ps, {100, -40}) == 0);
    }
    SUBCASE("equidistant tie breaks to the smaller index") {
        PointSet ps;
        ps.channels = 1;
        ps.positions = {{2, 0}, {-2, 0}};
        ps.colors = {0.0, 1.0};
        const BinGrid grid = build_bin_grid(ps, 1.0);
        CHECK(nearest_point(grid, ps, {0, 0}) == 0);
        PointSet swapped = ps;
        std::swap(swapped.positions[0], swapped.positions[1]);
        const BinGrid grid2 = build_bin_grid(swapped, 1.0);
        CHECK(nearest_point(grid2, swapped, {0, 0}) == 0);
    }
}

TEST_CASE("nearest_point matches the brute-force argmin") {
    Rng rng(999);
    const PointSet ps = gmi_test::random_points(rng, 500, 1, 40.0);
    for (double cell : {0.5, 2.0, 17.0}) {
        const BinGrid grid = build_bin_grid(ps, cell);
        for (int k = 0; k < 100; ++k) {
            const Vec2 q{rng.uniform(-60, 100), rng.uniform(-60, 100)};
            const int got = nearest_point(grid, ps, q);
            CHECK(got == brute_nearest(ps, q));
            // containment in any radius strictly past the nearest distance
            const double d =
                std::sqrt(squared_norm(q - ps.positions[got]));
            const auto hits = query_radius(grid, ps, q, d + 1e-9);
            CHECK(std::binary_search(hits.begin(), hits.end(), got));
        }
    }
}

TEST_CASE("duplicate positions are all retained") {
    PointSet ps;
    ps.channels = 1;
    ps.positions = {{1, 1}, {1, 1}, {1, 1}};
    ps.colors = {0.1, 0.2, 0.3};
    const BinGrid grid = build_bin_grid(ps, 2.0);
    CHECK(query_radius(grid, ps, {1, 1}, 0.5) ==
          std::vector<int>{0, 1, 2});
}
