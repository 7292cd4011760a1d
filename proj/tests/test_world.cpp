#include <doctest.h>

#include <cmath>
#include <limits>

#include "socnav/rng.hpp"
#include "socnav/world.hpp"
#include "support/helpers.hpp"

using namespace socnav;

namespace {

// Independent oracle: exhaustive nearest-occupied scan over cell centers.
double brute_force_distance(const OccupancyGrid& g, int cx, int cy) {
    double best = std::numeric_limits<double>::infinity();
    for (int oy = 0; oy < g.height(); ++oy)
        for (int ox = 0; ox < g.width(); ++ox)
            if (g.occupied(ox, oy)) {
                const double dx = static_cast<double>(cx - ox);
                const double dy = static_cast<double>(cy - oy);
                best = std::min(best, std::sqrt(dx * dx + dy * dy) * g.resolution());
            }
    return best;
}

GridPtr random_grid(Rng& rng, int size, double fill) {
    std::vector<std::uint8_t> cells(static_cast<std::size_t>(size) * size, 0);
    for (auto& c : cells) c = rng.next_double() < fill ? 1 : 0;
    return std::make_shared<OccupancyGrid>(size, size, 0.25, Pose2D{}, std::move(cells));
}

}  // namespace

TEST_SUITE_BEGIN("world");

TEST_CASE("wrap_angle lands in (-pi, pi]") {
    CHECK(wrap_angle(kPi) == doctest::Approx(kPi));
    CHECK(wrap_angle(-kPi) == doctest::Approx(kPi));
    CHECK(wrap_angle(3 * kPi / 2) == doctest::Approx(-kPi / 2));
    CHECK(wrap_angle(0.0) == doctest::Approx(0.0));
    Rng rng(7);
    for (int i = 0; i < 1000; ++i) {
        const double w = wrap_angle(rng.uniform(-50, 50));
        CHECK(w > -kPi - 1e-12);
        CHECK(w <= kPi + 1e-12);
    }
}

TEST_CASE("distance query on an empty map returns the infinity sentinel") {
    auto grid = test::empty_grid(10.0, 0.1);
    const auto q = distance_to_nearest_obstacle(*grid, {5, 5});
    CHECK(std::isinf(q.distance));
    CHECK(q.direction_away == Vec2{});
}

TEST_CASE("distance and direction to a single occupied cell") {
    // 10x10 m map at 0.1 m resolution; the occupied cell centered at (1.95, 4.95)
    // queried from 3 m due east.
    const int n = 100;
    std::vector<std::uint8_t> cells(static_cast<std::size_t>(n) * n, 0);
    cells[static_cast<std::size_t>(49) * n + 19] = 1;
    OccupancyGrid grid(n, n, 0.1, Pose2D{}, std::move(cells));

    const Vec2 obstacle{1.95, 4.95};
    const Vec2 p{4.95, 4.95};
    const auto q = distance_to_nearest_obstacle(grid, p);
    CHECK(q.distance == doctest::Approx(3.0).epsilon(0.05));
    CHECK(q.direction_away.x == doctest::Approx(1.0));
    CHECK(q.direction_away.y == doctest::Approx(0.0).epsilon(1e-9));
    CHECK((p - obstacle).norm() == doctest::Approx(q.distance));
}

TEST_CASE("point on an occupied cell has distance zero and no direction") {
    auto grid = OccupancyGrid::from_ascii("...\n.#.\n...", 1.0);
    const auto q = distance_to_nearest_obstacle(*grid, {1.5, 1.5});
    CHECK(q.distance == 0.0);
    CHECK(q.direction_away == Vec2{});
}

TEST_CASE("out-of-bounds distance query raises") {
    auto grid = test::empty_grid(5.0, 0.5);
    CHECK_THROWS_WITH_AS(distance_to_nearest_obstacle(*grid, {12, 1}),
                         doctest::Contains("outside map"), std::out_of_range);
}

TEST_CASE("distance field matches the brute-force oracle on random grids") {
    Rng rng(42);
    for (int trial = 0; trial < 12; ++trial) {
        auto grid = random_grid(rng, 32, trial % 3 == 0 ? 0.02 : 0.15);
        for (int cy = 0; cy < grid->height(); ++cy)
            for (int cx = 0; cx < grid->width(); ++cx) {
                const double expected = brute_force_distance(*grid, cx, cy);
                const double got = grid->distance_field(cx, cy);
                if (std::isinf(expected)) {
                    CHECK(std::isinf(got));
                } else {
                    // spec bound: within one cell; the transform is exact
                    CHECK(std::abs(got - expected) <= grid->resolution());
                    CHECK(got == doctest::Approx(expected).epsilon(1e-12));
                }
                if (grid->occupied(cx, cy)) CHECK(got == 0.0);
            }
    }
}

TEST_CASE("line of sight on an empty map") {
    auto grid = test::empty_grid(10.0, 0.1);
    CHECK(line_of_sight(*grid, {0.5, 0.5}, {9.5, 9.5}));
    CHECK(line_of_sight(*grid, {1, 8}, {9, 0.2}));
}

TEST_CASE("a wall row blocks sight") {
    auto grid = OccupancyGrid::from_ascii(
        ".....\n"
        ".....\n"
        "#####\n"
        ".....\n"
        ".....",
        1.0);
    CHECK_FALSE(line_of_sight(*grid, {2.5, 0.5}, {2.5, 4.5}));
    CHECK(line_of_sight(*grid, {0.5, 0.5}, {4.5, 1.5}));
}

TEST_CASE("degenerate segment sees itself") {
    auto grid = test::empty_grid();
    CHECK(line_of_sight(*grid, {3, 3}, {3, 3}));
}

TEST_CASE("line of sight endpoint out of bounds raises") {
    auto grid = test::empty_grid(5.0, 0.5);
    CHECK_THROWS_AS(line_of_sight(*grid, {1, 1}, {7, 1}), std::out_of_range);
}

TEST_CASE("line of sight is symmetric on random grids") {
    Rng rng(99);
    for (int trial = 0; trial < 8; ++trial) {
        auto grid = random_grid(rng, 24, 0.12);
        const double hi = 24 * 0.25 - 1e-6;
        for (int i = 0; i < 200; ++i) {
            const Vec2 a{rng.uniform(0, hi), rng.uniform(0, hi)};
            const Vec2 b{rng.uniform(0, hi), rng.uniform(0, hi)};
            CHECK(line_of_sight(*grid, a, b) == line_of_sight(*grid, b, a));
        }
    }
}

TEST_CASE("field-of-view checks") {
    const Pose2D east{0, 0, 0};
    CHECK(in_fov(east, {5, 0}, kPi / 2));                    // dead ahead
    CHECK_FALSE(in_fov(east, {0, 5}, kPi / 2));              // bearing pi/2 > pi/4
    CHECK(in_fov(Pose2D{0, 0, kPi}, {-5, 0}, kPi / 2));      // facing west, target west
    CHECK(in_fov(east, {0, 0}, kPi / 4));                    // coincident -> true
    CHECK_THROWS_AS(in_fov(east, {1, 0}, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(in_fov(east, {1, 0}, 7.0), std::invalid_argument);
}

TEST_CASE("full-circle fov sees every target") {
    Rng rng(5);
    for (int i = 0; i < 500; ++i) {
        const Pose2D obs{rng.uniform(-5, 5), rng.uniform(-5, 5), rng.uniform(-kPi, kPi)};
        const Vec2 target{rng.uniform(-5, 5), rng.uniform(-5, 5)};
        CHECK(in_fov(obs, target, 2 * kPi));
    }
}

TEST_CASE("inline ascii grids flip rows so the first text line is the top") {
    auto grid = OccupancyGrid::from_ascii("#..\n...\n...", 1.0);
    CHECK(grid->occupied(0, 2));        // top-left of the art = highest y
    CHECK_FALSE(grid->occupied(0, 0));
}

TEST_CASE("rotated map origins are rejected") {
    std::vector<std::uint8_t> cells(4, 0);
    CHECK_THROWS_AS(OccupancyGrid(2, 2, 0.5, Pose2D{0, 0, 0.3}, std::move(cells)),
                    std::invalid_argument);
}

TEST_CASE("snapshot agent lookup") {
    WorldSnapshot snap;
    snap.agents.push_back(test::make_agent(3, {1, 2}));
    snap.agents.push_back(test::make_agent(7, {4, 5}));
    CHECK(snap.find_agent(7)->position() == Vec2{4, 5});
    CHECK(snap.find_agent(4) == nullptr);
}

TEST_SUITE_END();
