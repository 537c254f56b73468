#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <set>

#include "fsl/geometry.hpp"

using namespace fsl;

namespace {

std::string write_pgm(const std::string& name, int nx, int ny,
                      const std::vector<std::uint8_t>& pixels) {
    auto dir = std::filesystem::temp_directory_path() / "fsl_geom_test";
    std::filesystem::create_directories(dir);
    std::string path = (dir / name).string();
    std::ofstream out(path, std::ios::binary);
    out << "P5\n" << nx << " " << ny << "\n255\n";
    out.write(reinterpret_cast<const char*>(pixels.data()),
              static_cast<std::streamsize>(pixels.size()));
    return path;
}

}  // namespace

TEST_CASE("domain constructors validate extents") {
    CHECK_THROWS_AS(make_interval(1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(make_interval(2.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(make_box({0, 0}, {0, 1}), std::invalid_argument);
    CHECK_THROWS_AS(make_ball({0, 0}, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(make_ball({0, 0}, -1.0), std::invalid_argument);
}

TEST_CASE("measure, diameter, inner radius of primitives") {
    Domain I = make_interval(-1.0, 1.0);
    CHECK(measure(I) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(inner_radius(I) == doctest::Approx(1.0).epsilon(1e-15));

    Domain B = make_box({0, 0}, {std::numbers::pi, std::numbers::pi});
    CHECK(measure(B) == doctest::Approx(std::numbers::pi * std::numbers::pi).epsilon(1e-15));
    CHECK(inner_radius(B) == doctest::Approx(std::numbers::pi / 2).epsilon(1e-15));

    Domain B2 = make_box({0, 0}, {2, 4});
    CHECK(inner_radius(B2) == doctest::Approx(1.0).epsilon(1e-15));

    Domain S = make_ball({0.5, -2.0}, 3.0);
    CHECK(inner_radius(S) == doctest::Approx(3.0).epsilon(1e-15));
    CHECK(diameter(S) == doctest::Approx(6.0).epsilon(1e-15));
}

TEST_CASE("rasterize: interval cells sit at half-integer multiples") {
    Grid g = rasterize(make_interval(0.0, 1.0), 0.25);
    REQUIRE(g.size() == 4);
    CHECK(g.cx[0] == doctest::Approx(0.125).epsilon(1e-15));
    CHECK(g.cx[1] == doctest::Approx(0.375).epsilon(1e-15));
    CHECK(g.cx[2] == doctest::Approx(0.625).epsilon(1e-15));
    CHECK(g.cx[3] == doctest::Approx(0.875).epsilon(1e-15));
}

TEST_CASE("rasterize: unit disk at h = 0.5 has 12 interior centers") {
    Grid g = rasterize(make_ball({0, 0}, 1.0), 0.5);
    CHECK(g.size() == 12);
    for (std::size_t i = 0; i < g.size(); ++i)
        CHECK(std::hypot(g.cx[i], g.cy[i]) < 1.0);
}

TEST_CASE("rasterize: 3x3 box grid") {
    Grid g = rasterize(make_box({0, 0}, {1, 1}), 1.0 / 3.0);
    CHECK(g.size() == 9);
}

TEST_CASE("rasterize: degenerate spacing is an error") {
    CHECK_THROWS_AS(rasterize(make_interval(0.0, 1.0), 2.0), std::invalid_argument);
}

TEST_CASE("rasterize refinement keeps every covered coarse cell") {
    // each interior h-cell splits into 2 (1D) or 4 (2D) h/2-subcells; on
    // aligned flat boundaries all of them stay interior, and on any convex
    // primitive at least one does, so refinement never loses a covered cell
    for (const Domain& d : {make_interval(-1.0, 1.0), make_ball({0, 0}, 1.0),
                            make_box({0, 0}, {1.5, 0.75})}) {
        double h = 0.25;
        Grid coarse = rasterize(d, h);
        Grid fine = rasterize(d, h / 2);
        std::set<std::pair<long, long>> fine_cells;
        for (std::size_t i = 0; i < fine.size(); ++i)
            fine_cells.insert({std::lround(std::floor((fine.cx[i] - fine.origin[0]) / (h / 2))),
                               d.dim == 2 ? std::lround(std::floor((fine.cy[i] - fine.origin[1]) /
                                                                   (h / 2)))
                                          : 0});
        for (std::size_t i = 0; i < coarse.size(); ++i) {
            long bx = std::lround(std::floor((coarse.cx[i] - fine.origin[0]) / (h / 2) - 0.5));
            long by = d.dim == 2
                          ? std::lround(std::floor((coarse.cy[i] - fine.origin[1]) / (h / 2) - 0.5))
                          : 0;
            int kept = 0, total = 0;
            for (long dx = 0; dx < 2; ++dx) {
                for (long dy = 0; dy < (d.dim == 2 ? 2 : 1); ++dy) {
                    ++total;
                    if (fine_cells.count({bx + dx, d.dim == 2 ? by + dy : 0})) ++kept;
                }
            }
            CHECK(kept >= 1);
            if (d.kind != Domain::Kind::ball) CHECK(kept == total);
        }
        CHECK(fine.size() > coarse.size());
    }
}

TEST_CASE("schwarz ball preserves measure and centers the result") {
    Domain sq = schwarz_ball(make_box({0, 0}, {2, 2}));
    REQUIRE(sq.kind == Domain::Kind::ball);
    CHECK(sq.center[0] == 0.0);
    CHECK(sq.center[1] == 0.0);
    CHECK(sq.radius == doctest::Approx(2.0 / std::sqrt(std::numbers::pi)).epsilon(1e-14));
    CHECK(measure(sq) == doctest::Approx(4.0).epsilon(1e-12));

    Domain iv = schwarz_ball(make_interval(0.0, 2.0));
    REQUIRE(iv.kind == Domain::Kind::interval);
    CHECK(iv.a == doctest::Approx(-1.0).epsilon(1e-15));
    CHECK(iv.b == doctest::Approx(1.0).epsilon(1e-15));

    Domain same = schwarz_ball(make_ball({0, 0}, 3.0));
    REQUIRE(same.kind == Domain::Kind::ball);
    CHECK(same.radius == doctest::Approx(3.0).epsilon(1e-12));

    // generic measure match
    Domain odd = make_box({-0.3, 0.7}, {1.9, 1.4});
    CHECK(measure(schwarz_ball(odd)) == doctest::Approx(measure(odd)).epsilon(1e-12));
}

TEST_CASE("boundary distance on primitives") {
    CHECK(boundary_distance(make_interval(-1, 1), {0.5, 0}) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(boundary_distance(make_box({0, 0}, {std::numbers::pi, std::numbers::pi}), {1, 2}) ==
          doctest::Approx(1.0).epsilon(1e-15));
    CHECK(boundary_distance(make_ball({0, 0}, 2.0), {0, 1.5}) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK_THROWS_AS(boundary_distance(make_interval(-1, 1), {1.5, 0}), std::invalid_argument);
    CHECK_THROWS_AS(boundary_distance(make_ball({0, 0}, 1.0), {2, 0}), std::invalid_argument);
}

TEST_CASE("boundary distance is bounded by the inner radius") {
    Domain d = make_ball({0.5, 0.5}, 2.0);
    Grid g = rasterize(d, 0.25);
    double best = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        double bd = boundary_distance(d, g.at(i));
        CHECK(bd <= inner_radius(d) + 1e-12);
        best = std::max(best, bd);
    }
    // incenter cell comes within a cell of attaining it
    CHECK(best > inner_radius(d) - 0.25);
    CHECK(boundary_distance(d, {0.5, 0.5}) == doctest::Approx(inner_radius(d)).epsilon(1e-15));
}

TEST_CASE("domain spec strings round-trip") {
    for (const char* spec : {"interval:-1,1", "box:0,0,2,4", "ball:0.5,-2,3"}) {
        Domain d = parse_domain_spec(spec);
        Domain d2 = parse_domain_spec(domain_spec(d));
        CHECK(d2.kind == d.kind);
        CHECK(measure(d2) == doctest::Approx(measure(d)).epsilon(1e-15));
    }
    CHECK_THROWS_AS(parse_domain_spec("interval:1"), std::invalid_argument);
    CHECK_THROWS_AS(parse_domain_spec("pyramid:1,2,3"), std::invalid_argument);
    CHECK_THROWS_AS(parse_domain_spec("ball:0,0,-1"), std::invalid_argument);
}

TEST_CASE("raster PGM round-trip: full square") {
    // 8x8 all-inside block of pitch 0.125 covers (0,1)^2
    std::vector<std::uint8_t> px(64, 255);
    std::string path = write_pgm("square.pgm", 8, 8, px);
    Domain d = make_raster(path, 0.125);
    CHECK(d.dim == 2);
    CHECK(measure(d) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(d.contains({0.5, 0.5}));
    CHECK(!d.contains({1.2, 0.5}));

    Grid g = rasterize(d, 0.125);
    CHECK(g.size() == 64);

    // inner radius of the unit square is 0.5; the transform reports a lower
    // bound within one pitch
    double R = inner_radius(d);
    CHECK(R <= 0.5 + 1e-12);
    CHECK(R >= 0.5 - 0.125 - 1e-12);
}

TEST_CASE("raster with a hole excludes the hole") {
    std::vector<std::uint8_t> px(64, 255);
    for (int r = 3; r <= 4; ++r)
        for (int c = 3; c <= 4; ++c) px[r * 8 + c] = 0;
    std::string path = write_pgm("holed.pgm", 8, 8, px);
    Domain d = make_raster(path, 0.125);
    CHECK(measure(d) == doctest::Approx(60.0 / 64.0).epsilon(1e-12));
    CHECK(!d.contains({0.5, 0.5}));
    CHECK(d.contains({0.1, 0.1}));
    Grid g = rasterize(d, 0.125);
    CHECK(g.size() == 60);
}

TEST_CASE("raster parse errors name the problem") {
    auto dir = std::filesystem::temp_directory_path() / "fsl_geom_test";
    std::filesystem::create_directories(dir);
    std::string bad = (dir / "bad.pgm").string();
    {
        std::ofstream out(bad, std::ios::binary);
        out << "P2\n2 2\n255\n0 0 0 0\n";
    }
    CHECK_THROWS_AS(make_raster(bad, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(make_raster((dir / "missing.pgm").string(), 0.1), std::invalid_argument);
}
