#include <doctest.h>

#include <numbers>

#include "phonon_gauge/errors.hpp"
#include "phonon_gauge/model.hpp"

using namespace phonon_gauge;
using std::numbers::pi;

TEST_CASE("link layout with gradient") {
    ArraySpec spec;
    spec.layout = Layout::link;
    spec.dims = {3, 1};
    spec.spacings = {2.0, 1.0};
    spec.gradient = 0.05;
    const TrapArray a = build_array(spec);
    REQUIRE(a.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(a.site(i).coord.x == static_cast<int>(i));
        CHECK(a.site(i).position.x() == doctest::Approx(2.0 * i));
        CHECK(a.frequency(i, Direction::z) == doctest::Approx(1.0 + 0.05 * i));
        CHECK(a.frequency(i, Direction::x) == 1.0);
    }
}

TEST_CASE("plaquette ring order and cycle") {
    ArraySpec spec;
    spec.layout = Layout::plaquette;
    spec.dims = {2, 2};
    spec.spacings = {1.0, 1.5};
    const TrapArray a = build_array(spec);
    REQUIRE(a.size() == 4);
    CHECK(a.site(0).coord.x == 0);
    CHECK(a.site(1).coord.x == 1);
    CHECK(a.site(2).coord.y == 1);
    CHECK(a.site(2).coord.x == 1);
    CHECK(a.site(3).coord.x == 0);
    CHECK(a.site(3).position.y() == doctest::Approx(1.5));
    const auto cycle = a.elementary_plaquette({0, 0});
    CHECK(cycle == std::vector<std::size_t>{0, 1, 2, 3});
    CHECK(a.elementary_plaquette({1, 0}).empty());
}

TEST_CASE("square layout is row major") {
    ArraySpec spec;
    spec.layout = Layout::square;
    spec.dims = {3, 2};
    const TrapArray a = build_array(spec);
    REQUIRE(a.size() == 6);
    CHECK(*a.index_of({2, 1}) == 5);
    CHECK_FALSE(a.index_of({3, 0}).has_value());
}

TEST_CASE("rhombic ladder layout") {
    ArraySpec spec;
    spec.layout = Layout::rhombic_ladder;
    spec.dims = {3, 1};
    const TrapArray a = build_array(spec);
    CHECK(a.size() == 10);
}

TEST_CASE("invalid geometry") {
    ArraySpec spec;
    spec.layout = Layout::square;
    spec.dims = {0, 2};
    CHECK_THROWS_AS(build_array(spec), InvalidGeometry);
    spec.dims = {2, 2};
    spec.spacings = {0.0, 1.0};
    CHECK_THROWS_AS(build_array(spec), InvalidGeometry);
    spec.spacings = {1.0, 1.0};
    spec.base_frequencies = {1.0, -1.0, 1.0};
    CHECK_THROWS(build_array(spec));

    std::vector<Site> twins(2);
    CHECK_THROWS_AS(TrapArray(Layout::link, twins, 1.0, 1.0, Direction::z, 0.0, 0.002), InvalidGeometry);
}

TEST_CASE("laser identification") {
    LaserParameters laser;
    laser.rabi = 0.75;
    laser.beat_frequency = 0.05;
    laser.lamb_dicke = {0.0, 0.0, 0.2};
    const DriveSpec d = DriveSpec::from_laser(laser, 1, pi, 0.0);
    CHECK(d.mode == DriveMode::laser);
    CHECK(d.strength == doctest::Approx(0.6));
    CHECK(d.frequency == doctest::Approx(0.05));
    laser.rabi = 0.25;
    CHECK(DriveSpec::from_laser(laser, 1, pi, pi).strength == doctest::Approx(0.2));

    CHECK(d.site_phase({2, 3}) == doctest::Approx(2 * pi));
    CHECK(d.laser_phase({1, 0}) == doctest::Approx(-pi));
}

TEST_CASE("names round trip") {
    for (auto l : {Layout::link, Layout::plaquette, Layout::rhombic_ladder, Layout::square}) {
        CHECK(parse_layout(to_string(l)) == l);
    }
    for (auto d : {Direction::x, Direction::y, Direction::z}) CHECK(parse_direction(to_string(d)) == d);
    CHECK_THROWS(parse_layout("hexagon"));
}
