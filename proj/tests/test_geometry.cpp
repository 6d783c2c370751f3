// SPDX-License-Identifier: Apache-2.0
//
// uvchan: multi-UAV to multi-vehicle radio channel simulator
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "uvchan/geometry.hpp"
#include "uvchan/rng.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

using namespace uvchan;
using namespace uvchan::geometry;
using std::numbers::pi;

namespace
{

Vec3 random_point(Stream &s, double half)
{
    return {s.uniform(-half, half), s.uniform(-half, half), s.uniform(0.0, half)};
}

} // namespace

TEST_CASE("link distance", "[geometry]")
{
    REQUIRE(link_distance({0, 0, 50}, {0, 0, 0}) == 50.0);
    REQUIRE(link_distance({3, 4, 0}, {0, 0, 0}) == 5.0);
    Stream s(1);
    for (int k = 0; k < 1000; ++k)
    {
        const Vec3 a = random_point(s, 500.0), b = random_point(s, 500.0);
        const double dx = a.x - b.x, dy = a.y - b.y, dz = a.z - b.z;
        REQUIRE(link_distance(a, b) == Catch::Approx(std::sqrt(dx * dx + dy * dy + dz * dz)).epsilon(1e-12));
        REQUIRE(link_distance(a, b) == link_distance(b, a));
    }
    REQUIRE(link_distance({1, 2, 3}, {1, 2, 3}) == 0.0);
}

TEST_CASE("excess distance ratio", "[geometry]")
{
    REQUIRE(excess_distance_ratio({0, 0, 0}, {100, 0, 0}, {50, 0, 0}) == Catch::Approx(0.0).margin(1e-15));
    REQUIRE(excess_distance_ratio({0, 0, 0}, {100, 0, 0}, {50, 50, 0}) ==
            Catch::Approx((2.0 * std::sqrt(50.0 * 50.0 + 50.0 * 50.0) - 100.0) / 100.0).epsilon(1e-14));
    REQUIRE(excess_distance_ratio({0, 0, 0}, {100, 0, 0}, {50, 50, 0}) == Catch::Approx(0.4142).margin(5e-5));
    Stream s(2);
    for (int k = 0; k < 10000; ++k)
        REQUIRE(excess_distance_ratio(random_point(s, 300.0), random_point(s, 300.0) + Vec3{0, 0, 1},
                                      random_point(s, 300.0)) >= -1e-12);
    REQUIRE_THROWS_AS(excess_distance_ratio({1, 1, 1}, {1, 1, 1}, {0, 0, 0}), DegenerateGeometry);
}

TEST_CASE("placement closed form", "[geometry]")
{
    const Vec3 tx{0, 0, 0}, rx{100, 0, 0};
    // Along the LoS: d1 = (120^2 - 100^2) / (2 (120 - 100)).
    const Vec3 s0 = place_scatterer(tx, rx, Vec3{1, 0, 0}, 0.2);
    REQUIRE(norm(s0 - tx) == 110.0);
    REQUIRE(norm(s0 - tx) + norm(rx - s0) == Catch::Approx(120.0).epsilon(1e-15));
    // Broadside: d1 = (125^2 - 100^2) / (2 * 125).
    const Vec3 s1 = place_scatterer(tx, rx, Vec3{0, 1, 0}, 0.25);
    REQUIRE(norm(s1 - tx) == Catch::Approx(22.5).epsilon(1e-14));
    REQUIRE(excess_distance_ratio(tx, rx, s1) == Catch::Approx(0.25).epsilon(1e-12));
    REQUIRE_THROWS_AS(place_scatterer(tx, rx, Vec3{1, 0, 0}, 0.0), PlacementError);
    REQUIRE_THROWS_AS(place_scatterer(tx, tx, Vec3{1, 0, 0}, 0.2), DegenerateGeometry);
}

TEST_CASE("placement round-trips ratio and angles", "[geometry]")
{
    Stream s(3);
    for (int k = 0; k < 10000; ++k)
    {
        const Vec3 tx = random_point(s, 200.0) + Vec3{0, 0, 20};
        const Vec3 rx = random_point(s, 200.0);
        if (link_distance(tx, rx) < 1.0)
            continue;
        const double az = s.uniform(-pi, pi), el = s.uniform(-1.4, 1.4), yaw = s.uniform(-pi, pi);
        const double ratio = s.uniform(0.01, 3.0);
        const Vec3 p = place_scatterer(tx, rx, az, el, yaw, ratio);
        REQUIRE(excess_distance_ratio(tx, rx, p) == Catch::Approx(ratio).margin(1e-9));
        const auto a = angles_of(tx, rx, p, yaw, 0.0);
        REQUIRE(std::abs(wrap_pi(a.aaod - az)) < 1e-9);
        REQUIRE(a.eaod == Catch::Approx(el).margin(1e-9));
    }
}

TEST_CASE("angles of simple configurations", "[geometry]")
{
    const auto up = angles_of({0, 0, 0}, {100, 0, 0}, {0, 0, 10}, 0.0, 0.0);
    REQUIRE(up.eaod == Catch::Approx(pi / 2).epsilon(1e-15));
    const auto east = angles_of({0, 0, 0}, {100, 0, 0}, {10, 0, 0}, 0.0, 0.0);
    REQUIRE(east.aaod == 0.0);
    REQUIRE(east.eaod == 0.0);
    // Arrival angles are measured from the receiver.
    REQUIRE(std::abs(east.aaoa) == Catch::Approx(pi).epsilon(1e-15));
    // Heading rotates the frame.
    const auto rotated = angles_of({0, 0, 0}, {100, 0, 0}, {0, 10, 0}, pi / 2, 0.0);
    REQUIRE(rotated.aaod == Catch::Approx(0.0).margin(1e-15));
}

TEST_CASE("angle ratio conversion and wrapping", "[geometry]")
{
    REQUIRE(ratio_to_angle(0.0, 123.0) == 0.0);
    REQUIRE(ratio_to_angle(0.01, 100.0) == Catch::Approx(1.0).epsilon(1e-15));
    REQUIRE(ratio_to_angle(1.5 * pi / 100.0, 100.0) == Catch::Approx(-pi / 2).epsilon(1e-14));
    REQUIRE(angle_to_ratio(1.0, 100.0) == 0.01);
    REQUIRE(wrap_pi(pi) == pi);
    REQUIRE(wrap_pi(-pi) == pi);
    REQUIRE(wrap_pi(3 * pi) == Catch::Approx(pi).epsilon(1e-15));
    REQUIRE_THROWS_AS(ratio_to_angle(0.1, 0.0), DegenerateGeometry);
}

TEST_CASE("trajectories interpolate and extrapolate", "[geometry]")
{
    const Trajectory t("a", AgentKind::Vehicle, {{0.0, {0, 0, 1.5}}, {1.0, {10, 0, 1.5}}, {2.0, {10, 5, 1.5}}});
    REQUIRE(t.position(0.5) == Vec3{5, 0, 1.5});
    REQUIRE(t.velocity(0.5) == Vec3{10, 0, 0});
    REQUIRE(t.velocity(1.0) == Vec3{0, 5, 0});
    REQUIRE(t.position(3.0) == Vec3{10, 10, 1.5});
    REQUIRE(t.position(-1.0) == Vec3{-10, 0, 1.5});
    REQUIRE_THROWS_AS(Trajectory("b", AgentKind::Uav, {}), std::invalid_argument);
    REQUIRE_THROWS_AS(Trajectory("b", AgentKind::Uav, {{1.0, {}}, {1.0, {}}}), std::invalid_argument);

    const auto s = straight_track("u", AgentKind::Uav, {0, 0, 50}, {3, 4, 0}, 0.0, 2.0);
    REQUIRE(s.position(2.0) == Vec3{6, 8, 50});
    REQUIRE(heading_yaw({0, 1, 0}) == Catch::Approx(pi / 2));
    REQUIRE(heading_yaw({0, 0, 3}) == 0.0);
}
