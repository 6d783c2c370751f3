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

#include <algorithm>
#include <numbers>

namespace uvchan::geometry
{

Trajectory::Trajectory(std::string id, AgentKind kind, std::vector<Waypoint> waypoints)
    : id_(std::move(id)), kind_(kind), wp_(std::move(waypoints))
{
    if (wp_.empty())
        throw std::invalid_argument("trajectory '" + id_ + "': no waypoints");
    for (std::size_t k = 1; k < wp_.size(); ++k)
        if (!(wp_[k].t > wp_[k - 1].t))
            throw std::invalid_argument("trajectory '" + id_ + "': waypoint times must be strictly increasing");
}

std::size_t Trajectory::segment(double t) const
{
    // Index k of the segment [wp_k, wp_k+1] used at time t.
    if (wp_.size() < 2 || t < wp_[1].t)
        return 0;
    auto it = std::upper_bound(wp_.begin(), wp_.end(), t, [](double v, const Waypoint &w) { return v < w.t; });
    std::size_t k = static_cast<std::size_t>(it - wp_.begin()) - 1;
    return std::min(k, wp_.size() - 2);
}

Vec3 Trajectory::velocity(double t) const
{
    if (wp_.size() < 2)
        return {};
    const std::size_t k = segment(t);
    return (wp_[k + 1].p - wp_[k].p) / (wp_[k + 1].t - wp_[k].t);
}

Vec3 Trajectory::position(double t) const
{
    if (wp_.size() < 2)
        return wp_.front().p;
    const std::size_t k = segment(t);
    if (t == wp_[k].t)
        return wp_[k].p;
    if (k + 1 < wp_.size() && t == wp_[k + 1].t)
        return wp_[k + 1].p;
    return wp_[k].p + velocity(t) * (t - wp_[k].t);
}

Trajectory straight_track(std::string id, AgentKind kind, Vec3 p0, Vec3 velocity, double t_start, double t_end)
{
    return Trajectory(std::move(id), kind, {{t_start, p0}, {t_end, p0 + velocity * (t_end - t_start)}});
}

double wrap_pi(double a)
{
    constexpr double two_pi = 2.0 * std::numbers::pi;
    double r = std::fmod(a, two_pi);
    if (r <= -std::numbers::pi)
        r += two_pi;
    else if (r > std::numbers::pi)
        r -= two_pi;
    return r;
}

double link_distance(const Vec3 &tx, const Vec3 &rx) { return norm(tx - rx); }

double excess_distance_ratio(const Vec3 &tx, const Vec3 &rx, const Vec3 &s)
{
    const double d = link_distance(tx, rx);
    if (!(d > 0.0))
        throw DegenerateGeometry("excess_distance_ratio: coincident endpoints");
    return (norm(tx - s) + norm(rx - s) - d) / d;
}

double heading_yaw(const Vec3 &v)
{
    if (v.x == 0.0 && v.y == 0.0)
        return 0.0;
    return std::atan2(v.y, v.x);
}

Vec3 direction(double azimuth, double elevation, double yaw)
{
    const double az = azimuth + yaw;
    const double ce = std::cos(elevation);
    return {ce * std::cos(az), ce * std::sin(az), std::sin(elevation)};
}

Vec3 place_scatterer(const Vec3 &origin, const Vec3 &other, const Vec3 &unit_dir, double excess_ratio)
{
    const Vec3 los = other - origin;
    const double d = norm(los);
    if (!(d > 0.0))
        throw DegenerateGeometry("place_scatterer: coincident endpoints");
    if (!(excess_ratio > 0.0) || !std::isfinite(excess_ratio))
        throw PlacementError("place_scatterer: excess ratio must be positive and finite");
    const double cos_theta = dot(unit_dir, los) / (norm(unit_dir) * d);
    const double s_tot = (1.0 + excess_ratio) * d;
    const double d1 = (s_tot * s_tot - d * d) / (2.0 * (s_tot - d * cos_theta));
    if (!(d1 > 0.0) || !std::isfinite(d1))
        throw PlacementError("place_scatterer: infeasible direction and ratio");
    return origin + unit_dir * (d1 / norm(unit_dir));
}

Vec3 place_scatterer(const Vec3 &origin, const Vec3 &other, double azimuth, double elevation, double yaw,
                     double excess_ratio)
{
    return place_scatterer(origin, other, direction(azimuth, elevation, yaw), excess_ratio);
}

namespace
{

void az_el(const Vec3 &v, double yaw, double &az, double &el)
{
    const double r = norm(v);
    if (!(r > 0.0))
        throw DegenerateGeometry("angles_of: zero-length direction");
    el = std::asin(std::clamp(v.z / r, -1.0, 1.0));
    az = (v.x == 0.0 && v.y == 0.0) ? 0.0 : wrap_pi(std::atan2(v.y, v.x) - yaw);
}

} // namespace

RayAngles angles_of(const Vec3 &tx, const Vec3 &rx, const Vec3 &s, double tx_yaw, double rx_yaw)
{
    RayAngles a;
    az_el(s - tx, tx_yaw, a.aaod, a.eaod);
    az_el(s - rx, rx_yaw, a.aaoa, a.eaoa);
    return a;
}

double ratio_to_angle(double angle_ratio, double link_dist)
{
    if (!(link_dist > 0.0))
        throw DegenerateGeometry("ratio_to_angle: zero link distance");
    return wrap_pi(angle_ratio * link_dist);
}

double angle_to_ratio(double angle, double link_dist)
{
    if (!(link_dist > 0.0))
        throw DegenerateGeometry("angle_to_ratio: zero link distance");
    return angle / link_dist;
}

} // namespace uvchan::geometry
