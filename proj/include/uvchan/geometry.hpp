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

#pragma once

#include "uvchan/params.hpp"

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace uvchan::geometry
{

struct Vec3
{
    double x = 0.0, y = 0.0, z = 0.0;

    Vec3 operator+(const Vec3 &o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3 &o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
    Vec3 &operator+=(const Vec3 &o)
    {
        x += o.x;
        y += o.y;
        z += o.z;
        return *this;
    }
    bool operator==(const Vec3 &) const = default;
};

inline double dot(const Vec3 &a, const Vec3 &b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline double norm(const Vec3 &a) { return std::sqrt(dot(a, a)); }
inline Vec3 cross(const Vec3 &a, const Vec3 &b)
{
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

class DegenerateGeometry : public std::invalid_argument
{
  public:
    using std::invalid_argument::invalid_argument;
};

class PlacementError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

enum class AgentKind
{
    Uav,
    Vehicle
};

// Piecewise-linear waypoint track. Extrapolates with the first/last segment velocity.
class Trajectory
{
  public:
    struct Waypoint
    {
        double t;
        Vec3 p;
    };

    Trajectory() = default;
    Trajectory(std::string id, AgentKind kind, std::vector<Waypoint> waypoints);

    const std::string &id() const { return id_; }
    AgentKind kind() const { return kind_; }
    const std::vector<Waypoint> &waypoints() const { return wp_; }

    Vec3 position(double t) const;
    Vec3 velocity(double t) const; // right-continuous at waypoint times

  private:
    std::size_t segment(double t) const;

    std::string id_;
    AgentKind kind_ = AgentKind::Uav;
    std::vector<Waypoint> wp_;
};

// Straight constant-velocity track covering [t_start, t_end].
Trajectory straight_track(std::string id, AgentKind kind, Vec3 p0, Vec3 velocity, double t_start, double t_end);

struct RayAngles
{
    double aaod = 0.0; // (-pi, pi]
    double eaod = 0.0; // [-pi/2, pi/2]
    double aaoa = 0.0;
    double eaoa = 0.0;
};

enum class Side
{
    TxSide,
    RxSide,
    Shared
};

struct ScattererInstance
{
    std::uint32_t id = 0;
    params::ScattererClass cls = params::ScattererClass::Static;
    Vec3 position;    // at birth_time
    Vec3 velocity;    // m/s, constant
    double birth_time = 0.0;
    Side side = Side::Shared;

    Vec3 position_at(double t) const { return position + velocity * (t - birth_time); }
};

double wrap_pi(double a); // into (-pi, pi]

double link_distance(const Vec3 &tx, const Vec3 &rx);

// (|T-S| + |R-S| - |T-R|) / |T-R|
double excess_distance_ratio(const Vec3 &tx, const Vec3 &rx, const Vec3 &s);

// Heading yaw of a velocity; 0 (world x axis) when the horizontal speed is zero.
double heading_yaw(const Vec3 &velocity);

// Unit vector for (azimuth, elevation) relative to a frame rotated by yaw about z.
Vec3 direction(double azimuth, double elevation, double yaw = 0.0);

// Point s on the ray origin + d1*u with |origin-s| + |other-s| = (1 + ratio)|origin-other|.
Vec3 place_scatterer(const Vec3 &origin, const Vec3 &other, const Vec3 &unit_dir, double excess_ratio);
Vec3 place_scatterer(const Vec3 &origin, const Vec3 &other, double azimuth, double elevation, double yaw,
                     double excess_ratio);

// Departure angles of (s - tx) in the tx frame, arrival angles of (s - rx) in the rx frame.
RayAngles angles_of(const Vec3 &tx, const Vec3 &rx, const Vec3 &s, double tx_yaw, double rx_yaw);

double ratio_to_angle(double angle_ratio, double link_dist);
double angle_to_ratio(double angle, double link_dist);

} // namespace uvchan::geometry
