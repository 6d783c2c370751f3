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

#include "uvchan/geometry.hpp"
#include "uvchan/params.hpp"
#include "uvchan/rng.hpp"
#include "uvchan/scenario.hpp"

#include <array>
#include <cstdint>
#include <map>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace uvchan::evolution
{

using geometry::ScattererInstance;
using geometry::Side;
using geometry::Vec3;
using params::ScattererClass;

class VrError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

class LinkError : public std::out_of_range
{
  public:
    using std::out_of_range::out_of_range;
};

inline constexpr std::size_t class_index(ScattererClass c) { return static_cast<std::size_t>(c); }

// Rigid cluster: all members share the cluster velocity and keep their offsets.
struct Cluster
{
    std::uint32_t id = 0;
    ScattererClass cls = ScattererClass::Static;
    Side side = Side::TxSide; // static: either; aerial-dynamic: TxSide; terrestrial-dynamic: RxSide
    std::vector<ScattererInstance> members;
    Vec3 centroid;      // at birth_time
    Vec3 velocity;      // mean member velocity
    double birth_time = 0.0;
    double last_seen = 0.0; // last time inside any agent's VR

    Vec3 centroid_at(double t) const { return centroid + velocity * (t - birth_time); }
    Vec3 member_at(std::size_t k, double t) const { return members[k].position_at(t); }
};

struct VisibilityRegion
{
    std::string agent_id;
    double radius = 0.0;
};

// Trapezoidal integral of 2*pi*doppler, zero at the first sample.
struct PhaseTrack
{
    double acc = 0.0;
    double prev = 0.0;
    bool started = false;

    double advance(double doppler, double dt)
    {
        if (started)
            acc += std::numbers::pi * (prev + doppler) * dt;
        prev = doppler;
        started = true;
        return acc;
    }
};

struct RayPair
{
    std::uint32_t tx_member = 0; // index into the tx-side cluster's members
    std::uint32_t rx_member = 0;
    double shadow_db = 0.0;      // Z ~ N(0, sigma_E^2), held for the ray's life
    double phi0 = 0.0;
    PhaseTrack phase;
};

struct TwinCluster
{
    std::uint32_t id = 0;
    std::uint32_t tx_cluster = 0;
    std::uint32_t rx_cluster = 0;
    ScattererClass ray_class = ScattererClass::Static;
    double virtual_delay = 0.0;
    double birth_time = 0.0;
    std::vector<RayPair> rays;
};

struct ClassCounters
{
    std::size_t survived = 0;  // M^S
    std::size_t target = 0;    // M^L
    std::size_t born = 0;      // M^new realised (adopted + generated)
    std::size_t requested = 0; // max(0, M^L - M^S)
    std::size_t adopted = 0;
};

struct LinkState
{
    std::size_t i = 0; // UAV
    std::size_t j = 0; // vehicle
    std::array<std::vector<std::uint32_t>, 3> active;      // sorted cluster ids per class
    std::array<std::vector<std::uint32_t>, 3> prev_active; // previous snapshot
    std::array<ClassCounters, 3> counters;
    std::vector<TwinCluster> twins;
    double los_phi0 = 0.0;
    double gr_phi0 = 0.0;
    PhaseTrack los_phase;
    PhaseTrack gr_phase;
};

struct EvolutionState
{
    double time = 0.0;
    std::size_t step = 0;
    std::map<std::uint32_t, Cluster> clusters;
    std::vector<VisibilityRegion> uav_vr;
    std::vector<VisibilityRegion> vehicle_vr;
    std::vector<LinkState> links; // ordered (i, j) with j fastest
    std::uint32_t next_cluster_id = 0;
    std::uint32_t next_scatterer_id = 0;
    std::uint32_t next_twin_id = 0;
    std::size_t skipped_scatterers = 0; // placement gave up after the attempt budget
    std::size_t shortfall = 0;          // births requested but not realised

    const LinkState &link(std::size_t i, std::size_t j) const;
    LinkState &link(std::size_t i, std::size_t j);
    const Cluster &cluster(std::uint32_t id) const;
};

// Context shared by init/advance: scenario, parameters and condition.
struct Context
{
    const Scenario &scenario;
    const params::ParameterTable &table;
};

inline constexpr int max_placement_attempts = 16;

// ----- K-means -------------------------------------------------------------------

struct KMeansResult
{
    std::vector<std::size_t> assignment;
    std::vector<Vec3> centroids;
    std::size_t iterations = 0;
};

// Lloyd iterations with farthest-point seeding (first centre drawn from s).
// k is clamped to [1, points.size()]; empty clusters are reseeded at the farthest point.
KMeansResult kmeans(std::span<const Vec3> points, std::size_t k, Stream &s, std::size_t max_iter = 50,
                    double tol = 1e-6);

// ----- Steps ---------------------------------------------------------------------

// Placement of one scatterer of the given class and side; nullopt after the attempt budget.
// When vr_tx/vr_rx are positive the point must also lie inside both endpoint VRs.
std::optional<ScattererInstance> draw_scatterer(const Context &ctx, ScattererClass cls, Side side, const Vec3 &tx,
                                                const Vec3 &rx, double tx_yaw, double rx_yaw, double t, Stream &s,
                                                double vr_tx = -1.0, double vr_rx = -1.0);

// Clusters realised from a scatterer population, rigid velocities applied.
std::vector<Cluster> build_clusters(const Context &ctx, std::vector<ScattererInstance> pop, std::size_t k,
                                    ScattererClass cls, Side side, double t, Stream &s);

EvolutionState init_environment(const Scenario &sc, const params::ParameterTable &table);

VisibilityRegion compute_vr(const EvolutionState &st, const geometry::Trajectory &agent, double t0);

// Distance <= radius and z >= 0.
bool inside_vr(const Vec3 &centre, double radius, const Vec3 &p);
bool visible(const EvolutionState &st, const Scenario &sc, const Cluster &c, std::size_t i, std::size_t j);
std::vector<std::uint32_t> visible_clusters(const EvolutionState &st, const Scenario &sc, std::size_t i, std::size_t j,
                                            ScattererClass cls);

std::size_t new_cluster_count(std::size_t target, std::size_t survived);

// Move to t + dt. Throws std::invalid_argument for dt <= 0.
void advance(EvolutionState &st, const Scenario &sc, const params::ParameterTable &table, double dt);

// Persistent random matching of the link's active tx-side and rx-side clusters.
void match_twin_clusters(EvolutionState &st, const Scenario &sc, const params::ParameterTable &table, std::size_t i,
                         std::size_t j);

const std::vector<TwinCluster> &visible_set(const EvolutionState &st, std::size_t i, std::size_t j);

double draw_virtual_delay(const Scenario &sc, Stream &s);

// Dominant dynamic class of a tx/rx class pair.
ScattererClass ray_class(ScattererClass tx, ScattererClass rx);

// Violated invariants of the current snapshot; empty when consistent.
std::vector<std::string> audit(const EvolutionState &st, const Scenario &sc);

} // namespace uvchan::evolution
