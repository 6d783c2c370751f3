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

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace uvchan
{

enum class VirtualDelayLaw
{
    Exponential,
    TruncatedNormal
};

enum class Polarization
{
    Vertical,
    Horizontal
};

// Thrown for invalid configuration. what() lists every violated field, one per line.
class ValidationError : public std::invalid_argument
{
  public:
    explicit ValidationError(std::vector<std::string> issues);
    const std::vector<std::string> &issues() const { return issues_; }

  private:
    std::vector<std::string> issues_;
};

struct OutputSettings
{
    std::size_t cir_stride = 10;  // CIR dump every n-th snapshot, 0 disables
    std::size_t tf_stride = 100;  // transfer-function dump every n-th snapshot, 0 disables
    std::size_t tf_points = 201;  // frequency grid size
    std::size_t tsi_anchors = 200;
};

struct Scenario
{
    params::Condition condition = params::Condition::High;
    std::vector<geometry::Trajectory> uavs;
    std::vector<geometry::Trajectory> vehicles;

    double carrier_hz = 28e9;
    double bandwidth_hz = 2e9;
    double chi = 1.35;
    double dt = 1e-3;
    double duration = 2.0;
    double omega_db = 5.0;
    double eta_gr = 0.3;
    std::size_t rays_per_twin = 8;

    VirtualDelayLaw virtual_delay_law = VirtualDelayLaw::Exponential;
    double virtual_delay_mean = 80e-9;
    double virtual_delay_std = 15e-9; // truncated-normal law only

    std::uint64_t seed = 1;
    std::string output_dir = "out";

    // Environment kinematics and bounds
    double v_td_max = 15.0;
    double v_ad_max = 10.0;
    geometry::Vec3 road_axis{1.0, 0.0, 0.0};
    double vehicle_height = 1.5;
    double td_max_height = 4.0;
    double ad_min_height = 1.0;
    double gc_after = 1.0;

    // Ground reflection
    double ground_permittivity = 5.0;
    Polarization polarization = Polarization::Vertical;

    // Doppler of NLoS rays includes scatterer motion
    bool scatterer_doppler = true;

    // Q(t) window; a negative end means "end of run"
    double window_start = 0.0;
    double window_end = -1.0;

    OutputSettings output;

    std::size_t snapshots() const;
    double time_of(std::size_t n) const { return static_cast<double>(n) * dt; }
    double wavelength() const;
    double window_stop() const { return window_end < 0.0 ? duration : window_end; }
    std::size_t links() const { return uavs.size() * vehicles.size(); }
};

// Empty when valid.
std::vector<std::string> validation_issues(const Scenario &s);
void require_valid(const Scenario &s);

nlohmann::json scenario_to_json(const Scenario &s);
Scenario scenario_from_json(const nlohmann::json &j); // throws ValidationError
Scenario load_scenario(const std::string &path);

// Reference geometry: one UAV at 50 m on a straight 10 m/s leg over a straight road.
Scenario default_scenario();

// SHA-256 over the canonical configuration, excluding seed, condition and output directory.
std::string scenario_hash(const Scenario &s);

std::string sha256_hex(const std::string &data);

} // namespace uvchan
