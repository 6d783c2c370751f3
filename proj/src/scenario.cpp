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

#include "uvchan/scenario.hpp"

#include <openssl/evp.h>

#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

namespace uvchan
{

namespace
{

std::string join_lines(const std::vector<std::string> &v)
{
    std::string out = "invalid configuration:";
    for (const auto &s : v)
        out += "\n  " + s;
    return out;
}

constexpr double c0 = 299792458.0;

} // namespace

ValidationError::ValidationError(std::vector<std::string> issues)
    : std::invalid_argument(join_lines(issues)), issues_(std::move(issues))
{
}

std::size_t Scenario::snapshots() const
{
    if (!(dt > 0.0) || !(duration > 0.0))
        return 0;
    return static_cast<std::size_t>(std::llround(duration / dt));
}

double Scenario::wavelength() const { return c0 / carrier_hz; }

std::vector<std::string> validation_issues(const Scenario &s)
{
    std::vector<std::string> out;
    auto need = [&out](bool ok, const std::string &msg) {
        if (!ok)
            out.push_back(msg);
    };
    need(s.dt > 0.0 && std::isfinite(s.dt), "dt: must be > 0");
    need(std::isfinite(s.duration) && s.duration >= s.dt, "duration: must be >= dt");
    need(s.carrier_hz > 0.0 && std::isfinite(s.carrier_hz), "carrier_hz: must be > 0");
    need(s.bandwidth_hz > 0.0 && s.bandwidth_hz < 2.0 * s.carrier_hz, "bandwidth_hz: must be in (0, 2*carrier_hz)");
    need(std::isfinite(s.chi), "chi: must be finite");
    need(std::isfinite(s.omega_db), "omega_db: must be finite");
    need(s.eta_gr >= 0.0 && s.eta_gr <= 1.0, "eta_gr: must be in [0, 1]");
    need(s.rays_per_twin >= 1, "rays_per_twin: must be >= 1");
    need(s.virtual_delay_mean > 0.0 && std::isfinite(s.virtual_delay_mean), "virtual_delay.mean: must be > 0");
    need(s.virtual_delay_std > 0.0 && std::isfinite(s.virtual_delay_std), "virtual_delay.std: must be > 0");
    need(s.v_td_max >= 0.0 && std::isfinite(s.v_td_max), "environment.v_td_max: must be >= 0");
    need(s.v_ad_max >= 0.0 && std::isfinite(s.v_ad_max), "environment.v_ad_max: must be >= 0");
    need(s.road_axis.z == 0.0 && (s.road_axis.x != 0.0 || s.road_axis.y != 0.0),
         "environment.road_axis: must be a nonzero horizontal vector");
    need(s.vehicle_height > 0.0, "environment.vehicle_height: must be > 0");
    need(s.td_max_height >= s.vehicle_height, "environment.td_max_height: must be >= vehicle_height");
    need(s.ad_min_height > 0.0, "environment.ad_min_height: must be > 0");
    need(s.gc_after > 0.0, "environment.gc_after: must be > 0");
    need(s.ground_permittivity >= 1.0 && std::isfinite(s.ground_permittivity), "ground.permittivity: must be >= 1");
    need(s.window_start >= 0.0 && s.window_start < s.window_stop(), "window: start must be >= 0 and below end");
    need(s.output.tf_points >= 2, "output.tf_points: must be >= 2");
    need(s.output.tsi_anchors >= 1, "output.tsi_anchors: must be >= 1");
    need(!s.uavs.empty(), "uavs: at least one UAV required");
    need(!s.vehicles.empty(), "vehicles: at least one vehicle required");

    for (std::size_t i = 0; i < s.uavs.size(); ++i)
    {
        const auto &u = s.uavs[i];
        bool ok = true;
        for (const auto &w : u.waypoints())
            ok = ok && w.p.z > 0.0;
        ok = ok && u.position(0.0).z > 0.0 && u.position(s.duration).z > 0.0;
        need(ok, "uavs[" + std::to_string(i) + "]: altitude must stay > 0 over the run");
    }
    for (std::size_t j = 0; j < s.vehicles.size(); ++j)
    {
        const auto &v = s.vehicles[j];
        bool ok = true;
        for (const auto &w : v.waypoints())
            ok = ok && std::abs(w.p.z - s.vehicle_height) < 1e-9;
        need(ok, "vehicles[" + std::to_string(j) + "]: z must equal environment.vehicle_height at every waypoint");
    }
    for (std::size_t i = 0; i < s.uavs.size(); ++i)
        for (std::size_t j = 0; j < s.vehicles.size(); ++j)
            need(geometry::norm(s.uavs[i].position(0.0) - s.vehicles[j].position(0.0)) > 0.0,
                 "link (" + std::to_string(i) + "," + std::to_string(j) + "): coincident endpoints at t0");
    return out;
}

void require_valid(const Scenario &s)
{
    auto issues = validation_issues(s);
    if (!issues.empty())
        throw ValidationError(std::move(issues));
}

// ----- JSON ----------------------------------------------------------------------

namespace
{

nlohmann::json vec_json(const geometry::Vec3 &v) { return nlohmann::json::array({v.x, v.y, v.z}); }

nlohmann::json agents_json(const std::vector<geometry::Trajectory> &agents)
{
    nlohmann::json arr = nlohmann::json::array();
    for (const auto &a : agents)
    {
        nlohmann::json wps = nlohmann::json::array();
        for (const auto &w : a.waypoints())
            wps.push_back(nlohmann::json::array({w.t, w.p.x, w.p.y, w.p.z}));
        arr.push_back({{"id", a.id()}, {"waypoints", wps}});
    }
    return arr;
}

class Reader
{
  public:
    explicit Reader(std::vector<std::string> &issues) : issues_(issues) {}

    template <class T>
    void get(const nlohmann::json &obj, const std::string &key, const std::string &path, T &out)
    {
        if (!obj.contains(key))
            return;
        const auto &v = obj.at(key);
        try
        {
            if constexpr (std::is_same_v<T, bool>)
            {
                if (!v.is_boolean())
                    throw std::invalid_argument("expected boolean");
                out = v.get<bool>();
            }
            else if constexpr (std::is_same_v<T, std::string>)
            {
                if (!v.is_string())
                    throw std::invalid_argument("expected string");
                out = v.get<std::string>();
            }
            else if constexpr (std::is_same_v<T, std::size_t> || std::is_same_v<T, std::uint64_t>)
            {
                if (!v.is_number_integer() || v.get<long long>() < 0)
                    throw std::invalid_argument("expected nonnegative integer");
                out = v.get<T>();
            }
            else
            {
                if (!v.is_number())
                    throw std::invalid_argument("expected number");
                out = v.get<double>();
            }
        }
        catch (const std::exception &e)
        {
            issues_.push_back(path + ": " + e.what());
        }
    }

    void vec(const nlohmann::json &obj, const std::string &key, const std::string &path, geometry::Vec3 &out)
    {
        if (!obj.contains(key))
            return;
        const auto &v = obj.at(key);
        if (!v.is_array() || v.size() != 3 || !v[0].is_number() || !v[1].is_number() || !v[2].is_number())
        {
            issues_.push_back(path + ": expected [x, y, z]");
            return;
        }
        out = {v[0].get<double>(), v[1].get<double>(), v[2].get<double>()};
    }

    void known(const nlohmann::json &obj, const std::string &path, std::initializer_list<const char *> keys)
    {
        std::set<std::string> allowed(keys.begin(), keys.end());
        for (auto it = obj.begin(); it != obj.end(); ++it)
            if (!allowed.count(it.key()))
                issues_.push_back((path.empty() ? "" : path + ".") + it.key() + ": unknown field");
    }

    std::vector<geometry::Trajectory> agents(const nlohmann::json &obj, const std::string &key,
                                             geometry::AgentKind kind)
    {
        std::vector<geometry::Trajectory> out;
        if (!obj.contains(key))
            return out;
        const auto &arr = obj.at(key);
        if (!arr.is_array())
        {
            issues_.push_back(key + ": expected an array of agents");
            return out;
        }
        for (std::size_t n = 0; n < arr.size(); ++n)
        {
            const std::string path = key + "[" + std::to_string(n) + "]";
            const auto &a = arr[n];
            if (!a.is_object() || !a.contains("waypoints") || !a.at("waypoints").is_array())
            {
                issues_.push_back(path + ".waypoints: required array of [t, x, y, z]");
                continue;
            }
            std::string id = path;
            if (a.contains("id") && a.at("id").is_string())
                id = a.at("id").get<std::string>();
            std::vector<geometry::Trajectory::Waypoint> wps;
            bool ok = true;
            for (const auto &w : a.at("waypoints"))
            {
                if (!w.is_array() || w.size() != 4)
                {
                    ok = false;
                    break;
                }
                for (const auto &c : w)
                    ok = ok && c.is_number();
                if (!ok)
                    break;
                wps.push_back({w[0].get<double>(), {w[1].get<double>(), w[2].get<double>(), w[3].get<double>()}});
            }
            if (!ok || wps.empty())
            {
                issues_.push_back(path + ".waypoints: each waypoint must be [t, x, y, z]");
                continue;
            }
            try
            {
                out.emplace_back(id, kind, std::move(wps));
            }
            catch (const std::exception &e)
            {
                issues_.push_back(path + ".waypoints: " + e.what());
            }
        }
        return out;
    }

  private:
    std::vector<std::string> &issues_;
};

} // namespace

nlohmann::json scenario_to_json(const Scenario &s)
{
    nlohmann::json j;
    j["condition"] = params::to_string(s.condition);
    j["carrier_hz"] = s.carrier_hz;
    j["bandwidth_hz"] = s.bandwidth_hz;
    j["chi"] = s.chi;
    j["dt"] = s.dt;
    j["duration"] = s.duration;
    j["omega_db"] = s.omega_db;
    j["eta_gr"] = s.eta_gr;
    j["rays_per_twin"] = s.rays_per_twin;
    j["virtual_delay"] = {{"law", s.virtual_delay_law == VirtualDelayLaw::Exponential ? "exponential" : "truncated-normal"},
                          {"mean", s.virtual_delay_mean},
                          {"std", s.virtual_delay_std}};
    j["seed"] = s.seed;
    j["output_dir"] = s.output_dir;
    j["environment"] = {{"v_td_max", s.v_td_max},           {"v_ad_max", s.v_ad_max},
                        {"road_axis", vec_json(s.road_axis)}, {"vehicle_height", s.vehicle_height},
                        {"td_max_height", s.td_max_height},   {"ad_min_height", s.ad_min_height},
                        {"gc_after", s.gc_after}};
    j["ground"] = {{"permittivity", s.ground_permittivity},
                   {"polarization", s.polarization == Polarization::Vertical ? "vertical" : "horizontal"}};
    j["scatterer_doppler"] = s.scatterer_doppler;
    j["window"] = {{"start", s.window_start}, {"end", s.window_end}};
    j["output"] = {{"cir_stride", s.output.cir_stride},
                   {"tf_stride", s.output.tf_stride},
                   {"tf_points", s.output.tf_points},
                   {"tsi_anchors", s.output.tsi_anchors}};
    j["uavs"] = agents_json(s.uavs);
    j["vehicles"] = agents_json(s.vehicles);
    return j;
}

Scenario scenario_from_json(const nlohmann::json &j)
{
    std::vector<std::string> issues;
    Scenario s;
    s.uavs.clear();
    s.vehicles.clear();
    if (!j.is_object())
        throw ValidationError({"configuration: top level must be an object"});
    Reader r(issues);
    r.known(j, "",
            {"condition", "carrier_hz", "bandwidth_hz", "chi", "dt", "duration", "omega_db", "eta_gr", "rays_per_twin",
             "virtual_delay", "seed", "output_dir", "environment", "ground", "scatterer_doppler", "window", "output",
             "uavs", "vehicles", "sweep"});

    if (j.contains("condition"))
    {
        const auto &c = j.at("condition");
        auto parsed = c.is_string() ? params::parse_condition(c.get<std::string>()) : std::nullopt;
        if (parsed)
            s.condition = *parsed;
        else
            issues.push_back("condition: expected one of low, medium, high");
    }
    r.get(j, "carrier_hz", "carrier_hz", s.carrier_hz);
    r.get(j, "bandwidth_hz", "bandwidth_hz", s.bandwidth_hz);
    r.get(j, "chi", "chi", s.chi);
    r.get(j, "dt", "dt", s.dt);
    r.get(j, "duration", "duration", s.duration);
    r.get(j, "omega_db", "omega_db", s.omega_db);
    r.get(j, "eta_gr", "eta_gr", s.eta_gr);
    r.get(j, "rays_per_twin", "rays_per_twin", s.rays_per_twin);
    r.get(j, "seed", "seed", s.seed);
    r.get(j, "output_dir", "output_dir", s.output_dir);
    r.get(j, "scatterer_doppler", "scatterer_doppler", s.scatterer_doppler);

    if (j.contains("virtual_delay"))
    {
        const auto &v = j.at("virtual_delay");
        r.known(v, "virtual_delay", {"law", "mean", "std"});
        std::string law = "exponential";
        r.get(v, "law", "virtual_delay.law", law);
        if (law == "exponential")
            s.virtual_delay_law = VirtualDelayLaw::Exponential;
        else if (law == "truncated-normal")
            s.virtual_delay_law = VirtualDelayLaw::TruncatedNormal;
        else
            issues.push_back("virtual_delay.law: expected exponential or truncated-normal");
        r.get(v, "mean", "virtual_delay.mean", s.virtual_delay_mean);
        r.get(v, "std", "virtual_delay.std", s.virtual_delay_std);
    }
    if (j.contains("environment"))
    {
        const auto &e = j.at("environment");
        r.known(e, "environment",
                {"v_td_max", "v_ad_max", "road_axis", "vehicle_height", "td_max_height", "ad_min_height", "gc_after"});
        r.get(e, "v_td_max", "environment.v_td_max", s.v_td_max);
        r.get(e, "v_ad_max", "environment.v_ad_max", s.v_ad_max);
        r.vec(e, "road_axis", "environment.road_axis", s.road_axis);
        r.get(e, "vehicle_height", "environment.vehicle_height", s.vehicle_height);
        r.get(e, "td_max_height", "environment.td_max_height", s.td_max_height);
        r.get(e, "ad_min_height", "environment.ad_min_height", s.ad_min_height);
        r.get(e, "gc_after", "environment.gc_after", s.gc_after);
    }
    if (j.contains("ground"))
    {
        const auto &g = j.at("ground");
        r.known(g, "ground", {"permittivity", "polarization"});
        r.get(g, "permittivity", "ground.permittivity", s.ground_permittivity);
        std::string pol = "vertical";
        r.get(g, "polarization", "ground.polarization", pol);
        if (pol == "vertical")
            s.polarization = Polarization::Vertical;
        else if (pol == "horizontal")
            s.polarization = Polarization::Horizontal;
        else
            issues.push_back("ground.polarization: expected vertical or horizontal");
    }
    if (j.contains("window"))
    {
        const auto &w = j.at("window");
        r.known(w, "window", {"start", "end"});
        r.get(w, "start", "window.start", s.window_start);
        r.get(w, "end", "window.end", s.window_end);
    }
    if (j.contains("output"))
    {
        const auto &o = j.at("output");
        r.known(o, "output", {"cir_stride", "tf_stride", "tf_points", "tsi_anchors"});
        r.get(o, "cir_stride", "output.cir_stride", s.output.cir_stride);
        r.get(o, "tf_stride", "output.tf_stride", s.output.tf_stride);
        r.get(o, "tf_points", "output.tf_points", s.output.tf_points);
        r.get(o, "tsi_anchors", "output.tsi_anchors", s.output.tsi_anchors);
    }
    s.uavs = r.agents(j, "uavs", geometry::AgentKind::Uav);
    s.vehicles = r.agents(j, "vehicles", geometry::AgentKind::Vehicle);

    auto more = validation_issues(s);
    issues.insert(issues.end(), more.begin(), more.end());
    if (!issues.empty())
        throw ValidationError(std::move(issues));
    return s;
}

Scenario load_scenario(const std::string &path)
{
    std::ifstream f(path);
    if (!f)
        throw ValidationError({"config: cannot open '" + path + "'"});
    nlohmann::json j;
    try
    {
        f >> j;
    }
    catch (const nlohmann::json::exception &e)
    {
        throw ValidationError({"config: malformed structured text: " + std::string(e.what())});
    }
    return scenario_from_json(j);
}

Scenario default_scenario()
{
    using geometry::Vec3;
    Scenario s;
    const double h_uav = 50.0;
    const double horiz = h_uav - s.vehicle_height; // elevation pi/4 seen from the vehicle
    const double rx_az = 3.0 * std::numbers::pi / 4.0;
    const double tx_az = std::numbers::pi / 3.0;

    const Vec3 veh0{0.0, 0.0, s.vehicle_height};
    const Vec3 veh_v{12.5, 0.0, 0.0};
    const Vec3 uav0{horiz * std::cos(rx_az), horiz * std::sin(rx_az), h_uav};
    const double los_world_az = std::atan2(veh0.y - uav0.y, veh0.x - uav0.x);
    const double uav_yaw = los_world_az - tx_az;
    const Vec3 uav_v{10.0 * std::cos(uav_yaw), 10.0 * std::sin(uav_yaw), 0.0};

    s.uavs.push_back(geometry::straight_track("uav1", geometry::AgentKind::Uav, uav0, uav_v, 0.0, s.duration));
    s.vehicles.push_back(geometry::straight_track("car1", geometry::AgentKind::Vehicle, veh0, veh_v, 0.0, s.duration));
    return s;
}

std::string sha256_hex(const std::string &data)
{
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr);
    static const char *hex = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int k = 0; k < len; ++k)
    {
        out.push_back(hex[md[k] >> 4]);
        out.push_back(hex[md[k] & 0xF]);
    }
    return out;
}

std::string scenario_hash(const Scenario &s)
{
    auto j = scenario_to_json(s);
    j.erase("seed");
    j.erase("condition");
    j.erase("output_dir");
    return sha256_hex(j.dump()).substr(0, 16);
}

} // namespace uvchan
