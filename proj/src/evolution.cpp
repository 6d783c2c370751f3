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

#include "uvchan/evolution.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace uvchan::evolution
{

using params::Condition;
using params::Family;

const LinkState &EvolutionState::link(std::size_t i, std::size_t j) const
{
    for (const auto &l : links)
        if (l.i == i && l.j == j)
            return l;
    throw LinkError("unknown link (" + std::to_string(i) + "," + std::to_string(j) + ")");
}

LinkState &EvolutionState::link(std::size_t i, std::size_t j)
{
    return const_cast<LinkState &>(static_cast<const EvolutionState &>(*this).link(i, j));
}

const Cluster &EvolutionState::cluster(std::uint32_t id) const
{
    auto it = clusters.find(id);
    if (it == clusters.end())
        throw std::out_of_range("unknown cluster " + std::to_string(id));
    return it->second;
}

// ----- K-means -------------------------------------------------------------------

namespace
{

double dist2(const Vec3 &a, const Vec3 &b)
{
    const Vec3 d = a - b;
    return dot(d, d);
}

std::size_t farthest_from(std::span<const Vec3> pts, const std::vector<Vec3> &centres)
{
    std::size_t best = 0;
    double best_d = -1.0;
    for (std::size_t p = 0; p < pts.size(); ++p)
    {
        double dmin = std::numeric_limits<double>::infinity();
        for (const auto &c : centres)
            dmin = std::min(dmin, dist2(pts[p], c));
        if (dmin > best_d)
        {
            best_d = dmin;
            best = p;
        }
    }
    return best;
}

} // namespace

KMeansResult kmeans(std::span<const Vec3> points, std::size_t k, Stream &s, std::size_t max_iter, double tol)
{
    KMeansResult r;
    const std::size_t n = points.size();
    if (n == 0)
        return r;
    k = std::clamp<std::size_t>(k, 1, n);

    r.centroids.push_back(points[s.index(n)]);
    while (r.centroids.size() < k)
        r.centroids.push_back(points[farthest_from(points, r.centroids)]);

    r.assignment.assign(n, 0);
    for (r.iterations = 1; r.iterations <= max_iter; ++r.iterations)
    {
        for (std::size_t p = 0; p < n; ++p)
        {
            std::size_t best = 0;
            double best_d = dist2(points[p], r.centroids[0]);
            for (std::size_t c = 1; c < k; ++c)
            {
                const double d = dist2(points[p], r.centroids[c]);
                if (d < best_d)
                {
                    best_d = d;
                    best = c;
                }
            }
            r.assignment[p] = best;
        }

        std::vector<Vec3> sum(k);
        std::vector<std::size_t> count(k, 0);
        for (std::size_t p = 0; p < n; ++p)
        {
            sum[r.assignment[p]] += points[p];
            ++count[r.assignment[p]];
        }

        double shift = 0.0;
        for (std::size_t c = 0; c < k; ++c)
        {
            Vec3 next;
            if (count[c] == 0)
            {
                // Reseed at the point farthest from every other centre.
                std::vector<Vec3> others;
                for (std::size_t o = 0; o < k; ++o)
                    if (o != c)
                        others.push_back(r.centroids[o]);
                next = points[farthest_from(points, others)];
                shift = std::numeric_limits<double>::infinity();
            }
            else
                next = sum[c] / static_cast<double>(count[c]);
            shift = std::max(shift, norm(next - r.centroids[c]));
            r.centroids[c] = next;
        }
        if (shift <= tol)
            break;
    }
    r.iterations = std::min(r.iterations, max_iter);

    // Final assignment against the final centres.
    for (std::size_t p = 0; p < n; ++p)
    {
        std::size_t best = 0;
        double best_d = dist2(points[p], r.centroids[0]);
        for (std::size_t c = 1; c < k; ++c)
        {
            const double d = dist2(points[p], r.centroids[c]);
            if (d < best_d)
            {
                best_d = d;
                best = c;
            }
        }
        r.assignment[p] = best;
    }
    return r;
}

// ----- Placement -----------------------------------------------------------------

namespace
{

bool height_ok(const Scenario &sc, ScattererClass cls, double z)
{
    switch (cls)
    {
    case ScattererClass::Static:
        return z >= 0.0;
    case ScattererClass::TerrestrialDynamic:
        return z >= 0.0 && z <= sc.td_max_height;
    case ScattererClass::AerialDynamic:
        return z >= sc.ad_min_height;
    }
    return false;
}

Vec3 draw_velocity(const Scenario &sc, ScattererClass cls, Stream &s)
{
    switch (cls)
    {
    case ScattererClass::Static:
        return {};
    case ScattererClass::TerrestrialDynamic:
    {
        const double speed = s.uniform(0.0, sc.v_td_max);
        const double sign = s.uniform() < 0.5 ? -1.0 : 1.0;
        return sc.road_axis * (sign * speed / norm(sc.road_axis));
    }
    case ScattererClass::AerialDynamic:
    {
        Vec3 u{s.normal(), s.normal(), s.normal()};
        const double n = norm(u);
        const double speed = s.uniform(0.0, sc.v_ad_max);
        return n > 0.0 ? u * (speed / n) : Vec3{};
    }
    }
    return {};
}

double number_mean(const params::ParameterTable &t, ScattererClass cls, Condition c, Family f)
{
    return t.get<params::LogisticParams>(cls, c, f).mu;
}

Side side_for(ScattererClass cls, Stream &s)
{
    if (cls == ScattererClass::AerialDynamic)
        return Side::TxSide;
    if (cls == ScattererClass::TerrestrialDynamic)
        return Side::RxSide;
    return s.uniform() < 0.5 ? Side::TxSide : Side::RxSide;
}

struct Endpoints
{
    Vec3 tx, rx, vtx, vrx;
    double tx_yaw = 0.0, rx_yaw = 0.0, d = 0.0;
};

Endpoints endpoints(const Scenario &sc, std::size_t i, std::size_t j, double t)
{
    Endpoints e;
    e.tx = sc.uavs[i].position(t);
    e.rx = sc.vehicles[j].position(t);
    e.vtx = sc.uavs[i].velocity(t);
    e.vrx = sc.vehicles[j].velocity(t);
    e.tx_yaw = geometry::heading_yaw(e.vtx);
    e.rx_yaw = geometry::heading_yaw(e.vrx);
    e.d = geometry::link_distance(e.tx, e.rx);
    return e;
}

std::size_t to_count(double x)
{
    return x <= 0.0 ? 0 : static_cast<std::size_t>(std::llround(x));
}

} // namespace

std::optional<ScattererInstance> draw_scatterer(const Context &ctx, ScattererClass cls, Side side, const Vec3 &tx,
                                                const Vec3 &rx, double tx_yaw, double rx_yaw, double t, Stream &s,
                                                double vr_tx, double vr_rx)
{
    const auto &sc = ctx.scenario;
    const auto cond = sc.condition;
    const bool from_tx = side == Side::TxSide;
    const double d = geometry::link_distance(tx, rx);
    for (int attempt = 0; attempt < max_placement_attempts; ++attempt)
    {
        const double az = geometry::ratio_to_angle(ctx.table.draw(cls, cond, from_tx ? Family::Aaod : Family::Aaoa, s), d);
        const double el = geometry::ratio_to_angle(ctx.table.draw(cls, cond, from_tx ? Family::Eaod : Family::Eaoa, s), d);
        const double ratio = ctx.table.draw(cls, cond, Family::Distance, s);
        Vec3 p;
        try
        {
            p = from_tx ? geometry::place_scatterer(tx, rx, az, el, tx_yaw, ratio)
                        : geometry::place_scatterer(rx, tx, az, el, rx_yaw, ratio);
        }
        catch (const geometry::PlacementError &)
        {
            continue;
        }
        if (!height_ok(sc, cls, p.z))
            continue;
        if (vr_tx > 0.0 && !inside_vr(tx, vr_tx, p))
            continue;
        if (vr_rx > 0.0 && !inside_vr(rx, vr_rx, p))
            continue;
        ScattererInstance inst;
        inst.cls = cls;
        inst.position = p;
        inst.velocity = draw_velocity(sc, cls, s);
        inst.birth_time = t;
        inst.side = side;
        return inst;
    }
    return std::nullopt;
}

std::vector<Cluster> build_clusters(const Context &ctx, std::vector<ScattererInstance> pop, std::size_t k,
                                    ScattererClass cls, Side side, double t, Stream &s)
{
    std::vector<Cluster> out;
    if (pop.empty())
        return out;
    std::vector<Vec3> pts;
    pts.reserve(pop.size());
    for (const auto &p : pop)
        pts.push_back(p.position);
    const auto km = kmeans(pts, k, s);

    std::vector<Cluster> groups(km.centroids.size());
    for (std::size_t p = 0; p < pop.size(); ++p)
        groups[km.assignment[p]].members.push_back(pop[p]);

    const double horizon = std::max(0.0, ctx.scenario.duration - t);
    for (auto &g : groups)
    {
        if (g.members.empty())
            continue;
        g.cls = cls;
        g.side = side;
        g.birth_time = t;
        g.last_seen = t;
        Vec3 c, v;
        for (const auto &m : g.members)
        {
            c += m.position;
            v += m.velocity;
        }
        const double n = static_cast<double>(g.members.size());
        g.centroid = c / n;
        g.velocity = v / n;
        if (cls == ScattererClass::AerialDynamic && g.velocity.z < 0.0)
        {
            double zmin = std::numeric_limits<double>::infinity();
            for (const auto &m : g.members)
                zmin = std::min(zmin, m.position.z);
            if (zmin + g.velocity.z * horizon < 0.5 * ctx.scenario.ad_min_height)
                g.velocity.z = -g.velocity.z;
        }
        for (auto &m : g.members)
        {
            m.velocity = g.velocity;
            m.birth_time = t;
        }
        out.push_back(std::move(g));
    }
    return out;
}

namespace
{

void add_clusters(EvolutionState &st, std::vector<Cluster> &&cs, std::vector<std::uint32_t> *ids)
{
    for (auto &c : cs)
    {
        c.id = st.next_cluster_id++;
        for (auto &m : c.members)
            m.id = st.next_scatterer_id++;
        if (ids)
            ids->push_back(c.id);
        st.clusters.emplace(c.id, std::move(c));
    }
}

// Static populations are split between sides in proportion to their sizes.
std::pair<std::size_t, std::size_t> split_k(std::size_t k, std::size_t n_tx, std::size_t n_rx)
{
    const std::size_t n = n_tx + n_rx;
    std::size_t k_tx = 0, k_rx = 0;
    if (n_tx > 0)
        k_tx = std::clamp<std::size_t>(to_count(static_cast<double>(k) * static_cast<double>(n_tx) / static_cast<double>(n)), 1,
                                       n_tx);
    if (n_rx > 0)
        k_rx = std::clamp<std::size_t>(k > k_tx ? k - k_tx : 0, 1, n_rx);
    return {k_tx, k_rx};
}

// Fresh clusters for a birth event, placed inside both endpoint VRs.
std::vector<std::uint32_t> spawn(EvolutionState &st, const Context &ctx, ScattererClass cls, std::size_t m,
                                 std::size_t i, std::size_t j, const Endpoints &e, Stream &s)
{
    const auto &sc = ctx.scenario;
    const double mu_s = number_mean(ctx.table, cls, sc.condition, Family::ScattererNumber);
    const double mu_c = number_mean(ctx.table, cls, sc.condition, Family::ClusterNumber);
    const std::size_t n_scat = std::max(m, to_count(static_cast<double>(m) * mu_s / mu_c));

    std::array<std::size_t, 2> m_side{0, 0};
    if (cls == ScattererClass::Static)
        for (std::size_t c = 0; c < m; ++c)
            ++m_side[s.uniform() < 0.5 ? 0 : 1];
    else
        m_side[cls == ScattererClass::AerialDynamic ? 0 : 1] = m;

    std::vector<std::uint32_t> ids;
    const double vr_tx = st.uav_vr[i].radius;
    const double vr_rx = st.vehicle_vr[j].radius;
    for (std::size_t side_ix = 0; side_ix < 2; ++side_ix)
    {
        const std::size_t ms = m_side[side_ix];
        if (ms == 0)
            continue;
        const Side side = side_ix == 0 ? Side::TxSide : Side::RxSide;
        const std::size_t n_side = std::max(ms, to_count(static_cast<double>(n_scat) * static_cast<double>(ms) / static_cast<double>(m)));
        std::vector<ScattererInstance> pop;
        const std::size_t budget = n_side + 4 * ms;
        for (std::size_t slot = 0; slot < budget; ++slot)
        {
            if (pop.size() >= n_side || (slot >= n_side && pop.size() >= ms))
                break;
            auto inst = draw_scatterer(ctx, cls, side, e.tx, e.rx, e.tx_yaw, e.rx_yaw, st.time, s, vr_tx, vr_rx);
            if (inst)
                pop.push_back(*inst);
            else
                ++st.skipped_scatterers;
        }
        if (pop.empty())
            continue;
        auto cs = build_clusters(ctx, std::move(pop), ms, cls, side, st.time, s);
        add_clusters(st, std::move(cs), &ids);
    }
    return ids;
}

std::vector<std::uint32_t> sorted_difference(const std::vector<std::uint32_t> &a, const std::vector<std::uint32_t> &b)
{
    std::vector<std::uint32_t> out;
    std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

std::vector<std::uint32_t> sorted_intersection(const std::vector<std::uint32_t> &a, const std::vector<std::uint32_t> &b)
{
    std::vector<std::uint32_t> out;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

} // namespace

// ----- Steps ---------------------------------------------------------------------

bool inside_vr(const Vec3 &centre, double radius, const Vec3 &p)
{
    return p.z >= 0.0 && norm(p - centre) <= radius;
}

bool visible(const EvolutionState &st, const Scenario &sc, const Cluster &c, std::size_t i, std::size_t j)
{
    const Vec3 p = c.centroid_at(st.time);
    return inside_vr(sc.uavs[i].position(st.time), st.uav_vr[i].radius, p) &&
           inside_vr(sc.vehicles[j].position(st.time), st.vehicle_vr[j].radius, p);
}

std::vector<std::uint32_t> visible_clusters(const EvolutionState &st, const Scenario &sc, std::size_t i, std::size_t j,
                                            ScattererClass cls)
{
    std::vector<std::uint32_t> out;
    for (const auto &[id, c] : st.clusters)
        if (c.cls == cls && visible(st, sc, c, i, j))
            out.push_back(id);
    return out;
}

VisibilityRegion compute_vr(const EvolutionState &st, const geometry::Trajectory &agent, double t0)
{
    const bool uav = agent.kind() == geometry::AgentKind::Uav;
    const ScattererClass other = uav ? ScattererClass::AerialDynamic : ScattererClass::TerrestrialDynamic;
    const Vec3 p = agent.position(t0);
    double r = 0.0;
    bool any = false;
    for (const auto &[id, c] : st.clusters)
    {
        if (c.cls != ScattererClass::Static && c.cls != other)
            continue;
        any = true;
        r = std::max(r, norm(c.centroid_at(t0) - p));
    }
    if (!any || !(r > 0.0))
        throw VrError("visibility region of '" + agent.id() + "': no eligible clusters at t0");
    return {agent.id(), r};
}

std::size_t new_cluster_count(std::size_t target, std::size_t survived)
{
    return target > survived ? target - survived : 0;
}

double draw_virtual_delay(const Scenario &sc, Stream &s)
{
    if (sc.virtual_delay_law == VirtualDelayLaw::Exponential)
        return -sc.virtual_delay_mean * std::log(s.uniform());
    for (;;)
    {
        const double v = sc.virtual_delay_mean + sc.virtual_delay_std * s.normal();
        if (v >= 0.0)
            return v;
    }
}

ScattererClass ray_class(ScattererClass tx, ScattererClass rx)
{
    if (tx == ScattererClass::AerialDynamic || rx == ScattererClass::AerialDynamic)
        return ScattererClass::AerialDynamic;
    if (tx == ScattererClass::TerrestrialDynamic || rx == ScattererClass::TerrestrialDynamic)
        return ScattererClass::TerrestrialDynamic;
    return ScattererClass::Static;
}

EvolutionState init_environment(const Scenario &sc, const params::ParameterTable &table)
{
    require_valid(sc);
    EvolutionState st;
    const Context ctx{sc, table};
    const double t0 = 0.0;
    st.time = t0;

    if (!params::defined(ScattererClass::AerialDynamic, sc.condition))
        spdlog::info("condition {}: no aerial-dynamic parameters, aerial population is empty",
                     params::to_string(sc.condition));

    for (std::size_t i = 0; i < sc.uavs.size(); ++i)
        for (std::size_t j = 0; j < sc.vehicles.size(); ++j)
        {
            LinkState l;
            l.i = i;
            l.j = j;
            Stream ph = Stream::derive(sc.seed, "phase", {i, j});
            l.los_phi0 = ph.uniform(0.0, 2.0 * std::numbers::pi);
            l.gr_phi0 = ph.uniform(0.0, 2.0 * std::numbers::pi);
            st.links.push_back(std::move(l));
        }

    for (const auto &l : st.links)
    {
        const Endpoints e = endpoints(sc, l.i, l.j, t0);
        for (auto cls : params::all_classes)
        {
            if (!params::defined(cls, sc.condition))
                continue;
            Stream s = Stream::derive(sc.seed, "init", {l.i, l.j, class_index(cls)});
            std::size_t n = to_count(table.draw(cls, sc.condition, Family::ScattererNumber, s) * e.d);
            if (cls == ScattererClass::Static)
                n = std::max<std::size_t>(n, 1);

            std::array<std::vector<ScattererInstance>, 2> pop;
            for (std::size_t k = 0; k < n; ++k)
            {
                const Side side = side_for(cls, s);
                auto inst = draw_scatterer(ctx, cls, side, e.tx, e.rx, e.tx_yaw, e.rx_yaw, t0, s);
                if (inst)
                    pop[side == Side::TxSide ? 0 : 1].push_back(*inst);
                else
                    ++st.skipped_scatterers;
            }
            const std::size_t placed = pop[0].size() + pop[1].size();
            if (placed == 0)
                continue;
            const double mu_c = number_mean(table, cls, sc.condition, Family::ClusterNumber);
            const std::size_t k = std::clamp<std::size_t>(to_count(e.d * mu_c), 1, placed);
            const auto [k_tx, k_rx] = split_k(k, pop[0].size(), pop[1].size());
            if (k_tx > 0)
                add_clusters(st, build_clusters(ctx, std::move(pop[0]), k_tx, cls, Side::TxSide, t0, s), nullptr);
            if (k_rx > 0)
                add_clusters(st, build_clusters(ctx, std::move(pop[1]), k_rx, cls, Side::RxSide, t0, s), nullptr);
        }
    }
    if (st.skipped_scatterers > 0)
        spdlog::debug("init: {} scatterers skipped after {} placement attempts", st.skipped_scatterers,
                      max_placement_attempts);

    for (const auto &u : sc.uavs)
        st.uav_vr.push_back(compute_vr(st, u, t0));
    for (const auto &v : sc.vehicles)
        st.vehicle_vr.push_back(compute_vr(st, v, t0));

    for (auto &l : st.links)
    {
        for (auto cls : params::all_classes)
        {
            const auto ix = class_index(cls);
            l.active[ix] = visible_clusters(st, sc, l.i, l.j, cls);
            auto &c = l.counters[ix];
            c.survived = 0;
            c.target = c.requested = c.born = l.active[ix].size();
            c.adopted = 0;
        }
        match_twin_clusters(st, sc, table, l.i, l.j);
    }
    return st;
}

void advance(EvolutionState &st, const Scenario &sc, const params::ParameterTable &table, double dt)
{
    if (!(dt > 0.0) || !std::isfinite(dt))
        throw std::invalid_argument("advance: dt must be > 0");
    const Context ctx{sc, table};
    st.time += dt;
    ++st.step;
    const double t = st.time;

    for (auto &l : st.links)
    {
        const Endpoints e = endpoints(sc, l.i, l.j, t);
        for (auto cls : params::all_classes)
        {
            const auto ix = class_index(cls);
            l.prev_active[ix] = l.active[ix];
            auto &cnt = l.counters[ix];
            cnt = ClassCounters{};
            if (!params::defined(cls, sc.condition))
            {
                l.active[ix].clear();
                continue;
            }
            const auto vis = visible_clusters(st, sc, l.i, l.j, cls);
            const auto survivors = sorted_intersection(l.prev_active[ix], vis);

            Stream ml = Stream::derive(sc.seed, "ml", {l.i, l.j, st.step, ix});
            cnt.survived = survivors.size();
            cnt.target = to_count(table.draw(cls, sc.condition, Family::ClusterNumber, ml) * e.d);
            cnt.requested = new_cluster_count(cnt.target, cnt.survived);

            std::vector<std::uint32_t> next = survivors;
            if (cnt.requested > 0)
            {
                auto idle = sorted_difference(vis, survivors);
                Stream ad = Stream::derive(sc.seed, "adopt", {l.i, l.j, st.step, ix});
                ad.shuffle(idle);
                cnt.adopted = std::min(cnt.requested, idle.size());
                next.insert(next.end(), idle.begin(), idle.begin() + static_cast<std::ptrdiff_t>(cnt.adopted));

                const std::size_t rest = cnt.requested - cnt.adopted;
                if (rest > 0)
                {
                    Stream bs = Stream::derive(sc.seed, "birth", {l.i, l.j, st.step, ix});
                    auto born = spawn(st, ctx, cls, rest, l.i, l.j, e, bs);
                    if (born.size() < rest)
                    {
                        st.shortfall += rest - born.size();
                        spdlog::debug("t={} link ({},{}) {}: {} of {} births realised", t, l.i, l.j,
                                      params::to_string(cls), born.size(), rest);
                    }
                    next.insert(next.end(), born.begin(), born.end());
                }
            }
            std::sort(next.begin(), next.end());
            cnt.born = next.size() - cnt.survived;
            l.active[ix] = std::move(next);
        }
    }

    // Garbage collection of clusters outside every agent's VR for longer than gc_after.
    for (auto it = st.clusters.begin(); it != st.clusters.end();)
    {
        auto &c = it->second;
        const Vec3 p = c.centroid_at(t);
        bool seen = false;
        for (std::size_t i = 0; i < sc.uavs.size() && !seen; ++i)
            seen = inside_vr(sc.uavs[i].position(t), st.uav_vr[i].radius, p);
        for (std::size_t j = 0; j < sc.vehicles.size() && !seen; ++j)
            seen = inside_vr(sc.vehicles[j].position(t), st.vehicle_vr[j].radius, p);
        if (seen)
            c.last_seen = t;
        if (t - c.last_seen > sc.gc_after)
            it = st.clusters.erase(it);
        else
            ++it;
    }

    for (auto &l : st.links)
        match_twin_clusters(st, sc, table, l.i, l.j);
}

void match_twin_clusters(EvolutionState &st, const Scenario &sc, const params::ParameterTable &table, std::size_t i,
                         std::size_t j)
{
    auto &l = st.link(i, j);
    std::vector<std::uint32_t> tx_all, rx_all;
    for (auto id : l.active[class_index(ScattererClass::Static)])
        (st.cluster(id).side == Side::TxSide ? tx_all : rx_all).push_back(id);
    tx_all.insert(tx_all.end(), l.active[class_index(ScattererClass::AerialDynamic)].begin(),
                  l.active[class_index(ScattererClass::AerialDynamic)].end());
    rx_all.insert(rx_all.end(), l.active[class_index(ScattererClass::TerrestrialDynamic)].begin(),
                  l.active[class_index(ScattererClass::TerrestrialDynamic)].end());
    std::sort(tx_all.begin(), tx_all.end());
    std::sort(rx_all.begin(), rx_all.end());

    auto contains = [](const std::vector<std::uint32_t> &v, std::uint32_t id) {
        return std::binary_search(v.begin(), v.end(), id);
    };

    std::vector<TwinCluster> kept;
    std::vector<std::uint32_t> used_tx, used_rx;
    for (auto &tw : l.twins)
        if (contains(tx_all, tw.tx_cluster) && contains(rx_all, tw.rx_cluster))
        {
            used_tx.push_back(tw.tx_cluster);
            used_rx.push_back(tw.rx_cluster);
            kept.push_back(std::move(tw));
        }
    std::sort(used_tx.begin(), used_tx.end());
    std::sort(used_rx.begin(), used_rx.end());
    auto free_tx = sorted_difference(tx_all, used_tx);
    auto free_rx = sorted_difference(rx_all, used_rx);

    const std::size_t pairs = std::min(free_tx.size(), free_rx.size());
    if (pairs > 0)
    {
        Stream ms = Stream::derive(sc.seed, "match", {i, j, st.step});
        ms.shuffle(free_tx);
        ms.shuffle(free_rx);
        for (std::size_t p = 0; p < pairs; ++p)
        {
            const auto &a = st.cluster(free_tx[p]);
            const auto &z = st.cluster(free_rx[p]);
            TwinCluster tw;
            tw.id = st.next_twin_id++;
            tw.tx_cluster = a.id;
            tw.rx_cluster = z.id;
            tw.ray_class = ray_class(a.cls, z.cls);
            tw.virtual_delay = draw_virtual_delay(sc, ms);
            tw.birth_time = st.time;

            const std::size_t g = std::min({sc.rays_per_twin, a.members.size(), z.members.size()});
            std::vector<std::uint32_t> ia(a.members.size()), iz(z.members.size());
            std::iota(ia.begin(), ia.end(), 0u);
            std::iota(iz.begin(), iz.end(), 0u);
            ms.shuffle(ia);
            ms.shuffle(iz);
            const double sigma_e =
                table.get<params::PowerDelayParams>(tw.ray_class, sc.condition, Family::PowerDelay).sigma_e;
            for (std::size_t r = 0; r < g; ++r)
            {
                RayPair rp;
                rp.tx_member = ia[r];
                rp.rx_member = iz[r];
                rp.shadow_db = sigma_e * ms.normal();
                rp.phi0 = ms.uniform(0.0, 2.0 * std::numbers::pi);
                tw.rays.push_back(rp);
            }
            kept.push_back(std::move(tw));
        }
    }
    l.twins = std::move(kept);
}

const std::vector<TwinCluster> &visible_set(const EvolutionState &st, std::size_t i, std::size_t j)
{
    return st.link(i, j).twins;
}

std::vector<std::string> audit(const EvolutionState &st, const Scenario &sc)
{
    std::vector<std::string> bad;
    auto fail = [&](const std::string &m) { bad.push_back("t=" + std::to_string(st.time) + ": " + m); };
    const double t = st.time;

    for (const auto &vr : st.uav_vr)
        if (!(vr.radius > 0.0))
            fail("VR of " + vr.agent_id + " not positive");
    for (const auto &vr : st.vehicle_vr)
        if (!(vr.radius > 0.0))
            fail("VR of " + vr.agent_id + " not positive");

    for (const auto &[id, c] : st.clusters)
    {
        const std::string tag = "cluster " + std::to_string(id);
        if (c.members.empty())
            fail(tag + " empty");
        Vec3 mean;
        for (std::size_t k = 0; k < c.members.size(); ++k)
        {
            const auto &m = c.members[k];
            const Vec3 p = m.position_at(t);
            mean += p;
            if (m.cls != c.cls)
                fail(tag + " member class mismatch");
            if (m.cls == ScattererClass::Static && !(m.velocity == Vec3{}))
                fail(tag + " static member moving");
            if (m.cls == ScattererClass::TerrestrialDynamic && (p.z > sc.td_max_height || p.z < 0.0))
                fail(tag + " terrestrial member outside height band");
            if (m.cls == ScattererClass::AerialDynamic && !(p.z > 0.0))
                fail(tag + " aerial member at or below ground");
        }
        if (!c.members.empty())
        {
            mean = mean / static_cast<double>(c.members.size());
            const Vec3 cc = c.centroid_at(t);
            if (norm(mean - cc) > 1e-9 * std::max(1.0, norm(cc)))
                fail(tag + " centroid differs from member mean");
        }
    }

    for (const auto &l : st.links)
    {
        const std::string tag = "link (" + std::to_string(l.i) + "," + std::to_string(l.j) + ")";
        std::size_t n_tx = 0, n_rx = 0;
        for (auto cls : params::all_classes)
        {
            const auto ix = class_index(cls);
            const auto &act = l.active[ix];
            const auto &cnt = l.counters[ix];
            const auto vis = visible_clusters(st, sc, l.i, l.j, cls);
            for (auto id : act)
            {
                if (!st.clusters.count(id))
                {
                    fail(tag + " active cluster " + std::to_string(id) + " missing");
                    continue;
                }
                if (!std::binary_search(vis.begin(), vis.end(), id))
                    fail(tag + " active cluster " + std::to_string(id) + " outside a VR");
                const auto &c = st.cluster(id);
                if (c.cls != cls)
                    fail(tag + " active cluster class mismatch");
                if (cls == ScattererClass::AerialDynamic || (cls == ScattererClass::Static && c.side == Side::TxSide))
                    ++n_tx;
                else
                    ++n_rx;
            }
            if (st.step > 0 && cnt.survived != sorted_intersection(l.prev_active[ix], vis).size())
                fail(tag + " " + std::string(params::to_string(cls)) + ": survivor count differs from visible carry-over");
            if (act.size() != cnt.survived + cnt.born)
                fail(tag + " " + std::string(params::to_string(cls)) + ": active != M^S + M^new");
            if (cnt.born > cnt.requested || cnt.requested != new_cluster_count(cnt.target, cnt.survived))
                fail(tag + " " + std::string(params::to_string(cls)) + ": birth count law violated");
        }

        if (l.twins.size() != std::min(n_tx, n_rx))
            fail(tag + " twin count != min(tx-side, rx-side)");
        std::vector<std::uint32_t> tx_ids, rx_ids;
        for (const auto &tw : l.twins)
        {
            tx_ids.push_back(tw.tx_cluster);
            rx_ids.push_back(tw.rx_cluster);
            auto in_active = [&](std::uint32_t id) {
                for (const auto &a : l.active)
                    if (std::binary_search(a.begin(), a.end(), id))
                        return true;
                return false;
            };
            if (!in_active(tw.tx_cluster) || !in_active(tw.rx_cluster))
            {
                fail(tag + " twin " + std::to_string(tw.id) + " references an inactive cluster");
                continue;
            }
            const auto &a = st.cluster(tw.tx_cluster);
            const auto &z = st.cluster(tw.rx_cluster);
            if (a.cls == ScattererClass::TerrestrialDynamic || (a.cls == ScattererClass::Static && a.side != Side::TxSide))
                fail(tag + " twin tx side has wrong class/side");
            if (z.cls == ScattererClass::AerialDynamic || (z.cls == ScattererClass::Static && z.side != Side::RxSide))
                fail(tag + " twin rx side has wrong class/side");
            if (tw.virtual_delay < 0.0)
                fail(tag + " negative virtual delay");
            const std::size_t g = std::min({sc.rays_per_twin, a.members.size(), z.members.size()});
            if (tw.rays.size() != g)
                fail(tag + " twin ray count");
            std::vector<std::uint32_t> ra, rz;
            for (const auto &r : tw.rays)
            {
                ra.push_back(r.tx_member);
                rz.push_back(r.rx_member);
            }
            std::sort(ra.begin(), ra.end());
            std::sort(rz.begin(), rz.end());
            if (std::adjacent_find(ra.begin(), ra.end()) != ra.end() ||
                std::adjacent_find(rz.begin(), rz.end()) != rz.end() ||
                (!ra.empty() && (ra.back() >= a.members.size() || rz.back() >= z.members.size())))
                fail(tag + " twin ray pairing is not a bijection");
        }
        std::sort(tx_ids.begin(), tx_ids.end());
        std::sort(rx_ids.begin(), rx_ids.end());
        if (std::adjacent_find(tx_ids.begin(), tx_ids.end()) != tx_ids.end() ||
            std::adjacent_find(rx_ids.begin(), rx_ids.end()) != rx_ids.end())
            fail(tag + " cluster used in two twins");
    }
    return bad;
}

} // namespace uvchan::evolution
