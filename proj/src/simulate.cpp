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

#include "uvchan/simulate.hpp"

#include "uvchan/io.hpp"
#include "uvchan/stats.hpp"

#include <spdlog/spdlog.h>

#include <chrono>
#include <cmath>

namespace uvchan
{

cir::LinkCir synthesize_link(evolution::EvolutionState &st, const Scenario &sc, const params::ParameterTable &table,
                             std::size_t i, std::size_t j, double dt)
{
    auto &l = st.link(i, j);
    const double t = st.time;
    const double lambda = sc.wavelength();
    const geometry::Vec3 tx = sc.uavs[i].position(t), vtx = sc.uavs[i].velocity(t);
    const geometry::Vec3 rx = sc.vehicles[j].position(t), vrx = sc.vehicles[j].velocity(t);

    std::vector<cir::RayTap> taps;
    taps.reserve(2 + 8 * l.twins.size());

    auto los = cir::los_tap(tx, vtx, rx, vrx, lambda, l.los_phi0);
    los.accumulated_phase = l.los_phase.advance(los.doppler, dt);
    taps.push_back(los);

    const cir::GroundModel ground{sc.ground_permittivity, sc.polarization};
    auto gr = cir::gr_tap(tx, vtx, rx, vrx, lambda, l.gr_phi0, ground);
    gr.accumulated_phase = l.gr_phase.advance(gr.doppler, dt);
    taps.push_back(gr);

    for (auto &tw : l.twins)
    {
        const auto &a = st.cluster(tw.tx_cluster);
        const auto &z = st.cluster(tw.rx_cluster);
        const auto &pd = table.get<params::PowerDelayParams>(tw.ray_class, sc.condition, params::Family::PowerDelay);
        for (std::size_t r = 0; r < tw.rays.size(); ++r)
        {
            auto &ray = tw.rays[r];
            cir::NlosGeometry g{tx, vtx, rx, vrx, a.member_at(ray.tx_member, t), a.velocity,
                                z.member_at(ray.rx_member, t), z.velocity};
            auto tap = cir::nlos_tap(g, tw.virtual_delay, pd, ray.shadow_db, ray.phi0, lambda, sc.scatterer_doppler);
            tap.twin = tw.id;
            tap.ray = static_cast<std::uint32_t>(r);
            tap.cls = tw.ray_class;
            tap.accumulated_phase = ray.phase.advance(tap.doppler, dt);
            taps.push_back(tap);
        }
    }

    const bool in_window = t >= sc.window_start && t <= sc.window_stop();
    auto cir = cir::assemble_link_cir(std::move(taps), std::pow(10.0, sc.omega_db / 10.0), sc.eta_gr, in_window);
    cir.i = i;
    cir.j = j;
    cir.time = t;
    return cir;
}

Simulator::Simulator(Scenario sc, const params::ParameterTable &table)
    : sc_(std::move(sc)), table_(table), st_(evolution::init_environment(sc_, table_))
{
    synthesize(0.0);
}

void Simulator::next()
{
    evolution::advance(st_, sc_, table_, sc_.dt);
    synthesize(sc_.dt);
}

void Simulator::synthesize(double dt)
{
    std::vector<cir::LinkCir> links;
    links.reserve(st_.links.size());
    for (const auto &l : st_.links)
        links.push_back(synthesize_link(st_, sc_, table_, l.i, l.j, dt));
    cir_ = cir::assemble_matrix(links, sc_.uavs.size(), sc_.vehicles.size(), st_.time);
}

// ----- Single run bundle ---------------------------------------------------------

namespace
{

using io::num;

std::vector<std::pair<std::string, std::string>> run_header(const Scenario &sc, const std::string &kind)
{
    return {{"uvchan", std::string(version) + " " + kind},
            {"scenario_hash", scenario_hash(sc)},
            {"seed", std::to_string(sc.seed)},
            {"condition", std::string(params::to_string(sc.condition))},
            {"settings", "dt=" + num(sc.dt) + " duration=" + num(sc.duration) + " fc=" + num(sc.carrier_hz) +
                             " bandwidth=" + num(sc.bandwidth_hz) + " chi=" + num(sc.chi)}};
}

std::string side_name(geometry::Side s)
{
    return s == geometry::Side::TxSide ? "tx" : (s == geometry::Side::RxSide ? "rx" : "shared");
}

} // namespace

RunSummary run_to_directory(const Scenario &sc, const params::ParameterTable &table)
{
    namespace fs = std::filesystem;
    require_valid(sc);
    const fs::path dir = sc.output_dir;
    const auto t_start = std::chrono::steady_clock::now();
    RunSummary sum;
    try
    {
        fs::create_directories(dir);
        fs::remove(dir / "PARTIAL");

        io::TableWriter cir_w(dir / "cir.tsv", run_header(sc, "cir"),
                              {"step", "t_s", "j", "i", "kind", "class", "twin", "ray", "delay_s", "power", "amplitude",
                               "doppler_hz", "phase_rad", "accumulated_phase_rad"});
        io::TableWriter tf_w(dir / "tf.tsv", run_header(sc, "transfer-function"),
                             {"step", "t_s", "j", "i", "f_hz", "re", "im"});
        std::vector<std::string> ds_cols{"step", "t_s", "a2_s", "defined"};
        for (std::size_t i = 0; i < sc.uavs.size(); ++i)
            for (std::size_t j = 0; j < sc.vehicles.size(); ++j)
                ds_cols.push_back("a2_j" + std::to_string(j) + "_i" + std::to_string(i));
        io::TableWriter ds_w(dir / "delay_spread.tsv", run_header(sc, "delay-spread"), ds_cols);
        io::TableWriter ev_w(dir / "evolution.tsv", run_header(sc, "evolution"),
                             {"step", "t_s", "j", "i", "class", "survived", "target", "requested", "adopted", "born",
                              "active", "twins"});
        io::TableWriter cl_w(dir / "clusters.tsv", run_header(sc, "clusters"),
                             {"step", "t_s", "id", "class", "side", "cx", "cy", "cz", "vx", "vy", "vz", "members"});

        const auto freq = cir::frequency_grid(sc.carrier_hz, sc.bandwidth_hz, sc.output.tf_points);
        stats::DelaySpreadTrace trace;

        Simulator sim(sc, table);
        for (;;)
        {
            const std::size_t n = sim.step();
            const double t = sc.time_of(n);
            const auto &m = sim.cir();
            const auto &st = sim.state();

            if (sc.output.cir_stride && n % sc.output.cir_stride == 0)
                for (std::size_t j = 0; j < m.vehicles(); ++j)
                    for (std::size_t i = 0; i < m.uavs(); ++i)
                        for (const auto &tap : m.at(j, i).taps)
                            cir_w.row({num(n), num(t), num(j), num(i), std::string(cir::to_string(tap.kind)),
                                       tap.kind == cir::TapKind::NLoS ? std::string(params::to_string(tap.cls)) : "-",
                                       tap.kind == cir::TapKind::NLoS ? std::to_string(tap.twin) : "-",
                                       tap.kind == cir::TapKind::NLoS ? std::to_string(tap.ray) : "-", num(tap.delay),
                                       num(tap.power), num(tap.amplitude), num(tap.doppler), num(tap.phase),
                                       num(tap.accumulated_phase)});

            if (sc.output.tf_stride && n % sc.output.tf_stride == 0)
            {
                for (std::size_t j = 0; j < m.vehicles(); ++j)
                    for (std::size_t i = 0; i < m.uavs(); ++i)
                    {
                        const auto tf = cir::transfer_function_omp(m.at(j, i), freq, sc.chi, sc.carrier_hz);
                        for (std::size_t k = 0; k < freq.size(); ++k)
                            tf_w.row({num(n), num(t), num(j), num(i), num(freq[k]), num(tf.h[k].real()),
                                      num(tf.h[k].imag())});
                    }
                for (const auto &[id, c] : st.clusters)
                {
                    const auto p = c.centroid_at(st.time);
                    cl_w.row({num(n), num(t), std::to_string(id), std::string(params::to_string(c.cls)),
                              side_name(c.side), num(p.x), num(p.y), num(p.z), num(c.velocity.x), num(c.velocity.y),
                              num(c.velocity.z), num(c.members.size())});
                }
            }

            const auto a2 = stats::delay_spread(m);
            trace.time.push_back(t);
            trace.a2.push_back(a2.value_or(0.0));
            trace.defined.push_back(a2.has_value());
            std::vector<std::string> row{num(n), num(t), a2 ? num(*a2) : "nan", a2 ? "1" : "0"};
            for (const auto &v : stats::delay_spread_per_link(m))
                row.push_back(v ? num(*v) : "nan");
            ds_w.row(row);

            for (const auto &l : st.links)
                for (auto cls : params::all_classes)
                {
                    const auto ix = evolution::class_index(cls);
                    const auto &c = l.counters[ix];
                    ev_w.row({num(n), num(t), num(l.j), num(l.i), std::string(params::to_string(cls)),
                              num(c.survived), num(c.target), num(c.requested), num(c.adopted), num(c.born),
                              num(l.active[ix].size()), num(l.twins.size())});
                }

            ++sum.snapshots;
            if (!sim.has_next())
                break;
            sim.next();
        }
        sum.skipped_scatterers = sim.state().skipped_scatterers;
        sum.shortfall = sim.state().shortfall;

        io::TableWriter tsi_w(dir / "tsi.tsv", run_header(sc, "tsi"), {"anchor_s", "tsi_s", "censored", "defined"});
        const double span = std::min(1.0, trace.time.back());
        const std::size_t anchors = sc.output.tsi_anchors;
        for (std::size_t k = 0; k < anchors; ++k)
        {
            const auto n = static_cast<std::size_t>(std::floor(span * static_cast<double>(k) /
                                                               static_cast<double>(anchors) / sc.dt + 1e-9));
            if (n >= trace.time.size())
                break;
            const auto s = stats::tsi(trace, n);
            tsi_w.row({num(s.anchor), s.defined ? num(s.tsi) : "nan", s.censored ? "1" : "0", s.defined ? "1" : "0"});
        }

        for (auto *w : {&cir_w, &tf_w, &ds_w, &ev_w, &cl_w, &tsi_w})
            w->close();
        sum.files = {"cir.tsv", "tf.tsv", "delay_spread.tsv", "evolution.tsv", "clusters.tsv", "tsi.tsv"};

        if (sum.skipped_scatterers > 0)
            spdlog::warn("{} scatterers skipped after {} placement attempts", sum.skipped_scatterers,
                         evolution::max_placement_attempts);
        if (sum.shortfall > 0)
            spdlog::warn("{} requested cluster births could not be placed", sum.shortfall);

        nlohmann::json man;
        man["uvchan_version"] = version;
        man["kind"] = "run";
        man["scenario_hash"] = scenario_hash(sc);
        man["seeds"] = {sc.seed};
        man["condition"] = params::to_string(sc.condition);
        man["snapshots"] = sum.snapshots;
        man["skipped_scatterers"] = sum.skipped_scatterers;
        man["birth_shortfall"] = sum.shortfall;
        for (const auto &f : sum.files)
            man["checksums"][f] = io::file_sha256(dir / f);
        man["wall_clock_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
        man["scenario"] = scenario_to_json(sc);
        io::write_text(dir / "manifest.json", man.dump(2) + "\n");
    }
    catch (const io::IoError &e)
    {
        io::write_partial_marker(dir, e.what());
        throw;
    }
    catch (const std::filesystem::filesystem_error &e)
    {
        io::write_partial_marker(dir, e.what());
        throw io::IoError(e.what());
    }
    return sum;
}

} // namespace uvchan
