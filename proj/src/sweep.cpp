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

#include "uvchan/sweep.hpp"

#include "uvchan/io.hpp"
#include "uvchan/simulate.hpp"

#include <omp.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <numeric>

namespace uvchan::sweep
{

using cplx = std::complex<double>;
using io::num;

// ----- Settings ------------------------------------------------------------------

Settings settings_from_json(const nlohmann::json &j)
{
    Settings s;
    std::vector<std::string> issues;
    if (!j.is_object())
        throw ValidationError({"sweep: expected an object"});
    static const std::vector<std::string> known{"conditions", "seeds",       "tacf_max_lag",   "tacf_anchors",
                                                "dpsd_anchors", "dpsd_span", "dpsd_lags",      "zero_pad",
                                                "tsi_anchors",  "tsi_span",  "tsi_threshold",  "tacf_margin",
                                                "tsi_separation", "dpsd_fraction", "threads"};
    for (auto it = j.begin(); it != j.end(); ++it)
        if (std::find(known.begin(), known.end(), it.key()) == known.end())
            issues.push_back("sweep." + it.key() + ": unknown field");

    auto number = [&](const char *key, double &out) {
        if (!j.contains(key))
            return;
        if (!j.at(key).is_number())
            issues.push_back(std::string("sweep.") + key + ": expected number");
        else
            out = j.at(key).get<double>();
    };
    auto count = [&](const char *key, std::size_t &out) {
        if (!j.contains(key))
            return;
        if (!j.at(key).is_number_integer() || j.at(key).get<long long>() < 0)
            issues.push_back(std::string("sweep.") + key + ": expected nonnegative integer");
        else
            out = j.at(key).get<std::size_t>();
    };
    if (j.contains("conditions"))
    {
        s.conditions.clear();
        const auto &c = j.at("conditions");
        if (!c.is_array())
            issues.push_back("sweep.conditions: expected an array");
        else
            for (const auto &v : c)
            {
                auto p = v.is_string() ? params::parse_condition(v.get<std::string>()) : std::nullopt;
                if (p)
                    s.conditions.push_back(*p);
                else
                    issues.push_back("sweep.conditions: expected low, medium or high");
            }
    }
    if (j.contains("seeds"))
    {
        const auto &v = j.at("seeds");
        try
        {
            if (v.is_string())
                s.seeds = parse_seed_range(v.get<std::string>());
            else if (v.is_array())
                for (const auto &x : v)
                    s.seeds.push_back(x.get<std::uint64_t>());
            else
                throw std::invalid_argument("expected \"A..B\" or an array");
        }
        catch (const std::exception &e)
        {
            issues.push_back(std::string("sweep.seeds: ") + e.what());
        }
    }
    if (j.contains("tacf_anchors"))
    {
        s.tacf_anchors.clear();
        if (!j.at("tacf_anchors").is_array())
            issues.push_back("sweep.tacf_anchors: expected an array");
        else
            for (const auto &v : j.at("tacf_anchors"))
                if (v.is_number())
                    s.tacf_anchors.push_back(v.get<double>());
                else
                    issues.push_back("sweep.tacf_anchors: expected numbers");
    }
    number("tacf_max_lag", s.tacf_max_lag);
    count("dpsd_anchors", s.dpsd_anchors);
    number("dpsd_span", s.dpsd_span);
    count("dpsd_lags", s.dpsd_lags);
    count("zero_pad", s.zero_pad);
    count("tsi_anchors", s.tsi_anchors);
    number("tsi_span", s.tsi_span);
    number("tsi_threshold", s.tsi_threshold);
    number("tacf_margin", s.tacf_margin);
    number("tsi_separation", s.tsi_separation);
    number("dpsd_fraction", s.dpsd_fraction);
    if (j.contains("threads"))
    {
        if (!j.at("threads").is_number_integer())
            issues.push_back("sweep.threads: expected integer");
        else
            s.threads = j.at("threads").get<int>();
    }
    if (!issues.empty())
        throw ValidationError(std::move(issues));
    return s;
}

nlohmann::json settings_to_json(const Settings &s)
{
    nlohmann::json j;
    for (auto c : s.conditions)
        j["conditions"].push_back(params::to_string(c));
    j["seeds"] = s.seeds;
    j["tacf_max_lag"] = s.tacf_max_lag;
    j["tacf_anchors"] = s.tacf_anchors;
    j["dpsd_anchors"] = s.dpsd_anchors;
    j["dpsd_span"] = s.dpsd_span;
    j["dpsd_lags"] = s.dpsd_lags;
    j["zero_pad"] = s.zero_pad;
    j["tsi_anchors"] = s.tsi_anchors;
    j["tsi_span"] = s.tsi_span;
    j["tsi_threshold"] = s.tsi_threshold;
    j["tacf_margin"] = s.tacf_margin;
    j["tsi_separation"] = s.tsi_separation;
    j["dpsd_fraction"] = s.dpsd_fraction;
    return j;
}

std::vector<std::uint64_t> parse_seed_range(const std::string &text)
{
    auto parse = [&](const std::string &v) -> std::uint64_t {
        std::size_t pos = 0;
        if (v.empty() || v[0] == '-')
            throw std::invalid_argument("bad seed '" + v + "'");
        const auto x = std::stoull(v, &pos);
        if (pos != v.size())
            throw std::invalid_argument("bad seed '" + v + "'");
        return x;
    };
    const auto dots = text.find("..");
    if (dots == std::string::npos)
        return {parse(text)};
    const auto a = parse(text.substr(0, dots));
    const auto b = parse(text.substr(dots + 2));
    if (b < a)
        throw std::invalid_argument("seed range '" + text + "' is empty");
    std::vector<std::uint64_t> out;
    for (auto s = a; s <= b; ++s)
        out.push_back(s);
    return out;
}

std::vector<std::string> validation_issues(const Settings &s, const Scenario &sc)
{
    std::vector<std::string> out;
    auto need = [&](bool ok, const std::string &m) {
        if (!ok)
            out.push_back(m);
    };
    need(!s.conditions.empty(), "sweep.conditions: at least one condition required");
    need(!s.seeds.empty(), "sweep.seeds: at least one seed required");
    need(s.seeds.size() >= 2, "sweep.seeds: ensemble estimators need at least 2 seeds");
    need(s.tacf_max_lag > 0.0, "sweep.tacf_max_lag: must be > 0");
    need(!s.tacf_anchors.empty(), "sweep.tacf_anchors: at least one anchor required");
    for (double a : s.tacf_anchors)
        need(a >= 0.0, "sweep.tacf_anchors: anchors must be >= 0");
    need(s.dpsd_anchors >= 1, "sweep.dpsd_anchors: must be >= 1");
    need(s.dpsd_span >= 0.0, "sweep.dpsd_span: must be >= 0");
    need(s.dpsd_lags >= 2, "sweep.dpsd_lags: must be >= 2");
    need(s.zero_pad >= 1, "sweep.zero_pad: must be >= 1");
    need(s.tsi_anchors >= 1, "sweep.tsi_anchors: must be >= 1");
    need(s.tsi_span > 0.0, "sweep.tsi_span: must be > 0");
    need(s.tsi_threshold > 0.0, "sweep.tsi_threshold: must be > 0");
    need(s.dpsd_fraction > 0.0 && s.dpsd_fraction <= 1.0, "sweep.dpsd_fraction: must be in (0, 1]");
    need(s.threads >= 0, "sweep.threads: must be >= 0");
    if (out.empty() && validation_issues(sc).empty())
    {
        const auto lay = make_layout(s, sc);
        need(lay.anchors.back() + lay.lags < sc.snapshots(),
             "sweep: last anchor plus the lag window exceeds the run; increase duration");
        need(lay.tsi_steps.back() < sc.snapshots(), "sweep.tsi_span: anchors exceed the run");
    }
    return out;
}

Layout make_layout(const Settings &s, const Scenario &sc)
{
    Layout lay;
    const auto steps = [&](double t) { return static_cast<std::size_t>(std::llround(t / sc.dt)); };
    lay.lags = std::max<std::size_t>(static_cast<std::size_t>(std::ceil(s.tacf_max_lag / sc.dt - 1e-9)), s.dpsd_lags);
    std::vector<std::size_t> tacf, dpsd;
    for (double a : s.tacf_anchors)
        tacf.push_back(steps(a));
    for (std::size_t k = 0; k < s.dpsd_anchors; ++k)
        dpsd.push_back(s.dpsd_anchors == 1 ? 0
                                           : steps(s.dpsd_span * static_cast<double>(k) /
                                                   static_cast<double>(s.dpsd_anchors - 1)));
    lay.anchors = tacf;
    lay.anchors.insert(lay.anchors.end(), dpsd.begin(), dpsd.end());
    std::sort(lay.anchors.begin(), lay.anchors.end());
    lay.anchors.erase(std::unique(lay.anchors.begin(), lay.anchors.end()), lay.anchors.end());
    auto pos = [&](std::size_t n) {
        return static_cast<std::size_t>(std::lower_bound(lay.anchors.begin(), lay.anchors.end(), n) -
                                        lay.anchors.begin());
    };
    for (auto n : tacf)
        lay.tacf_idx.push_back(pos(n));
    for (auto n : dpsd)
        lay.dpsd_idx.push_back(pos(n));
    for (std::size_t k = 0; k < s.tsi_anchors; ++k)
        lay.tsi_steps.push_back(static_cast<std::size_t>(
            std::floor(s.tsi_span * static_cast<double>(k) / static_cast<double>(s.tsi_anchors) / sc.dt + 1e-9)));
    lay.links = sc.links();
    return lay;
}

// ----- Per-seed work -------------------------------------------------------------

SeedSummary run_seed(const Scenario &sc, const params::ParameterTable &table, const Layout &layout)
{
    SeedSummary out;
    out.seed = sc.seed;
    const std::size_t n_anchor = layout.anchors.size();
    out.window.assign(layout.links, std::vector<std::array<std::vector<cplx>, 4>>(n_anchor));
    for (auto &l : out.window)
        for (auto &a : l)
            for (auto &c : a)
                c.assign(layout.lags + 1, cplx{});

    stats::DelaySpreadTrace trace;
    const auto freq = cir::frequency_grid(sc.carrier_hz, sc.bandwidth_hz, sc.output.tf_points);
    double twins = 0.0;

    Simulator sim(sc, table);
    for (;;)
    {
        const std::size_t n = sim.step();
        const auto &m = sim.cir();
        if (n == 0)
            out.tf0 = cir::transfer_function(m.at(0, 0), freq, sc.chi, sc.carrier_hz).h;

        for (std::size_t a = 0; a < n_anchor; ++a)
        {
            const std::size_t n0 = layout.anchors[a];
            if (n < n0 || n > n0 + layout.lags)
                continue;
            for (std::size_t l = 0; l < layout.links; ++l)
            {
                const auto &lc = m.at(l % sc.vehicles.size(), l / sc.vehicles.size());
                auto &w = out.window[l][a];
                w[Total][n - n0] = cir::carrier_response(lc);
                w[LoS][n - n0] = cir::carrier_response(lc, {true, false, false});
                w[GR][n - n0] = cir::carrier_response(lc, {false, true, false});
                w[NLoS][n - n0] = cir::carrier_response(lc, {false, false, true});
            }
        }

        const auto a2 = stats::delay_spread(m);
        trace.time.push_back(sc.time_of(n));
        trace.a2.push_back(a2.value_or(0.0));
        trace.defined.push_back(a2.has_value());
        for (const auto &l : sim.state().links)
            twins += static_cast<double>(l.twins.size());

        if (!sim.has_next())
            break;
        sim.next();
    }
    out.mean_active_twins = twins / static_cast<double>(trace.time.size() * layout.links);
    for (auto n : layout.tsi_steps)
        out.tsi.push_back(stats::tsi(trace, n));
    out.skipped_scatterers = sim.state().skipped_scatterers;
    out.shortfall = sim.state().shortfall;
    return out;
}

namespace
{

std::string cell_name(const Scenario &sc)
{
    return "condition " + std::string(params::to_string(sc.condition)) + ", seed " + std::to_string(sc.seed);
}

} // namespace

std::vector<SeedSummary> run_seeds_serial(const Scenario &base, const params::ParameterTable &table,
                                          const Layout &layout, const std::vector<std::uint64_t> &seeds)
{
    std::vector<SeedSummary> out(seeds.size());
    for (std::size_t k = 0; k < seeds.size(); ++k)
    {
        Scenario sc = base;
        sc.seed = seeds[k];
        try
        {
            out[k] = run_seed(sc, table, layout);
        }
        catch (const std::exception &e)
        {
            throw SweepError("sweep cell failed (" + cell_name(sc) + "): " + e.what());
        }
    }
    return out;
}

std::vector<SeedSummary> run_seeds_omp(const Scenario &base, const params::ParameterTable &table,
                                       const Layout &layout, const std::vector<std::uint64_t> &seeds)
{
    std::vector<SeedSummary> out(seeds.size());
    std::vector<std::string> errors(seeds.size());
    const auto n = static_cast<std::ptrdiff_t>(seeds.size());
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t k = 0; k < n; ++k)
    {
        Scenario sc = base;
        sc.seed = seeds[static_cast<std::size_t>(k)];
        try
        {
            out[static_cast<std::size_t>(k)] = run_seed(sc, table, layout);
        }
        catch (const std::exception &e)
        {
            errors[static_cast<std::size_t>(k)] = "sweep cell failed (" + cell_name(sc) + "): " + e.what();
        }
    }
    for (const auto &e : errors)
        if (!e.empty())
            throw SweepError(e);
    return out;
}

// ----- Reduction -----------------------------------------------------------------

double occupied_band(const Scenario &sc)
{
    auto max_speed = [](const std::vector<geometry::Trajectory> &agents) {
        double v = 0.0;
        for (const auto &a : agents)
        {
            const auto &w = a.waypoints();
            for (std::size_t k = 1; k < w.size(); ++k)
                v = std::max(v, norm(w[k].p - w[k - 1].p) / (w[k].t - w[k - 1].t));
        }
        return v;
    };
    const double v = max_speed(sc.uavs) + max_speed(sc.vehicles) + 2.0 * std::max(sc.v_td_max, sc.v_ad_max);
    return std::min(v / sc.wavelength(), 0.5 / sc.dt);
}

ConditionResult reduce(params::Condition cond, const Scenario &sc, const Settings &s, const Layout &layout,
                       const std::vector<SeedSummary> &seeds)
{
    ConditionResult r;
    r.condition = cond;
    const std::size_t R = seeds.size();
    const std::size_t n_anchor = layout.anchors.size();
    const std::size_t tacf_lags = static_cast<std::size_t>(std::ceil(s.tacf_max_lag / sc.dt - 1e-9));

    std::vector<stats::CorrelationCurve> curves(n_anchor);
    std::vector<std::array<stats::CorrelationCurve, 4>> comps(n_anchor);
    std::vector<cplx> x(R), y(R);
    for (std::size_t a = 0; a < n_anchor; ++a)
    {
        auto &cv = curves[a];
        cv.kind = stats::CorrelationKind::TACF;
        cv.anchor = sc.time_of(layout.anchors[a]);
        for (std::size_t c = 0; c < 4; ++c)
        {
            comps[a][c].kind = stats::CorrelationKind::TACF;
            comps[a][c].anchor = cv.anchor;
            comps[a][c].normalized = false;
        }
        for (std::size_t k = 0; k <= layout.lags; ++k)
        {
            double p0 = 0.0, pk = 0.0;
            for (std::size_t q = 0; q < R; ++q)
            {
                p0 += std::norm(seeds[q].window[0][a][Total][0]);
                pk += std::norm(seeds[q].window[0][a][Total][k]);
            }
            const double den = std::sqrt((p0 / static_cast<double>(R)) * (pk / static_cast<double>(R)));
            for (std::size_t c = 0; c < 4; ++c)
            {
                for (std::size_t q = 0; q < R; ++q)
                {
                    x[q] = seeds[q].window[0][a][c][0];
                    y[q] = seeds[q].window[0][a][c][k];
                }
                const cplx v = stats::correlate(x, y, false);
                comps[a][c].lag.push_back(static_cast<double>(k) * sc.dt);
                comps[a][c].value.push_back(den > 0.0 ? v / den : cplx{});
            }
            cv.lag.push_back(static_cast<double>(k) * sc.dt);
            cv.value.push_back(comps[a][Total].value.back());
        }
    }

    for (auto a : layout.tacf_idx)
    {
        r.tacf.push_back(curves[a]);
        r.tacf_components.push_back(comps[a]);
        double m = 0.0;
        for (std::size_t k = 1; k <= tacf_lags; ++k)
            m += std::abs(curves[a].value[k]);
        r.tacf_mean_abs.push_back(m / static_cast<double>(tacf_lags));
    }

    const double band = occupied_band(sc);
    for (auto a : layout.dpsd_idx)
    {
        stats::CorrelationCurve c = curves[a];
        c.lag.resize(s.dpsd_lags + 1);
        c.value.resize(s.dpsd_lags + 1);
        r.dpsd.push_back(stats::dpsd(c, s.zero_pad));
        r.flatness.push_back(stats::spectral_flatness(r.dpsd.back(), band));
    }

    // Frequency correlation at t0 around the carrier.
    std::vector<stats::Trace> spectra;
    for (const auto &q : seeds)
        spectra.push_back(q.tf0);
    const std::size_t nf = sc.output.tf_points;
    const std::size_t centre = nf / 2;
    const double df = nf > 1 ? sc.bandwidth_hz / static_cast<double>(nf - 1) : 0.0;
    r.fcf = stats::fcf(spectra, centre, nf - 1 - centre, df);

    r.space_ccf.assign(n_anchor, {});
    for (std::size_t a = 0; a < n_anchor; ++a)
        for (std::size_t l = 1; l < layout.links; ++l)
        {
            for (std::size_t q = 0; q < R; ++q)
            {
                x[q] = seeds[q].window[0][a][Total][0];
                y[q] = seeds[q].window[l][a][Total][0];
            }
            r.space_ccf[a].push_back(stats::space_ccf(x, y));
        }

    std::vector<double> vals;
    std::size_t censored = 0;
    for (const auto &q : seeds)
        for (const auto &t : q.tsi)
        {
            r.tsi.push_back(t);
            if (!t.defined)
            {
                ++r.undefined_tsi;
                continue;
            }
            vals.push_back(t.tsi);
            censored += t.censored ? 1 : 0;
        }
    if (!vals.empty())
    {
        std::sort(vals.begin(), vals.end());
        const std::size_t h = vals.size() / 2;
        r.median_tsi = vals.size() % 2 ? vals[h] : 0.5 * (vals[h - 1] + vals[h]);
        r.censored_fraction = static_cast<double>(censored) / static_cast<double>(vals.size());
    }

    double twins = 0.0;
    for (const auto &q : seeds)
    {
        twins += q.mean_active_twins;
        r.skipped_scatterers += q.skipped_scatterers;
        r.shortfall += q.shortfall;
    }
    r.mean_active_twins = twins / static_cast<double>(R);
    return r;
}

std::vector<Verdict> verdicts(const std::vector<ConditionResult> &results, const Settings &s)
{
    const ConditionResult *low = nullptr, *med = nullptr, *high = nullptr;
    for (const auto &r : results)
    {
        if (r.condition == params::Condition::Low)
            low = &r;
        if (r.condition == params::Condition::Medium)
            med = &r;
        if (r.condition == params::Condition::High)
            high = &r;
    }
    std::vector<Verdict> out(3);
    out[0].name = "tacf_order";
    out[1].name = "tsi_order";
    out[2].name = "dpsd_flatness";
    if (!low || !med || !high)
    {
        for (auto &v : out)
            v.detail = "needs low, medium and high conditions";
        return out;
    }

    {
        auto &v = out[0];
        v.evaluated = true;
        v.pass = true;
        std::string d;
        for (std::size_t a = 0; a < high->tacf_mean_abs.size(); ++a)
        {
            const double h = high->tacf_mean_abs[a], m = med->tacf_mean_abs[a], l = low->tacf_mean_abs[a];
            const bool ok = (m - h) >= s.tacf_margin && (l - m) >= s.tacf_margin;
            v.pass = v.pass && ok;
            d += (a ? "; " : "") + std::string("t=") + num(high->tacf[a].anchor) + " high=" + num(h) +
                 " medium=" + num(m) + " low=" + num(l);
        }
        v.detail = d;
    }
    {
        auto &v = out[1];
        v.evaluated = true;
        const double h = high->median_tsi, m = med->median_tsi, l = low->median_tsi;
        v.pass = m > 0.0 && l > 0.0 && (m - h) / m >= s.tsi_separation && (l - m) / l >= s.tsi_separation;
        v.detail = "median high=" + num(h) + " medium=" + num(m) + " low=" + num(l);
    }
    {
        auto &v = out[2];
        v.evaluated = true;
        std::size_t wins = 0;
        const std::size_t n = std::min(high->flatness.size(), low->flatness.size());
        for (std::size_t a = 0; a < n; ++a)
            wins += high->flatness[a] > low->flatness[a] ? 1 : 0;
        const double frac = n ? static_cast<double>(wins) / static_cast<double>(n) : 0.0;
        v.pass = n > 0 && frac >= s.dpsd_fraction;
        v.detail = "high flatter than low at " + std::to_string(wins) + "/" + std::to_string(n) + " anchors";
    }
    return out;
}

// ----- Output --------------------------------------------------------------------

namespace
{

std::string seeds_label(const std::vector<std::uint64_t> &seeds)
{
    if (seeds.empty())
        return "0";
    return std::to_string(seeds.size()) + " (" + std::to_string(seeds.front()) + ".." + std::to_string(seeds.back()) +
           ")";
}

std::vector<std::pair<std::string, std::string>> header(const Scenario &sc, const Settings &s, const std::string &kind,
                                                        const std::string &cond)
{
    return {{"uvchan", std::string(version) + " " + kind},
            {"scenario_hash", scenario_hash(sc)},
            {"seeds", seeds_label(s.seeds)},
            {"condition", cond},
            {"settings", "dt=" + num(sc.dt) + " tacf_max_lag=" + num(s.tacf_max_lag) + " dpsd_lags=" +
                             num(s.dpsd_lags) + " window=blackman zero_pad=" + num(s.zero_pad) + " tsi_threshold=" +
                             num(s.tsi_threshold) + " tsi_anchors=" + num(s.tsi_anchors) + " tsi_span=" +
                             num(s.tsi_span) + " flatness_band_hz=" + num(occupied_band(sc))}};
}

std::string link_label(std::size_t l, std::size_t n_vehicle)
{
    return "j" + std::to_string(l % n_vehicle) + "_i" + std::to_string(l / n_vehicle);
}

} // namespace

SweepOutput run_sweep(const Scenario &base, const params::ParameterTable &table, const Settings &s,
                      const std::filesystem::path &out_dir, bool parallel)
{
    namespace fs = std::filesystem;
    auto issues = uvchan::validation_issues(base);
    auto more = validation_issues(s, base);
    issues.insert(issues.end(), more.begin(), more.end());
    if (!issues.empty())
        throw ValidationError(std::move(issues));
    if (s.threads > 0)
        omp_set_num_threads(s.threads);

    const auto t_start = std::chrono::steady_clock::now();
    const Layout layout = make_layout(s, base);
    SweepOutput out;
    std::vector<std::string> files;

    try
    {
        fs::create_directories(out_dir);
        fs::remove(out_dir / "PARTIAL");

        for (auto cond : s.conditions)
        {
            Scenario sc = base;
            sc.condition = cond;
            const std::string cname(params::to_string(cond));
            spdlog::info("sweep: condition {} over {} seeds", cname, s.seeds.size());
            const auto summaries = parallel ? run_seeds_omp(sc, table, layout, s.seeds)
                                            : run_seeds_serial(sc, table, layout, s.seeds);
            out.runs += summaries.size();
            auto res = reduce(cond, sc, s, layout, summaries);

            {
                const std::string f = "tacf_" + cname + ".tsv";
                io::TableWriter w(out_dir / f, header(sc, s, "tacf", cname),
                                  {"anchor_s", "lag_s", "re", "im", "abs", "abs_los", "abs_gr", "abs_nlos"});
                for (std::size_t a = 0; a < res.tacf.size(); ++a)
                    for (std::size_t k = 0; k < res.tacf[a].lag.size(); ++k)
                    {
                        const auto v = res.tacf[a].value[k];
                        w.row({num(res.tacf[a].anchor), num(res.tacf[a].lag[k]), num(v.real()), num(v.imag()),
                               num(std::abs(v)), num(std::abs(res.tacf_components[a][LoS].value[k])),
                               num(std::abs(res.tacf_components[a][GR].value[k])),
                               num(std::abs(res.tacf_components[a][NLoS].value[k]))});
                    }
                w.close();
                files.push_back(f);
            }
            {
                const std::string f = "dpsd_" + cname + ".tsv";
                io::TableWriter w(out_dir / f, header(sc, s, "dpsd", cname),
                                  {"anchor_s", "fd_hz", "power_linear", "power_db"});
                for (const auto &d : res.dpsd)
                    for (std::size_t m = 0; m < d.freq.size(); ++m)
                        w.row({num(d.anchor), num(d.freq[m]), num(d.power[m]), num(stats::to_db(d.power[m]))});
                w.close();
                files.push_back(f);
            }
            {
                const std::string f = "flatness_" + cname + ".tsv";
                io::TableWriter w(out_dir / f, header(sc, s, "dpsd-flatness", cname), {"anchor_s", "flatness"});
                for (std::size_t a = 0; a < res.dpsd.size(); ++a)
                    w.row({num(res.dpsd[a].anchor), num(res.flatness[a])});
                w.close();
                files.push_back(f);
            }
            {
                const std::string f = "tsi_" + cname + ".tsv";
                io::TableWriter w(out_dir / f, header(sc, s, "tsi", cname),
                                  {"seed", "anchor_s", "tsi_s", "censored", "defined"});
                std::size_t k = 0;
                for (const auto &q : summaries)
                    for (const auto &t : q.tsi)
                    {
                        (void)k;
                        w.row({std::to_string(q.seed), num(t.anchor), t.defined ? num(t.tsi) : "nan",
                               t.censored ? "1" : "0", t.defined ? "1" : "0"});
                    }
                w.close();
                files.push_back(f);
            }
            {
                const std::string f = "fcf_" + cname + ".tsv";
                io::TableWriter w(out_dir / f, header(sc, s, "fcf", cname), {"lag_hz", "re", "im", "abs"});
                for (std::size_t k = 0; k < res.fcf.lag.size(); ++k)
                    w.row({num(res.fcf.lag[k]), num(res.fcf.value[k].real()), num(res.fcf.value[k].imag()),
                           num(std::abs(res.fcf.value[k]))});
                w.close();
                files.push_back(f);
            }
            if (layout.links > 1)
            {
                const std::string f = "ccf_" + cname + ".tsv";
                io::TableWriter w(out_dir / f, header(sc, s, "space-ccf", cname),
                                  {"anchor_s", "link_a", "link_b", "re", "im", "abs"});
                for (std::size_t a = 0; a < layout.anchors.size(); ++a)
                    for (std::size_t l = 1; l < layout.links; ++l)
                    {
                        const auto v = res.space_ccf[a][l - 1];
                        w.row({num(sc.time_of(layout.anchors[a])), link_label(0, sc.vehicles.size()),
                               link_label(l, sc.vehicles.size()), num(v.real()), num(v.imag()), num(std::abs(v))});
                    }
                w.close();
                files.push_back(f);
            }
            out.results.push_back(std::move(res));
        }

        {
            std::vector<std::string> cols{"condition"};
            for (double a : s.tacf_anchors)
                cols.push_back("tacf_mean_abs_t" + num(a));
            for (const char *c : {"median_tsi_s", "tsi_censored_fraction", "tsi_undefined", "mean_flatness",
                                  "mean_active_twins", "skipped_scatterers", "birth_shortfall"})
                cols.push_back(c);
            io::TableWriter w(out_dir / "summary.tsv", header(base, s, "summary", "all"), cols);
            for (const auto &r : out.results)
            {
                std::vector<std::string> row{std::string(params::to_string(r.condition))};
                for (double v : r.tacf_mean_abs)
                    row.push_back(num(v));
                double fl = 0.0;
                for (double v : r.flatness)
                    fl += v;
                fl /= std::max<std::size_t>(1, r.flatness.size());
                row.insert(row.end(), {num(r.median_tsi), num(r.censored_fraction), num(r.undefined_tsi), num(fl),
                                       num(r.mean_active_twins), num(r.skipped_scatterers), num(r.shortfall)});
                w.row(row);
            }
            w.close();
            files.push_back("summary.tsv");
        }

        out.verdict = verdicts(out.results, s);
        {
            nlohmann::json v;
            v["scenario_hash"] = scenario_hash(base);
            v["seeds"] = s.seeds.size();
            for (const auto &x : out.verdict)
                v["criteria"].push_back(
                    {{"name", x.name}, {"evaluated", x.evaluated}, {"pass", x.pass}, {"detail", x.detail}});
            io::write_text(out_dir / "verdict.json", v.dump(2) + "\n");
            files.push_back("verdict.json");
        }

        for (const auto &f : files)
            out.checksums[f] = io::file_sha256(out_dir / f);

        nlohmann::json man;
        man["uvchan_version"] = version;
        man["kind"] = "sweep";
        man["scenario_hash"] = scenario_hash(base);
        man["seeds"] = s.seeds;
        for (auto c : s.conditions)
            man["conditions"].push_back(params::to_string(c));
        man["runs"] = out.runs;
        man["snapshots_per_run"] = base.snapshots();
        man["threads"] = parallel ? omp_get_max_threads() : 1;
        man["checksums"] = out.checksums;
        man["settings"] = settings_to_json(s);
        man["wall_clock_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
        io::write_text(out_dir / "manifest.json", man.dump(2) + "\n");
    }
    catch (const io::IoError &e)
    {
        io::write_partial_marker(out_dir, e.what());
        throw;
    }
    catch (const std::filesystem::filesystem_error &e)
    {
        io::write_partial_marker(out_dir, e.what());
        throw io::IoError(e.what());
    }
    return out;
}

} // namespace uvchan::sweep
