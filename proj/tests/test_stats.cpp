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

#include "uvchan/rng.hpp"
#include "uvchan/stats.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

using namespace uvchan;
using namespace uvchan::stats;
using std::numbers::pi;

namespace
{

std::vector<Trace> doppler_traces(double f_d, double dt, std::size_t n, std::size_t reals, std::uint64_t seed)
{
    Stream s(seed);
    std::vector<Trace> out(reals);
    for (auto &tr : out)
    {
        const double phi = s.uniform(0.0, 2.0 * pi);
        for (std::size_t k = 0; k < n; ++k)
            tr.push_back(std::polar(1.0, phi + 2.0 * pi * f_d * static_cast<double>(k) * dt));
    }
    return out;
}

DelaySpreadTrace make_trace(const std::vector<double> &a2, double dt)
{
    DelaySpreadTrace t;
    for (std::size_t k = 0; k < a2.size(); ++k)
    {
        t.time.push_back(static_cast<double>(k) * dt);
        t.a2.push_back(a2[k]);
        t.defined.push_back(1);
    }
    return t;
}

} // namespace

TEST_CASE("correlation normalisation", "[stats]")
{
    Stream s(1);
    std::vector<cplx> x(500), y(500);
    for (std::size_t r = 0; r < x.size(); ++r)
    {
        x[r] = {s.normal(), s.normal()};
        y[r] = {s.normal(), s.normal()};
    }
    REQUIRE(std::abs(correlate(x, x) - cplx{1.0, 0.0}) < 1e-14);
    REQUIRE(std::abs(space_ccf(x, y)) < 0.2);
    REQUIRE(std::abs(correlate(x, y)) <= 1.0);
    // Unnormalised zero lag is the mean power.
    double p = 0.0;
    for (const auto &v : x)
        p += std::norm(v);
    REQUIRE(correlate(x, x, false).real() == Catch::Approx(p / 500.0).epsilon(1e-14));
    REQUIRE_THROWS_AS(correlate(std::span(x).first(1), std::span(y).first(1)), std::invalid_argument);
    REQUIRE_THROWS_AS(correlate(std::span(x).first(3), std::span(y).first(4)), std::invalid_argument);
}

TEST_CASE("TACF of a constant doppler", "[stats]")
{
    const double f_d = 350.0, dt = 1e-4;
    const auto tr = doppler_traces(f_d, dt, 200, 50, 2);
    const auto c = tacf(tr, 10, 60, dt);
    REQUIRE(c.value.size() == 61);
    for (std::size_t k = 0; k < c.value.size(); ++k)
    {
        REQUIRE(std::abs(c.value[k]) == Catch::Approx(1.0).epsilon(1e-12));
        const double expected = 2.0 * pi * f_d * c.lag[k];
        REQUIRE(std::abs(std::remainder(std::arg(c.value[k]) - expected, 2.0 * pi)) < 1e-9);
    }
    REQUIRE(c.anchor == Catch::Approx(10 * dt));
    REQUIRE_THROWS_AS(tacf(tr, 150, 60, dt), std::out_of_range);
}

TEST_CASE("FCF and TSF-CF self correlation", "[stats]")
{
    Stream s(3);
    std::vector<Trace> sp(40, Trace(32));
    for (auto &t : sp)
        for (auto &v : t)
            v = {s.normal(), s.normal()};
    REQUIRE(std::abs(fcf(sp, 5, 10, 1e6).value[0] - cplx{1.0, 0.0}) < 1e-14);

    std::vector<Grid> g(40, Grid(6, std::vector<cplx>(8)));
    for (auto &r : g)
        for (auto &row : r)
            for (auto &v : row)
                v = {s.normal(), s.normal()};
    const auto c = tsf_cf(g, g, 1, 2, {{0, 0}, {2, 3}}, 1e-3, 1e6);
    REQUIRE(std::abs(c.value[0] - cplx{1.0, 0.0}) < 1e-14);
    REQUIRE(std::abs(c.value[1]) < 0.5);
    REQUIRE_THROWS_AS(tsf_cf(g, g, 4, 2, {{2, 0}}, 1e-3, 1e6), std::out_of_range);
}

TEST_CASE("delay spread", "[stats]")
{
    // Two equal taps separated by delta: spread delta / 2.
    const std::vector<double> p{1.0, 1.0}, d{100e-9, 300e-9};
    REQUIRE(*delay_spread(p, d) == Catch::Approx(100e-9).epsilon(1e-12));
    const std::vector<double> one{2.0}, one_d{5e-7};
    REQUIRE(*delay_spread(one, one_d) == 0.0);
    const std::vector<double> zero{0.0, 0.0};
    REQUIRE_FALSE(delay_spread(zero, d).has_value());

    Stream s(4);
    std::vector<double> pw(50), dl(50), scaled(50);
    for (std::size_t k = 0; k < 50; ++k)
    {
        pw[k] = s.uniform(0.0, 1.0);
        dl[k] = s.uniform(1e-7, 1e-6);
        scaled[k] = 1e3 * pw[k];
    }
    REQUIRE(*delay_spread(scaled, dl) == Catch::Approx(*delay_spread(pw, dl)).epsilon(1e-12));
    // A common delay shift leaves the spread unchanged.
    std::vector<double> shifted = dl;
    for (auto &v : shifted)
        v += 3e-6;
    REQUIRE(*delay_spread(pw, shifted) == Catch::Approx(*delay_spread(pw, dl)).epsilon(1e-6));
}

TEST_CASE("time stationarity interval", "[stats]")
{
    const double dt = 1e-3;
    const auto flat = make_trace(std::vector<double>(100, 5e-8), dt);
    const auto c = tsi(flat, 10);
    REQUIRE(c.censored);
    REQUIRE(c.tsi == Catch::Approx(89 * dt));

    std::vector<double> jump(100, 5e-8);
    for (std::size_t k = 11; k < 100; ++k)
        jump[k] = 6e-8;
    const auto j = tsi(make_trace(jump, dt), 10);
    REQUIRE_FALSE(j.censored);
    REQUIRE(j.tsi == Catch::Approx(dt));
    // 20% is inside a 25% threshold.
    REQUIRE(tsi(make_trace(jump, dt), 10, 0.25).censored);

    auto gap = flat;
    gap.defined[40] = 0;
    REQUIRE(tsi(gap, 10).tsi == Catch::Approx(30 * dt));
    REQUIRE_FALSE(tsi(gap, 40).defined);
    REQUIRE_THROWS_AS(tsi(flat, 100), std::out_of_range);
}

TEST_CASE("TSI does not grow under truncation", "[stats]")
{
    Stream s(6);
    std::vector<double> a2(400);
    double v = 5e-8;
    for (auto &x : a2)
    {
        v *= std::exp(0.02 * s.normal());
        x = v;
    }
    const auto full = make_trace(a2, 1e-3);
    for (std::size_t anchor = 0; anchor < 300; anchor += 7)
    {
        const double t_full = tsi(full, anchor).tsi;
        for (std::size_t cut = anchor + 2; cut <= 400; cut += 37)
        {
            auto part = full;
            part.time.resize(cut);
            part.a2.resize(cut);
            part.defined.resize(cut);
            REQUIRE(tsi(part, anchor).tsi <= t_full + 1e-15);
        }
    }
}

TEST_CASE("DPSD of a constant doppler", "[stats]")
{
    const double f_d = 250.0, dt = 1e-4;
    const auto c = tacf(doppler_traces(f_d, dt, 300, 20, 7), 0, 128, dt);
    const auto d = dpsd(c, 4);
    const std::size_t peak = std::max_element(d.power.begin(), d.power.end()) - d.power.begin();
    const double bin = d.freq[1] - d.freq[0];
    REQUIRE(std::abs(d.freq[peak] - f_d) <= bin);

    double sum = 0.0;
    for (double p : d.power)
        sum += p;
    REQUIRE(sum == Catch::Approx(c.value[0].real()).epsilon(1e-12));
    REQUIRE_FALSE(spectral_flatness(d, 1000.0) > 0.5);
}

TEST_CASE("DPSD of a real even TACF is symmetric", "[stats]")
{
    CorrelationCurve c;
    for (std::size_t k = 0; k <= 64; ++k)
    {
        c.lag.push_back(static_cast<double>(k) * 1e-4);
        c.value.push_back({std::exp(-static_cast<double>(k) / 20.0), 0.0});
    }
    const auto d = dpsd(c, 4);
    const std::size_t n = d.power.size();
    REQUIRE(n % 2 == 1);
    for (std::size_t m = 0; m < n; ++m)
    {
        REQUIRE(d.freq[m] == Catch::Approx(-d.freq[n - 1 - m]).margin(1e-9));
        REQUIRE(d.power[m] == Catch::Approx(d.power[n - 1 - m]).margin(1e-12));
    }
    REQUIRE(d.freq[n / 2] == 0.0);

    auto bad = c;
    bad.lag[10] += 1e-5;
    REQUIRE_THROWS_AS(dpsd(bad), std::invalid_argument);
}

TEST_CASE("spectral flatness bounds", "[stats]")
{
    DpsdArray white;
    for (int m = -50; m <= 50; ++m)
    {
        white.freq.push_back(m * 10.0);
        white.power.push_back(1.0);
    }
    REQUIRE(spectral_flatness(white, 1e9) == Catch::Approx(1.0).epsilon(1e-12));
    auto spike = white;
    for (auto &p : spike.power)
        p = 1e-6;
    spike.power[50] = 1.0;
    REQUIRE(spectral_flatness(spike, 1e9) < 0.01);
    REQUIRE(spectral_flatness(white, 1e9) <= 1.0 + 1e-12);
}
