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

#include "uvchan/cir.hpp"
#include "uvchan/rng.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <numbers>

using namespace uvchan;
using namespace uvchan::cir;
using geometry::Vec3;
using std::numbers::pi;

namespace
{

constexpr double fc = 28e9;
constexpr double lambda = speed_of_light / fc;

RayTap tap(TapKind k, double delay, double power, double phase, double acc = 0.0)
{
    RayTap t;
    t.kind = k;
    t.delay = delay;
    t.power = power;
    t.phase = phase;
    t.carrier_phase = std::fmod(phase - 2.0 * pi * fc * delay, 2.0 * pi);
    t.accumulated_phase = acc;
    return t;
}

LinkCir random_link(Stream &s, std::size_t n_nlos, bool with_gr = true)
{
    std::vector<RayTap> taps;
    const double d0 = s.uniform(100e-9, 400e-9);
    taps.push_back(tap(TapKind::LoS, d0, 1.0, s.uniform(0.0, 2.0 * pi), s.uniform(-50.0, 50.0)));
    if (with_gr)
        taps.push_back(tap(TapKind::GroundReflection, d0 + s.uniform(0.0, 20e-9), s.uniform(0.2, 1.0),
                           s.uniform(0.0, 2.0 * pi)));
    for (std::size_t k = 0; k < n_nlos; ++k)
        taps.push_back(tap(TapKind::NLoS, d0 + s.uniform(1e-9, 500e-9), s.uniform(1e-20, 1e-12),
                           s.uniform(-1e5, 1e5), s.uniform(-100.0, 100.0)));
    return assemble_link_cir(std::move(taps), s.uniform(0.0, 10.0), s.uniform(0.0, 1.0), true);
}

} // namespace

// ----- LoS --------------------------------------------------------------------------

TEST_CASE("LoS doppler and delay", "[cir][los]")
{
    const Vec3 tx{0, 0, 50}, rx{100, 0, 50};
    REQUIRE(los_tap(tx, {}, rx, {}, lambda, 0.0).doppler == 0.0);

    // Receiver closing head-on at 10 m/s: v f_c / c.
    const auto t = los_tap(tx, {}, rx, {-10, 0, 0}, lambda, 0.0);
    REQUIRE(t.doppler == Catch::Approx(10.0 * fc / 2.99792458e8).epsilon(1e-12));
    REQUIRE(t.doppler == Catch::Approx(933.98).margin(0.01));
    REQUIRE(los_tap(tx, {}, rx, {10, 0, 0}, lambda, 0.0).doppler < 0.0);

    REQUIRE(los_tap({0, 0, 0}, {}, {299.792458, 0, 0}, {}, lambda, 0.0).delay == Catch::Approx(1e-6).epsilon(1e-15));
    REQUIRE_THROWS_AS(los_tap(tx, {}, tx, {}, lambda, 0.0), geometry::DegenerateGeometry);
}

TEST_CASE("literal phase slope tracks doppler", "[cir][los]")
{
    // Phase derivative along a moving geometry equals -2 pi doppler.
    const Vec3 tx0{-30, 20, 50}, vtx{8, -3, 1}, rx0{0, 0, 1.5}, vrx{12.5, 0, 0};
    const double dt = 1e-5;
    for (double t = 0.0; t < 1.0; t += 0.05)
    {
        const auto a = los_tap(tx0 + vtx * t, vtx, rx0 + vrx * t, vrx, lambda, 0.0);
        const auto b = los_tap(tx0 + vtx * (t + dt), vtx, rx0 + vrx * (t + dt), vrx, lambda, 0.0);
        const auto m = los_tap(tx0 + vtx * (t + dt / 2), vtx, rx0 + vrx * (t + dt / 2), vrx, lambda, 0.0);
        const double slope = -(b.phase - a.phase) / (2.0 * pi * dt);
        REQUIRE(slope == Catch::Approx(m.doppler).epsilon(0.01));
    }
}

// ----- Ground reflection ------------------------------------------------------------

TEST_CASE("ground reflection geometry", "[cir][gr]")
{
    const GroundModel g{};
    const auto t = gr_tap({0, 0, 50}, {}, {100, 0, 2}, {}, lambda, 0.0, g);
    const double oracle = std::sqrt(100.0 * 100.0 + 52.0 * 52.0);
    REQUIRE(t.delay * speed_of_light == Catch::Approx(oracle).epsilon(1e-14));
    REQUIRE(t.delay * speed_of_light == Catch::Approx(112.7120).margin(1e-4));
    REQUIRE(t.delay >= los_tap({0, 0, 50}, {}, {100, 0, 2}, {}, lambda, 0.0).delay);

    Stream s(5);
    for (int k = 0; k < 1000; ++k)
    {
        const Vec3 tx{s.uniform(-200, 200), s.uniform(-200, 200), s.uniform(1, 120)};
        const Vec3 rx{s.uniform(-200, 200), s.uniform(-200, 200), s.uniform(0.5, 3)};
        REQUIRE(gr_tap(tx, {}, rx, {}, lambda, 0.0, g).delay >= los_tap(tx, {}, rx, {}, lambda, 0.0).delay);
    }
    REQUIRE_THROWS_AS(gr_tap({0, 0, 0}, {}, {100, 0, 2}, {}, lambda, 0.0, g), geometry::DegenerateGeometry);
}

TEST_CASE("Fresnel coefficient at grazing incidence", "[cir][gr]")
{
    for (auto pol : {Polarization::Vertical, Polarization::Horizontal})
    {
        const auto gam = fresnel(1e-9, {5.0, pol});
        REQUIRE(gam.real() == Catch::Approx(-1.0).margin(1e-6));
        REQUIRE(std::norm(gam) == Catch::Approx(1.0).margin(1e-6));
        REQUIRE(std::abs(std::arg(gam)) == Catch::Approx(pi).margin(1e-6));
        // Passive surface.
        for (double psi = 0.01; psi < pi / 2; psi += 0.05)
            REQUIRE(std::abs(fresnel(psi, {5.0, pol})) <= 1.0 + 1e-12);
    }
    // Normal incidence: both polarisations have the same magnitude.
    REQUIRE(std::abs(fresnel(pi / 2, {5.0, Polarization::Vertical})) ==
            Catch::Approx(std::abs(fresnel(pi / 2, {5.0, Polarization::Horizontal}))).epsilon(1e-12));
}

// ----- NLoS -------------------------------------------------------------------------

TEST_CASE("NLoS power law", "[cir][nlos]")
{
    const params::PowerDelayParams pd{2.6881e6, 31.9204, 19.9350};
    REQUIRE(-std::log(nlos_power(400e-9, pd, 0.0)) == Catch::Approx(2.6881e6 * 4e-7 + 31.9204).epsilon(1e-13));
    REQUIRE(-std::log(nlos_power(400e-9, pd, 0.0)) == Catch::Approx(32.99563).margin(1e-5));
    REQUIRE(nlos_power(400e-9, pd, 10.0) == Catch::Approx(nlos_power(400e-9, pd, 0.0) / 10.0).epsilon(1e-13));
}

TEST_CASE("NLoS delay and doppler", "[cir][nlos]")
{
    const params::PowerDelayParams pd{2.6881e6, 31.9204, 0.0};
    const Vec3 tx{0, 0, 50}, rx{100, 0, 1.5}, s{40, 30, 5};
    // Single-bounce reduction.
    const auto single = nlos_tap({tx, {}, rx, {}, s, {}, s, {}}, 0.0, pd, 0.0, 0.0, lambda, true);
    REQUIRE(single.delay * speed_of_light == Catch::Approx(norm(s - tx) + norm(rx - s)).epsilon(1e-14));
    // All static.
    const Vec3 z{70, -20, 2};
    REQUIRE(nlos_tap({tx, {}, rx, {}, s, {}, z, {}}, 50e-9, pd, 0.0, 0.0, lambda, true).doppler == 0.0);
    const auto twin = nlos_tap({tx, {}, rx, {}, s, {}, z, {}}, 50e-9, pd, 0.0, 0.0, lambda, true);
    REQUIRE(twin.delay ==
            Catch::Approx((norm(s - tx) + norm(z - s) + norm(rx - z)) / speed_of_light + 50e-9).epsilon(1e-14));

    // Each leg contributes the projection of its endpoint velocities.
    const Vec3 vtx{5, 0, 0}, vrx{0, 10, 0}, va{0, 0, 1}, vz{3, 0, 0};
    const Vec3 u1 = (s - tx) / norm(s - tx), u2 = (z - s) / norm(z - s), u3 = (rx - z) / norm(rx - z);
    const double rate = dot(u1, va - vtx) + dot(u2, vz - va) + dot(u3, vrx - vz);
    const auto moving = nlos_tap({tx, vtx, rx, vrx, s, va, z, vz}, 50e-9, pd, 0.0, 0.0, lambda, true);
    REQUIRE(moving.doppler == Catch::Approx(-rate / lambda).epsilon(1e-12));
    const auto endpoints_only = nlos_tap({tx, vtx, rx, vrx, s, va, z, vz}, 50e-9, pd, 0.0, 0.0, lambda, false);
    REQUIRE(endpoints_only.doppler == Catch::Approx((dot(u1, vtx) - dot(u3, vrx)) / lambda).epsilon(1e-12));
    REQUIRE_THROWS_AS(nlos_tap({tx, {}, rx, {}, tx, {}, z, {}}, 0.0, pd, 0.0, 0.0, lambda, true),
                      geometry::DegenerateGeometry);
}

// ----- Assembly ---------------------------------------------------------------------

TEST_CASE("tap powers are normalised", "[cir][assembly]")
{
    Stream s(12);
    for (int k = 0; k < 2000; ++k)
    {
        const auto l = random_link(s, s.index(40), s.uniform() < 0.7);
        REQUIRE(total_power(l) == Catch::Approx(1.0).margin(1e-9));
    }
}

TEST_CASE("Ricean limits", "[cir][assembly]")
{
    std::vector<RayTap> taps{tap(TapKind::LoS, 1e-7, 1.0, 0.0), tap(TapKind::GroundReflection, 1.1e-7, 0.5, 0.0),
                             tap(TapKind::NLoS, 2e-7, 3e-15, 0.0), tap(TapKind::NLoS, 3e-7, 1e-15, 0.0)};
    const auto pure = assemble_link_cir(taps, 1e15, 0.3, true);
    REQUIRE(pure.taps[0].amplitude * pure.taps[0].amplitude == Catch::Approx(1.0).margin(1e-12));
    REQUIRE(pure.taps[2].amplitude < 1e-6);

    const auto diffuse = assemble_link_cir(taps, 0.0, 0.0, true);
    REQUIRE(diffuse.taps[0].amplitude == 0.0);
    REQUIRE(diffuse.taps[1].amplitude == 0.0);
    REQUIRE(diffuse.taps[2].amplitude * diffuse.taps[2].amplitude == Catch::Approx(0.75).epsilon(1e-12));
    REQUIRE(diffuse.taps[3].amplitude * diffuse.taps[3].amplitude == Catch::Approx(0.25).epsilon(1e-12));

    // Only LoS present takes all power.
    const auto alone = assemble_link_cir({tap(TapKind::LoS, 1e-7, 1.0, 0.0)}, 0.0, 0.3, true);
    REQUIRE(alone.taps[0].amplitude == 1.0);

    const auto off = assemble_link_cir(taps, 3.0, 0.3, false);
    REQUIRE(total_power(off) == 0.0);

    REQUIRE_THROWS_AS(assemble_link_cir(taps, 3.0, 1.5, true), AssemblyError);
    REQUIRE_THROWS_AS(assemble_link_cir({tap(TapKind::NLoS, 1e-7, 1.0, 0.0)}, 3.0, 0.3, true), AssemblyError);
}

TEST_CASE("no NLoS ray precedes the LoS", "[cir][assembly]")
{
    Stream s(3);
    const params::PowerDelayParams pd{2.6881e6, 31.9204, 0.0};
    for (int k = 0; k < 500; ++k)
    {
        const Vec3 tx{s.uniform(-100, 100), s.uniform(-100, 100), s.uniform(20, 100)};
        const Vec3 rx{s.uniform(-100, 100), s.uniform(-100, 100), 1.5};
        const Vec3 a{s.uniform(-150, 150), s.uniform(-150, 150), s.uniform(0, 60)};
        const Vec3 z{s.uniform(-150, 150), s.uniform(-150, 150), s.uniform(0, 4)};
        const double los = los_tap(tx, {}, rx, {}, lambda, 0.0).delay;
        const double v = s.uniform(0.0, 200e-9);
        REQUIRE(nlos_tap({tx, {}, rx, {}, a, {}, z, {}}, v, pd, 0.0, 0.0, lambda, true).delay >= los);
    }
}

// ----- Transfer function ------------------------------------------------------------

TEST_CASE("transfer function matches a direct sum when chi is zero", "[cir][tf]")
{
    Stream s(99);
    const auto freq = frequency_grid(fc, 2e9, 201);
    for (int k = 0; k < 20; ++k)
    {
        const auto l = random_link(s, 30);
        const auto tf = transfer_function(l, freq, 0.0, fc);
        for (std::size_t n = 0; n < freq.size(); ++n)
        {
            std::complex<long double> ref{0.0L, 0.0L};
            for (const auto &t : l.taps)
            {
                const long double ph = static_cast<long double>(t.phase) + t.accumulated_phase;
                const long double w = -2.0L * std::numbers::pi_v<long double> * freq[n] * t.delay;
                ref += static_cast<long double>(t.amplitude) * std::polar(1.0L, ph) * std::polar(1.0L, w);
            }
            REQUIRE(std::abs(std::complex<double>(tf.h[n]) - std::complex<double>(ref)) < 1e-12);
        }
    }
}

TEST_CASE("frequency scaling and single-tap modulus", "[cir][tf]")
{
    const auto freq = frequency_grid(fc, 2e9, 101);
    REQUIRE(freq.front() == fc - 1e9);
    REQUIRE(freq.back() == fc + 1e9);
    REQUIRE(freq[50] == fc);

    const auto single = assemble_link_cir({tap(TapKind::LoS, 3.3e-7, 1.0, 1.2)}, 5.0, 0.3, true);
    for (const auto &h : transfer_function(single, freq, 0.0, fc).h)
        REQUIRE(std::abs(h) == Catch::Approx(1.0).epsilon(1e-12));

    Stream s(4);
    const auto l = random_link(s, 10);
    const std::vector<double> at_fc{fc};
    REQUIRE(transfer_function(l, at_fc, 1.35, fc).h[0] == transfer_function(l, at_fc, 0.0, fc).h[0]);
    // At the carrier the response reduces to the carrier-phase sum.
    REQUIRE(std::abs(transfer_function(l, at_fc, 1.35, fc).h[0] - carrier_response(l)) < 1e-6);
}

TEST_CASE("IDFT recovers tap delays within one bin", "[cir][tf]")
{
    const std::size_t n = 512;
    const double bw = 2e9;
    const auto freq = frequency_grid(fc, bw, n);
    const double df = freq[1] - freq[0];
    for (double tau : {37.3e-9, 120.0e-9, 201.7e-9})
    {
        const auto l = assemble_link_cir({tap(TapKind::LoS, tau, 1.0, 0.4)}, 5.0, 0.3, true);
        const auto tf = transfer_function(l, freq, 1.35, fc);
        std::size_t best = 0;
        double peak = -1.0;
        for (std::size_t m = 0; m < n; ++m)
        {
            std::complex<double> acc{};
            for (std::size_t k = 0; k < n; ++k)
                acc += tf.h[k] * std::polar(1.0, 2.0 * pi * static_cast<double>(k * m) / static_cast<double>(n));
            if (std::abs(acc) > peak)
            {
                peak = std::abs(acc);
                best = m;
            }
        }
        const double expected = tau * df * static_cast<double>(n);
        REQUIRE(std::abs(static_cast<double>(best) - expected) <= 1.0);
    }
}

TEST_CASE("OpenMP transfer function equals the serial reference", "[cir][tf]")
{
    Stream s(8);
    const auto freq = frequency_grid(fc, 2e9, 1001);
    const auto l = random_link(s, 64);
    const auto a = transfer_function(l, freq, 1.35, fc);
    const auto b = transfer_function_omp(l, freq, 1.35, fc);
    REQUIRE(a.h == b.h);
}

// ----- Matrix -----------------------------------------------------------------------

TEST_CASE("CIR matrix layout", "[cir][matrix]")
{
    Stream s(1);
    std::vector<LinkCir> links;
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 3; ++j)
        {
            auto l = random_link(s, 3);
            l.i = i;
            l.j = j;
            links.push_back(l);
        }
    const auto m = assemble_matrix(links, 2, 3, 0.5);
    REQUIRE(m.vehicles() == 3);
    REQUIRE(m.uavs() == 2);
    for (const auto &l : links)
    {
        REQUIRE(m.at(l.j, l.i).i == l.i);
        REQUIRE(m.at(l.j, l.i).j == l.j);
        REQUIRE(m.at(l.j, l.i).taps[0].phase == l.taps[0].phase);
    }
    links.erase(links.begin() + 4); // (i=1, j=1)
    REQUIRE_THROWS_WITH(assemble_matrix(links, 2, 3, 0.5), Catch::Matchers::ContainsSubstring("j=1, i=1"));
}

TEST_CASE("component mask splits the carrier response", "[cir][matrix]")
{
    Stream s(2);
    const auto l = random_link(s, 12);
    const auto all = carrier_response(l);
    const auto sum = carrier_response(l, {true, false, false}) + carrier_response(l, {false, true, false}) +
                     carrier_response(l, {false, false, true});
    REQUIRE(std::abs(all - sum) < 1e-14);
}
