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

#include <cmath>
#include <numbers>
#include <set>

namespace uvchan::cir
{

std::string_view to_string(TapKind k)
{
    switch (k)
    {
    case TapKind::LoS:
        return "los";
    case TapKind::GroundReflection:
        return "gr";
    case TapKind::NLoS:
        return "nlos";
    }
    return "?";
}

std::complex<double> fresnel(double psi, const GroundModel &g)
{
    const double s = std::sin(psi);
    const double c = std::cos(psi);
    const std::complex<double> root = std::sqrt(std::complex<double>(g.permittivity - c * c, 0.0));
    if (g.polarization == Polarization::Vertical)
        return (g.permittivity * s - root) / (g.permittivity * s + root);
    return (s - root) / (s + root);
}

namespace
{

constexpr double two_pi = 2.0 * std::numbers::pi;

} // namespace

RayTap los_tap(const Vec3 &tx, const Vec3 &vtx, const Vec3 &rx, const Vec3 &vrx, double lambda, double phi0)
{
    const Vec3 d = tx - rx;
    const double len = norm(d);
    if (!(len > 0.0))
        throw geometry::DegenerateGeometry("los_tap: coincident endpoints");
    RayTap t;
    t.kind = TapKind::LoS;
    t.delay = len / speed_of_light;
    t.power = 1.0;
    t.doppler = dot(d, vrx - vtx) / (lambda * len);
    t.carrier_phase = phi0;
    t.phase = phi0 + two_pi * len / lambda;
    return t;
}

RayTap gr_tap(const Vec3 &tx, const Vec3 &vtx, const Vec3 &rx, const Vec3 &vrx, double lambda, double phi0,
              const GroundModel &g)
{
    if (!(tx.z > 0.0) || !(rx.z > 0.0))
        throw geometry::DegenerateGeometry("gr_tap: endpoint on or below the ground plane");
    const Vec3 img{tx.x, tx.y, -tx.z};
    const Vec3 vimg{vtx.x, vtx.y, -vtx.z};
    const Vec3 d = img - rx;
    const double len = norm(d);
    const double psi = std::asin(std::min(1.0, (tx.z + rx.z) / len));
    const auto gamma = fresnel(psi, g);
    RayTap t;
    t.kind = TapKind::GroundReflection;
    t.delay = len / speed_of_light;
    t.power = std::norm(gamma);
    t.doppler = dot(d, vrx - vimg) / (lambda * len);
    t.carrier_phase = phi0 + std::arg(gamma);
    t.phase = t.carrier_phase + two_pi * len / lambda;
    return t;
}

double nlos_power(double delay, const params::PowerDelayParams &pd, double shadow_db)
{
    return std::exp(-pd.xi * delay - pd.eta) * std::pow(10.0, -shadow_db / 10.0);
}

RayTap nlos_tap(const NlosGeometry &g, double virtual_delay, const params::PowerDelayParams &pd, double shadow_db,
                double phi0, double lambda, bool scatterer_doppler)
{
    // The virtual link spans the A-to-Z hop plus the random excess, so no ray precedes the LoS.
    const Vec3 a = g.sa - g.tx;
    const Vec3 b = g.sz - g.sa;
    const Vec3 c = g.rx - g.sz;
    const double d1 = norm(a), d2 = norm(b), d3 = norm(c);
    if (!(d1 > 0.0) || !(d3 > 0.0))
        throw geometry::DegenerateGeometry("nlos_tap: scatterer coincides with an endpoint");
    const Vec3 u1 = a / d1, u3 = c / d3;

    // Rate of change of the geometric path; closing geometry gives positive doppler.
    double rate;
    if (scatterer_doppler)
    {
        rate = dot(u1, g.va - g.vtx) + dot(u3, g.vrx - g.vz);
        if (d2 > 0.0)
            rate += dot(b / d2, g.vz - g.va);
    }
    else
        rate = -dot(u1, g.vtx) + dot(u3, g.vrx);

    const double path = d1 + d2 + d3;
    RayTap t;
    t.kind = TapKind::NLoS;
    t.delay = path / speed_of_light + virtual_delay;
    t.power = nlos_power(t.delay, pd, shadow_db);
    t.doppler = -rate / lambda;
    t.carrier_phase = phi0;
    t.phase = phi0 + two_pi * (path + speed_of_light * virtual_delay) / lambda;
    return t;
}

LinkCir assemble_link_cir(std::vector<RayTap> taps, double omega_linear, double eta_gr, bool in_window)
{
    if (!(eta_gr >= 0.0 && eta_gr <= 1.0))
        throw AssemblyError("assemble_link_cir: eta_gr must be in [0, 1]");
    if (!(omega_linear >= 0.0))
        throw AssemblyError("assemble_link_cir: Ricean factor must be >= 0");
    std::size_t n_los = 0, n_gr = 0;
    double nlos_sum = 0.0;
    for (const auto &t : taps)
    {
        if (t.kind == TapKind::LoS)
            ++n_los;
        else if (t.kind == TapKind::GroundReflection)
            ++n_gr;
        else
            nlos_sum += t.power;
        if (!(t.power >= 0.0))
            throw AssemblyError("assemble_link_cir: negative tap power");
    }
    if (n_los != 1 || taps.front().kind != TapKind::LoS)
        throw AssemblyError("assemble_link_cir: exactly one LoS tap required, first");
    if (n_gr > 1)
        throw AssemblyError("assemble_link_cir: at most one ground-reflection tap");

    LinkCir l;
    l.omega = omega_linear;
    l.eta_gr = eta_gr;
    l.eta_nlos = 1.0 - eta_gr;
    l.in_window = in_window;

    const double w_los = omega_linear / (omega_linear + 1.0);
    const double w_gr = n_gr ? eta_gr / (omega_linear + 1.0) : 0.0;
    const double w_nlos = nlos_sum > 0.0 ? l.eta_nlos / (omega_linear + 1.0) : 0.0;
    const double total = w_los + w_gr + w_nlos;

    for (auto &t : taps)
    {
        double w = 0.0;
        if (total > 0.0)
        {
            if (t.kind == TapKind::LoS)
                w = w_los / total;
            else if (t.kind == TapKind::GroundReflection)
                w = w_gr / total;
            else if (nlos_sum > 0.0)
                w = (w_nlos / total) * (t.power / nlos_sum);
        }
        else if (t.kind == TapKind::LoS)
            w = 1.0;
        t.amplitude = in_window ? std::sqrt(w) : 0.0;
    }
    l.taps = std::move(taps);
    return l;
}

std::vector<double> frequency_grid(double fc, double bandwidth, std::size_t n)
{
    if (n == 0)
        throw std::invalid_argument("frequency_grid: empty grid");
    if (n == 1)
        return {fc};
    std::vector<double> f(n);
    const double step = bandwidth / static_cast<double>(n - 1);
    for (std::size_t k = 0; k < n; ++k)
        f[k] = fc - 0.5 * bandwidth + step * static_cast<double>(k);
    return f;
}

namespace
{

std::complex<double> tf_point(const LinkCir &l, double f, double chi, double fc)
{
    constexpr long double tau_l = 2.0L * std::numbers::pi_v<long double>;
    const double scale = std::pow(f / fc, chi);
    long double re = 0.0L, im = 0.0L;
    for (const auto &t : l.taps)
    {
        if (t.amplitude == 0.0)
            continue;
        const long double arg = static_cast<long double>(t.phase) + static_cast<long double>(t.accumulated_phase) -
                                tau_l * static_cast<long double>(f) * static_cast<long double>(t.delay);
        long double a = t.amplitude;
        if (t.kind != TapKind::LoS)
            a *= scale;
        re += a * std::cos(arg);
        im += a * std::sin(arg);
    }
    return {static_cast<double>(re), static_cast<double>(im)};
}

TransferFunction tf_header(const LinkCir &l, const std::vector<double> &freq)
{
    if (freq.empty())
        throw std::invalid_argument("transfer_function: empty frequency grid");
    TransferFunction tf;
    tf.i = l.i;
    tf.j = l.j;
    tf.time = l.time;
    tf.freq = freq;
    tf.h.resize(freq.size());
    return tf;
}

} // namespace

TransferFunction transfer_function(const LinkCir &l, const std::vector<double> &freq, double chi, double fc)
{
    auto tf = tf_header(l, freq);
    for (std::size_t k = 0; k < freq.size(); ++k)
        tf.h[k] = tf_point(l, freq[k], chi, fc);
    return tf;
}

TransferFunction transfer_function_omp(const LinkCir &l, const std::vector<double> &freq, double chi, double fc)
{
    auto tf = tf_header(l, freq);
    const auto n = static_cast<std::ptrdiff_t>(freq.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t k = 0; k < n; ++k)
        tf.h[static_cast<std::size_t>(k)] = tf_point(l, freq[static_cast<std::size_t>(k)], chi, fc);
    return tf;
}

std::complex<double> carrier_response(const LinkCir &l, ComponentMask mask)
{
    double re = 0.0, im = 0.0;
    for (const auto &t : l.taps)
    {
        const bool on = (t.kind == TapKind::LoS && mask.los) || (t.kind == TapKind::GroundReflection && mask.gr) ||
                        (t.kind == TapKind::NLoS && mask.nlos);
        if (!on || t.amplitude == 0.0)
            continue;
        const double arg = t.carrier_phase + t.accumulated_phase;
        re += t.amplitude * std::cos(arg);
        im += t.amplitude * std::sin(arg);
    }
    return {re, im};
}

CirMatrix assemble_matrix(const std::vector<LinkCir> &links, std::size_t n_uav, std::size_t n_vehicle, double time)
{
    CirMatrix m;
    m.time = time;
    m.grid.assign(n_vehicle, std::vector<LinkCir>(n_uav));
    std::vector<std::vector<bool>> seen(n_vehicle, std::vector<bool>(n_uav, false));
    for (const auto &l : links)
    {
        if (l.j >= n_vehicle || l.i >= n_uav)
            throw AssemblyError("assemble_matrix: link (j=" + std::to_string(l.j) + ", i=" + std::to_string(l.i) +
                                ") outside the grid");
        if (seen[l.j][l.i])
            throw AssemblyError("assemble_matrix: duplicate link (j=" + std::to_string(l.j) +
                                ", i=" + std::to_string(l.i) + ")");
        seen[l.j][l.i] = true;
        m.grid[l.j][l.i] = l;
    }
    for (std::size_t j = 0; j < n_vehicle; ++j)
        for (std::size_t i = 0; i < n_uav; ++i)
            if (!seen[j][i])
                throw AssemblyError("assemble_matrix: missing link (j=" + std::to_string(j) + ", i=" + std::to_string(i) +
                                    ")");
    return m;
}

double total_power(const LinkCir &l)
{
    double p = 0.0;
    for (const auto &t : l.taps)
        p += t.amplitude * t.amplitude;
    return p;
}

} // namespace uvchan::cir
