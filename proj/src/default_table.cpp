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

#include "uvchan/params.hpp"

namespace uvchan::params
{

namespace
{

using C = Condition;
using S = ScattererClass;
using F = Family;

ParameterTable build()
{
    ParameterTable t;
    auto L = [&](S s, C c, F f, double mu, double g) { t.set({s, c, f}, LogisticParams{mu, g}); };
    auto G = [&](S s, C c, F f, double mu, double sd) { t.set({s, c, f}, GaussianParams{mu, sd}); };
    auto P = [&](S s, C c, double xi, double eta, double se) { t.set({s, c, F::PowerDelay}, PowerDelayParams{xi, eta, se}); };

    // Cluster number ratio (1/m)
    L(S::Static, C::High, F::ClusterNumber, 0.1511, 0.0520);
    L(S::Static, C::Medium, F::ClusterNumber, 0.0915, 0.0455);
    L(S::Static, C::Low, F::ClusterNumber, 0.0620, 0.0821);
    L(S::TerrestrialDynamic, C::High, F::ClusterNumber, 0.1126, 0.1015);
    L(S::TerrestrialDynamic, C::Medium, F::ClusterNumber, 0.1138, 0.0851);
    L(S::TerrestrialDynamic, C::Low, F::ClusterNumber, 0.0842, 0.0289);
    L(S::AerialDynamic, C::High, F::ClusterNumber, 0.2356, 0.0321);
    L(S::AerialDynamic, C::Medium, F::ClusterNumber, 0.1825, 0.0528);

    // Scatterer number ratio (1/m)
    L(S::Static, C::High, F::ScattererNumber, 0.7534, 0.5236);
    L(S::Static, C::Medium, F::ScattererNumber, 0.6024, 0.4726);
    L(S::Static, C::Low, F::ScattererNumber, 0.3425, 0.3855);
    L(S::TerrestrialDynamic, C::High, F::ScattererNumber, 0.4461, 0.3921);
    L(S::TerrestrialDynamic, C::Medium, F::ScattererNumber, 0.3928, 0.2511);
    L(S::TerrestrialDynamic, C::Low, F::ScattererNumber, 0.3213, 0.1863);
    L(S::AerialDynamic, C::High, F::ScattererNumber, 0.4232, 0.4261);
    L(S::AerialDynamic, C::Medium, F::ScattererNumber, 0.3821, 0.3925);

    // Excess-distance ratio
    t.set({S::Static, C::High, F::Distance}, GammaParams{0.8223, 1.9232});
    t.set({S::Static, C::Medium, F::Distance}, GammaParams{0.6982, 2.0263});
    t.set({S::Static, C::Low, F::Distance}, GammaParams{0.6241, 2.4581});
    t.set({S::TerrestrialDynamic, C::High, F::Distance}, RayleighParams{0.3541});
    t.set({S::TerrestrialDynamic, C::Medium, F::Distance}, RayleighParams{0.3026});
    t.set({S::TerrestrialDynamic, C::Low, F::Distance}, RayleighParams{0.2025});
    t.set({S::AerialDynamic, C::High, F::Distance}, RayleighParams{0.3356});
    t.set({S::AerialDynamic, C::Medium, F::Distance}, RayleighParams{0.2287});

    // Angle ratios (rad/m)
    G(S::Static, C::High, F::Aaod, 0.8254, 0.9254);
    G(S::Static, C::Medium, F::Aaod, 0.7612, 0.8723);
    G(S::Static, C::Low, F::Aaod, 0.7025, 0.7566);
    G(S::TerrestrialDynamic, C::High, F::Aaod, 0.9213, 1.9253);
    G(S::TerrestrialDynamic, C::Medium, F::Aaod, 0.8190, 1.7622);
    G(S::TerrestrialDynamic, C::Low, F::Aaod, 0.7623, 1.2101);
    G(S::AerialDynamic, C::High, F::Aaod, 0.3241, 1.0125);
    G(S::AerialDynamic, C::Medium, F::Aaod, 0.2015, 0.9215);

    G(S::Static, C::High, F::Aaoa, 0.4521, 0.4834);
    G(S::Static, C::Medium, F::Aaoa, 0.4025, 0.4512);
    G(S::Static, C::Low, F::Aaoa, 0.3816, 0.3266);
    G(S::TerrestrialDynamic, C::High, F::Aaoa, -0.3215, 0.5124);
    G(S::TerrestrialDynamic, C::Medium, F::Aaoa, -0.4156, 0.4266);
    G(S::TerrestrialDynamic, C::Low, F::Aaoa, -0.2511, 0.1756);
    G(S::AerialDynamic, C::High, F::Aaoa, 0.5416, 0.6524);
    G(S::AerialDynamic, C::Medium, F::Aaoa, 0.4211, 0.5815);

    G(S::Static, C::High, F::Eaod, 0.7514, 0.8512);
    G(S::Static, C::Medium, F::Eaod, 0.7142, 0.6215);
    G(S::Static, C::Low, F::Eaod, 0.7836, 0.4315);
    G(S::TerrestrialDynamic, C::High, F::Eaod, 0.1545, 0.7851);
    G(S::TerrestrialDynamic, C::Medium, F::Eaod, 0.1951, 0.7011);
    G(S::TerrestrialDynamic, C::Low, F::Eaod, 0.1766, 0.6789);
    G(S::AerialDynamic, C::High, F::Eaod, 0.9511, 1.8251);
    G(S::AerialDynamic, C::Medium, F::Eaod, 0.9151, 1.6435);

    G(S::Static, C::High, F::Eaoa, 0.8516, 0.7612);
    G(S::Static, C::Medium, F::Eaoa, 0.8781, 0.6921);
    G(S::Static, C::Low, F::Eaoa, 0.8423, 0.5516);
    G(S::TerrestrialDynamic, C::High, F::Eaoa, 0.2511, 0.9218);
    G(S::TerrestrialDynamic, C::Medium, F::Eaoa, 0.1921, 0.9055);
    G(S::TerrestrialDynamic, C::Low, F::Eaoa, 0.2249, 0.8127);
    G(S::AerialDynamic, C::High, F::Eaoa, 0.8915, 1.9627);
    G(S::AerialDynamic, C::Medium, F::Eaoa, 0.7812, 1.8541);

    // Power-delay law: xi (1/s), eta, sigma_E (dB)
    P(S::Static, C::High, 2.6881e6, 31.9204, 19.9350);
    P(S::Static, C::Medium, 4.8043e6, 30.4251, 22.3581);
    P(S::Static, C::Low, 2.2978e6, 30.0112, 16.1603);
    P(S::TerrestrialDynamic, C::High, 2.1931e6, 31.3934, 11.6472);
    P(S::TerrestrialDynamic, C::Medium, 3.6554e6, 30.5136, 13.6758);
    P(S::TerrestrialDynamic, C::Low, 1.2030e6, 31.4610, 0.2222);
    P(S::AerialDynamic, C::High, 3.9797e6, 29.2900, 12.0014);
    P(S::AerialDynamic, C::Medium, 5.5346e6, 28.5798, 9.8293);
    return t;
}

} // namespace

const ParameterTable &default_table()
{
    static const ParameterTable t = build();
    return t;
}

} // namespace uvchan::params
