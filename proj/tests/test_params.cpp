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

#include "test_support.hpp"
#include "uvchan/params.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

using namespace uvchan;
using namespace uvchan::params;
using uvchan::testing::ks_distance;
using uvchan::testing::simpson;

// ----- CDFs ------------------------------------------------------------------------

TEST_CASE("logistic cdf", "[params][cdf]")
{
    const LogisticParams p{0.7534, 0.5236};
    REQUIRE(logistic_cdf(p.mu, p) == Catch::Approx(0.5).epsilon(1e-15));
    REQUIRE(logistic_cdf(p.mu + p.gamma * std::log(3.0), p) == Catch::Approx(0.75).epsilon(1e-12));
    // Oracle: integral of the logistic density.
    const auto pdf = [&](double x) {
        const double e = std::exp(-(x - p.mu) / p.gamma);
        return e / (p.gamma * (1.0 + e) * (1.0 + e));
    };
    REQUIRE(logistic_cdf(1.3, p) == Catch::Approx(simpson(pdf, -40.0, 1.3, 20000)).epsilon(1e-9));
}

TEST_CASE("gamma cdf", "[params][cdf]")
{
    REQUIRE(gamma_cdf(0.0, {0.8223, 1.9232}) == 0.0);
    REQUIRE(gamma_cdf(0.5, {1.0, 2.0}) == Catch::Approx(1.0 - std::exp(-1.0)).epsilon(1e-12));
    REQUIRE(gamma_cdf(0.5, {1.0, 2.0}) == Catch::Approx(0.6321).margin(5e-5));
    // Oracle for a non-exponential shape: integrate the density.
    const GammaParams g{2.5, 1.7};
    const auto pdf = [&](double x) {
        return std::pow(g.beta, g.alpha) * std::pow(x, g.alpha - 1.0) * std::exp(-g.beta * x) / std::tgamma(g.alpha);
    };
    REQUIRE(gamma_cdf(1.2, g) == Catch::Approx(simpson(pdf, 0.0, 1.2, 20000)).epsilon(1e-8));
    REQUIRE_THROWS_AS(gamma_cdf(-0.1, g), std::domain_error);
}

TEST_CASE("rayleigh cdf", "[params][cdf]")
{
    const RayleighParams p{0.3541};
    REQUIRE(rayleigh_cdf(p.sigma * std::sqrt(2.0 * std::log(2.0)), p) == Catch::Approx(0.5).epsilon(1e-12));
    REQUIRE(rayleigh_cdf(10.0 * p.sigma, p) == Catch::Approx(1.0).margin(1e-12));
    REQUIRE_THROWS_AS(rayleigh_cdf(-1.0, p), std::domain_error);
}

TEST_CASE("gaussian cdf", "[params][cdf]")
{
    const GaussianParams p{0.3241, 1.0125};
    REQUIRE(gaussian_cdf(p.mu, p) == Catch::Approx(0.5).epsilon(1e-15));
    // Oracle: integral of the standard normal density from -10 to 1.
    const auto phi = [](double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi); };
    const double ref = simpson(phi, -10.0, 1.0, 20000);
    REQUIRE(gaussian_cdf(p.mu + p.sigma, p) == Catch::Approx(ref).epsilon(1e-10));
    REQUIRE(gaussian_cdf(p.mu + p.sigma, p) == Catch::Approx(0.8413).margin(5e-5));
}

TEST_CASE("invalid scale or shape parameters are rejected", "[params]")
{
    REQUIRE_THROWS_AS(validate(LogisticParams{0.0, 0.0}), std::invalid_argument);
    REQUIRE_THROWS_AS(validate(GammaParams{-1.0, 1.0}), std::invalid_argument);
    REQUIRE_THROWS_AS(validate(RayleighParams{0.0}), std::invalid_argument);
    REQUIRE_THROWS_AS(validate(GaussianParams{0.0, -1.0}), std::invalid_argument);
    REQUIRE_THROWS_AS(validate(PowerDelayParams{0.0, 1.0, 1.0}), std::invalid_argument);
    REQUIRE_NOTHROW(validate(PowerDelayParams{1e6, 30.0, 0.0}));
}

// ----- Sampling --------------------------------------------------------------------

TEST_CASE("inverse-transform samples match their cdf", "[params][sample]")
{
    const auto &t = default_table();
    for (const Key k : {Key{ScattererClass::Static, Condition::High, Family::ScattererNumber},
                        Key{ScattererClass::Static, Condition::Low, Family::Distance},
                        Key{ScattererClass::TerrestrialDynamic, Condition::Medium, Family::Distance},
                        Key{ScattererClass::AerialDynamic, Condition::High, Family::Eaod},
                        Key{ScattererClass::Static, Condition::High, Family::PowerDelay}})
    {
        const auto &r = t.at(k);
        auto s = Stream::derive(11, "ks", {static_cast<std::uint64_t>(k.fam)});
        std::vector<double> x(20000);
        for (auto &v : x)
            v = sample(r, s);
        INFO(key_name(k));
        REQUIRE(ks_distance(x, [&](double v) { return cdf(r, v); }) < 0.015);
    }
}

TEST_CASE("rayleigh sample mean", "[params][sample]")
{
    const RayleighParams p{0.3541};
    Stream s(4);
    double sum = 0.0;
    const int n = 100000;
    for (int k = 0; k < n; ++k)
        sum += sample(p, s);
    REQUIRE(sum / n == Catch::Approx(p.sigma * std::sqrt(std::numbers::pi / 2.0)).epsilon(0.01));
}

TEST_CASE("count and distance families never return negatives", "[params][sample]")
{
    const auto &t = default_table();
    Stream s(8);
    for (int k = 0; k < 20000; ++k)
    {
        REQUIRE(t.draw(ScattererClass::Static, Condition::Low, Family::ClusterNumber, s) >= 0.0);
        REQUIRE(t.draw(ScattererClass::TerrestrialDynamic, Condition::Low, Family::ScattererNumber, s) >= 0.0);
    }
    // Angle families keep their sign.
    bool negative = false;
    for (int k = 0; k < 2000 && !negative; ++k)
        negative = t.draw(ScattererClass::TerrestrialDynamic, Condition::High, Family::Aaoa, s) < 0.0;
    REQUIRE(negative);
}

TEST_CASE("draws are reproducible per substream", "[params][sample]")
{
    const auto &t = default_table();
    auto a = Stream::derive(1, "init", {0, 0, 0});
    auto b = Stream::derive(1, "init", {0, 0, 0});
    for (int k = 0; k < 100; ++k)
        REQUIRE(t.draw(ScattererClass::Static, Condition::High, Family::Distance, a) ==
                t.draw(ScattererClass::Static, Condition::High, Family::Distance, b));
}

// ----- Table -----------------------------------------------------------------------

TEST_CASE("default table spot values", "[params][table]")
{
    const auto &t = default_table();
    const auto &sl = t.get<LogisticParams>(ScattererClass::Static, Condition::High, Family::ScattererNumber);
    REQUIRE(sl.mu == 0.7534);
    REQUIRE(sl.gamma == 0.5236);
    const auto &sg = t.get<GammaParams>(ScattererClass::Static, Condition::High, Family::Distance);
    REQUIRE(sg.alpha == 0.8223);
    REQUIRE(sg.beta == 1.9232);
    REQUIRE(t.get<RayleighParams>(ScattererClass::TerrestrialDynamic, Condition::High, Family::Distance).sigma ==
            0.3541);
    const auto &ag = t.get<GaussianParams>(ScattererClass::AerialDynamic, Condition::High, Family::Aaod);
    REQUIRE(ag.mu == 0.3241);
    REQUIRE(ag.sigma == 1.0125);
    const auto &ac = t.get<LogisticParams>(ScattererClass::AerialDynamic, Condition::High, Family::ClusterNumber);
    REQUIRE(ac.mu == 0.2356);
    REQUIRE(ac.gamma == 0.0321);
    const auto &ps = t.get<PowerDelayParams>(ScattererClass::Static, Condition::High, Family::PowerDelay);
    REQUIRE(ps.xi == 2.6881e6);
    REQUIRE(ps.eta == 31.9204);
    REQUIRE(ps.sigma_e == 19.9350);
    REQUIRE(t.get<PowerDelayParams>(ScattererClass::AerialDynamic, Condition::High, Family::PowerDelay).xi ==
            3.9797e6);
}

TEST_CASE("default table is complete and has no aerial rows at low", "[params][table]")
{
    const auto &t = default_table();
    REQUIRE(t.records().size() == 8 * 8);
    for (auto fam : all_families)
    {
        REQUIRE_THROWS_AS(t.at({ScattererClass::AerialDynamic, Condition::Low, fam}), AbsentParameter);
        for (auto cls : all_classes)
            for (auto cond : all_conditions)
                if (defined(cls, cond))
                {
                    const auto &r = t.at({cls, cond, fam});
                    REQUIRE(r.index() == expected_alternative(cls, fam));
                    REQUIRE_NOTHROW(validate(r));
                }
    }
}

TEST_CASE("table file round-trips and carries schema version 1", "[params][table]")
{
    const auto dir = std::filesystem::temp_directory_path() / "uvchan_test_params";
    std::filesystem::create_directories(dir);
    const auto path = dir / "table.json";
    save_table(default_table(), path);
    REQUIRE(load_table(path) == default_table());
    std::ifstream f(path);
    nlohmann::json j;
    f >> j;
    REQUIRE(j.at("schema_version") == 1);
}

TEST_CASE("table parse errors name the offending key", "[params][table]")
{
    auto j = table_to_json(default_table());
    auto &recs = j.at("records");
    for (auto it = recs.begin(); it != recs.end(); ++it)
        if ((*it)["family"] == "distance" && (*it)["class"] == "static" && (*it)["condition"] == "medium")
        {
            recs.erase(it);
            break;
        }
    REQUIRE_THROWS_WITH(table_from_json(j), Catch::Matchers::ContainsSubstring("distance/static/medium"));

    auto k = table_to_json(default_table());
    k.at("records")[0]["mu"] = "zero point five";
    REQUIRE_THROWS_AS(table_from_json(k), ParseError);

    auto v = table_to_json(default_table());
    v["schema_version"] = 2;
    REQUIRE_THROWS_WITH(table_from_json(v), Catch::Matchers::ContainsSubstring("schema_version"));

    auto a = table_to_json(default_table());
    a.at("records").push_back(
        {{"class", "aerial-dynamic"}, {"condition", "low"}, {"family", "aaod"}, {"mu", "0"}, {"sigma", "1"}});
    REQUIRE_THROWS_WITH(table_from_json(a), Catch::Matchers::ContainsSubstring("aaod/aerial-dynamic/low"));
}

// ----- Power-delay fit -------------------------------------------------------------

TEST_CASE("noiseless power-delay pairs are recovered exactly", "[params][fit]")
{
    const PowerDelayParams g{2.6881e6, 31.9204, 0.0};
    std::vector<std::pair<double, double>> pts;
    for (int k = 0; k < 50; ++k)
    {
        const double tau = 50e-9 + k * 10e-9;
        pts.emplace_back(tau, std::exp(-g.xi * tau - g.eta));
    }
    const auto f = fit_power_delay(pts);
    REQUIRE(f.xi == Catch::Approx(g.xi).epsilon(1e-6));
    REQUIRE(f.eta == Catch::Approx(g.eta).epsilon(1e-6));
    REQUIRE(f.sigma_e == Catch::Approx(0.0).margin(1e-6));
}

TEST_CASE("two points give the line through them", "[params][fit]")
{
    const std::vector<std::pair<double, double>> pts{{1e-7, std::exp(-3.0)}, {3e-7, std::exp(-7.0)}};
    const auto f = fit_power_delay(pts);
    REQUIRE(f.xi == Catch::Approx(2e7).epsilon(1e-12));
    REQUIRE(f.eta == Catch::Approx(1.0).epsilon(1e-9));
    REQUIRE(f.sigma_e == 0.0);
}

TEST_CASE("shadowing spread is recovered from noisy pairs", "[params][fit]")
{
    const PowerDelayParams g{2.6881e6, 31.9204, 19.9350};
    Stream s(77);
    std::vector<std::pair<double, double>> pts;
    for (int k = 0; k < 10000; ++k)
    {
        const double tau = s.uniform(0.0, 2e-6);
        const double z = g.sigma_e * s.normal();
        pts.emplace_back(tau, std::exp(-g.xi * tau - g.eta) * std::pow(10.0, -z / 10.0));
    }
    const auto f = fit_power_delay(pts);
    REQUIRE(f.sigma_e == Catch::Approx(g.sigma_e).epsilon(0.05));
}

TEST_CASE("degenerate fits are rejected", "[params][fit]")
{
    const std::vector<std::pair<double, double>> one{{1e-7, 1e-3}};
    REQUIRE_THROWS_AS(fit_power_delay(one), FitError);
    const std::vector<std::pair<double, double>> same{{1e-7, 1e-3}, {1e-7, 2e-3}};
    REQUIRE_THROWS_AS(fit_power_delay(same), FitError);
    const std::vector<std::pair<double, double>> zero{{1e-7, 0.0}, {2e-7, 1e-3}};
    REQUIRE_THROWS_AS(fit_power_delay(zero), FitError);
}
