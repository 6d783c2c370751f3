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

#include <boost/math/special_functions/erf.hpp>
#include <cmath>
#include <limits>

namespace uvchan
{

std::uint64_t mix64(std::uint64_t x)
{
    // splitmix64 finalizer
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

std::uint64_t fnv1a64(std::string_view s)
{
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : s)
    {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return h;
}

std::uint64_t derive_seed(std::uint64_t master, std::string_view purpose, std::initializer_list<std::uint64_t> ids)
{
    std::uint64_t h = mix64(master ^ fnv1a64(purpose));
    for (auto id : ids)
        h = mix64(h ^ mix64(id + 0x9E3779B97F4A7C15ULL));
    return h;
}

std::size_t Stream::index(std::size_t n)
{
    const std::uint64_t range = static_cast<std::uint64_t>(n);
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % range;
    std::uint64_t x;
    do
        x = eng_();
    while (x >= limit);
    return static_cast<std::size_t>(x % range);
}

double Stream::normal()
{
    const double u = uniform();
    if (u < 0.5)
        return -std::sqrt(2.0) * boost::math::erfc_inv(2.0 * u);
    return std::sqrt(2.0) * boost::math::erfc_inv(2.0 * (1.0 - u));
}

} // namespace uvchan
