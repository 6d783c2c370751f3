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

#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <string_view>
#include <utility>
#include <vector>

namespace uvchan
{

// Substream derivation:
//   h0 = mix64(master ^ fnv1a64(purpose))
//   h  = mix64(h ^ mix64(id_k + 0x9E3779B97F4A7C15))   for each id in order
// The result seeds a std::mt19937_64. Engine output is fixed by the standard;
// all variates below are built from raw engine bits, so draws are portable.
std::uint64_t mix64(std::uint64_t x);
std::uint64_t fnv1a64(std::string_view s);
std::uint64_t derive_seed(std::uint64_t master, std::string_view purpose, std::initializer_list<std::uint64_t> ids);

class Stream
{
  public:
    explicit Stream(std::uint64_t seed) : eng_(seed) {}

    static Stream derive(std::uint64_t master, std::string_view purpose, std::initializer_list<std::uint64_t> ids = {})
    {
        return Stream(derive_seed(master, purpose, ids));
    }

    std::uint64_t bits() { return eng_(); }

    // Open interval (0, 1), 53-bit resolution.
    double uniform() { return (static_cast<double>(eng_() >> 11) + 0.5) * 0x1.0p-53; }
    double uniform(double a, double b) { return a + (b - a) * uniform(); }

    // Unbiased integer in [0, n). n > 0.
    std::size_t index(std::size_t n);

    // Standard normal by inverse transform.
    double normal();

    template <class T>
    void shuffle(std::vector<T> &v)
    {
        for (std::size_t i = v.size(); i > 1; --i)
            std::swap(v[i - 1], v[index(i)]);
    }

  private:
    std::mt19937_64 eng_;
};

} // namespace uvchan
