// Copyright 2026 qresnet contributors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace qres {

using cplx = std::complex<double>;

/// Thrown on contract violations (bad indices, size mismatches, malformed
/// inputs). CLI maps it to exit code 2.
class InvalidInput : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

inline void require(bool cond, const std::string &msg) {
    if (!cond) {
        throw InvalidInput(msg);
    }
}

/// splitmix64 mix step; used to derive independent per-component and
/// per-trial seeds from a single root seed.
inline std::uint64_t mix_seed(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t root, std::uint64_t stream) {
    return mix_seed(root ^ mix_seed(stream + 1));
}

} // namespace qres
