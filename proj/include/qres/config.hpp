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

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace qres {

/// Flat key = value configuration with one [section] per command. Reads
/// record every key a command consumed so the resolved file written next to
/// the outputs replays the run exactly.
class RunConfig {
  public:
    RunConfig() = default;

    static RunConfig from_file(const std::string &path);
    /// Applies a "section.key=value" or, with `section` given, "key=value"
    /// override.
    void set_override(const std::string &assignment,
                      const std::string &section = "");

    bool has(const std::string &section, const std::string &key) const;

    std::string get_str(const std::string &section, const std::string &key,
                        const std::string &fallback);
    double get_double(const std::string &section, const std::string &key,
                      double fallback);
    std::int64_t get_int(const std::string &section, const std::string &key,
                         std::int64_t fallback);
    bool get_bool(const std::string &section, const std::string &key,
                  bool fallback);
    std::vector<int> get_int_list(const std::string &section,
                                  const std::string &key,
                                  const std::string &fallback);
    std::vector<double> get_double_list(const std::string &section,
                                        const std::string &key,
                                        const std::string &fallback);

    /// Required variants: throw when the key is missing.
    std::string require_str(const std::string &section, const std::string &key);

    /// Every key touched by get_*/require_*, with its effective value.
    void write_resolved(const std::string &path,
                        const std::string &section) const;

  private:
    std::string lookup(const std::string &section, const std::string &key,
                       const std::string &fallback, bool required);

    std::map<std::string, std::string> values_;   // "section.key" -> value
    std::map<std::string, std::string> resolved_; // keys actually consumed
};

} // namespace qres
