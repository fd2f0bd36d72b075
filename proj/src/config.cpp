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
#include "qres/config.hpp"

#include <fstream>
#include <sstream>

#include "qres/common.hpp"

namespace qres {

namespace {

std::string trim(const std::string &s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) {
        return "";
    }
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

} // namespace

RunConfig RunConfig::from_file(const std::string &path) {
    std::ifstream in(path);
    require(in.good(), "cannot open config file: " + path);
    RunConfig cfg;
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') {
            continue;
        }
        if (t.front() == '[' && t.back() == ']') {
            section = trim(t.substr(1, t.size() - 2));
            require(!section.empty(),
                    path + ":" + std::to_string(lineno) + ": empty section");
            continue;
        }
        const auto eq = t.find('=');
        require(eq != std::string::npos,
                path + ":" + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        require(!key.empty(),
                path + ":" + std::to_string(lineno) + ": empty key");
        require(!section.empty(),
                path + ":" + std::to_string(lineno) + ": key outside section");
        cfg.values_[section + "." + key] = value;
    }
    return cfg;
}

void RunConfig::set_override(const std::string &assignment,
                             const std::string &section) {
    const auto eq = assignment.find('=');
    require(eq != std::string::npos, "override must be key=value");
    std::string key = trim(assignment.substr(0, eq));
    const std::string value = trim(assignment.substr(eq + 1));
    require(!key.empty(), "override key must not be empty");
    if (key.find('.') == std::string::npos) {
        require(!section.empty(), "override " + key + " needs a section");
        key = section + "." + key;
    }
    values_[key] = value;
}

bool RunConfig::has(const std::string &section, const std::string &key) const {
    return values_.count(section + "." + key) > 0;
}

std::string RunConfig::lookup(const std::string &section,
                              const std::string &key,
                              const std::string &fallback, bool required) {
    const std::string full = section + "." + key;
    const auto it = values_.find(full);
    if (it == values_.end()) {
        require(!required, "missing required config key: " + full);
        resolved_[full] = fallback;
        return fallback;
    }
    resolved_[full] = it->second;
    return it->second;
}

std::string RunConfig::get_str(const std::string &section,
                               const std::string &key,
                               const std::string &fallback) {
    return lookup(section, key, fallback, false);
}

std::string RunConfig::require_str(const std::string &section,
                                   const std::string &key) {
    return lookup(section, key, "", true);
}

double RunConfig::get_double(const std::string &section,
                             const std::string &key, double fallback) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", fallback);
    const std::string s = lookup(section, key, buf, false);
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        require(pos == s.size(), "");
        return v;
    } catch (...) {
        throw InvalidInput("config key " + section + "." + key +
                           " is not a number: " + s);
    }
}

std::int64_t RunConfig::get_int(const std::string &section,
                                const std::string &key, std::int64_t fallback) {
    const std::string s =
        lookup(section, key, std::to_string(fallback), false);
    try {
        std::size_t pos = 0;
        const long long v = std::stoll(s, &pos);
        require(pos == s.size(), "");
        return v;
    } catch (...) {
        throw InvalidInput("config key " + section + "." + key +
                           " is not an integer: " + s);
    }
}

bool RunConfig::get_bool(const std::string &section, const std::string &key,
                         bool fallback) {
    const std::string s =
        lookup(section, key, fallback ? "true" : "false", false);
    if (s == "true" || s == "1" || s == "yes") {
        return true;
    }
    if (s == "false" || s == "0" || s == "no") {
        return false;
    }
    throw InvalidInput("config key " + section + "." + key +
                       " is not a boolean: " + s);
}

std::vector<int> RunConfig::get_int_list(const std::string &section,
                                         const std::string &key,
                                         const std::string &fallback) {
    const std::string s = lookup(section, key, fallback, false);
    std::vector<int> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) {
            continue;
        }
        try {
            out.push_back(std::stoi(item));
        } catch (...) {
            throw InvalidInput("config key " + section + "." + key +
                               " has a non-integer entry: " + item);
        }
    }
    return out;
}

std::vector<double> RunConfig::get_double_list(const std::string &section,
                                               const std::string &key,
                                               const std::string &fallback) {
    const std::string s = lookup(section, key, fallback, false);
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) {
            continue;
        }
        try {
            out.push_back(std::stod(item));
        } catch (...) {
            throw InvalidInput("config key " + section + "." + key +
                               " has a non-numeric entry: " + item);
        }
    }
    return out;
}

void RunConfig::write_resolved(const std::string &path,
                               const std::string &section) const {
    std::ofstream out(path);
    require(out.good(), "cannot open " + path + " for writing");
    out << "[" << section << "]\n";
    const std::string prefix = section + ".";
    for (const auto &[key, value] : resolved_) {
        if (key.rfind(prefix, 0) == 0) {
            out << key.substr(prefix.size()) << " = " << value << "\n";
        }
    }
}

} // namespace qres
