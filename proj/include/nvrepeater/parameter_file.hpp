// Copyright 2026 The nvrepeater Authors
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

#include <array>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>

#include "channel_models.hpp"

namespace nvrepeater {

// Flat "key = value" text. Blank lines and '#' comments are ignored; keys
// not present keep the base value. delta_phi is written in degrees.
namespace params_io {

using Field = double HardwareParameters::*;

inline constexpr std::array<std::pair<std::string_view, Field>, 18> kFields{{
    {"a0", &HardwareParameters::a0},
    {"b0", &HardwareParameters::b0},
    {"a1", &HardwareParameters::a1},
    {"b1", &HardwareParameters::b1},
    {"t_prep", &HardwareParameters::t_prep},
    {"F_m", &HardwareParameters::F_m},
    {"F_g", &HardwareParameters::F_g},
    {"F_prep", &HardwareParameters::F_prep},
    {"p_ce", &HardwareParameters::p_ce},
    {"p_zpl", &HardwareParameters::p_zpl},
    {"p_det", &HardwareParameters::p_det},
    {"d", &HardwareParameters::d},
    {"tau", &HardwareParameters::tau},
    {"t_w_offset", &HardwareParameters::t_w_offset},
    {"L0", &HardwareParameters::L0},
    {"n_ri", &HardwareParameters::n_ri},
    {"delta_phi", &HardwareParameters::delta_phi},
    {"c_vacuum", &HardwareParameters::c_vacuum},
}};

inline constexpr double kDegree = std::numbers::pi / 180.0;

inline std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline double parse_number(std::string_view text, const std::string& where) {
  // Allow a single ratio such as 1/3.
  const auto slash = text.find('/');
  if (slash != std::string_view::npos) {
    return parse_number(trim(text.substr(0, slash)), where) /
           parse_number(trim(text.substr(slash + 1)), where);
  }
  std::string buf(text);
  char* end = nullptr;
  const double v = std::strtod(buf.c_str(), &end);
  if (buf.empty() || end != buf.c_str() + buf.size()) {
    throw ConfigError(where + ": cannot parse number '" + buf + "'");
  }
  return v;
}

inline HardwareParameters read(std::istream& in,
                               HardwareParameters base = {},
                               const std::string& source = "<stream>") {
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view s(line);
    if (const auto hash = s.find('#'); hash != std::string_view::npos) {
      s = s.substr(0, hash);
    }
    s = trim(s);
    if (s.empty()) continue;
    const std::string where = source + ":" + std::to_string(lineno);
    const auto eq = s.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError(where + ": expected key = value");
    }
    const auto key = trim(s.substr(0, eq));
    const auto val = trim(s.substr(eq + 1));
    bool found = false;
    for (const auto& [name, field] : kFields) {
      if (name != key) continue;
      double v = parse_number(val, where);
      if (name == "delta_phi") v *= kDegree;
      base.*field = v;
      found = true;
      break;
    }
    if (!found) {
      throw ConfigError(where + ": unknown key '" + std::string(key) + "'");
    }
  }
  base.validate();
  return base;
}

inline HardwareParameters parse(const std::string& text,
                                HardwareParameters base = {}) {
  std::istringstream in(text);
  return read(in, base, "<string>");
}

// "table1" selects the built-in preset; anything else is a file whose
// entries override the preset key by key.
inline HardwareParameters load(const std::string& name_or_path) {
  if (name_or_path == "table1") return HardwareParameters::table1();
  std::ifstream in(name_or_path);
  if (!in) throw ConfigError("cannot open parameter file " + name_or_path);
  return read(in, HardwareParameters::table1(), name_or_path);
}

inline void write(std::ostream& out, const HardwareParameters& p) {
  const auto flags = out.flags();
  const auto prec = out.precision(17);
  for (const auto& [name, field] : kFields) {
    double v = p.*field;
    if (name == "delta_phi") v /= kDegree;
    out << name << " = " << v << '\n';
  }
  out.flags(flags);
  out.precision(prec);
}

inline std::string to_string(const HardwareParameters& p) {
  std::ostringstream out;
  write(out, p);
  return out.str();
}

}  // namespace params_io
}  // namespace nvrepeater
