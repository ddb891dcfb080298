#pragma once

#include <string>

#include "coopreg/scenario.hpp"

namespace coopreg::scenario_io {

// Parses the TOML-style scenario text. Unknown keys and malformed values are
// rejected with a ParseError carrying line:column. `source_name` labels the
// error messages (a path or "<builtin>").
Scenario parse_scenario_text(const std::string& text, const std::string& source_name);

Scenario load_scenario_file(const std::string& path);

// Canonical text form: fixed section order, 17-significant-digit floats.
// parse(serialize(s)) reproduces s exactly.
std::string serialize_scenario(const Scenario& scenario);

// FNV-1a 64 hash of the canonical form, as "0x...." hex.
std::string scenario_hash_hex(const Scenario& scenario);

} // namespace coopreg::scenario_io
