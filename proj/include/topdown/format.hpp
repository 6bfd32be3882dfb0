#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "topdown/automata.hpp"

namespace topdown {

/// Parses the `.dba` text format (see docs/formats.md). Throws ParseError
/// with the offending line and column.
Dba parse_dba(std::string_view text);

/// Canonical `.dba` text: symbols alphabetically, states in declaration
/// order, transitions by symbol then argument tuple.
std::string render_dba(const Dba& automaton);

/// `.dta` text. States are listed in id order, entries by state then symbol.
std::string render_dta(const Dta& automaton);

/// Reads a whole file. Throws Error when it cannot be opened.
std::string read_file(const std::filesystem::path& path);
Dba load_dba(const std::filesystem::path& path);

}  // namespace topdown
