#pragma once

// Connection spec files: line-oriented INI with [space], [connection] and
// optional [field NAME], [section NAME], [curve NAME] blocks.

#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "linconn/transport.hpp"

namespace linconn {

struct SpecFile {
  NonlinearConnection conn;
  std::optional<std::string> domain_text;
  std::map<std::string, HorBasicField> fields;
  std::map<std::string, SectionAlongPi> sections;
  std::map<std::string, CurveInE> curves;
};

/// Parses and validates spec text. Errors are SpecError (with a line number
/// where one applies) or DimensionError.
SpecFile parse_spec(std::string_view text);
/// Reads and parses a file. Throws SpecError when it cannot be read.
SpecFile load_spec(const std::string& path);

/// Largest 0-based index of `kind` referenced in `e`, if any.
std::optional<std::size_t> max_index(const Expr& e, VarKind kind);

}  // namespace linconn
