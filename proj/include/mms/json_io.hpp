#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "mms/arcs.hpp"
#include "mms/space.hpp"

namespace mms {

using json = nlohmann::json;

/// {"nodes":[...], "metric":{"type":"matrix","entries":[[i,j,d],...]} |
///  {"type":"graph","edges":[[i,j,w],...]}, "measure":[...]}; absent pair = infinity.
DiscreteSpace space_from_json(const json& j);
DiscreteSpace load_space(const std::string& path);

/// {"kind":"explicit","paths":[[...node indices...],...]} |
/// {"kind":"connector","source":[...],"target":[...],"maxEdges":k}
PathFamily family_from_json(const json& j, const DiscreteSpace& space);
PathFamily load_family(const std::string& path, const DiscreteSpace& space);

/// Bare array or {"values":[...]}; length must match the node count.
std::vector<double> vector_from_json(const json& j, std::size_t expected);
std::vector<double> load_vector(const std::string& path, std::size_t expected);

json load_json(const std::string& path);
void write_json(const std::string& path, const json& j);
void write_text(const std::string& path, const std::string& text);

} // namespace mms
