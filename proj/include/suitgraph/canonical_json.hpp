#pragma once

#include <string>

#include <json.hpp>

namespace suitgraph {

/// Compact JSON with object keys in sorted order and every floating-point
/// number printed with 17 significant digits (always carrying a '.' or an
/// exponent so it reads back as a float). Equal documents produce identical
/// bytes.
std::string dump_canonical(const nlohmann::json& value);

/// 17-significant-digit rendering used by dump_canonical.
std::string format_double17(double v);

}  // namespace suitgraph
