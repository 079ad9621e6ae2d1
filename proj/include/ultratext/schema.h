#pragma once

// Validation against the subset of JSON Schema used by the shipped schemas:
// local $ref, anyOf, type, properties, required, additionalProperties,
// items, enum, minimum, maximum, minItems and maxItems.

#include <filesystem>
#include <string>
#include <vector>

#include "ultratext/serialize.h"

namespace ultratext {

// Returns one message per violation, each prefixed with a JSON pointer.
std::vector<std::string> validate_schema(const Json& instance,
                                         const Json& schema);

Json load_json(const std::filesystem::path& path);

}  // namespace ultratext
