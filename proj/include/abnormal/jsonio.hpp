#pragma once

#include <string>

#include "json.hpp"

namespace abnormal {

// Deterministic dump: object keys sorted (nlohmann default), numbers as %.17g, non-finite as null.
std::string dump_json(const nlohmann::json& j, int indent = 2);

}  // namespace abnormal
