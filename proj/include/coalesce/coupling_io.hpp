#pragma once

#include <string>
#include <string_view>

#include <json.hpp>

#include "coalesce/coupling.hpp"

namespace coalesce {

// Explicit form:
//   {"n": 4, "functions": [{"map": "3434", "weight": "1/4"}, ...]}
// Block form (states and blocks 1-based; "block_perms" may also be the
// string "uniform"):
//   {"n": 4, "partition": [[1,2],[3,4]],
//    "block_perms": [{"perm": [2,1], "weight": "1/2"}, ...],
//    "within": [["1/2","1/2","0","0"], ...]}
// Weights are strings "p/q" or JSON integers. Throws MalformedInput.
GrandCoupling coupling_from_json(const nlohmann::json& doc);
GrandCoupling parse_coupling(std::string_view text);

nlohmann::json to_json(const GrandCoupling& mu);
std::string serialize_coupling(const GrandCoupling& mu);

/// "1234;2244" or "1234 2244"; size checked against n when n is nonzero.
Support parse_function_list(std::string_view text, std::size_t n = 0);

std::string to_string(const Support& support);

}  // namespace coalesce
