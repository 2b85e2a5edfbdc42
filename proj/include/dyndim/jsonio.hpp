#pragma once

#include <json.hpp>

#include "dyndim/rational.hpp"

namespace dyndim {

// ordered_json keeps insertion order, which keeps serialized artifacts
// byte-stable across runs.
using Json = nlohmann::ordered_json;

inline Json rat_json(const Rat& r) { return Json(rat_str(r)); }

Json rat_vec_json(const std::vector<Rat>& v);
std::vector<Rat> rat_vec_from_json(const Json& j);

Rat rat_from_json(const Json& j);

}  // namespace dyndim
