#pragma once

#include <memory>
#include <string>
#include <vector>

#include "dyndim/almostemb.hpp"
#include "dyndim/dimension.hpp"
#include "dyndim/dynsys.hpp"
#include "dyndim/ground.hpp"
#include "dyndim/jsonio.hpp"

namespace dyndim {

// JSON interchange for the calculus objects. Rationals are "p/q" strings,
// never floats; integers are plain JSON numbers. Every loader throws
// ValidationError on malformed input, naming the offending field.
//
//   space       {"kind": "discrete", "points": 5}
//               {"kind": "grid_cycle", "granularity": 12}   (also grid_interval, grid_square)
//   set         {"atoms": [0, 2]}                            sample-point ids
//               {"cells": [0, 1], "open": false}             cell union, closed or interior
//               {"boxes": [[["0","1/2"], ...], ...], "open": false}
//   cover       {"label": "u", "space": space, "sets": [set, ...]}
//               {"label": "u", "ambient": box, "sets": [boxes-only sets]}
//   system      {"space": space, "group": {"kind": "Z", "rank": 1, "orders": []},
//                "generators": [[perm], ...], "isometry": false}
//   sft         {"kind": "sft", "alphabet": 2, "window": 2, "forbidden": [[1,1]]}
//   word        [0, -1]          letter g is generator g, -g-1 its inverse
//   towers      {"v_sets": [set...], "shapes": [[word...]...], "k_set": [word...],
//                "epsilon": "p/q", "leftover_bound": "p/q"}
//   observable  {"space": space, "components": [["p/q", ...], ...]}

Json space_json(const GroundSpace& sp);
std::shared_ptr<const GroundSpace> space_from_json(const Json& j);

Json box_json(const Box& b);
Box box_from_json(const Json& j);

Json set_json(const SetExpr& s);
// sp supplies the atom count for the "atoms"/"cells" forms; pass nullptr for
// purely symbolic box sets.
SetExpr set_from_json(const Json& j, const GroundSpace* sp);

Json cover_json(const Cover& u);
Cover cover_from_json(const Json& j, bool require_covering = true);

Json word_json(const Word& w);
Word word_from_json(const Json& j);

Json system_json(const FinitePermSystem& sys);
FinitePermSystem system_from_json(const Json& j);

Json sft_json(const SftSystem& sft);
SftSystem sft_from_json(const Json& j);
// true iff the document declares {"kind": "sft"}
bool is_sft_json(const Json& j);

Json towers_json(const UrpTowerCertificate& t);
UrpTowerCertificate towers_from_json(const Json& j, const GroundSpace& sp);

Json observable_json(const Observable& f);
Observable observable_from_json(const Json& j);

Json kset_family_json(const KSetFamily& kf);
KSetFamily kset_family_from_json(const Json& j, const GroundSpace& sp);

// one rational per sample point; accepts {"values": [...]} or a bare array
std::vector<Rat> scalar_observable_from_json(const Json& j, int num_points);

Json load_json_file(const std::string& path);
void save_json_file(const std::string& path, const Json& j);

}  // namespace dyndim
