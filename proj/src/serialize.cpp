#include "dyndim/serialize.hpp"

#include <fstream>

#include "dyndim/error.hpp"

namespace dyndim {

namespace {

const Json& field(const Json& j, const char* key, const char* what) {
  if (!j.is_object() || !j.contains(key))
    throw ValidationError(std::string(what) + " is missing field \"" + key + "\"");
  return j.at(key);
}

int int_field(const Json& j, const char* key, const char* what) {
  const Json& v = field(j, key, what);
  if (!v.is_number_integer())
    throw ValidationError(std::string(what) + " field \"" + key + "\" must be an integer");
  return v.get<int>();
}

std::vector<int> int_array(const Json& j, const char* what) {
  if (!j.is_array()) throw ValidationError(std::string(what) + " must be an array of integers");
  std::vector<int> out;
  for (const auto& e : j) {
    if (!e.is_number_integer())
      throw ValidationError(std::string(what) + " must be an array of integers");
    out.push_back(e.get<int>());
  }
  return out;
}

}  // namespace

namespace {

// make_grid_square produces a Discrete space carrying the full lattice of
// [0,1]^2; recognize that shape so it round-trips under its own name.
bool is_square_lattice(const GroundSpace& sp, int* granularity_out) {
  if (sp.kind != SpaceKind::Discrete || !sp.icoords || sp.coord_denom % 2 != 0) return false;
  int g = (int)(sp.coord_denom / 2);
  long long side = 2LL * g + 1;
  if (g <= 0 || sp.num_points() != side * side) return false;
  const auto& coords = *sp.icoords;
  for (long long i = 0; i < side; ++i)
    for (long long j = 0; j < side; ++j) {
      const auto& row = coords[i * side + j];
      if (row.size() != 2 || row[0] != i || row[1] != j) return false;
    }
  *granularity_out = g;
  return true;
}

}  // namespace

Json space_json(const GroundSpace& sp) {
  Json j = Json::object();
  int g = 0;
  switch (sp.kind) {
    case SpaceKind::Discrete:
      if (is_square_lattice(sp, &g)) {
        j["kind"] = "grid_square";
        j["granularity"] = g;
        return j;
      }
      if (sp.icoords || sp.metric_table)
        throw ValidationError("this discrete space's geometry has no JSON form");
      j["kind"] = "discrete";
      j["points"] = sp.num_points();
      return j;
    case SpaceKind::GridInterval: j["kind"] = "grid_interval"; break;
    case SpaceKind::GridCycle: j["kind"] = "grid_cycle"; break;
  }
  j["granularity"] = sp.granularity;
  return j;
}

std::shared_ptr<const GroundSpace> space_from_json(const Json& j) {
  std::string kind = field(j, "kind", "space").get<std::string>();
  if (kind == "discrete") {
    int n = int_field(j, "points", "discrete space");
    if (n <= 0) throw ValidationError("discrete space needs a positive point count");
    return make_discrete_space(n);
  }
  int g = int_field(j, "granularity", "grid space");
  if (g <= 0) throw ValidationError("grid space needs a positive granularity");
  if (kind == "grid_interval") return make_grid_interval(g);
  if (kind == "grid_cycle") return make_grid_cycle(g);
  if (kind == "grid_square") return make_grid_square(g);
  throw ValidationError("unknown space kind \"" + kind + "\"");
}

Json box_json(const Box& b) {
  Json j = Json::array();
  for (const Interval& iv : b) j.push_back(Json::array({rat_json(iv.lo), rat_json(iv.hi)}));
  return j;
}

Box box_from_json(const Json& j) {
  if (!j.is_array() || j.empty()) throw ValidationError("box must be a nonempty interval list");
  Box b;
  for (const auto& e : j) {
    if (!e.is_array() || e.size() != 2)
      throw ValidationError("box interval must be a [lo, hi] pair");
    Interval iv{rat_from_json(e.at(0)), rat_from_json(e.at(1))};
    if (iv.lo > iv.hi) throw ValidationError("box interval has lo > hi");
    b.push_back(iv);
  }
  return b;
}

Json set_json(const SetExpr& s) {
  Json j = Json::object();
  if (s.kind == SetExpr::Kind::Boxes) {
    Json bs = Json::array();
    for (const Box& b : s.boxes) bs.push_back(box_json(b));
    j["boxes"] = bs;
  } else {
    Json atoms = Json::array();
    for (int p : s.bits.members()) atoms.push_back(p);
    j["atoms"] = atoms;
  }
  j["open"] = s.open;
  return j;
}

SetExpr set_from_json(const Json& j, const GroundSpace* sp) {
  if (!j.is_object()) throw ValidationError("set must be an object");
  bool open = j.contains("open") ? field(j, "open", "set").get<bool>() : false;
  if (j.contains("boxes")) {
    std::vector<Box> boxes;
    for (const auto& e : j.at("boxes")) boxes.push_back(box_from_json(e));
    return SetExpr::from_boxes(std::move(boxes), open);
  }
  if (sp == nullptr) throw ValidationError("atom/cell sets need an enclosing space");
  if (j.contains("cells")) {
    std::vector<int> cells = int_array(j.at("cells"), "set field \"cells\"");
    for (int c : cells)
      if (c < 0 || c >= sp->num_cells())
        throw ValidationError("cell id " + std::to_string(c) + " out of range");
    return open ? SetExpr::from_cells_open(*sp, cells) : SetExpr::from_cells_closed(*sp, cells);
  }
  std::vector<int> atoms = int_array(field(j, "atoms", "set"), "set field \"atoms\"");
  Bitset b(sp->num_points());
  for (int p : atoms) {
    if (p < 0 || p >= sp->num_points())
      throw ValidationError("atom id " + std::to_string(p) + " out of range");
    b.set(p);
  }
  return SetExpr::from_bits(std::move(b), open);
}

Json cover_json(const Cover& u) {
  Json j = Json::object();
  j["label"] = u.label;
  if (u.space) j["space"] = space_json(*u.space);
  if (u.ambient) j["ambient"] = box_json(*u.ambient);
  Json sets = Json::array();
  for (const SetExpr& s : u.sets) sets.push_back(set_json(s));
  j["sets"] = sets;
  return j;
}

Cover cover_from_json(const Json& j, bool require_covering) {
  Cover u;
  u.label = j.contains("label") ? field(j, "label", "cover").get<std::string>() : "";
  if (j.contains("space")) u.space = space_from_json(j.at("space"));
  if (j.contains("ambient")) u.ambient = box_from_json(j.at("ambient"));
  if (!u.space && !u.ambient)
    throw ValidationError("cover needs a \"space\" or an \"ambient\" box");
  for (const auto& e : field(j, "sets", "cover")) u.sets.push_back(set_from_json(e, u.space.get()));
  u.validate(require_covering);
  return u;
}

Json word_json(const Word& w) {
  Json j = Json::array();
  for (int l : w.letters) j.push_back(l);
  return j;
}

Word word_from_json(const Json& j) { return Word{int_array(j, "word")}; }

Json system_json(const FinitePermSystem& sys) {
  Json j = Json::object();
  j["space"] = space_json(*sys.space);
  Json grp = Json::object();
  grp["kind"] = group_kind_name(sys.group.kind);
  grp["rank"] = sys.group.rank;
  Json orders = Json::array();
  for (int m : sys.group.orders) orders.push_back(m);
  grp["orders"] = orders;
  j["group"] = grp;
  Json gens = Json::array();
  for (const auto& perm : sys.gens) {
    Json p = Json::array();
    for (int q : perm) p.push_back(q);
    gens.push_back(p);
  }
  j["generators"] = gens;
  j["isometry"] = sys.isometry_flag;
  return j;
}

FinitePermSystem system_from_json(const Json& j) {
  FinitePermSystem sys;
  sys.space = space_from_json(field(j, "space", "system"));
  const Json& grp = field(j, "group", "system");
  sys.group.kind = group_kind_from_name(field(grp, "kind", "group").get<std::string>());
  for (const auto& e : field(j, "generators", "system"))
    sys.gens.push_back(int_array(e, "generator permutation"));
  sys.group.rank = grp.contains("rank") ? int_field(grp, "rank", "group") : (int)sys.gens.size();
  if (grp.contains("orders")) sys.group.orders = int_array(grp.at("orders"), "group orders");
  if (j.contains("isometry")) sys.isometry_flag = field(j, "isometry", "system").get<bool>();
  sys.validate();
  return sys;
}

Json sft_json(const SftSystem& sft) {
  Json j = Json::object();
  j["kind"] = "sft";
  j["alphabet"] = sft.alphabet;
  j["window"] = sft.window;
  Json fb = Json::array();
  for (const auto& w : sft.forbidden) {
    Json word = Json::array();
    for (int s : w) word.push_back(s);
    fb.push_back(word);
  }
  j["forbidden"] = fb;
  return j;
}

SftSystem sft_from_json(const Json& j) {
  SftSystem sft;
  sft.alphabet = int_field(j, "alphabet", "sft");
  sft.window = int_field(j, "window", "sft");
  if (j.contains("forbidden"))
    for (const auto& e : j.at("forbidden")) sft.forbidden.push_back(int_array(e, "forbidden word"));
  sft.validate();
  return sft;
}

bool is_sft_json(const Json& j) {
  return j.is_object() && j.contains("kind") && j.at("kind") == Json("sft");
}

Json towers_json(const UrpTowerCertificate& t) {
  Json j = Json::object();
  Json vs = Json::array();
  for (const SetExpr& s : t.v_sets) vs.push_back(set_json(s));
  j["v_sets"] = vs;
  Json shapes = Json::array();
  for (const auto& shape : t.shapes) {
    Json sh = Json::array();
    for (const Word& w : shape) sh.push_back(word_json(w));
    shapes.push_back(sh);
  }
  j["shapes"] = shapes;
  Json ks = Json::array();
  for (const Word& w : t.k_set) ks.push_back(word_json(w));
  j["k_set"] = ks;
  j["epsilon"] = rat_json(t.epsilon);
  j["leftover_bound"] = rat_json(t.leftover_bound);
  return j;
}

UrpTowerCertificate towers_from_json(const Json& j, const GroundSpace& sp) {
  UrpTowerCertificate t;
  for (const auto& e : field(j, "v_sets", "towers")) t.v_sets.push_back(set_from_json(e, &sp));
  for (const auto& sh : field(j, "shapes", "towers")) {
    std::vector<Word> shape;
    for (const auto& w : sh) shape.push_back(word_from_json(w));
    t.shapes.push_back(std::move(shape));
  }
  for (const auto& w : field(j, "k_set", "towers")) t.k_set.push_back(word_from_json(w));
  t.epsilon = rat_from_json(field(j, "epsilon", "towers"));
  if (j.contains("leftover_bound")) t.leftover_bound = rat_from_json(j.at("leftover_bound"));
  return t;
}

Json observable_json(const Observable& f) {
  Json j = Json::object();
  j["space"] = space_json(*f.space);
  Json comps = Json::array();
  for (const auto& c : f.components) comps.push_back(rat_vec_json(c));
  j["components"] = comps;
  return j;
}

Observable observable_from_json(const Json& j) {
  Observable f;
  f.space = space_from_json(field(j, "space", "observable"));
  for (const auto& e : field(j, "components", "observable"))
    f.components.push_back(rat_vec_from_json(e));
  f.validate();
  return f;
}

Json kset_family_json(const KSetFamily& kf) {
  Json rows = Json::array();
  for (const auto& row : kf.rows) {
    Json r = Json::array();
    for (const auto& [w, s] : row) {
      Json entry = Json::object();
      entry["word"] = word_json(w);
      entry["set"] = set_json(s);
      r.push_back(entry);
    }
    rows.push_back(r);
  }
  Json j = Json::object();
  j["rows"] = rows;
  return j;
}

KSetFamily kset_family_from_json(const Json& j, const GroundSpace& sp) {
  KSetFamily kf;
  for (const auto& row : field(j, "rows", "K family")) {
    std::vector<std::pair<Word, SetExpr>> r;
    for (const auto& entry : row)
      r.emplace_back(word_from_json(field(entry, "word", "K entry")),
                     set_from_json(field(entry, "set", "K entry"), &sp));
    kf.rows.push_back(std::move(r));
  }
  return kf;
}

std::vector<Rat> scalar_observable_from_json(const Json& j, int num_points) {
  const Json& vals = j.is_object() ? field(j, "values", "observable") : j;
  std::vector<Rat> f = rat_vec_from_json(vals);
  if ((int)f.size() != num_points)
    throw ValidationError("observable has " + std::to_string(f.size()) + " values for " +
                          std::to_string(num_points) + " points");
  return f;
}

Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot read file: " + path);
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError("invalid JSON in " + path + ": " + e.what());
  }
}

void save_json_file(const std::string& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write file: " + path);
  out << j.dump(2) << "\n";
  if (!out) throw ValidationError("write failed: " + path);
}

}  // namespace dyndim
