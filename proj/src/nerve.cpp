#include "dyndim/nerve.hpp"

#include <algorithm>

#include "dyndim/error.hpp"
#include "dyndim/jsonio.hpp"

namespace dyndim {

void PartitionOfUnity::validate() const {
  if (!space) throw ValidationError("partition of unity needs a sample space");
  int n = space->num_points();
  if (values.size() != supports.size())
    throw ValidationError("partition of unity arrays disagree");
  for (const auto& row : values)
    if ((int)row.size() != n) throw ValidationError("partition of unity row size mismatch");
  for (int p = 0; p < n; ++p) {
    Rat sum = 0;
    for (size_t i = 0; i < values.size(); ++i) {
      const Rat& v = values[i][p];
      if (v < 0) throw ValidationError("negative partition value");
      bool inside = supports[i].test(p);
      if ((v > 0) != inside) throw ValidationError("support of a partition function escapes its set");
      sum += v;
    }
    if (sum != 1) throw ValidationError("partition values do not sum to one");
  }
}

PartitionOfUnity partition_of_unity(const Cover& u) {
  if (u.symbolic()) throw ValidationError("partition of unity needs a sampled cover");
  u.validate(true);
  const GroundSpace& sp = *u.space;
  int n = sp.num_points();

  PartitionOfUnity pou;
  pou.space = u.space;
  for (const auto& s : u.sets) pou.supports.push_back(set_bits_on_space(sp, s));

  std::vector<std::vector<Rat>> raw(u.sets.size(), std::vector<Rat>(n, 0));
  for (size_t i = 0; i < u.sets.size(); ++i) {
    const Bitset& inside = pou.supports[i];
    auto comp = inside.complement().members();
    for (int p = 0; p < n; ++p) {
      if (!inside.test(p)) continue;  // distance to the complement is zero
      if (comp.empty()) {
        raw[i][p] = 1;
        continue;
      }
      Rat best = sp.distance(p, comp[0]);
      for (size_t c = 1; c < comp.size(); ++c) {
        Rat d = sp.distance(p, comp[c]);
        if (d < best) best = d;
      }
      raw[i][p] = best;
    }
  }
  for (int p = 0; p < n; ++p) {
    Rat sum = 0;
    for (const auto& row : raw) sum += row[p];
    if (sum == 0) throw InternalError("covered point with vanishing distance sum");
    for (auto& row : raw) row[p] /= sum;
  }
  pou.values = std::move(raw);
  return pou;
}

std::vector<Rat> nerve_map(const PartitionOfUnity& pou, PointId p) {
  if (!pou.space || p < 0 || p >= pou.space->num_points())
    throw ValidationError("nerve map point out of range");
  std::vector<Rat> out;
  out.reserve(pou.values.size());
  for (const auto& row : pou.values) out.push_back(row[p]);
  return out;
}

int SimplicialComplex::dim() const {
  int d = -1;
  for (const auto& s : simplices) d = std::max<int>(d, (int)s.size() - 1);
  return d;
}

bool SimplicialComplex::has_simplex(std::vector<int> j) const {
  std::sort(j.begin(), j.end());
  return std::find(simplices.begin(), simplices.end(), j) != simplices.end();
}

SimplicialComplex nerve_complex(const Cover& u, int max_sets) {
  if (u.symbolic()) throw ValidationError("nerve enumeration needs a sampled cover");
  int r = (int)u.sets.size();
  if (r > max_sets) throw BudgetError("too many sets for nerve enumeration");
  const GroundSpace& sp = *u.space;

  std::vector<Bitset> bits;
  for (const auto& s : u.sets) bits.push_back(set_bits_on_space(sp, s));

  SimplicialComplex k;
  k.num_vertices = r;
  for (unsigned mask = 1; mask < (1u << r); ++mask) {
    Bitset inter;
    bool first = true;
    for (int i = 0; i < r; ++i) {
      if (!(mask >> i & 1)) continue;
      if (first) {
        inter = bits[i];
        first = false;
      } else {
        inter = inter & bits[i];
      }
    }
    if (!inter.any()) continue;
    std::vector<int> j;
    for (int i = 0; i < r; ++i)
      if (mask >> i & 1) j.push_back(i);
    k.simplices.push_back(std::move(j));
  }
  std::sort(k.simplices.begin(), k.simplices.end(),
            [](const std::vector<int>& a, const std::vector<int>& b) {
              if (a.size() != b.size()) return a.size() < b.size();
              return a < b;
            });
  return k;
}

Certificate verify_subadditive(const Cover& v, const Cover& u1, const Cover& u2) {
  Cover join = joint_refinement(u1, u2);

  Certificate cert;
  cert.kind = CertKind::PassFail;
  cert.quantity = "subadditive_order_bound";
  Json w = Json::object();

  int bad_set = -1;
  bool ref = refines(v, join, &bad_set);
  w["refines_join"] = ref;
  if (!ref) {
    w["refinement_witness_set"] = bad_set;
    cert.value = 0;
    cert.pass = false;
    cert.verified = true;
    cert.witness = w;
    return cert;
  }

  bool have = false;
  Rat worst = 0;
  Json viol = Json::object();
  auto consider = [&](int ov, int o1, int o2, const Json& where) {
    Rat slack = ov - o1 - o2;
    if (!have || slack > worst) {
      worst = slack;
      have = true;
      viol = Json::object();
      viol["where"] = where;
      viol["ord_v"] = ov;
      viol["ord_u1"] = o1;
      viol["ord_u2"] = o2;
    }
  };

  if (!v.symbolic()) {
    for (int p = 0; p < v.space->num_points(); ++p)
      consider(ord_at(v, p), ord_at(u1, p), ord_at(u2, p), Json(p));
  } else {
    Cover combined = v;
    combined.label = "combined";
    for (const auto& s : u1.sets) combined.sets.push_back(s);
    for (const auto& s : u2.sets) combined.sets.push_back(s);
    for (const auto& x : arrangement_atoms(combined))
      consider(ord_at(v, x), ord_at(u1, x), ord_at(u2, x), rat_vec_json(x));
  }

  if (!have) throw InternalError("no evaluation point for the subadditivity check");
  w["worst_slack"] = rat_json(worst);
  if (worst > 0) w["violation"] = viol;
  cert.value = worst;
  cert.pass = worst <= 0;
  cert.verified = true;
  cert.witness = w;
  return cert;
}

namespace {

struct ArcPool {
  // arcs as atom index lists, each contained in some join set
  std::vector<std::vector<int>> arcs;
  std::vector<Bitset> arc_bits;
  std::vector<std::vector<int>> by_atom;  // pool indices containing each atom
};

ArcPool build_pool(const GroundSpace& sp, const std::vector<Bitset>& join_bits) {
  int n = sp.num_points();
  ArcPool pool;
  pool.by_atom.resize(n);
  auto admissible = [&](const Bitset& b) {
    for (const auto& jb : join_bits)
      if (b.subset_of(jb)) return true;
    return false;
  };
  auto push = [&](std::vector<int> atoms) {
    Bitset b(n);
    for (int a : atoms) b.set(a);
    if (!admissible(b)) return;
    int id = (int)pool.arcs.size();
    for (int a : atoms) pool.by_atom[a].push_back(id);
    pool.arcs.push_back(std::move(atoms));
    pool.arc_bits.push_back(std::move(b));
  };

  if (sp.kind == SpaceKind::Discrete) {
    for (int p = 0; p < n; ++p) push({p});
    return pool;
  }
  int max_len = sp.kind == SpaceKind::GridCycle ? n - 1 : n;
  for (int start = 0; start < n; ++start) {
    int limit = sp.kind == SpaceKind::GridInterval ? n - start : max_len;
    for (int len = 1; len <= limit; ++len) {
      std::vector<int> atoms(len);
      for (int i = 0; i < len; ++i) atoms[i] = (start + i) % n;
      push(std::move(atoms));
    }
  }
  return pool;
}

struct SubSearch {
  const ArcPool& pool;
  const std::vector<int>& cap;  // counts[p] may not exceed cap[p]
  int n;
  long long budget;
  long long nodes = 0;
  std::vector<int> counts;
  std::vector<int> chosen;
  bool done = false;
  bool out_of_budget = false;
  std::vector<int> solution;

  SubSearch(const ArcPool& pl, const std::vector<int>& cp, long long bud)
      : pool(pl), cap(cp), n((int)cp.size()), budget(bud), counts(n, 0) {}

  void run() { dfs(); }

  void dfs() {
    if (done || out_of_budget) return;
    int m = -1;
    for (int p = 0; p < n; ++p)
      if (counts[p] == 0) {
        m = p;
        break;
      }
    if (m < 0) {
      solution = chosen;
      done = true;
      return;
    }
    for (int id : pool.by_atom[m]) {
      if (++nodes > budget) {
        out_of_budget = true;
        return;
      }
      bool fits = true;
      for (int a : pool.arcs[id])
        if (counts[a] >= cap[a]) {
          fits = false;
          break;
        }
      if (!fits) continue;
      for (int a : pool.arcs[id]) ++counts[a];
      chosen.push_back(id);
      dfs();
      if (done) return;
      chosen.pop_back();
      for (int a : pool.arcs[id]) --counts[a];
      if (out_of_budget) return;
    }
  }
};

}  // namespace

SubadditiveSearchResult subadditive_search(const Cover& u1, const Cover& u2, long long budget) {
  if (u1.symbolic() || u2.symbolic())
    throw ValidationError("subadditive search needs sampled covers");
  if (u1.space != u2.space) throw ValidationError("covers live on different spaces");
  u1.validate(true);
  u2.validate(true);
  const GroundSpace& sp = *u1.space;
  int n = sp.num_points();

  Cover join = joint_refinement(u1, u2);
  std::vector<Bitset> join_bits;
  for (const auto& s : join.sets) join_bits.push_back(set_bits_on_space(sp, s));

  std::vector<int> cap(n);
  for (int p = 0; p < n; ++p) cap[p] = ord_at(u1, p) + ord_at(u2, p) + 1;

  ArcPool pool = build_pool(sp, join_bits);
  SubSearch search(pool, cap, budget);
  search.run();

  SubadditiveSearchResult res;
  if (search.done) {
    std::vector<SetExpr> sets;
    for (int id : search.solution) sets.push_back(SetExpr::from_bits(pool.arc_bits[id]));
    res.v = make_bitset_cover(u1.space, std::move(sets), "subadditive_v");
    res.cert = verify_subadditive(res.v, u1, u2);
    res.found = res.cert.pass;
    return res;
  }

  res.found = false;
  res.cert.kind = CertKind::PassFail;
  res.cert.quantity = "subadditive_order_bound";
  res.cert.pass = false;
  res.cert.verified = false;
  res.cert.witness["reason"] = search.out_of_budget ? "budget exhausted" : "candidate pool exhausted";
  res.cert.witness["nodes"] = search.nodes;
  return res;
}

}  // namespace dyndim
