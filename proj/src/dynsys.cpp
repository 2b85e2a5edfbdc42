#include "dyndim/dynsys.hpp"

#include <algorithm>
#include <map>
#include <queue>
#include <set>

#include "dyndim/error.hpp"

namespace dyndim {

std::string group_kind_name(GroupKind k) {
  switch (k) {
    case GroupKind::Trivial: return "trivial";
    case GroupKind::Z: return "Z";
    case GroupKind::Zk: return "Zk";
    case GroupKind::Finite: return "finite";
    case GroupKind::Free: return "free";
  }
  throw InternalError("bad group kind");
}

GroupKind group_kind_from_name(const std::string& s) {
  if (s == "trivial") return GroupKind::Trivial;
  if (s == "Z") return GroupKind::Z;
  if (s == "Zk") return GroupKind::Zk;
  if (s == "finite") return GroupKind::Finite;
  if (s == "free") return GroupKind::Free;
  throw ValidationError("unknown group kind: " + s);
}

namespace {

bool is_permutation(const std::vector<int>& p, int n) {
  if ((int)p.size() != n) return false;
  std::vector<char> seen(n, 0);
  for (int v : p) {
    if (v < 0 || v >= n || seen[v]) return false;
    seen[v] = 1;
  }
  return true;
}

std::vector<int> invert(const std::vector<int>& p) {
  std::vector<int> inv(p.size());
  for (int i = 0; i < (int)p.size(); ++i) inv[p[i]] = i;
  return inv;
}

std::vector<int> compose(const std::vector<int>& outer, const std::vector<int>& inner) {
  std::vector<int> r(inner.size());
  for (int i = 0; i < (int)inner.size(); ++i) r[i] = outer[inner[i]];
  return r;
}

}  // namespace

void FinitePermSystem::validate() {
  if (!space) throw ValidationError("system needs a space");
  space->validate();
  int n = space->num_points();
  int expect_rank = (int)gens.size();
  if (group.rank != expect_rank)
    throw ValidationError("generator count does not match the group spec");
  switch (group.kind) {
    case GroupKind::Trivial:
      if (group.rank != 0) throw ValidationError("trivial group takes no generators");
      break;
    case GroupKind::Z:
      if (group.rank != 1) throw ValidationError("Z takes exactly one generator");
      break;
    case GroupKind::Zk:
      if (group.rank < 1) throw ValidationError("Zk needs at least one generator");
      break;
    case GroupKind::Finite:
      if ((int)group.orders.size() != group.rank)
        throw ValidationError("finite group needs one declared order per generator");
      break;
    case GroupKind::Free:
      if (group.rank < 1 || group.rank > 2)
        throw ValidationError("free groups are supported on one or two generators");
      break;
  }
  for (const auto& g : gens)
    if (!is_permutation(g, n)) throw ValidationError("generator is not a permutation");
  gen_inv.clear();
  for (const auto& g : gens) gen_inv.push_back(invert(g));

  if (group.kind == GroupKind::Zk) {
    for (std::size_t i = 0; i < gens.size(); ++i)
      for (std::size_t j = i + 1; j < gens.size(); ++j)
        if (compose(gens[i], gens[j]) != compose(gens[j], gens[i]))
          throw ValidationError("Zk generators must commute");
  }
  if (group.kind == GroupKind::Finite) {
    for (std::size_t i = 0; i < gens.size(); ++i) {
      if (group.orders[i] < 1) throw ValidationError("generator order must be positive");
      std::vector<int> pow(n);
      for (int p = 0; p < n; ++p) pow[p] = p;
      for (int k = 0; k < group.orders[i]; ++k) pow = compose(gens[i], pow);
      for (int p = 0; p < n; ++p)
        if (pow[p] != p) throw ValidationError("declared generator order does not hold");
    }
  }

  // On a grid complex, homeomorphisms are exactly the cell automorphisms:
  // atom types and adjacency must be preserved.
  if (space->has_cells()) {
    for (const auto& g : gens) {
      for (int p = 0; p < n; ++p) {
        if (space->is_vertex_atom(p) != space->is_vertex_atom(g[p]))
          throw ValidationError("generator does not preserve atom types on the complex");
        for (int q : space->adjacent_atoms(p)) {
          auto adj = space->adjacent_atoms(g[p]);
          if (std::find(adj.begin(), adj.end(), g[q]) == adj.end())
            throw ValidationError("generator does not preserve cell incidence");
        }
      }
    }
  }
  if (isometry_flag) {
    for (const auto& g : gens)
      for (int p = 0; p < n; ++p)
        for (int q = p + 1; q < n; ++q)
          if (space->distance(g[p], g[q]) != space->distance(p, q))
            throw ValidationError("generator fails the declared isometry property");
  }
}

int FinitePermSystem::apply_gen(int letter, int p) const {
  if (letter >= 0) {
    if (letter >= (int)gens.size()) throw ValidationError("generator index out of range");
    return gens[letter][p];
  }
  int g = -letter - 1;
  if (g >= (int)gen_inv.size()) throw InternalError("inverse tables missing; validate() first");
  return gen_inv[g][p];
}

int FinitePermSystem::apply_word(const Word& w, int p) const {
  for (auto it = w.letters.rbegin(); it != w.letters.rend(); ++it) p = apply_gen(*it, p);
  return p;
}

FinitePermSystem make_trivial_system(std::shared_ptr<const GroundSpace> sp) {
  FinitePermSystem sys;
  sys.space = std::move(sp);
  sys.group.kind = GroupKind::Trivial;
  sys.group.rank = 0;
  sys.validate();
  return sys;
}

FinitePermSystem make_z_system(std::shared_ptr<const GroundSpace> sp, std::vector<int> perm) {
  FinitePermSystem sys;
  sys.space = std::move(sp);
  sys.group.kind = GroupKind::Z;
  sys.group.rank = 1;
  sys.gens.push_back(std::move(perm));
  sys.validate();
  return sys;
}

FinitePermSystem make_cyclic_system(std::shared_ptr<const GroundSpace> sp, std::vector<int> perm,
                                    int order) {
  FinitePermSystem sys;
  sys.space = std::move(sp);
  sys.group.kind = GroupKind::Finite;
  sys.group.rank = 1;
  sys.group.orders = {order};
  sys.gens.push_back(std::move(perm));
  sys.validate();
  return sys;
}

std::vector<GroupElement> enumerate_group(const FinitePermSystem& sys, long long max_elems) {
  int n = sys.num_points();
  std::vector<int> id(n);
  for (int i = 0; i < n; ++i) id[i] = i;

  std::vector<int> letters;
  for (int g = 0; g < (int)sys.gens.size(); ++g) letters.push_back(g);
  for (int g = 0; g < (int)sys.gens.size(); ++g) letters.push_back(-g - 1);

  std::vector<GroupElement> out;
  std::map<std::vector<int>, std::size_t> seen;
  out.push_back({Word{}, id});
  seen[id] = 0;
  for (std::size_t head = 0; head < out.size(); ++head) {
    // copy: out may grow and relocate
    GroupElement cur = out[head];
    for (int l : letters) {
      std::vector<int> img(n);
      for (int p = 0; p < n; ++p) img[p] = cur.perm[sys.apply_gen(l, p)];
      if (seen.count(img)) continue;
      if ((long long)out.size() >= max_elems)
        throw BudgetError("group image enumeration budget exceeded");
      Word w = cur.word;
      w.letters.push_back(l);
      seen[img] = out.size();
      out.push_back({std::move(w), std::move(img)});
    }
  }
  return out;
}

std::vector<std::vector<int>> orbits(const FinitePermSystem& sys) {
  int n = sys.num_points();
  std::vector<char> seen(n, 0);
  std::vector<std::vector<int>> out;
  for (int start = 0; start < n; ++start) {
    if (seen[start]) continue;
    std::set<int> orb;
    std::queue<int> q;
    q.push(start);
    orb.insert(start);
    while (!q.empty()) {
      int p = q.front();
      q.pop();
      for (std::size_t g = 0; g < sys.gens.size(); ++g) {
        for (int im : {sys.gens[g][p], sys.gen_inv[g][p]})
          if (orb.insert(im).second) q.push(im);
      }
    }
    for (int p : orb) seen[p] = 1;
    out.emplace_back(orb.begin(), orb.end());
  }
  return out;
}

void InvariantMeasure::validate() const {
  Rat total(0);
  for (const auto& w : orbit_weights) {
    if (w < 0) throw ValidationError("negative orbit weight");
    total += w;
  }
  if (total != 1) throw ValidationError("orbit weights must sum to one");
}

std::vector<Rat> InvariantMeasure::point_masses(const std::vector<std::vector<int>>& orbs,
                                                int n) const {
  if (orbs.size() != orbit_weights.size())
    throw ValidationError("weight count does not match orbit count");
  std::vector<Rat> mass(n, Rat(0));
  for (std::size_t i = 0; i < orbs.size(); ++i) {
    Rat per = orbit_weights[i] / Rat((long long)orbs[i].size());
    for (int p : orbs[i]) mass[p] = per;
  }
  return mass;
}

Rat measure_of_set(const FinitePermSystem& sys, const std::vector<std::vector<int>>& orbs,
                   const InvariantMeasure& mu, const SetExpr& a) {
  Bitset bits = set_bits_on_space(*sys.space, a);
  auto mass = mu.point_masses(orbs, sys.num_points());
  Rat total(0);
  for (int p : bits.members()) total += mass[p];
  return total;
}

Rat capacity(const FinitePermSystem& sys, const SetExpr& a) {
  Bitset bits = set_bits_on_space(*sys.space, a);
  Rat best(0);
  for (const auto& orb : orbits(sys)) {
    int hit = 0;
    for (int p : orb)
      if (bits.test(p)) ++hit;
    Rat frac(hit, (long long)orb.size());
    best = std::max(best, frac);
  }
  return best;
}

Certificate capacity_ball_limit_check(const FinitePermSystem& sys, const SetExpr& k,
                                      const std::vector<Rat>& deltas) {
  for (std::size_t i = 0; i + 1 < deltas.size(); ++i)
    if (!(deltas[i] > deltas[i + 1])) throw ValidationError("deltas must strictly decrease");
  for (const auto& d : deltas)
    if (d <= 0) throw ValidationError("deltas must be positive");

  const GroundSpace& sp = *sys.space;
  int n = sp.num_points();
  Bitset kb = set_bits_on_space(sp, k);
  Rat cap_k = capacity(sys, k);

  // least positive distance from a point outside K to K; stabilization holds
  // for any delta at or below it
  std::optional<Rat> threshold;
  std::vector<std::optional<Rat>> dist_to_k(n);
  for (int p = 0; p < n; ++p) {
    if (kb.test(p)) {
      dist_to_k[p] = Rat(0);
      continue;
    }
    std::optional<Rat> best;
    for (int q : kb.members()) {
      Rat d = sp.distance(p, q);
      if (!best || d < *best) best = d;
    }
    dist_to_k[p] = best;  // empty K leaves it unset: the ball is then empty
    if (best && (!threshold || *best < *threshold)) threshold = best;
  }

  Certificate cert;
  cert.kind = CertKind::PassFail;
  cert.quantity = "capacity_ball_limit";
  cert.value = cap_k;
  cert.witness["capacity_k"] = rat_str(cap_k);
  cert.witness["threshold"] = threshold ? Json(rat_str(*threshold)) : Json(nullptr);

  bool pass = true;
  bool stabilized = false;
  Json rows = Json::array();
  std::optional<Rat> prev;
  for (const auto& d : deltas) {
    Bitset ball(n);
    for (int p = 0; p < n; ++p)
      if (dist_to_k[p] && *dist_to_k[p] < d) ball.set(p);
    Rat cap_d = capacity(sys, SetExpr::from_bits(ball));
    Json row;
    row["delta"] = rat_str(d);
    row["capacity"] = rat_str(cap_d);
    rows.push_back(row);
    if (cap_d < cap_k) pass = false;                   // balls contain K
    if (prev && cap_d > *prev) pass = false;           // monotone along shrinking deltas
    if (!threshold || d <= *threshold) {
      if (cap_d != cap_k) pass = false;                // exact stabilization
      stabilized = true;
    }
    prev = cap_d;
  }
  if (!stabilized) pass = false;  // no delta reached the stabilization regime
  cert.witness["steps"] = rows;
  cert.witness["stabilized"] = stabilized;
  cert.pass = pass;
  cert.verified = true;
  return cert;
}

FiberProduct fiber_product(const FinitePermSystem& sys, const ObsValues& f, bool orbit_matching) {
  int n = sys.num_points();
  if ((int)f.size() != n) throw ValidationError("observable must assign a value to every point");
  for (const auto& v : f)
    if (v.size() != f[0].size()) throw ValidationError("ragged observable tuples");

  FiberProduct fp;
  fp.orbit_matching = orbit_matching;
  if (!orbit_matching) {
    for (int x = 0; x < n; ++x)
      for (int y = 0; y < n; ++y)
        if (f[x] == f[y]) fp.pairs.emplace_back(x, y);
    return fp;
  }
  // signature of a point: observable values along the whole group image, in
  // canonical element order
  auto elems = enumerate_group(sys);
  std::vector<std::vector<const std::vector<Rat>*>> sig(n);
  for (int x = 0; x < n; ++x) {
    sig[x].reserve(elems.size());
    for (const auto& e : elems) sig[x].push_back(&f[e.perm[x]]);
  }
  auto sig_eq = [&](int x, int y) {
    for (std::size_t i = 0; i < elems.size(); ++i)
      if (*sig[x][i] != *sig[y][i]) return false;
    return true;
  };
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y)
      if (sig_eq(x, y)) fp.pairs.emplace_back(x, y);
  return fp;
}

AlmostEmbeddingResult almost_embedding_check(const FinitePermSystem& sys, const FiberProduct& fp) {
  std::set<std::pair<int, int>> inside(fp.pairs.begin(), fp.pairs.end());
  AlmostEmbeddingResult res;
  res.cert.kind = CertKind::PassFail;
  res.cert.quantity = "almost_embedding";
  res.cert.witness["pairs"] = (long long)fp.pairs.size();
  res.cert.witness["orbit_matching"] = fp.orbit_matching;

  for (const auto& pr : fp.pairs) {
    if (pr.first == pr.second) continue;
    // product orbit of the pair; every orbit fully inside the fiber product
    // supports an off-diagonal invariant measure
    std::set<std::pair<int, int>> orb{pr};
    std::queue<std::pair<int, int>> q;
    q.push(pr);
    bool contained = true;
    while (!q.empty() && contained) {
      auto [x, y] = q.front();
      q.pop();
      for (std::size_t g = 0; g < sys.gens.size(); ++g) {
        std::pair<int, int> ims[2] = {{sys.gens[g][x], sys.gens[g][y]},
                                      {sys.gen_inv[g][x], sys.gen_inv[g][y]}};
        for (const auto& im : ims) {
          if (!inside.count(im)) {
            contained = false;
            break;
          }
          if (orb.insert(im).second) q.push(im);
        }
        if (!contained) break;
      }
    }
    if (contained) {
      res.ok = false;
      res.cert.pass = false;
      res.cert.verified = true;
      res.cert.witness["witness_pair"] = Json::array({pr.first, pr.second});
      res.cert.witness["witness_orbit_size"] = (long long)orb.size();
      return res;
    }
  }
  res.ok = true;
  res.cert.pass = true;
  res.cert.verified = true;
  return res;
}

bool distal_check(const FinitePermSystem& sys) {
  auto elems = enumerate_group(sys);
  int n = sys.num_points();
  for (int x = 0; x < n; ++x)
    for (int y = x + 1; y < n; ++y)
      for (const auto& e : elems)
        if (e.perm[x] == e.perm[y]) return false;  // unreachable for bijections
  return true;
}

// --- SFT --------------------------------------------------------------------

void SftSystem::validate() const {
  if (alphabet < 1) throw ValidationError("alphabet must be nonempty");
  if (window < 1) throw ValidationError("window must be positive");
  for (const auto& w : forbidden) {
    if (w.empty()) throw ValidationError("forbidden word cannot be empty");
    if ((int)w.size() > window)
      throw ValidationError("window shorter than a forbidden word");
    for (int s : w)
      if (s < 0 || s >= alphabet) throw ValidationError("forbidden word symbol out of range");
  }
  // nonempty language: the allowed-block de Bruijn graph must keep a cycle
  // after trimming sources and sinks
  auto blocks = allowed_blocks();
  if (blocks.empty()) throw ValidationError("no allowed block: empty subshift");
  std::map<std::vector<int>, int> node_id;
  auto node_of = [&](const std::vector<int>& w) {
    auto it = node_id.find(w);
    if (it != node_id.end()) return it->second;
    int id = (int)node_id.size();
    node_id.emplace(w, id);
    return id;
  };
  std::vector<std::pair<int, int>> edges;
  for (const auto& b : blocks) {
    std::vector<int> pre(b.begin(), b.end() - 1), suf(b.begin() + 1, b.end());
    edges.emplace_back(node_of(pre), node_of(suf));
  }
  int m = (int)node_id.size();
  while (true) {
    std::vector<int> out_deg(m, 0), in_deg(m, 0);
    for (auto [a, b] : edges) {
      ++out_deg[a];
      ++in_deg[b];
    }
    std::vector<std::pair<int, int>> kept;
    for (auto [a, b] : edges)
      if (out_deg[b] > 0 && in_deg[a] > 0) kept.emplace_back(a, b);
    if (kept.size() == edges.size()) break;
    edges = std::move(kept);
  }
  if (edges.empty()) throw ValidationError("empty subshift: no bi-infinite point");
}

bool SftSystem::block_allowed(const std::vector<int>& block) const {
  for (const auto& w : forbidden) {
    if (w.size() > block.size()) continue;
    for (std::size_t i = 0; i + w.size() <= block.size(); ++i)
      if (std::equal(w.begin(), w.end(), block.begin() + i)) return false;
  }
  return true;
}

std::vector<std::vector<int>> SftSystem::allowed_blocks() const {
  long long total = 1;
  for (int i = 0; i < window; ++i) {
    total *= alphabet;
    if (total > 2'000'000) throw BudgetError("block enumeration budget exceeded");
  }
  std::vector<std::vector<int>> out;
  std::vector<int> cur(window, 0);
  while (true) {
    if (block_allowed(cur)) out.push_back(cur);
    int i = window - 1;
    while (i >= 0 && ++cur[i] == alphabet) {
      cur[i] = 0;
      --i;
    }
    if (i < 0) break;
  }
  return out;
}

}  // namespace dyndim
