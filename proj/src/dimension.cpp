#include "dyndim/dimension.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <string>

#include "dyndim/ergopt.hpp"
#include "dyndim/error.hpp"
#include "dyndim/jsonio.hpp"

namespace dyndim {

namespace {

void require_sampled_on(const FinitePermSystem& sys, const Cover& u, const char* what) {
  if (u.symbolic() || u.space != sys.space)
    throw ValidationError(std::string(what) + " needs a cover sampled on the system's space");
}

std::vector<int> word_perm(const FinitePermSystem& sys, const Word& w) {
  int n = sys.num_points();
  std::vector<int> t(n);
  for (int p = 0; p < n; ++p) t[p] = sys.apply_word(w, p);
  return t;
}

Bitset image_bits(const std::vector<int>& perm, const Bitset& b) {
  Bitset out(b.size());
  for (int p : b.members()) out.set(perm[p]);
  return out;
}

// atoms of b with a cell-structure neighbor outside b
Bitset boundary_bits(const GroundSpace& sp, const Bitset& b) {
  Bitset out(b.size());
  for (int p : b.members())
    for (int q : sp.adjacent_atoms(p))
      if (!b.test(q)) {
        out.set(p);
        break;
      }
  return out;
}

struct JunctionCover {
  Cover cover;
  std::vector<int> junctions;
};

// Two closed arcs meeting only at vertex atoms. On a cycle the pair of
// junction vertices is chosen in different orbits, so each junction is the
// only order-1 point on its orbit; an interval has a single junction and
// needs no such care.
JunctionCover junction_arc_cover(const FinitePermSystem& sys,
                                 const std::vector<GroupElement>& elems) {
  const GroundSpace& sp = *sys.space;
  int g = sp.granularity;
  if (g < 2) throw ValidationError("a junction cover needs at least two grid cells");

  auto closed_run = [&](const std::vector<int>& cells) {
    return SetExpr::from_cells_closed(sp, cells);
  };

  if (sp.kind == SpaceKind::GridInterval) {
    std::vector<int> c1{0}, c2;
    for (int c = 1; c < g; ++c) c2.push_back(c);
    Cover u = make_bitset_cover(sys.space, {closed_run(c1), closed_run(c2)}, "junction_arcs");
    return {u, {2}};
  }
  if (sp.kind != SpaceKind::GridCycle)
    throw ValidationError("junction covers live on grid cycles or intervals");

  for (int a_cell = 0; a_cell < g; ++a_cell)
    for (int b_cell = a_cell + 1; b_cell < g; ++b_cell) {
      int a = 2 * a_cell, b = 2 * b_cell;
      bool same_orbit = false;
      for (const auto& e : elems) same_orbit = same_orbit || e.perm[a] == b;
      if (same_orbit) continue;
      std::vector<int> c1, c2;
      for (int c = a_cell; c < b_cell; ++c) c1.push_back(c);
      for (int c = b_cell; c < g; ++c) c2.push_back(c);
      for (int c = 0; c < a_cell; ++c) c2.push_back(c);
      Cover u = make_bitset_cover(sys.space, {closed_run(c1), closed_run(c2)}, "junction_arcs");
      return {u, {a, b}};
    }
  throw ValidationError("no junction pair avoids its translates at this granularity");
}

Certificate trivial_lower_cert() {
  Certificate c;
  c.kind = CertKind::LowerBound;
  c.quantity = "dim_U_T";
  c.value = 0;
  c.pass = true;
  c.verified = true;
  c.witness["argument"] =
      "ord of a covering family is nonnegative, and a finite permutation system "
      "always carries an invariant measure";
  return c;
}

}  // namespace

Cover translate_cover(const FinitePermSystem& sys, const Cover& u, const Word& w) {
  require_sampled_on(sys, u, "translate_cover");
  auto perm = word_perm(sys, w);
  std::vector<SetExpr> sets;
  for (const auto& s : u.sets)
    sets.push_back(SetExpr::from_bits(image_bits(perm, set_bits_on_space(*sys.space, s)), s.open));
  return make_bitset_cover(sys.space, std::move(sets), u.label + "_t");
}

Certificate dim_U_T_upper(const FinitePermSystem& sys, const Cover& u, const Cover& v) {
  require_sampled_on(sys, u, "dim_U_T_upper");
  require_sampled_on(sys, v, "dim_U_T_upper");
  u.validate(true);
  v.validate(true);
  int bad = -1;
  if (!refines(v, u, &bad))
    throw ValidationError("refinement fails: set #" + std::to_string(bad) +
                          " of the candidate cover lies in no set of the base cover");
  Rat val = ord_T(sys, v);

  Certificate c;
  c.kind = CertKind::UpperBound;
  c.quantity = "dim_U_T";
  c.value = val;
  c.pass = true;
  c.verified = true;
  c.witness["base_cover"] = u.label;
  c.witness["refinement"] = v.label;
  c.witness["refinement_sets"] = (int)v.sets.size();
  c.witness["ord_T_of_refinement"] = rat_json(val);
  c.witness["ord_sup_of_refinement"] = ord_sup(v);
  c.witness["argument"] =
      "v refines u, so dim(u,T) <= ord_T(v); ord_T is the best orbit average of ord(v,.)";
  return c;
}

Certificate dim_U_T_lower_dim1(const FinitePermSystem& sys, const Cover& u,
                               SearchBudget* budget) {
  require_sampled_on(sys, u, "dim_U_T_lower_dim1");
  u.validate(true);
  const GroundSpace& sp = *sys.space;
  if (sp.kind == SpaceKind::Discrete)
    throw ValidationError(
        "the connectivity lower bound needs a 1-dimensional complex (grid cycle or interval)");
  int n = sp.num_points();
  for (size_t i = 0; i < u.sets.size(); ++i)
    if (set_bits_on_space(sp, u.sets[i]).count() == n)
      throw ValidationError("cover set #" + std::to_string(i) +
                            " contains the whole space; the connectivity bound needs proper sets");

  BruteforceResult br = dim_of_cover_bruteforce(u, budget);
  if (br.value < 1)
    throw InternalError("proper closed cell covers of a connected 1-complex cannot be disjoint");

  int k = 1;
  for (const auto& o : orbits(sys)) k = std::max(k, (int)o.size());

  Certificate c;
  c.kind = CertKind::LowerBound;
  c.quantity = "dim_U_T";
  c.value = Rat(br.value, k);
  c.pass = true;
  c.verified = true;
  c.witness["refinement_min_ord"] = br.value;
  c.witness["max_orbit_size"] = k;
  c.witness["minimizing_cover_sets"] = (int)br.witness.sets.size();
  c.witness["candidate_class"] =
      "covers by unions of closed grid cells, each contained in a set of the base cover";
  c.witness["argument"] =
      "the exhausted search shows every candidate refinement has a point of order >= the "
      "minimum; the uniform measure on that point's orbit is invariant and integrates "
      "ord to at least min/orbit size";
  return c;
}

Certificate lemma92_check(const FinitePermSystem& sys, const Cover& u, const KSetFamily& kf,
                          int d) {
  require_sampled_on(sys, u, "lemma92_check");
  u.validate(true);
  if (d < 0) throw ValidationError("the declared order bound must be nonnegative");
  if ((int)kf.rows.size() > d) throw ValidationError("more K rows than the declared bound");
  const GroundSpace& sp = *sys.space;
  int n = sp.num_points();

  Certificate c;
  c.kind = CertKind::UpperBound;
  c.quantity = "ord_T";
  c.value = d;
  c.verified = true;

  std::vector<std::vector<Bitset>> kb(kf.rows.size());
  for (size_t j = 0; j < kf.rows.size(); ++j)
    for (const auto& entry : kf.rows[j]) {
      if (entry.second.open) throw ValidationError("K sets must be closed");
      kb[j].push_back(set_bits_on_space(sp, entry.second));
    }

  for (int p = 0; p < n; ++p) {
    int o = ord_at(u, p);
    int s = 0;
    for (const auto& row : kb)
      for (const auto& b : row) s += b.test(p) ? 1 : 0;
    if (o > s) {
      c.pass = false;
      c.witness["failed"] = "pointwise order bound";
      c.witness["point"] = p;
      c.witness["ord"] = o;
      c.witness["indicator_sum"] = s;
      return c;
    }
  }

  for (size_t j = 0; j < kf.rows.size(); ++j) {
    std::vector<Bitset> tr;
    for (size_t i = 0; i < kf.rows[j].size(); ++i)
      tr.push_back(image_bits(word_perm(sys, kf.rows[j][i].first), kb[j][i]));
    for (size_t a = 0; a + 1 < tr.size(); ++a)
      for (size_t b = a + 1; b < tr.size(); ++b)
        if (tr[a].intersects(tr[b])) {
          Bitset meet = tr[a] & tr[b];
          c.pass = false;
          c.witness["failed"] = "translate disjointness";
          c.witness["row"] = (int)j;
          c.witness["first"] = (int)a;
          c.witness["second"] = (int)b;
          c.witness["point"] = meet.members().front();
          return c;
        }
  }

  int total = 0;
  for (const auto& row : kb) total += (int)row.size();
  c.pass = true;
  c.witness["rows"] = (int)kf.rows.size();
  c.witness["k_sets"] = total;
  c.witness["argument"] =
      "each row's translates are pairwise disjoint, so invariance caps the row's K masses "
      "at one under any invariant measure; integrating the pointwise bound gives ord_T(u) <= d";
  return c;
}

Certificate cubical_shift_upper(int d, int n, const Rat& eps, long long atom_cap) {
  if (d < 1 || n < 1) throw ValidationError("the cubical shift needs d >= 1 and n >= 1");
  Rat zero(0), one(1);
  if (!(eps > zero) || eps > one) throw ValidationError("eps must lie in (0, 1]");
  int axes = d * n;
  if (axes > 4)
    throw BudgetError("cubical shift arrangement with " + std::to_string(axes) +
                      " axes exceeds the supported bound of 4");

  Box bounding(axes, Interval{Rat(0), Rat(1)});
  BrickwallCover bw = build_brickwall(axes, eps, bounding);
  Certificate base = verify_brickwall(bw, atom_cap);

  Certificate c;
  c.kind = CertKind::UpperBound;
  c.quantity = "cubical_shift_dim";
  c.value = d;
  c.verified = true;

  if (!base.pass) {
    c.pass = false;
    c.witness["failed"] = "brickwall certificate";
    c.witness["brickwall"] = base.to_json();
    return c;
  }

  // Row j owns axes j*n .. j*n+n-1. The g-shift carries
  // K(j,g) = {x : x(j,(n-g) mod n) in A(j,g)} onto {x : x(j,0) in A(j,g)},
  // so per-row disjointness of the lattice values makes the translates
  // pairwise disjoint.
  for (int j = 0; j < d; ++j) {
    std::vector<std::vector<Rat>> pts(n);
    for (int m = 0; m < n; ++m) pts[m] = bw.lattice[j * n + m].points_in(Rat(0), Rat(1));
    for (int a = 0; a + 1 < n; ++a)
      for (int b = a + 1; b < n; ++b)
        for (const Rat& x : pts[a])
          if (std::binary_search(pts[b].begin(), pts[b].end(), x)) {
            c.pass = false;
            c.witness["failed"] = "lattice disjointness";
            c.witness["row"] = j;
            c.witness["first_axis"] = j * n + a;
            c.witness["second_axis"] = j * n + b;
            c.witness["value"] = rat_json(x);
            return c;
          }
  }

  c.pass = true;
  c.witness["model"] = "([0,1]^d)^(Z/n) with the left shift";
  c.witness["d"] = d;
  c.witness["n"] = n;
  c.witness["epsilon"] = rat_json(eps);
  c.witness["axes"] = axes;
  c.witness["coordinate_layout"] = "coordinate (j,m) sits on axis j*n+m";
  c.witness["k_set_rule"] =
      "K(j,g) tests coordinate (j,(n-g) mod n) against the lattice of its own axis; the "
      "g-shift moves every K(j,g) onto a condition on coordinate (j,0)";
  c.witness["order_bound"] =
      "ord(cover,x) <= sum over axes of 1[lattice contains coordinate], certified on every "
      "arrangement atom, equals the total K indicator sum";
  c.witness["brickwall"] = base.to_json();
  return c;
}

Certificate cubical_shift_fixed_lower(int n, const Rat& eps, long long cell_cap) {
  if (n < 1) throw ValidationError("the cycle length must be positive");
  Rat zero(0), one(1);
  if (!(eps > zero) || !(eps < one))
    throw ValidationError("eps must lie in (0, 1) so diagonal traces are proper");
  if (n > 4)
    throw BudgetError("diagonal trace enumeration with " + std::to_string(n) +
                      " axes exceeds the supported bound of 4");

  Box bounding(n, Interval{Rat(0), Rat(1)});
  BrickwallCover bw = build_brickwall(n, eps, bounding);
  std::vector<Box> cells = materialize_cells(bw, cell_cap);

  std::vector<Interval> traces;
  Rat maxlen(0);
  for (const auto& cell : cells) {
    Rat lo = cell[0].lo, hi = cell[0].hi;
    for (int a = 1; a < n; ++a) {
      Rat l = cell[a].lo;
      Rat h = cell[a].hi;
      if (l > lo) lo = l;
      if (h < hi) hi = h;
    }
    if (lo < zero) lo = zero;
    if (hi > one) hi = one;
    if (lo <= hi) {
      traces.push_back({lo, hi});
      Rat len = hi - lo;
      if (len > maxlen) maxlen = len;
    }
  }
  if (!(maxlen < one)) throw InternalError("a diagonal trace spans the whole interval");

  std::vector<Rat> cuts{zero, one};
  for (const auto& t : traces) {
    cuts.push_back(t.lo);
    cuts.push_back(t.hi);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  std::vector<Rat> reps;
  for (size_t i = 0; i < cuts.size(); ++i) {
    reps.push_back(cuts[i]);
    if (i + 1 < cuts.size()) {
      Rat mid = (cuts[i] + cuts[i + 1]) / 2;
      reps.push_back(mid);
    }
  }

  Rat star(0);
  int first = -1, second = -1;
  bool have = false;
  for (const Rat& t : reps) {
    int count = 0, ia = -1, ib = -1;
    for (size_t i = 0; i < traces.size(); ++i)
      if (traces[i].lo <= t && t <= traces[i].hi) {
        ++count;
        if (ia < 0)
          ia = (int)i;
        else if (ib < 0)
          ib = (int)i;
      }
    if (count == 0) throw InternalError("diagonal point escapes every cell trace");
    if (count >= 2 && !have) {
      star = t;
      first = ia;
      second = ib;
      have = true;
    }
  }
  if (!have) throw InternalError("trace cover of the diagonal has no double point");

  Certificate c;
  c.kind = CertKind::LowerBound;
  c.quantity = "cubical_shift_dim";
  c.value = 1;
  c.pass = true;
  c.verified = true;
  c.witness["n"] = n;
  c.witness["epsilon"] = rat_json(eps);
  c.witness["trace_count"] = (int)traces.size();
  c.witness["max_trace_length"] = rat_json(maxlen);
  c.witness["double_point"] = rat_json(star);
  c.witness["containing_traces"] = Json::array({first, second});
  c.witness["argument"] =
      "points with all coordinates equal are shift-fixed; the cover traces to proper closed "
      "intervals on the diagonal, any refinement inherits properness, a connected interval "
      "forces a double point, and the Dirac measure at a fixed point is invariant";
  return c;
}

Certificate thm71_check(const FinitePermSystem& sys) {
  if (!sys.space || !sys.space->has_cells())
    throw ValidationError("the finite-group formula needs a grid cycle or interval");
  auto elems = enumerate_group(sys);
  int k = (int)elems.size();
  int n = sys.num_points();
  for (const auto& e : elems) {
    if (e.word.letters.empty()) continue;
    for (int p = 0; p < n; ++p)
      if (e.perm[p] == p)
        throw ValidationError("action is not free: a non-identity element fixes point " +
                              std::to_string(p));
  }

  JunctionCover jc = junction_arc_cover(sys, elems);
  Certificate lower = dim_U_T_lower_dim1(sys, jc.cover);
  Certificate upper = dim_U_T_upper(sys, jc.cover, jc.cover);
  Rat target(1, k);

  Certificate c;
  c.kind = CertKind::Equality;
  c.quantity = "dim_X_T";
  c.value = target;
  c.verified = true;
  c.pass = (lower.value == target && upper.value == target);
  c.witness["group_order"] = k;
  c.witness["space_dim"] = 1;
  c.witness["junction_atoms"] = Json(jc.junctions);
  c.witness["lower"] = lower.to_json();
  c.witness["upper"] = upper.to_json();
  if (!c.pass) c.witness["failed"] = "certificates do not meet at dim(X)/|G|";
  return c;
}

Certificate sbp_witness_search(const FinitePermSystem& sys, const Rat& eps,
                               SearchBudget* budget) {
  Rat zero(0);
  if (!(eps > zero)) throw ValidationError("eps must be positive");
  const GroundSpace& sp = *sys.space;
  int n = sp.num_points();

  Certificate c;
  c.kind = CertKind::PassFail;
  c.quantity = "small_boundary_capacity";
  c.verified = true;

  if (sp.kind == SpaceKind::Discrete) {
    // singletons are clopen: empty boundaries, mesh zero
    c.pass = true;
    c.value = 0;
    c.witness["cover"] = "singletons";
    c.witness["set_count"] = n;
    c.witness["boundary_atoms"] = 0;
    c.witness["boundary_capacity"] = rat_json(Rat(0));
    c.witness["exhaustive"] = true;
    return c;
  }

  int g = sp.granularity;
  bool is_cycle = (sp.kind == SpaceKind::GridCycle);
  Cover ctx;
  ctx.space = sys.space;

  struct Arc {
    int start = 0, len = 0;
    Bitset bits, boundary;
  };
  std::vector<Arc> pool;
  std::set<Bitset> seen;
  for (int start = 0; start < g; ++start)
    for (int len = 1; len <= g; ++len) {
      if (!is_cycle && start + len > g) break;
      std::vector<int> cells;
      for (int i = 0; i < len; ++i) cells.push_back(is_cycle ? (start + i) % g : start + i);
      SetExpr s = SetExpr::from_cells_closed(sp, cells);
      if (!(set_diameter(ctx, s) < eps)) continue;
      Bitset bits = set_bits_on_space(sp, s);
      if (!seen.insert(bits).second) continue;  // full-cycle runs repeat per start
      pool.push_back({start, len, bits, boundary_bits(sp, bits)});
    }

  std::vector<std::vector<int>> by_atom(n);
  for (size_t i = 0; i < pool.size(); ++i)
    for (int p : pool[i].bits.members()) by_atom[p].push_back((int)i);

  SearchBudget local;
  if (!budget) budget = &local;
  Rat best_cap = eps;
  bool found = false, budget_hit = false;
  std::vector<int> best_arcs, cur;

  std::function<void(const Bitset&, const Bitset&)> rec = [&](const Bitset& covered,
                                                              const Bitset& bnd) {
    if (budget->nodes >= budget->node_cap) {
      budget_hit = true;
      return;
    }
    ++budget->nodes;
    Rat cap = capacity(sys, SetExpr::from_bits(bnd));
    if (!(cap < best_cap)) return;  // the boundary union only grows down this branch
    int p = -1;
    for (int q = 0; q < n; ++q)
      if (!covered.test(q)) {
        p = q;
        break;
      }
    if (p < 0) {
      found = true;
      best_cap = cap;
      best_arcs = cur;
      return;
    }
    for (int i : by_atom[p]) {
      cur.push_back(i);
      rec(covered | pool[i].bits, bnd | pool[i].boundary);
      cur.pop_back();
      if (budget_hit) return;
    }
  };
  rec(Bitset(n), Bitset(n));

  c.witness["nodes"] = (Json::number_integer_t)budget->nodes;
  c.witness["candidate_arcs"] = (int)pool.size();
  c.witness["exhaustive"] = !budget_hit;
  if (found) {
    c.pass = true;
    c.value = best_cap;
    Json arcs = Json::array();
    Bitset bu(n);
    for (int i : best_arcs) {
      Json a = Json::object();
      a["start_cell"] = pool[i].start;
      a["cells"] = pool[i].len;
      arcs.push_back(a);
      bu = bu | pool[i].boundary;
    }
    c.witness["cover"] = arcs;
    c.witness["set_count"] = (int)best_arcs.size();
    c.witness["boundary_atoms"] = bu.count();
    c.witness["boundary_capacity"] = rat_json(best_cap);
    return c;
  }
  c.pass = false;
  c.value = eps;
  c.witness["reason"] =
      budget_hit ? "budget exhausted" : "no candidate cover has boundary capacity below eps";
  c.witness["threshold"] = rat_json(eps);
  return c;
}

Certificate urp_check(const FinitePermSystem& sys, const UrpTowerCertificate& towers) {
  if (towers.v_sets.size() != towers.shapes.size())
    throw ValidationError("tower bases and shapes disagree in length");
  const GroundSpace& sp = *sys.space;
  int n = sp.num_points();

  Certificate c;
  c.kind = CertKind::PassFail;
  c.quantity = "urp_towers";
  c.verified = true;

  struct Tr {
    int tower = 0, idx = 0;
    Bitset bits;
  };
  std::vector<Tr> trs;
  for (size_t i = 0; i < towers.v_sets.size(); ++i) {
    if (towers.v_sets[i].open) throw ValidationError("tower base sets must be closed");
    Bitset base = set_bits_on_space(sp, towers.v_sets[i]);
    std::set<std::vector<int>> distinct;
    for (size_t s = 0; s < towers.shapes[i].size(); ++s) {
      auto perm = word_perm(sys, towers.shapes[i][s]);
      if (!distinct.insert(perm).second)
        throw ValidationError("duplicate group element in the shape of tower " +
                              std::to_string(i));
      trs.push_back({(int)i, (int)s, image_bits(perm, base)});
    }
  }

  for (size_t a = 0; a + 1 < trs.size(); ++a)
    for (size_t b = a + 1; b < trs.size(); ++b)
      if (trs[a].bits.intersects(trs[b].bits)) {
        Bitset meet = trs[a].bits & trs[b].bits;
        Json fa = Json::object(), fb = Json::object();
        fa["tower"] = trs[a].tower;
        fa["shape_index"] = trs[a].idx;
        fb["tower"] = trs[b].tower;
        fb["shape_index"] = trs[b].idx;
        c.pass = false;
        c.value = 1;
        c.witness["failed"] = "translates overlap";
        c.witness["first"] = fa;
        c.witness["second"] = fb;
        c.witness["point"] = meet.members().front();
        return c;
      }

  Bitset covered(n);
  for (const auto& t : trs) covered = covered | t.bits;
  Rat leftover = capacity(sys, SetExpr::from_bits(covered.complement()));

  bool inv_ok = true;
  Json inv = Json::array();
  for (size_t i = 0; i < towers.shapes.size(); ++i) {
    std::set<std::vector<int>> simg;
    for (const auto& w : towers.shapes[i]) simg.insert(word_perm(sys, w));
    for (size_t ki = 0; ki < towers.k_set.size(); ++ki) {
      auto kp = word_perm(sys, towers.k_set[ki]);
      std::set<std::vector<int>> ks;
      for (const auto& s : simg) {
        std::vector<int> comp(n);
        for (int p = 0; p < n; ++p) comp[p] = kp[s[p]];
        ks.insert(comp);
      }
      int diff = 0;
      for (const auto& x : ks) diff += simg.count(x) ? 0 : 1;
      for (const auto& x : simg) diff += ks.count(x) ? 0 : 1;
      Rat allowance = towers.epsilon * Rat((long long)simg.size());
      bool ok = Rat(diff) <= allowance;
      inv_ok = inv_ok && ok;
      Json row = Json::object();
      row["tower"] = (int)i;
      row["k_index"] = (int)ki;
      row["shape_size"] = (int)simg.size();
      row["translate_delta"] = diff;
      row["ok"] = ok;
      inv.push_back(row);
    }
  }

  bool left_ok = leftover < towers.epsilon;
  bool bound_ok = leftover <= towers.leftover_bound;
  c.pass = left_ok && bound_ok;
  c.value = leftover;
  c.witness["towers"] = (int)towers.v_sets.size();
  c.witness["translates"] = (int)trs.size();
  c.witness["pairwise_disjoint"] = true;
  c.witness["leftover_capacity"] = rat_json(leftover);
  c.witness["epsilon"] = rat_json(towers.epsilon);
  c.witness["leftover_bound"] = rat_json(towers.leftover_bound);
  c.witness["leftover_below_epsilon"] = left_ok;
  c.witness["leftover_within_declared_bound"] = bound_ok;
  c.witness["shape_invariance_ok"] = inv_ok;
  c.witness["shape_invariance"] = inv;
  if (!c.pass)
    c.witness["failed"] =
        left_ok ? "declared leftover bound too small" : "leftover capacity at or above epsilon";
  return c;
}

Json MdimReport::to_json() const {
  Json j = Json::object();
  j["mdim_estimate"] = rat_json(mdim_estimate);
  j["folner_size"] = folner_size;
  j["dim_lower"] = dim_lower.to_json();
  j["dim_upper"] = dim_upper.to_json();
  j["inequality_ok"] = inequality_ok;
  j["equality"] = equality;
  return j;
}

MdimReport mdim_dim_compare(const FinitePermSystem& sys, int n_max, const Rat& slack,
                            SearchBudget* budget) {
  if (!sys.space) throw ValidationError("mean-dimension estimates need a sampled system");
  if (sys.group.kind == GroupKind::Free)
    throw ValidationError("mean-dimension estimates need an amenable acting group");
  if (n_max < 1) throw ValidationError("the averaging-set length must be positive");
  const GroundSpace& sp = *sys.space;

  MdimReport rep;
  Cover u;
  if (sp.kind == SpaceKind::Discrete) {
    std::vector<SetExpr> sets;
    for (int p = 0; p < sp.num_points(); ++p) {
      Bitset b(sp.num_points());
      b.set(p);
      sets.push_back(SetExpr::from_bits(b));
    }
    u = make_bitset_cover(sys.space, std::move(sets), "singletons");
    rep.dim_lower = trivial_lower_cert();
  } else {
    auto elems = enumerate_group(sys);
    u = junction_arc_cover(sys, elems).cover;
    rep.dim_lower = dim_U_T_lower_dim1(sys, u);
  }
  rep.dim_upper = dim_U_T_upper(sys, u, u);

  FolnerSchedule sched = default_folner(sys, n_max);
  const std::vector<Word>& f_set = sched.sets.back();
  rep.folner_size = (int)f_set.size();

  Cover join = translate_cover(sys, u, f_set[0]);
  for (size_t i = 1; i < f_set.size(); ++i)
    join = joint_refinement(join, translate_cover(sys, u, f_set[i]));
  join.label = "translate_join";
  BruteforceResult br = dim_of_cover_bruteforce(join, budget);

  rep.mdim_estimate = Rat(br.value, rep.folner_size);
  Rat allowance = rep.dim_upper.value + slack;
  rep.inequality_ok = rep.mdim_estimate <= allowance;
  rep.equality = (rep.dim_lower.value == rep.dim_upper.value &&
                  rep.mdim_estimate == rep.dim_upper.value);
  return rep;
}

MdimReport mdim_dim_compare_sft(const SftSystem& sft, int n_max) {
  sft.validate();
  if (n_max < 1) throw ValidationError("the averaging-set length must be positive");
  int len = std::max(n_max, sft.window);
  if (len > 12)
    throw BudgetError("block length " + std::to_string(len) + " exceeds the enumeration cap");

  std::vector<std::vector<int>> words;
  std::vector<int> cur;
  std::function<void()> extend = [&]() {
    if ((int)cur.size() == len) {
      if (sft.block_allowed(cur)) words.push_back(cur);
      return;
    }
    for (int a = 0; a < sft.alphabet; ++a) {
      cur.push_back(a);
      extend();
      cur.pop_back();
    }
  };
  extend();
  if (words.empty()) throw InternalError("validated subshift has no allowed blocks");

  auto space = make_discrete_space((int)words.size());
  // join of the shifted one-symbol cylinder partitions = partition by the
  // first n_max symbols
  std::map<std::vector<int>, Bitset> groups;
  for (size_t i = 0; i < words.size(); ++i) {
    std::vector<int> key(words[i].begin(), words[i].begin() + n_max);
    auto it = groups.find(key);
    if (it == groups.end()) it = groups.emplace(key, Bitset((int)words.size())).first;
    it->second.set((int)i);
  }
  std::vector<SetExpr> sets;
  for (const auto& kv : groups) sets.push_back(SetExpr::from_bits(kv.second));
  Cover join = make_bitset_cover(space, std::move(sets), "block_partition");
  BruteforceResult br = dim_of_cover_bruteforce(join);

  MdimReport rep;
  rep.folner_size = n_max;
  rep.mdim_estimate = Rat(br.value, n_max);

  auto blocks = sft.allowed_blocks();
  std::vector<std::vector<char>> cyl(sft.alphabet);
  for (int a = 0; a < sft.alphabet; ++a) {
    cyl[a].assign(blocks.size(), 0);
    for (size_t i = 0; i < blocks.size(); ++i) cyl[a][i] = blocks[i][0] == a ? 1 : 0;
  }
  Rat ot = sft_ord_T(sft, cyl);

  rep.dim_upper.kind = CertKind::UpperBound;
  rep.dim_upper.quantity = "dim_U_T";
  rep.dim_upper.value = ot;
  rep.dim_upper.pass = true;
  rep.dim_upper.verified = true;
  rep.dim_upper.witness["cover"] = "one-symbol cylinders";
  rep.dim_upper.witness["relaxation_window"] = sft.window;
  rep.dim_lower = trivial_lower_cert();

  rep.inequality_ok = rep.mdim_estimate <= rep.dim_upper.value;
  rep.equality = (rep.dim_lower.value == rep.dim_upper.value &&
                  rep.mdim_estimate == rep.dim_upper.value);
  return rep;
}

}  // namespace dyndim
