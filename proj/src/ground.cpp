#include "dyndim/ground.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "dyndim/error.hpp"
#include "dyndim/jsonio.hpp"

namespace dyndim {

// --- Bitset -----------------------------------------------------------------

int Bitset::count() const {
  int c = 0;
  for (auto w : w_) c += __builtin_popcountll(w);
  return c;
}

bool Bitset::any() const {
  for (auto w : w_)
    if (w) return true;
  return false;
}

static void require_same_size(const Bitset& a, const Bitset& b) {
  if (a.size() != b.size()) throw InternalError("bitset size mismatch");
}

Bitset Bitset::operator&(const Bitset& o) const {
  require_same_size(*this, o);
  Bitset r(n_);
  for (std::size_t i = 0; i < w_.size(); ++i) r.w_[i] = w_[i] & o.w_[i];
  return r;
}

Bitset Bitset::operator|(const Bitset& o) const {
  require_same_size(*this, o);
  Bitset r(n_);
  for (std::size_t i = 0; i < w_.size(); ++i) r.w_[i] = w_[i] | o.w_[i];
  return r;
}

Bitset Bitset::and_not(const Bitset& o) const {
  require_same_size(*this, o);
  Bitset r(n_);
  for (std::size_t i = 0; i < w_.size(); ++i) r.w_[i] = w_[i] & ~o.w_[i];
  return r;
}

Bitset Bitset::complement() const {
  Bitset r(n_);
  for (std::size_t i = 0; i < w_.size(); ++i) r.w_[i] = ~w_[i];
  // clear padding bits past n_
  int tail = n_ & 63;
  if (tail && !r.w_.empty()) r.w_.back() &= (std::uint64_t{1} << tail) - 1;
  return r;
}

bool Bitset::subset_of(const Bitset& o) const {
  require_same_size(*this, o);
  for (std::size_t i = 0; i < w_.size(); ++i)
    if (w_[i] & ~o.w_[i]) return false;
  return true;
}

bool Bitset::intersects(const Bitset& o) const {
  require_same_size(*this, o);
  for (std::size_t i = 0; i < w_.size(); ++i)
    if (w_[i] & o.w_[i]) return true;
  return false;
}

bool Bitset::operator<(const Bitset& o) const {
  if (n_ != o.n_) return n_ < o.n_;
  return w_ < o.w_;
}

std::vector<int> Bitset::members() const {
  std::vector<int> out;
  for (int i = 0; i < n_; ++i)
    if (test(i)) out.push_back(i);
  return out;
}

// --- GroundSpace ------------------------------------------------------------

void GroundSpace::validate() const {
  if (n <= 0) throw ValidationError("space needs at least one point");
  if (kind != SpaceKind::Discrete) {
    if (granularity <= 0) throw ValidationError("grid space needs positive granularity");
    int expect = kind == SpaceKind::GridInterval ? 2 * granularity + 1 : 2 * granularity;
    if (n != expect) throw ValidationError("grid point count does not match granularity");
  }
  if (icoords) {
    if ((int)icoords->size() != n) throw ValidationError("coordinate row count mismatch");
    if (coord_denom <= 0) throw ValidationError("coordinate denominator must be positive");
    std::size_t d = icoords->empty() ? 0 : (*icoords)[0].size();
    for (const auto& row : *icoords)
      if (row.size() != d) throw ValidationError("ragged coordinate rows");
  }
  if (metric_table) {
    if ((int)metric_table->size() != n * n) throw ValidationError("metric table size mismatch");
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const Rat& dij = (*metric_table)[i * n + j];
        if (dij < 0) throw ValidationError("negative distance in metric table");
        if (dij != (*metric_table)[j * n + i]) throw ValidationError("metric table not symmetric");
        if ((dij == 0) != (i == j)) throw ValidationError("metric table zero off the diagonal");
      }
  }
}

Rat GroundSpace::distance(PointId a, PointId b) const {
  if (a < 0 || a >= n || b < 0 || b >= n) throw ValidationError("point id out of range");
  switch (kind) {
    case SpaceKind::GridInterval: {
      long long diff = std::llabs((long long)a - b);
      return Rat(diff, 2LL * granularity);
    }
    case SpaceKind::GridCycle: {
      long long m = 2LL * granularity;
      long long diff = std::llabs((long long)a - b);
      diff = std::min(diff, m - diff);
      return Rat(diff, m);
    }
    case SpaceKind::Discrete: {
      if (metric_table) return (*metric_table)[a * n + b];
      if (icoords) {
        long long best = 0;
        const auto& ra = (*icoords)[a];
        const auto& rb = (*icoords)[b];
        for (std::size_t i = 0; i < ra.size(); ++i)
          best = std::max(best, std::llabs(ra[i] - rb[i]));
        return Rat(best, coord_denom);
      }
      return a == b ? Rat(0) : Rat(1);
    }
  }
  throw InternalError("unreachable space kind");
}

int GroundSpace::num_cells() const {
  if (!has_cells()) return 0;
  return granularity;
}

std::vector<PointId> GroundSpace::cell_atoms(int cell) const {
  if (!has_cells() || cell < 0 || cell >= granularity)
    throw ValidationError("cell index out of range");
  if (kind == SpaceKind::GridInterval) return {2 * cell, 2 * cell + 1, 2 * cell + 2};
  return {2 * cell, 2 * cell + 1, (2 * cell + 2) % (2 * granularity)};
}

bool GroundSpace::is_vertex_atom(PointId p) const { return has_cells() && p % 2 == 0; }

Rat GroundSpace::position(PointId p) const {
  if (!has_cells()) throw ValidationError("position only defined on grid spaces");
  return Rat(p, 2LL * granularity);
}

std::optional<std::vector<Rat>> GroundSpace::coords_of(PointId p) const {
  if (has_cells()) return std::vector<Rat>{position(p)};
  if (icoords) {
    std::vector<Rat> out;
    for (long long v : (*icoords)[p]) out.emplace_back(v, coord_denom);
    return out;
  }
  return std::nullopt;
}

std::vector<PointId> GroundSpace::adjacent_atoms(PointId p) const {
  if (!has_cells()) return {};
  std::vector<PointId> out;
  if (kind == SpaceKind::GridInterval) {
    if (p > 0) out.push_back(p - 1);
    if (p < n - 1) out.push_back(p + 1);
  } else {
    out.push_back((p + n - 1) % n);
    out.push_back((p + 1) % n);
  }
  return out;
}

std::shared_ptr<const GroundSpace> make_discrete_space(int n) {
  auto sp = std::make_shared<GroundSpace>();
  sp->kind = SpaceKind::Discrete;
  sp->n = n;
  sp->validate();
  return sp;
}

std::shared_ptr<const GroundSpace> make_grid_interval(int granularity) {
  auto sp = std::make_shared<GroundSpace>();
  sp->kind = SpaceKind::GridInterval;
  sp->granularity = granularity;
  sp->n = 2 * granularity + 1;
  sp->validate();
  return sp;
}

std::shared_ptr<const GroundSpace> make_grid_cycle(int granularity) {
  auto sp = std::make_shared<GroundSpace>();
  sp->kind = SpaceKind::GridCycle;
  sp->granularity = granularity;
  sp->n = 2 * granularity;
  sp->validate();
  return sp;
}

std::shared_ptr<const GroundSpace> make_grid_square(int granularity) {
  auto sp = std::make_shared<GroundSpace>();
  sp->kind = SpaceKind::Discrete;
  int side = 2 * granularity + 1;
  sp->n = side * side;
  std::vector<std::vector<long long>> coords;
  coords.reserve(sp->n);
  for (int i = 0; i < side; ++i)
    for (int j = 0; j < side; ++j) coords.push_back({i, j});
  sp->icoords = std::move(coords);
  sp->coord_denom = 2LL * granularity;
  sp->validate();
  return sp;
}

// --- SetExpr ----------------------------------------------------------------

Rat interval_length(const Interval& iv) { return iv.hi - iv.lo; }

bool boxes_equal(const Box& a, const Box& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i].lo != b[i].lo || a[i].hi != b[i].hi) return false;
  return true;
}

SetExpr SetExpr::from_bits(Bitset b, bool open) {
  SetExpr s;
  s.kind = Kind::Bits;
  s.open = open;
  s.bits = std::move(b);
  return s;
}

SetExpr SetExpr::from_boxes(std::vector<Box> bs, bool open) {
  SetExpr s;
  s.kind = Kind::Boxes;
  s.open = open;
  for (auto& box : bs) {
    bool ok = true;
    for (const auto& iv : box) {
      if (iv.lo > iv.hi || (open && iv.lo >= iv.hi)) {
        ok = false;
        break;
      }
    }
    if (ok) s.boxes.push_back(std::move(box));
  }
  return s;
}

SetExpr SetExpr::from_cells_closed(const GroundSpace& sp, const std::vector<int>& cells) {
  Bitset b(sp.num_points());
  for (int c : cells)
    for (PointId p : sp.cell_atoms(c)) b.set(p);
  return from_bits(std::move(b), false);
}

SetExpr SetExpr::from_cells_open(const GroundSpace& sp, const std::vector<int>& cells) {
  std::set<int> in(cells.begin(), cells.end());
  Bitset b(sp.num_points());
  for (int c : cells) b.set(2 * c + 1);
  // a vertex joins only when every incident cell is present
  for (int c : cells) {
    for (PointId p : sp.cell_atoms(c)) {
      if (!sp.is_vertex_atom(p)) continue;
      bool all = true;
      for (PointId q : sp.adjacent_atoms(p)) {
        int cell = (q - 1) / 2;
        if (!in.count(cell)) {
          all = false;
          break;
        }
      }
      if (all) b.set(p);
    }
  }
  return from_bits(std::move(b), true);
}

bool SetExpr::contains_vec(const std::vector<Rat>& x) const {
  if (kind != Kind::Boxes) throw ValidationError("point-vector query on a bitset set");
  for (const auto& box : boxes) {
    if (box.size() != x.size()) throw ValidationError("box dimension mismatch");
    bool in = true;
    for (std::size_t i = 0; i < box.size(); ++i) {
      if (open ? !(box[i].lo < x[i] && x[i] < box[i].hi)
               : !(box[i].lo <= x[i] && x[i] <= box[i].hi)) {
        in = false;
        break;
      }
    }
    if (in) return true;
  }
  return false;
}

bool SetExpr::contains_point(const GroundSpace& sp, PointId p) const {
  if (kind == Kind::Bits) {
    if (bits.size() != sp.num_points()) throw ValidationError("bitset size does not match space");
    return bits.test(p);
  }
  auto c = sp.coords_of(p);
  if (!c) throw ValidationError("geometric set on a space without coordinates");
  return contains_vec(*c);
}

bool SetExpr::is_empty(const GroundSpace* sp) const {
  if (kind == Kind::Bits) return bits.none();
  if (boxes.empty()) return true;
  if (sp) {
    for (PointId p = 0; p < sp->num_points(); ++p)
      if (contains_point(*sp, p)) return false;
    return true;
  }
  return false;
}

std::string SetExpr::canonical_key() const {
  std::ostringstream os;
  if (kind == Kind::Bits) {
    os << "b" << (open ? "o" : "c") << ":";
    for (int m : bits.members()) os << m << ",";
  } else {
    os << "x" << (open ? "o" : "c") << ":";
    std::vector<std::string> parts;
    for (const auto& box : boxes) {
      std::ostringstream bo;
      for (const auto& iv : box) bo << "[" << rat_str(iv.lo) << ";" << rat_str(iv.hi) << "]";
      parts.push_back(bo.str());
    }
    std::sort(parts.begin(), parts.end());
    for (const auto& p : parts) os << p;
  }
  return os.str();
}

// --- Cover ------------------------------------------------------------------

void Cover::validate(bool require_covering) const {
  if (space && ambient) throw ValidationError("cover cannot have both a space and an ambient box");
  if (!space && !ambient) throw ValidationError("cover needs a space or an ambient box");
  if (space) {
    for (const auto& s : sets) {
      if (s.kind == SetExpr::Kind::Bits && s.bits.size() != space->num_points())
        throw ValidationError("bitset size does not match space");
      if (s.kind == SetExpr::Kind::Boxes && !space->coords_of(0))
        throw ValidationError("geometric set on a space without coordinates");
    }
    if (require_covering) {
      for (PointId p = 0; p < space->num_points(); ++p) {
        bool hit = false;
        for (const auto& s : sets)
          if (s.contains_point(*space, p)) {
            hit = true;
            break;
          }
        if (!hit)
          throw ValidationError("cover '" + label + "' misses point " + std::to_string(p));
      }
    }
  } else {
    for (const auto& s : sets)
      if (s.kind != SetExpr::Kind::Boxes)
        throw ValidationError("symbolic cover must consist of box sets");
    if (require_covering) {
      for (const auto& x : arrangement_atoms(*this)) {
        bool hit = false;
        for (const auto& s : sets)
          if (s.contains_vec(x)) {
            hit = true;
            break;
          }
        if (!hit)
          throw ValidationError("cover '" + label + "' misses point " + format_rat_vec(x));
      }
    }
  }
}

Cover make_bitset_cover(std::shared_ptr<const GroundSpace> sp, std::vector<SetExpr> sets,
                        std::string label) {
  Cover c;
  c.label = std::move(label);
  c.sets = std::move(sets);
  c.space = std::move(sp);
  return c;
}

Cover make_box_cover(Box ambient, std::vector<SetExpr> sets, std::string label) {
  Cover c;
  c.label = std::move(label);
  c.sets = std::move(sets);
  c.ambient = std::move(ambient);
  return c;
}

int ord_at(const Cover& u, PointId p) {
  if (!u.space) throw ValidationError("point-id query on a symbolic cover");
  int count = 0;
  for (const auto& s : u.sets)
    if (s.contains_point(*u.space, p)) ++count;
  return count - 1;
}

int ord_at(const Cover& u, const std::vector<Rat>& x) {
  int count = 0;
  for (const auto& s : u.sets)
    if (s.contains_vec(x)) ++count;
  return count - 1;
}

std::vector<std::vector<Rat>> arrangement_atoms(const Cover& u) {
  if (!u.ambient) throw ValidationError("arrangement enumeration needs an ambient box");
  const Box& amb = *u.ambient;
  std::size_t d = amb.size();
  std::vector<std::vector<Rat>> axis_atoms(d);
  for (std::size_t i = 0; i < d; ++i) {
    std::set<Rat> ends;
    ends.insert(amb[i].lo);
    ends.insert(amb[i].hi);
    for (const auto& s : u.sets)
      for (const auto& box : s.boxes) {
        if (box.size() != d) throw ValidationError("box dimension mismatch in cover");
        for (const Rat& v : {box[i].lo, box[i].hi})
          if (amb[i].lo <= v && v <= amb[i].hi) ends.insert(v);
      }
    std::vector<Rat> es(ends.begin(), ends.end());
    auto& atoms = axis_atoms[i];
    for (std::size_t k = 0; k < es.size(); ++k) {
      atoms.push_back(es[k]);
      if (k + 1 < es.size()) atoms.push_back((es[k] + es[k + 1]) / 2);
    }
  }
  std::vector<std::vector<Rat>> out;
  std::vector<std::size_t> idx(d, 0);
  while (true) {
    std::vector<Rat> x(d);
    for (std::size_t i = 0; i < d; ++i) x[i] = axis_atoms[i][idx[i]];
    out.push_back(std::move(x));
    std::size_t i = 0;
    while (i < d && ++idx[i] == axis_atoms[i].size()) {
      idx[i] = 0;
      ++i;
    }
    if (i == d) break;
  }
  return out;
}

int ord_sup(const Cover& u) {
  int best = -1;
  if (u.space) {
    for (PointId p = 0; p < u.space->num_points(); ++p) best = std::max(best, ord_at(u, p));
  } else {
    for (const auto& x : arrangement_atoms(u)) best = std::max(best, ord_at(u, x));
  }
  return best;
}

// Membership of both set-unions is constant on arrangement atoms generated by
// the endpoints of both, so checking representatives decides inclusion.
static bool box_set_subset(const SetExpr& a, const SetExpr& b) {
  if (a.boxes.empty()) return true;
  std::size_t d = a.boxes[0].size();
  std::vector<std::vector<Rat>> axis_atoms(d);
  for (std::size_t i = 0; i < d; ++i) {
    std::set<Rat> ends;
    for (const SetExpr* s : {&a, &b})
      for (const auto& box : s->boxes) {
        ends.insert(box[i].lo);
        ends.insert(box[i].hi);
      }
    std::vector<Rat> es(ends.begin(), ends.end());
    for (std::size_t k = 0; k < es.size(); ++k) {
      axis_atoms[i].push_back(es[k]);
      if (k + 1 < es.size()) axis_atoms[i].push_back((es[k] + es[k + 1]) / 2);
    }
  }
  std::vector<std::size_t> idx(d, 0);
  while (true) {
    std::vector<Rat> x(d);
    for (std::size_t i = 0; i < d; ++i) x[i] = axis_atoms[i][idx[i]];
    if (a.contains_vec(x) && !b.contains_vec(x)) return false;
    std::size_t i = 0;
    while (i < d && ++idx[i] == axis_atoms[i].size()) {
      idx[i] = 0;
      ++i;
    }
    if (i == d) break;
  }
  return true;
}

Bitset set_bits_on_space(const GroundSpace& sp, const SetExpr& s) {
  Bitset b(sp.num_points());
  for (PointId p = 0; p < sp.num_points(); ++p)
    if (s.contains_point(sp, p)) b.set(p);
  return b;
}

static Bitset effective_bits(const Cover& u, const SetExpr& s) {
  return set_bits_on_space(*u.space, s);
}

bool refines(const Cover& fine, const Cover& coarse, int* witness_out) {
  bool fine_sym = fine.symbolic(), coarse_sym = coarse.symbolic();
  if (fine_sym != coarse_sym)
    throw ValidationError("refinement test across symbolic and sampled covers");
  if (!fine_sym && fine.space != coarse.space)
    throw ValidationError("refinement test across different spaces");
  for (std::size_t i = 0; i < fine.sets.size(); ++i) {
    bool contained = false;
    if (fine_sym) {
      for (const auto& c : coarse.sets)
        if (box_set_subset(fine.sets[i], c)) {
          contained = true;
          break;
        }
    } else {
      Bitset fb = effective_bits(fine, fine.sets[i]);
      for (const auto& c : coarse.sets)
        if (fb.subset_of(effective_bits(coarse, c))) {
          contained = true;
          break;
        }
    }
    if (!contained) {
      if (witness_out) *witness_out = (int)i;
      return false;
    }
  }
  return true;
}

Cover joint_refinement(const Cover& a, const Cover& b) {
  if (a.symbolic() != b.symbolic())
    throw ValidationError("joint refinement across symbolic and sampled covers");
  Cover out;
  out.label = a.label.empty() || b.label.empty() ? a.label + b.label : a.label + "&" + b.label;
  if (!a.symbolic()) {
    if (a.space != b.space) throw ValidationError("joint refinement across different spaces");
    out.space = a.space;
  } else {
    if (!boxes_equal(*a.ambient, *b.ambient))
      throw ValidationError("joint refinement needs matching ambient boxes");
    out.ambient = a.ambient;
  }
  std::set<std::string> seen;
  for (const auto& sa : a.sets)
    for (const auto& sb : b.sets) {
      SetExpr inter;
      if (sa.kind == SetExpr::Kind::Bits && sb.kind == SetExpr::Kind::Bits) {
        inter = SetExpr::from_bits(sa.bits & sb.bits, sa.open && sb.open);
      } else if (sa.kind == SetExpr::Kind::Boxes && sb.kind == SetExpr::Kind::Boxes) {
        if (sa.open != sb.open)
          throw ValidationError("joint refinement of box sets with mixed openness");
        std::vector<Box> boxes;
        for (const auto& ba : sa.boxes)
          for (const auto& bb : sb.boxes) {
            Box ib(ba.size());
            bool ok = true;
            for (std::size_t i = 0; i < ba.size(); ++i) {
              ib[i].lo = std::max(ba[i].lo, bb[i].lo);
              ib[i].hi = std::min(ba[i].hi, bb[i].hi);
              if (ib[i].lo > ib[i].hi || (sa.open && ib[i].lo >= ib[i].hi)) {
                ok = false;
                break;
              }
            }
            if (ok) boxes.push_back(std::move(ib));
          }
        inter = SetExpr::from_boxes(std::move(boxes), sa.open);
      } else {
        throw ValidationError("joint refinement of mixed set kinds");
      }
      if (inter.is_empty(out.space.get())) continue;
      auto key = inter.canonical_key();
      if (seen.insert(key).second) out.sets.push_back(std::move(inter));
    }
  return out;
}

Rat set_diameter(const Cover& u, const SetExpr& s) {
  if (u.space) {
    auto members = effective_bits(u, s).members();
    Rat best(0);
    for (std::size_t i = 0; i < members.size(); ++i)
      for (std::size_t j = i + 1; j < members.size(); ++j)
        best = std::max(best, u.space->distance(members[i], members[j]));
    return best;
  }
  if (s.boxes.empty()) return Rat(0);
  std::size_t d = s.boxes[0].size();
  Rat best(0);
  for (std::size_t i = 0; i < d; ++i) {
    Rat lo = s.boxes[0][i].lo, hi = s.boxes[0][i].hi;
    for (const auto& box : s.boxes) {
      lo = std::min(lo, box[i].lo);
      hi = std::max(hi, box[i].hi);
    }
    Rat extent = hi - lo;
    best = std::max(best, extent);
  }
  return best;
}

Rat mesh(const Cover& u) {
  Rat best(0);
  for (const auto& s : u.sets) best = std::max(best, set_diameter(u, s));
  return best;
}

// --- shrink_to_closed -------------------------------------------------------

static bool covers_all_samples(const GroundSpace& sp, const std::vector<SetExpr>& sets) {
  for (PointId p = 0; p < sp.num_points(); ++p) {
    bool hit = false;
    for (const auto& s : sets)
      if (s.contains_point(sp, p)) {
        hit = true;
        break;
      }
    if (!hit) return false;
  }
  return true;
}

static std::vector<SetExpr> shrink_boxes_by(const Cover& u, const Rat& delta) {
  std::vector<SetExpr> out;
  for (const auto& s : u.sets) {
    std::vector<Box> boxes;
    for (const auto& box : s.boxes) {
      Box nb(box.size());
      bool ok = true;
      for (std::size_t i = 0; i < box.size(); ++i) {
        nb[i].lo = box[i].lo + delta;
        nb[i].hi = box[i].hi - delta;
        if (u.ambient) {
          nb[i].lo = std::max(nb[i].lo, (*u.ambient)[i].lo);
          nb[i].hi = std::min(nb[i].hi, (*u.ambient)[i].hi);
        }
        if (nb[i].lo > nb[i].hi) {
          ok = false;
          break;
        }
      }
      if (ok) boxes.push_back(std::move(nb));
    }
    out.push_back(SetExpr::from_boxes(std::move(boxes), false));
  }
  return out;
}

static bool closed_shrink_covers(const Cover& u, const Rat& delta) {
  Cover probe;
  probe.ambient = u.ambient;
  probe.sets = shrink_boxes_by(u, delta);
  for (const auto& x : arrangement_atoms(probe)) {
    bool hit = false;
    for (const auto& s : probe.sets)
      if (s.contains_vec(x)) {
        hit = true;
        break;
      }
    if (!hit) return false;
  }
  return true;
}

// Greedy disjointification in the box language; used only on the fallback
// path. difference(A, B) splits A axis by axis.
static std::vector<Box> box_difference(const Box& a, const Box& b) {
  Box inter(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    inter[i].lo = std::max(a[i].lo, b[i].lo);
    inter[i].hi = std::min(a[i].hi, b[i].hi);
    // touching along a face is fine for closure arithmetic
    if (inter[i].lo >= inter[i].hi) return {a};
  }
  std::vector<Box> out;
  Box rest = a;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (rest[i].lo < inter[i].lo) {
      Box piece = rest;
      piece[i].hi = inter[i].lo;
      out.push_back(piece);
    }
    if (inter[i].hi < rest[i].hi) {
      Box piece = rest;
      piece[i].lo = inter[i].hi;
      out.push_back(piece);
    }
    rest[i] = inter[i];
  }
  return out;
}

ShrinkResult shrink_to_closed(const Cover& u) {
  u.validate(true);
  ShrinkResult res;
  if (u.space) {
    const GroundSpace& sp = *u.space;
    bool all_bits = true;
    for (const auto& s : u.sets)
      if (s.kind != SetExpr::Kind::Bits) all_bits = false;
    if (!all_bits) throw ValidationError("shrink on sampled covers expects bitset sets");
    if (!sp.has_cells()) {
      // finite discrete space: every set is clopen
      res.cover = u;
      for (auto& s : res.cover.sets) s.open = false;
      res.margin = 0;
      res.fallback = false;
      return res;
    }
    std::vector<SetExpr> closed_sets;
    for (const auto& s : u.sets) {
      std::vector<int> kept;
      for (int c = 0; c < sp.num_cells(); ++c) {
        bool inside = true;
        for (PointId p : sp.cell_atoms(c))
          if (!s.bits.test(p)) {
            inside = false;
            break;
          }
        if (inside) kept.push_back(c);
      }
      closed_sets.push_back(SetExpr::from_cells_closed(sp, kept));
    }
    if (covers_all_samples(sp, closed_sets)) {
      res.cover = make_bitset_cover(u.space, std::move(closed_sets), u.label);
      res.margin = 0;
      res.fallback = false;
      return res;
    }
    // fallback: closures of a greedy disjointification by cells
    std::vector<SetExpr> fb;
    Bitset taken(sp.num_points());
    for (const auto& s : u.sets) {
      std::vector<int> cells;
      for (int c = 0; c < sp.num_cells(); ++c)
        if (s.bits.test(2 * c + 1) && !taken.test(2 * c + 1)) cells.push_back(c);
      for (int c : cells) taken.set(2 * c + 1);
      fb.push_back(SetExpr::from_cells_closed(sp, cells));
    }
    res.cover = make_bitset_cover(u.space, std::move(fb), u.label);
    res.margin = 0;
    res.fallback = true;
    return res;
  }

  // symbolic box cover: largest margin preserving covering
  std::set<Rat> ends;
  for (const auto& s : u.sets)
    for (const auto& box : s.boxes)
      for (const auto& iv : box) {
        ends.insert(iv.lo);
        ends.insert(iv.hi);
      }
  for (const auto& iv : *u.ambient) {
    ends.insert(iv.lo);
    ends.insert(iv.hi);
  }
  std::set<Rat> candidates;
  candidates.insert(Rat(0));
  for (auto it = ends.begin(); it != ends.end(); ++it)
    for (auto jt = std::next(it); jt != ends.end(); ++jt) {
      Rat diff = *jt - *it;
      candidates.insert(diff);
      candidates.insert(diff / 2);
    }
  Rat best(0);
  for (auto it = candidates.rbegin(); it != candidates.rend(); ++it) {
    if (closed_shrink_covers(u, *it)) {
      best = *it;
      break;
    }
  }
  bool closed_input = !u.sets.empty() && !u.sets[0].open;
  if (best > 0 || closed_input) {
    res.cover = make_box_cover(*u.ambient, shrink_boxes_by(u, best), u.label);
    res.margin = best;
    res.fallback = false;
    return res;
  }
  // fallback: closures of a greedy disjointification
  std::vector<SetExpr> fb;
  std::vector<Box> taken;
  for (const auto& s : u.sets) {
    std::vector<Box> rem;
    for (const auto& box : s.boxes) {
      std::vector<Box> pieces = {box};
      for (const auto& t : taken) {
        std::vector<Box> next;
        for (const auto& piece : pieces)
          for (auto& d : box_difference(piece, t)) next.push_back(d);
        pieces = std::move(next);
      }
      for (auto& piece : pieces) rem.push_back(piece);
    }
    for (const auto& r : rem) taken.push_back(r);
    fb.push_back(SetExpr::from_boxes(std::move(rem), false));
  }
  res.cover = make_box_cover(*u.ambient, std::move(fb), u.label);
  res.margin = 0;
  res.fallback = true;
  return res;
}

// --- dim_of_cover_bruteforce ------------------------------------------------

namespace {

struct Arc {
  int start, len;  // cells start..start+len-1 (mod g on cycles)
};

std::vector<int> arc_cells(const Arc& a, int g, bool cycle) {
  std::vector<int> out;
  for (int i = 0; i < a.len; ++i) out.push_back(cycle ? (a.start + i) % g : a.start + i);
  return out;
}

struct BruteState {
  const GroundSpace* sp;
  std::vector<Bitset> candidate_bits;   // atoms of each candidate arc
  std::vector<std::vector<int>> by_atom;  // candidate ids containing each atom
  std::vector<int> counts;
  std::vector<int> chosen;
  int best = std::numeric_limits<int>::max();
  std::vector<int> best_choice;
  SearchBudget* budget;
};

void brute_dfs(BruteState& st) {
  if (st.budget && ++st.budget->nodes > st.budget->node_cap) {
    throw BudgetError("cover search budget exhausted");
  }
  int cur_max = 0;
  for (int c : st.counts) cur_max = std::max(cur_max, c);
  if (cur_max - 1 >= st.best) return;
  int atom = -1;
  for (std::size_t p = 0; p < st.counts.size(); ++p)
    if (st.counts[p] == 0) {
      atom = (int)p;
      break;
    }
  if (atom < 0) {
    st.best = cur_max - 1;
    st.best_choice = st.chosen;
    return;
  }
  for (int cid : st.by_atom[atom]) {
    const Bitset& b = st.candidate_bits[cid];
    bool ok = true;
    for (int m : b.members())
      if (st.counts[m] >= st.best) {  // adding would push this atom's order to >= best
        ok = false;
        break;
      }
    if (!ok) continue;
    for (int m : b.members()) ++st.counts[m];
    st.chosen.push_back(cid);
    brute_dfs(st);
    st.chosen.pop_back();
    for (int m : b.members()) --st.counts[m];
  }
}

}  // namespace

BruteforceResult dim_of_cover_bruteforce(const Cover& u, SearchBudget* budget) {
  if (!u.space) throw ValidationError("cover dimension search needs a sampled space");
  u.validate(true);
  const GroundSpace& sp = *u.space;
  BruteforceResult res;

  std::vector<Bitset> uset_bits;
  for (const auto& s : u.sets) uset_bits.push_back(effective_bits(u, s));

  if (!sp.has_cells()) {
    // singleton partition: order 0 is always attainable on a discrete sample
    std::vector<SetExpr> singles;
    for (PointId p = 0; p < sp.num_points(); ++p) {
      Bitset b(sp.num_points());
      b.set(p);
      singles.push_back(SetExpr::from_bits(std::move(b), false));
    }
    res.value = 0;
    res.witness = make_bitset_cover(u.space, std::move(singles), u.label + ".partition");
    return res;
  }

  int g = sp.num_cells();
  bool cycle = sp.kind == SpaceKind::GridCycle;
  int maxlen = cycle ? g - 1 : g;  // proper arcs only; the full space never helps

  BruteState st;
  st.sp = &sp;
  st.budget = budget;
  std::vector<Arc> arcs;
  for (int start = 0; start < g; ++start)
    for (int len = 1; len <= maxlen; ++len) {
      if (!cycle && start + len > g) break;
      Arc a{start, len};
      SetExpr cand = SetExpr::from_cells_closed(sp, arc_cells(a, g, cycle));
      bool admissible = false;
      for (const auto& ub : uset_bits)
        if (cand.bits.subset_of(ub)) {
          admissible = true;
          break;
        }
      if (admissible) {
        arcs.push_back(a);
        st.candidate_bits.push_back(cand.bits);
      }
    }
  st.by_atom.assign(sp.num_points(), {});
  for (std::size_t cid = 0; cid < st.candidate_bits.size(); ++cid)
    for (int m : st.candidate_bits[cid].members()) st.by_atom[m].push_back((int)cid);
  for (PointId p = 0; p < sp.num_points(); ++p)
    if (st.by_atom[p].empty())
      throw ValidationError("no grid-aligned candidate set covers atom " + std::to_string(p));
  st.counts.assign(sp.num_points(), 0);

  try {
    brute_dfs(st);
  } catch (BudgetError&) {
    if (st.best == std::numeric_limits<int>::max()) throw;
    std::ostringstream os;
    os << "{\"best_so_far\": " << st.best << "}";
    throw BudgetError("cover search budget exhausted", os.str());
  }
  if (st.best == std::numeric_limits<int>::max())
    throw InternalError("cover search found no cover despite per-atom candidates");

  std::vector<SetExpr> chosen;
  for (int cid : st.best_choice)
    chosen.push_back(SetExpr::from_bits(st.candidate_bits[cid], false));
  res.value = st.best;
  res.witness = make_bitset_cover(u.space, std::move(chosen), u.label + ".min");
  return res;
}

}  // namespace dyndim
