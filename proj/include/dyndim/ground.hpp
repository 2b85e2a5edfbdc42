#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "dyndim/bitset.hpp"
#include "dyndim/rational.hpp"

namespace dyndim {

using PointId = int;

// Desk-scale models of the spaces the calculus runs on.
//
// Discrete: a finite metric space. Distances come from integer lattice
// coordinates (l-infinity), an explicit table, or default to the 0/1 metric.
//
// GridInterval / GridCycle: combinatorial models of [0,1] and the circle at a
// declared cell granularity g. Sample points enumerate the arrangement atoms
// of the grid: even ids are cell-boundary vertices, odd ids are open-cell
// midpoints. Any union of closed grid cells has membership decided exactly on
// this sample, so suprema over the model equal suprema over the continuum for
// grid-aligned covers.
enum class SpaceKind { Discrete, GridInterval, GridCycle };

struct GroundSpace {
  SpaceKind kind = SpaceKind::Discrete;
  int granularity = 0;  // number of grid cells (grid kinds only)
  int n = 0;            // number of sample points

  // Integer coordinates over a common denominator; distance is l-infinity.
  std::optional<std::vector<std::vector<long long>>> icoords;
  long long coord_denom = 1;
  // Explicit distance table (discrete spaces only), row-major n*n.
  std::optional<std::vector<Rat>> metric_table;

  void validate() const;

  int num_points() const { return n; }
  Rat distance(PointId a, PointId b) const;

  bool has_cells() const { return kind != SpaceKind::Discrete; }
  int num_cells() const;
  // Atom ids of a closed cell (midpoint plus boundary vertices).
  std::vector<PointId> cell_atoms(int cell) const;
  bool is_vertex_atom(PointId p) const;
  // 1-d grid kinds: the position of atom p in [0,1).
  Rat position(PointId p) const;
  // Rational coordinate vector of a point (grids: 1-d position; discrete:
  // icoords row). Empty optional when the space carries no geometry.
  std::optional<std::vector<Rat>> coords_of(PointId p) const;

  // Atom adjacency of the cell structure (vertex <-> incident midpoints).
  std::vector<PointId> adjacent_atoms(PointId p) const;
};

std::shared_ptr<const GroundSpace> make_discrete_space(int n);
std::shared_ptr<const GroundSpace> make_grid_interval(int granularity);
std::shared_ptr<const GroundSpace> make_grid_cycle(int granularity);
// (granularity+1)^2 lattice points in [0,1]^2 with l-infinity metric.
std::shared_ptr<const GroundSpace> make_grid_square(int granularity);

// ---------------------------------------------------------------------------

struct Interval {
  Rat lo, hi;  // lo <= hi
};
using Box = std::vector<Interval>;

Rat interval_length(const Interval& iv);
bool boxes_equal(const Box& a, const Box& b);

// A set in a cover: either a bitset over the sample points of a space, or a
// finite union of axis-aligned rational boxes. The openness tag applies to
// every face of every box; bitsets record it for bookkeeping only.
struct SetExpr {
  enum class Kind { Bits, Boxes };
  Kind kind = Kind::Bits;
  bool open = false;
  Bitset bits;
  std::vector<Box> boxes;

  static SetExpr from_bits(Bitset b, bool open = false);
  static SetExpr from_boxes(std::vector<Box> bs, bool open = false);
  // Union of closed cells: midpoints plus all incident vertices.
  static SetExpr from_cells_closed(const GroundSpace& sp, const std::vector<int>& cells);
  // Relative interior of a cell union: vertices only when every incident cell
  // is present.
  static SetExpr from_cells_open(const GroundSpace& sp, const std::vector<int>& cells);

  bool contains_vec(const std::vector<Rat>& x) const;  // Boxes only
  bool contains_point(const GroundSpace& sp, PointId p) const;
  bool is_empty(const GroundSpace* sp) const;

  // Canonical form used for set-identity dedup in joint refinements.
  std::string canonical_key() const;
};

// A finite cover. Exactly one domain is set: a ground space (bitset or
// geometric sets evaluated on its samples) or a pure ambient box for symbolic
// box covers with no sample space.
struct Cover {
  std::string label;
  std::vector<SetExpr> sets;
  std::shared_ptr<const GroundSpace> space;
  std::optional<Box> ambient;

  bool symbolic() const { return space == nullptr; }
  void validate(bool require_covering = true) const;
};

Cover make_bitset_cover(std::shared_ptr<const GroundSpace> sp, std::vector<SetExpr> sets,
                        std::string label = "");
Cover make_box_cover(Box ambient, std::vector<SetExpr> sets, std::string label = "");

// ord at a point: -1 + number of cover sets containing it. The empty cover
// has order -1 everywhere.
// sample membership of a set as a bitset over the space's points
Bitset set_bits_on_space(const GroundSpace& sp, const SetExpr& s);

int ord_at(const Cover& u, PointId p);
int ord_at(const Cover& u, const std::vector<Rat>& x);

// Arrangement atoms of a symbolic box cover within its ambient box: one exact
// rational representative per atom; every atom vertex is itself an atom.
std::vector<std::vector<Rat>> arrangement_atoms(const Cover& u);

// Exact supremum of ord over the domain (samples, or arrangement atoms for
// symbolic covers).
int ord_sup(const Cover& u);

// fine refines coarse: every set of `fine` is contained in some set of
// `coarse`. If witness_out is non-null and the test fails, it receives the
// index of the first offending set.
bool refines(const Cover& fine, const Cover& coarse, int* witness_out = nullptr);

// Pairwise intersections, empties dropped, duplicates (by canonical form)
// dropped. Refines both arguments; mesh <= min of the input meshes.
Cover joint_refinement(const Cover& a, const Cover& b);

// Supremum of set diameters; empty sets contribute 0 (documented convention).
Rat mesh(const Cover& u);
Rat set_diameter(const Cover& u, const SetExpr& s);

// Replaces an open cover by a closed cover with each output set contained in
// the matching input set. Box covers shrink every face inward by the largest
// margin that preserves covering (margin found by scanning the endpoint
// arrangement); grid-cell sets keep the cells whose closure lies inside.
// When no positive margin exists the documented fallback returns closures of
// a greedy disjointification (covering kept, containment possibly lost; the
// flag below records it).
struct ShrinkResult {
  Cover cover;
  Rat margin;     // 0 on the fallback path
  bool fallback;  // true when the containment guarantee was abandoned
};
ShrinkResult shrink_to_closed(const Cover& u);

struct SearchBudget {
  long long node_cap = 4'000'000;
  long long nodes = 0;
};

// Exact minimum of ord over covers whose sets are unions of closed grid cells
// each contained in some set of u (an upper bound for the dimension of u).
// Discrete spaces use the singleton partition. Exhausts the candidate family
// or throws BudgetError carrying the best cover found so far.
struct BruteforceResult {
  int value = 0;
  Cover witness;
};
BruteforceResult dim_of_cover_bruteforce(const Cover& u, SearchBudget* budget = nullptr);

}  // namespace dyndim
