#pragma once

#include <vector>

#include "dyndim/certificate.hpp"
#include "dyndim/ground.hpp"

namespace dyndim {

// Finite union of arithmetic progressions offset + step*Z, all sharing one
// positive step. Membership at a rational is exact.
struct LatticeSet {
  std::vector<Rat> offsets;
  Rat step;
  Interval window{Rat(0), Rat(0)};

  bool contains(const Rat& x) const;
  // sorted distinct members in [lo, hi]
  std::vector<Rat> points_in(const Rat& lo, const Rat& hi) const;
};

// Staircase cover of R^d by side-eps/2 closed cubes. Axis 1 cells sit on the
// (eps/2)Z grid; each higher axis ell >= 2 slices into slabs of width eps/2
// at offset s[ell], and odd slabs shift every lower axis by t[ell]. The cell
// through a point is determined by the slab parities u_2..u_d and per-axis
// slab indices; cells are never materialized unless asked for.
struct BrickwallCover {
  int d = 1;
  Rat epsilon;
  Box bounding;
  std::vector<Rat> t;  // index by axis, t[0], t[1] unused (zero)
  std::vector<Rat> s;  // index by axis, s[0], s[1] unused (zero)
  std::vector<LatticeSet> lattice;  // lattice[ell-1] = cell-endpoint lattice of axis ell
};

// Deterministic construction: shifts are the smallest eps/(2*3^k) avoiding
// the finitely many residues (mod eps/2) that would break disjointness.
BrickwallCover build_brickwall(int d, const Rat& epsilon, const Box& bounding);

// number of cells containing v, i.e. ord + 1; exact, any rational point
int brickwall_cells_at(const BrickwallCover& bw, const std::vector<Rat>& v);

// all cells meeting the bounding box, as closed boxes
std::vector<Box> materialize_cells(const BrickwallCover& bw, long long cell_cap = 2'000'000);

// Checks, over every arrangement atom of the bounding box: covering, the
// order bound ord(C,v) <= sum_ell 1_{A_ell}(v_ell), lattice disjointness,
// and mesh <= eps. Integer arithmetic on a common denominator throughout.
Certificate verify_brickwall(const BrickwallCover& bw, long long atom_cap = 64'000'000);

}  // namespace dyndim
