#pragma once

#include "dyndim/certificate.hpp"
#include "dyndim/ground.hpp"

namespace dyndim {

// Disjoint-family decompositions: k families of pairwise disjoint closed
// sets, each refining the source cover, whose orders add up to at least
// minus the source order at every point.

// The arithmetic pattern behind the families: closed intervals
//   [ ((k+1)n - j) / (2kr), ((k+1)n - j + k) / (2kr) ]   for n = 0, 1, ...
// intersected with [0,1]. Period k+1 grid units against length k leaves unit
// gaps, so the list is pairwise disjoint and every grid-aligned value lies in
// some interval. Interval length is 1/(2r), strictly below 1/r.
std::vector<Interval> interval_family(int j, int k, int r);

struct OkFamilies {
  int k = 1;
  Cover source;
  Int denom = 1;  // value-lattice denominator of the partition of unity
  std::vector<Cover> families;
  std::vector<std::vector<Interval>> intervals;  // per family, clipped to [0,1]
  std::vector<std::vector<Box>> value_boxes;     // per family, one box per set
  std::vector<Rat> family_mesh;
};

// Builds the families by pushing the cover's partition of unity through the
// interval pattern at the value-lattice resolution: sample values always land
// on interval lattice points, never in the open gaps, so every family covers
// every sample and the order sum is identically zero.
OkFamilies build_ok(const Cover& u, int k);

// Re-checks the three family invariants from the sets alone: within-family
// disjointness, refinement into the source cover, and the pointwise order
// inequality sum_j ord(C_j, x) >= -ord(source, x).
Certificate verify_ok(const OkFamilies& ok);

}  // namespace dyndim
