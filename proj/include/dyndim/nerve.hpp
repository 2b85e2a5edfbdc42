#pragma once

#include "dyndim/certificate.hpp"
#include "dyndim/ground.hpp"

namespace dyndim {

// Partitions of unity, nerve complexes, and the order subadditivity check.

// Exact rational partition of unity subordinate to a sampled cover, built
// from distance to the set complement. The support of values[i] is exactly
// the sample membership of the i-th cover set.
struct PartitionOfUnity {
  std::shared_ptr<const GroundSpace> space;
  std::vector<Bitset> supports;
  std::vector<std::vector<Rat>> values;  // values[i][p]

  void validate() const;  // nonnegative, unit sums, support containment
};

// f_i(x) = dist(x, X \ U_i) normalized by the sum over i. Distance to an
// empty complement counts as one. Requires a covering family on a space.
PartitionOfUnity partition_of_unity(const Cover& u);

// barycentric coordinates of x in the nerve: (f_1(x), ..., f_r(x))
std::vector<Rat> nerve_map(const PartitionOfUnity& pou, PointId p);

// Nerve of a cover: one vertex per set, a simplex per subfamily with a
// nonempty common intersection.
struct SimplicialComplex {
  int num_vertices = 0;
  // every nonempty face, as sorted vertex lists, ordered by size then lex
  std::vector<std::vector<int>> simplices;

  int dim() const;
  bool has_simplex(std::vector<int> j) const;
};

SimplicialComplex nerve_complex(const Cover& u, int max_sets = 20);

// Checks that v refines the joint refinement of u1 and u2 and that
// ord(v,x) <= ord(u1,x) + ord(u2,x) at every sample (or arrangement atom).
// The certificate value is the worst slack of the inequality.
Certificate verify_subadditive(const Cover& v, const Cover& u1, const Cover& u2);

// Searches for a cover passing verify_subadditive. Candidates are contiguous
// atom runs contained in some joint-refinement set (singleton partition on
// plain discrete spaces). Exhaustion of the node budget is reported through
// found=false, never by weakening the check.
struct SubadditiveSearchResult {
  bool found = false;
  Cover v;
  Certificate cert;
};
SubadditiveSearchResult subadditive_search(const Cover& u1, const Cover& u2,
                                           long long budget = 200000);

}  // namespace dyndim
