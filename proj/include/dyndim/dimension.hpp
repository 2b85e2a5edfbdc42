#pragma once

#include <utility>
#include <vector>

#include "dyndim/boxgeom.hpp"
#include "dyndim/certificate.hpp"
#include "dyndim/dynsys.hpp"
#include "dyndim/ground.hpp"

namespace dyndim {

// Certified bounds on dim(u,T) = inf over refinements v of ord_T(v), and the
// theorem-level checkers built from them. Upper bounds come from exhibiting a
// refinement; lower bounds from the 1-complex connectivity argument plus an
// orbit-averaged Dirac measure. Values are exact rationals throughout.

// Upper bound dim(u,T) <= ord_T(v) for an explicit refinement v of u.
// Throws if v does not refine u (message carries the offending set index).
Certificate dim_U_T_upper(const FinitePermSystem& sys, const Cover& u, const Cover& v);

// Lower bound dim(u,T) >= m/k on a 1-complex (grid cycle or interval), where
// m = min of ord_sup over all covers by closed cell unions refining u
// (exhaustive search) and k = max orbit size. Justification: any refinement
// has a point of order >= m, and the uniform measure on that point's orbit
// is invariant. Requires every set of u to be a proper subset.
Certificate dim_U_T_lower_dim1(const FinitePermSystem& sys, const Cover& u,
                               SearchBudget* budget = nullptr);

// Closed sets K indexed by (group row j, group element), as used by the
// combinatorial upper bound: row j contributes translates T_g(K_{j,g}).
struct KSetFamily {
  std::vector<std::vector<std::pair<Word, SetExpr>>> rows;
};

// Checks (1) ord(u,x) <= sum of K indicators at every point, (2) within each
// row the translates T_g(K_{j,g}) are pairwise disjoint. Together these give
// ord_T(u) <= d for any invariant measure, since each row's translate family
// has total mass at most one. Hypothesis failure -> fail certificate with a
// witness; success -> upper-bound certificate at value d.
Certificate lemma92_check(const FinitePermSystem& sys, const Cover& u, const KSetFamily& kf,
                          int d);

// ord of the brickwall pullback cover on ([0,1]^d)^(Z/n) with the cyclic
// shift is at most d. Builds the brickwall on the d*n coordinate axes,
// certifies its pointwise order bound, and checks per-row lattice
// disjointness by exact residue arithmetic; the K sets of the combinatorial
// bound are K(j,g) = {x : x(j,-g) in A(j,g)}, whose g-translates test the
// single coordinate x(j,0) against pairwise disjoint lattice sets.
Certificate cubical_shift_upper(int d, int n, const Rat& eps, long long atom_cap = 64'000'000);

// d=1 companion lower bound: diagonal points are shift-fixed, the brickwall
// cells trace to a cover of the diagonal by proper closed intervals, and any
// cover of a connected interval by proper closed sets has a double point;
// the Dirac measure there is invariant. Emits the double point it finds.
Certificate cubical_shift_fixed_lower(int n, const Rat& eps, long long cell_cap = 2'000'000);

// Free finite-group action on a 1-complex: dim(X,T) = dim(X)/|G| = 1/|G|.
// Builds a two-arc cover whose junction vertices avoid all their translates,
// so ord_T is exactly 1/|G|, and matches it against the connectivity lower
// bound. Non-free actions are rejected with a witness point.
Certificate thm71_check(const FinitePermSystem& sys);

// Searches covers of mesh < eps by closed cell runs, minimizing the capacity
// of the union of combinatorial boundaries (atoms adjacent to the
// complement). pass=true: witness cover with capacity < eps (the exact
// minimum over the candidate family, lexicographically least witness).
// pass=false: either the exhausted search proves no candidate cover gets
// below eps, or the node budget ran out first; the witness says which.
Certificate sbp_witness_search(const FinitePermSystem& sys, const Rat& eps,
                               SearchBudget* budget = nullptr);

// Rokhlin-type tower data: closed base sets V_i with finite shape sets S_i,
// invariance test set K with tolerance eps, and a declared bound on the
// capacity of the part of the space the towers miss.
struct UrpTowerCertificate {
  std::vector<SetExpr> v_sets;
  std::vector<std::vector<Word>> shapes;
  std::vector<Word> k_set;
  Rat epsilon = 0;
  Rat leftover_bound = 1;  // capacity never exceeds one, so 1 never binds
};

// Verifies the tower invariants exactly: the translates {T_g V_i : g in S_i}
// are pairwise disjoint, and the leftover capacity is below eps and the
// declared bound. Shape invariance |gS_i delta S_i| <= eps |S_i| for g in K
// is checked at the permutation-image level and recorded in the witness.
Certificate urp_check(const FinitePermSystem& sys, const UrpTowerCertificate& towers);

// Mean-dimension estimate against the dimension certificates. The estimate
// is (1/|F|) * min ord_sup over covers refining the join of the F-translates
// of a canonical cover; F is the whole group image for finite kinds and an
// initial generator segment of length n_max otherwise.
struct MdimReport {
  Rat mdim_estimate = 0;
  int folner_size = 1;
  Certificate dim_lower;
  Certificate dim_upper;
  bool inequality_ok = false;  // mdim_estimate <= dim_upper.value + slack
  bool equality = false;       // lower, upper, and estimate all agree

  Json to_json() const;
};

MdimReport mdim_dim_compare(const FinitePermSystem& sys, int n_max = 8, const Rat& slack = Rat(0),
                            SearchBudget* budget = nullptr);

// Subshift variant: the canonical cover is the partition into one-symbol
// cylinders, whose length-n join is the partition into allowed n-blocks.
MdimReport mdim_dim_compare_sft(const SftSystem& sft, int n_max = 4);

// image of a sampled cover under the permutation of a group element
Cover translate_cover(const FinitePermSystem& sys, const Cover& u, const Word& w);

}  // namespace dyndim
