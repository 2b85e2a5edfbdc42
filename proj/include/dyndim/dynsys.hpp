#pragma once

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dyndim/certificate.hpp"
#include "dyndim/ground.hpp"

namespace dyndim {

// A group element as a word in the generators; letter g >= 0 is generator g,
// letter -g-1 is its inverse.
struct Word {
  std::vector<int> letters;
  bool operator==(const Word&) const = default;
};

enum class GroupKind { Trivial, Z, Zk, Finite, Free };

std::string group_kind_name(GroupKind k);
GroupKind group_kind_from_name(const std::string& s);

struct GroupSpec {
  GroupKind kind = GroupKind::Trivial;
  int rank = 0;                    // number of generators
  std::vector<int> orders;         // Finite only: declared order per generator
};

// A finite group action by permutations of the sample points. On grid spaces
// the generators must act by cell automorphisms (atom-type and adjacency
// preserving); on plain discrete spaces any bijection is a homeomorphism.
struct FinitePermSystem {
  std::shared_ptr<const GroundSpace> space;
  GroupSpec group;
  std::vector<std::vector<int>> gens;      // forward permutation per generator
  std::vector<std::vector<int>> gen_inv;   // filled by validate()
  bool isometry_flag = false;              // if set, distance preservation is validated

  void validate();
  int num_points() const { return space->num_points(); }
  int apply_gen(int letter, int p) const;  // letter < 0 applies an inverse
  int apply_word(const Word& w, int p) const;
};

FinitePermSystem make_trivial_system(std::shared_ptr<const GroundSpace> sp);
// single permutation acting as the generator of Z
FinitePermSystem make_z_system(std::shared_ptr<const GroundSpace> sp, std::vector<int> perm);
// single permutation of declared finite order m (validated)
FinitePermSystem make_cyclic_system(std::shared_ptr<const GroundSpace> sp, std::vector<int> perm,
                                    int order);

// Every element of the acting group's permutation image, as (word, image
// table) pairs in canonical order: breadth first by word length, generators
// before inverses, deduplicated by image. Throws budget error past the cap.
struct GroupElement {
  Word word;
  std::vector<int> perm;
};
std::vector<GroupElement> enumerate_group(const FinitePermSystem& sys,
                                          long long max_elems = 200000);

// orbit partition; orbits ordered by least member, members ascending
std::vector<std::vector<int>> orbits(const FinitePermSystem& sys);

// Invariant measures of a finite permutation system are exactly the convex
// combinations of uniform orbit measures.
struct InvariantMeasure {
  std::vector<Rat> orbit_weights;  // aligned with orbits(sys)

  void validate() const;  // nonnegative, sums to one
  // mass per point, given the orbit partition it was built against
  std::vector<Rat> point_masses(const std::vector<std::vector<int>>& orbs, int n) const;
};

Rat measure_of_set(const FinitePermSystem& sys, const std::vector<std::vector<int>>& orbs,
                   const InvariantMeasure& mu, const SetExpr& a);

// sup over invariant measures of mu(A): attained on a single orbit
Rat capacity(const FinitePermSystem& sys, const SetExpr& a);

// Verifies capacity(B_delta(K)) decreases to capacity(K) along the given
// deltas, with exact stabilization once delta is at most the least positive
// distance from outside points to K. B_delta is the strict ball.
Certificate capacity_ball_limit_check(const FinitePermSystem& sys, const SetExpr& k,
                                      const std::vector<Rat>& deltas);

// observable values: one rational tuple per point
using ObsValues = std::vector<std::vector<Rat>>;

struct FiberProduct {
  bool orbit_matching = false;  // pairs match on the whole orbit, not just pointwise
  std::vector<std::pair<int, int>> pairs;  // lexicographic, includes the diagonal
};

// Pairs (x1,x2) with f(x1)=f(x2); with orbit_matching, f(g x1)=f(g x2) for
// every group element g, which makes the pair set product-invariant.
FiberProduct fiber_product(const FinitePermSystem& sys, const ObsValues& f, bool orbit_matching);

// True iff every product orbit inside the fiber product stays on the
// diagonal; equivalently no invariant measure charges off-diagonal pairs.
struct AlmostEmbeddingResult {
  bool ok = false;
  Certificate cert;
};
AlmostEmbeddingResult almost_embedding_check(const FinitePermSystem& sys, const FiberProduct& fp);

// no off-diagonal product orbit meets the diagonal; structural for bijections
bool distal_check(const FinitePermSystem& sys);

// Subshift of finite type over a finite alphabet, acted on by the shift.
// Invariant measures are handled through the window-k block relaxation.
struct SftSystem {
  int alphabet = 2;
  int window = 2;
  std::vector<std::vector<int>> forbidden;

  void validate() const;  // symbols in range, window covers forbidden words, language nonempty
  bool block_allowed(const std::vector<int>& block) const;  // no forbidden factor
  std::vector<std::vector<int>> allowed_blocks() const;     // all allowed window-k blocks
};

}  // namespace dyndim
