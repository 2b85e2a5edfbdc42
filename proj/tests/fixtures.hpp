#pragma once

// Shared fixtures for the test binaries: small systems with hand-checkable
// orbit structure, and a deterministic RNG (mt19937 with modulo draws so
// sequences are identical across platforms).

#include <random>

#include "dyndim/dynsys.hpp"
#include "dyndim/ground.hpp"

namespace fx {

using namespace dyndim;

inline int draw(std::mt19937& rng, int n) { return (int)(rng() % (unsigned)n); }

inline std::vector<int> random_perm(std::mt19937& rng, int n) {
  std::vector<int> p(n);
  for (int i = 0; i < n; ++i) p[i] = i;
  for (int i = n - 1; i > 0; --i) std::swap(p[i], p[draw(rng, i + 1)]);
  return p;
}

inline std::vector<int> cycle_perm(int n, int shift) {
  std::vector<int> p(n);
  for (int i = 0; i < n; ++i) p[i] = (i + shift) % n;
  return p;
}

// regular 12-gon as a grid cycle (24 atoms), antipodal Z/2 action
inline FinitePermSystem antipodal_12gon() {
  auto sp = make_grid_cycle(12);
  return make_cyclic_system(sp, cycle_perm(24, 12), 2);
}

// same space, rotation by a third of a turn (Z/3)
inline FinitePermSystem rotation_12gon() {
  auto sp = make_grid_cycle(12);
  return make_cyclic_system(sp, cycle_perm(24, 8), 3);
}

// Z acting by a random permutation of a plain discrete space
inline FinitePermSystem random_z_system(std::mt19937& rng, int n) {
  return make_z_system(make_discrete_space(n), random_perm(rng, n));
}

inline SftSystem golden_mean_sft() {
  SftSystem sft;
  sft.alphabet = 2;
  sft.window = 2;
  sft.forbidden = {{1, 1}};
  sft.validate();
  return sft;
}

}  // namespace fx
