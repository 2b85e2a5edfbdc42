#pragma once

#include <vector>

#include "dyndim/rational.hpp"

namespace dyndim {

// maximize c.x subject to a x = b, x >= 0, in exact rational arithmetic
struct LpProblem {
  std::vector<std::vector<Rat>> a;
  std::vector<Rat> b;
  std::vector<Rat> c;
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpResult {
  LpStatus status = LpStatus::Infeasible;
  Rat value = 0;
  std::vector<Rat> x;
};

// Two-phase primal simplex with Bland's rule: no cycling, deterministic
// pivot order, exact rationals throughout.
LpResult lp_solve_max(const LpProblem& p);

}  // namespace dyndim
