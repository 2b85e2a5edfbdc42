#pragma once

#include "dyndim/dynsys.hpp"
#include "dyndim/ground.hpp"

namespace dyndim {

// maximal ergodic averages, averaging-set formulas, and ord(cover, action)

// sup over invariant measures of the integral of f; on permutation systems
// this is the best orbit average (extreme measures are orbit-uniform).
// f may take any sign.
Rat max_ergodic_average(const FinitePermSystem& sys, const std::vector<Rat>& f);

// integral of f against an orbit-weight measure
Rat integrate_observable(const FinitePermSystem& sys, const std::vector<std::vector<int>>& orbs,
                         const InvariantMeasure& mu, const std::vector<Rat>& f);

// x -> ord(v, x) as a per-point observable; v need not cover the space
std::vector<Rat> cover_order_observable(const Cover& v);

// sup over invariant measures of the integral of ord(v, .)
Rat ord_T(const FinitePermSystem& sys, const Cover& v);

// Averaging sets for the limit/infimum formulas, as explicit element lists.
struct FolnerSchedule {
  std::vector<std::vector<Word>> sets;
};

FolnerSchedule folner_z(int n_max);                    // {e, g, ..., g^{n-1}}
FolnerSchedule folner_zk(int rank, int n_max);         // exponent boxes {0..n-1}^rank
FolnerSchedule folner_finite(const FinitePermSystem&); // the whole group, once
// by group kind; throws for free (non-amenable) group tags
FolnerSchedule default_folner(const FinitePermSystem&, int n_max);

struct ErgAvgReport {
  Rat measure_value = 0;
  std::vector<Rat> folner_values;  // (1/|F_n|) sup_x sum_{g in F_n} f(gx), per set
  Rat folner_inf = 0;              // min over the enumerated finite-set family
  bool inf_capped = false;         // family was truncated: inf is an upper bound
  bool measure_le_inf = false;
  bool exact_equality = false;     // folner_inf == measure_value

  Json to_json() const;
};

// Evaluates the averaging-set formulas against the measure optimum. The
// enumerated family is the schedule plus, when the group image has at most
// subset_exhaust_cap elements, every nonempty subset of it; otherwise the
// infimum is only an upper bound and the report says so.
ErgAvgReport folner_formulas(const FinitePermSystem& sys, const std::vector<Rat>& f,
                             const FolnerSchedule& schedule, int subset_exhaust_cap = 12);

// --- subshift (window-k relaxation) ------------------------------------------

// max of sum f(b) w(b) over block weights w >= 0 with mass one and matching
// prefix/suffix marginals; exact LP value. f is indexed by allowed_blocks().
Rat sft_max_block_average(const SftSystem& sft, const std::vector<Rat>& f);

// capacity of a union of window-k cylinders (indicator over allowed blocks)
Rat sft_capacity(const SftSystem& sft, const std::vector<char>& block_set);

// ord_T of a cover whose sets are unions of window-k cylinders; each set is
// an indicator over allowed blocks, and together they must cover every block
Rat sft_ord_T(const SftSystem& sft, const std::vector<std::vector<char>>& block_sets);

}  // namespace dyndim
