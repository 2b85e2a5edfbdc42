#include "dyndim/ergopt.hpp"

#include <algorithm>
#include <map>

#include "dyndim/error.hpp"
#include "dyndim/jsonio.hpp"
#include "dyndim/simplex.hpp"

namespace dyndim {

Rat max_ergodic_average(const FinitePermSystem& sys, const std::vector<Rat>& f) {
  int n = sys.num_points();
  if ((int)f.size() != n) throw ValidationError("observable size does not match the space");
  auto orbs = orbits(sys);
  bool have = false;
  Rat best = 0;
  for (const auto& o : orbs) {
    Rat s = 0;
    for (int p : o) s += f[p];
    Rat avg = s / (int)o.size();
    if (!have || avg > best) {
      best = avg;
      have = true;
    }
  }
  if (!have) throw InternalError("orbit partition of a nonempty space is empty");
  return best;
}

Rat integrate_observable(const FinitePermSystem& sys, const std::vector<std::vector<int>>& orbs,
                         const InvariantMeasure& mu, const std::vector<Rat>& f) {
  if ((int)f.size() != sys.num_points())
    throw ValidationError("observable size does not match the space");
  if (mu.orbit_weights.size() != orbs.size())
    throw ValidationError("measure weights do not match the orbit partition");
  Rat total = 0;
  for (size_t i = 0; i < orbs.size(); ++i) {
    Rat s = 0;
    for (int p : orbs[i]) s += f[p];
    total += mu.orbit_weights[i] * s / (int)orbs[i].size();
  }
  return total;
}

std::vector<Rat> cover_order_observable(const Cover& v) {
  if (v.symbolic()) throw ValidationError("order observable needs a sampled cover");
  int n = v.space->num_points();
  std::vector<Rat> f(n);
  for (int p = 0; p < n; ++p) f[p] = ord_at(v, p);
  return f;
}

Rat ord_T(const FinitePermSystem& sys, const Cover& v) {
  if (v.symbolic()) throw ValidationError("ord_T needs a cover sampled on the acting space");
  if (v.space->num_points() != sys.num_points())
    throw ValidationError("cover and system live on different spaces");
  return max_ergodic_average(sys, cover_order_observable(v));
}

FolnerSchedule folner_z(int n_max) {
  if (n_max < 1) throw ValidationError("schedule length must be positive");
  FolnerSchedule sch;
  for (int n = 1; n <= n_max; ++n) {
    std::vector<Word> fset;
    for (int j = 0; j < n; ++j) fset.push_back(Word{std::vector<int>(j, 0)});
    sch.sets.push_back(std::move(fset));
  }
  return sch;
}

FolnerSchedule folner_zk(int rank, int n_max) {
  if (rank < 1) throw ValidationError("rank must be positive");
  if (n_max < 1) throw ValidationError("schedule length must be positive");
  FolnerSchedule sch;
  for (int n = 1; n <= n_max; ++n) {
    std::vector<Word> fset;
    std::vector<int> e(rank, 0);
    while (true) {
      Word w;
      for (int g = 0; g < rank; ++g)
        for (int j = 0; j < e[g]; ++j) w.letters.push_back(g);
      fset.push_back(std::move(w));
      int g = rank - 1;
      while (g >= 0 && e[g] == n - 1) e[g--] = 0;
      if (g < 0) break;
      ++e[g];
    }
    sch.sets.push_back(std::move(fset));
  }
  return sch;
}

FolnerSchedule folner_finite(const FinitePermSystem& sys) {
  FolnerSchedule sch;
  std::vector<Word> fset;
  for (const auto& el : enumerate_group(sys)) fset.push_back(el.word);
  sch.sets.push_back(std::move(fset));
  return sch;
}

FolnerSchedule default_folner(const FinitePermSystem& sys, int n_max) {
  switch (sys.group.kind) {
    case GroupKind::Trivial: {
      FolnerSchedule sch;
      sch.sets.push_back({Word{}});
      return sch;
    }
    case GroupKind::Z:
      return folner_z(n_max);
    case GroupKind::Zk:
      return folner_zk(sys.group.rank, n_max);
    case GroupKind::Finite:
      return folner_finite(sys);
    case GroupKind::Free:
      throw ValidationError("averaging-set formulas need an amenable acting group");
  }
  throw InternalError("unhandled group kind");
}

namespace {

// max over points of the summed integer observable along the family, divided
// by the common scale. `tables` holds one image table per family element.
Rat family_value(int n, const std::vector<const std::vector<int>*>& tables,
                 const std::vector<Int>& nums, const Int& scale) {
  Int best = 0;
  bool have = false;
  for (int x = 0; x < n; ++x) {
    Int s = 0;
    for (const auto* t : tables) s += nums[(*t)[x]];
    if (!have || s > best) {
      best = s;
      have = true;
    }
  }
  Rat denom = Rat(scale) * (int)tables.size();
  return Rat(best) / denom;
}

// DFS over nonempty subsets of `elems`, reusing partial point sums; keeps the
// minimum subset value seen.
void subset_inf(const std::vector<GroupElement>& elems, size_t idx, int size,
                std::vector<Int>& acc, const std::vector<Int>& nums, const Int& scale, Rat& inf,
                bool& have) {
  int n = (int)acc.size();
  if (size > 0) {
    Int best = acc[0];
    for (int x = 1; x < n; ++x)
      if (acc[x] > best) best = acc[x];
    Rat denom = Rat(scale) * size;
    Rat val = Rat(best) / denom;
    if (!have || val < inf) {
      inf = val;
      have = true;
    }
  }
  if (idx == elems.size()) return;
  subset_inf(elems, idx + 1, size, acc, nums, scale, inf, have);
  const auto& perm = elems[idx].perm;
  for (int x = 0; x < n; ++x) acc[x] += nums[perm[x]];
  subset_inf(elems, idx + 1, size + 1, acc, nums, scale, inf, have);
  for (int x = 0; x < n; ++x) acc[x] -= nums[perm[x]];
}

}  // namespace

ErgAvgReport folner_formulas(const FinitePermSystem& sys, const std::vector<Rat>& f,
                             const FolnerSchedule& schedule, int subset_exhaust_cap) {
  if (sys.group.kind == GroupKind::Free)
    throw ValidationError("averaging-set formulas need an amenable acting group");
  int n = sys.num_points();
  if ((int)f.size() != n) throw ValidationError("observable size does not match the space");
  if (schedule.sets.empty()) throw ValidationError("empty averaging schedule");
  for (const auto& fs : schedule.sets)
    if (fs.empty()) throw ValidationError("averaging sets must be nonempty");
  if (subset_exhaust_cap < 0 || subset_exhaust_cap > 20)
    throw ValidationError("subset cap out of range");

  Int scale = 1;
  for (const auto& r : f) scale = int_lcm(scale, rat_den(r));
  std::vector<Int> nums(n);
  for (int p = 0; p < n; ++p) {
    Rat scaled = f[p] * Rat(scale);
    nums[p] = rat_num(scaled);
  }

  ErgAvgReport rep;
  rep.measure_value = max_ergodic_average(sys, f);

  bool have_inf = false;
  Rat inf = 0;
  for (const auto& fs : schedule.sets) {
    std::vector<std::vector<int>> tabs;
    tabs.reserve(fs.size());
    for (const auto& w : fs) {
      std::vector<int> t(n);
      for (int p = 0; p < n; ++p) t[p] = sys.apply_word(w, p);
      tabs.push_back(std::move(t));
    }
    std::vector<const std::vector<int>*> ptrs;
    for (const auto& t : tabs) ptrs.push_back(&t);
    Rat val = family_value(n, ptrs, nums, scale);
    rep.folner_values.push_back(val);
    if (!have_inf || val < inf) {
      inf = val;
      have_inf = true;
    }
  }

  // When the acting group's permutation image is small enough, take the
  // infimum over every nonempty finite subset. Otherwise the schedule alone
  // is enumerated and the reported infimum is only an upper bound.
  std::vector<GroupElement> elems;
  bool exhaustive = true;
  try {
    elems = enumerate_group(sys, subset_exhaust_cap);
  } catch (const BudgetError&) {
    exhaustive = false;
  }
  if (exhaustive && !elems.empty()) {
    std::vector<Int> acc(n, 0);
    subset_inf(elems, 0, 0, acc, nums, scale, inf, have_inf);
  } else {
    rep.inf_capped = true;
  }

  rep.folner_inf = inf;
  rep.measure_le_inf = rep.measure_value <= inf;
  rep.exact_equality = rep.folner_inf == rep.measure_value;
  return rep;
}

Json ErgAvgReport::to_json() const {
  Json j;
  j["measure_value"] = rat_json(measure_value);
  j["folner_values"] = rat_vec_json(folner_values);
  j["folner_inf"] = rat_json(folner_inf);
  j["inf_capped"] = inf_capped;
  j["measure_le_inf"] = measure_le_inf;
  j["exact_equality"] = exact_equality;
  return j;
}

// --- subshift block relaxation ------------------------------------------------

Rat sft_max_block_average(const SftSystem& sft, const std::vector<Rat>& f) {
  sft.validate();
  auto blocks = sft.allowed_blocks();
  if (f.size() != blocks.size())
    throw ValidationError("block observable size does not match the allowed-block list");

  int nb = (int)blocks.size();
  LpProblem lp;
  lp.c = f;
  lp.a.push_back(std::vector<Rat>(nb, 1));
  lp.b.push_back(1);

  if (sft.window >= 2) {
    // stationarity: for every boundary word, mass entering equals mass leaving
    std::map<std::vector<int>, std::vector<Rat>> rows;
    for (int bi = 0; bi < nb; ++bi) {
      std::vector<int> pre(blocks[bi].begin(), blocks[bi].end() - 1);
      std::vector<int> suf(blocks[bi].begin() + 1, blocks[bi].end());
      auto& rp = rows[pre];
      if (rp.empty()) rp.assign(nb, 0);
      rp[bi] += 1;
      auto& rs = rows[suf];
      if (rs.empty()) rs.assign(nb, 0);
      rs[bi] -= 1;
    }
    for (auto& kv : rows) {
      auto& row = kv.second;
      bool all_zero = true;
      for (const auto& c : row)
        if (c != 0) {
          all_zero = false;
          break;
        }
      if (all_zero) continue;
      lp.a.push_back(row);
      lp.b.push_back(0);
    }
  }

  LpResult res = lp_solve_max(lp);
  if (res.status != LpStatus::Optimal)
    throw InternalError("block polytope of a validated subshift should be a nonempty polytope");
  return res.value;
}

Rat sft_capacity(const SftSystem& sft, const std::vector<char>& block_set) {
  auto blocks = sft.allowed_blocks();
  if (block_set.size() != blocks.size())
    throw ValidationError("block set size does not match the allowed-block list");
  std::vector<Rat> f(blocks.size(), 0);
  for (size_t i = 0; i < blocks.size(); ++i)
    if (block_set[i]) f[i] = 1;
  return sft_max_block_average(sft, f);
}

Rat sft_ord_T(const SftSystem& sft, const std::vector<std::vector<char>>& block_sets) {
  auto blocks = sft.allowed_blocks();
  if (block_sets.empty()) throw ValidationError("empty cover");
  std::vector<Rat> f(blocks.size());
  for (size_t i = 0; i < blocks.size(); ++i) {
    int count = 0;
    for (const auto& s : block_sets) {
      if (s.size() != blocks.size())
        throw ValidationError("block set size does not match the allowed-block list");
      if (s[i]) ++count;
    }
    if (count == 0) throw ValidationError("cover misses an allowed block");
    f[i] = count - 1;
  }
  return sft_max_block_average(sft, f);
}

}  // namespace dyndim
