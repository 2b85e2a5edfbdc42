#include "dyndim/almostemb.hpp"

#include <algorithm>
#include <map>
#include <random>
#include <string>
#include <thread>
#include <utility>

#include "dyndim/dimension.hpp"
#include "dyndim/ergopt.hpp"
#include "dyndim/error.hpp"
#include "dyndim/jsonio.hpp"

namespace dyndim {

namespace {

// closed rational interval, possibly a point
struct ValSpan {
  Rat lo, hi;
};

// exact value set of a component over a set: atom values plus the segments
// between adjacent atoms the set contains (cellwise-linear interpolation)
std::vector<ValSpan> value_spans(const GroundSpace& sp, const std::vector<Rat>& f,
                                 const Bitset& bits) {
  std::vector<ValSpan> spans;
  for (int p : bits.members()) {
    spans.push_back({f[p], f[p]});
    for (int q : sp.adjacent_atoms(p))
      if (q > p && bits.test(q)) {
        Rat a = f[p], b = f[q];
        if (b < a) std::swap(a, b);
        spans.push_back({a, b});
      }
  }
  return spans;
}

bool spans_meet(const std::vector<ValSpan>& a, const std::vector<ValSpan>& b) {
  for (const auto& s : a)
    for (const auto& t : b)
      if (s.lo <= t.hi && t.lo <= s.hi) return true;
  return false;
}

// points grouped by their membership profile across every level of family j
std::pair<std::vector<int>, int> level_classes(const std::vector<OkFamilies>& levels,
                                               const GroundSpace& space, int j) {
  int n = space.num_points();
  std::vector<std::vector<int>> profile(n, std::vector<int>(levels.size(), -1));
  for (size_t l = 0; l < levels.size(); ++l) {
    const Cover& fam = levels[l].families[j];
    for (size_t si = 0; si < fam.sets.size(); ++si)
      for (int p : set_bits_on_space(space, fam.sets[si]).members()) profile[p][l] = (int)si;
  }
  std::map<std::vector<int>, int> classes;
  std::vector<int> class_of(n);
  for (int p = 0; p < n; ++p) {
    auto it = classes.find(profile[p]);
    if (it == classes.end()) it = classes.emplace(profile[p], (int)classes.size()).first;
    class_of[p] = it->second;
  }
  return {std::move(class_of), (int)classes.size()};
}

Cover singleton_partition(const std::shared_ptr<const GroundSpace>& sp) {
  int n = sp->num_points();
  std::vector<SetExpr> sets;
  for (int p = 0; p < n; ++p) {
    Bitset b(n);
    b.set(p);
    sets.push_back(SetExpr::from_bits(b));
  }
  return make_bitset_cover(sp, std::move(sets), "singletons");
}

}  // namespace

void Observable::validate() const {
  if (!space) throw ValidationError("observable needs a ground space");
  if (components.empty()) throw ValidationError("observable needs at least one component");
  int n = space->num_points();
  Rat zero(0), one(1);
  for (const auto& comp : components) {
    if ((int)comp.size() != n)
      throw ValidationError("observable component length disagrees with the space");
    for (const Rat& v : comp)
      if (v < zero || v > one) throw ValidationError("observable values must lie in [0,1]");
  }
}

ObsValues Observable::tuples() const {
  int n = space ? space->num_points() : 0;
  ObsValues out(n);
  for (int p = 0; p < n; ++p) {
    out[p].reserve(components.size());
    for (const auto& comp : components) out[p].push_back(comp[p]);
  }
  return out;
}

bool separates(const GroundSpace& sp, const std::vector<Rat>& component,
               const std::vector<SetExpr>& family) {
  if ((int)component.size() != sp.num_points())
    throw ValidationError("component length disagrees with the space");
  std::vector<Bitset> bits;
  for (const auto& s : family) {
    if (s.open) throw ValidationError("family members must be closed");
    bits.push_back(set_bits_on_space(sp, s));
  }
  for (size_t a = 0; a + 1 < bits.size(); ++a)
    for (size_t b = a + 1; b < bits.size(); ++b)
      if (bits[a].intersects(bits[b]))
        throw ValidationError("family members " + std::to_string(a) + " and " +
                              std::to_string(b) + " overlap");

  std::vector<std::vector<ValSpan>> spans;
  for (const auto& b : bits) spans.push_back(value_spans(sp, component, b));
  for (size_t a = 0; a + 1 < spans.size(); ++a)
    for (size_t b = a + 1; b < spans.size(); ++b)
      if (spans_meet(spans[a], spans[b])) return false;
  return true;
}

Observable build_separating_observable(const std::vector<OkFamilies>& levels, int d,
                                       const std::vector<Rat>& avoid) {
  if (d < 1) throw ValidationError("the observable needs at least one component");
  if (levels.empty()) throw ValidationError("at least one family level is required");
  auto space = levels.front().source.space;
  if (!space) throw ValidationError("family levels must be sampled on a ground space");
  for (const auto& lv : levels) {
    if (lv.source.space != space)
      throw ValidationError("family levels must share one ground space");
    if (lv.k < d) throw ValidationError("a level has fewer families than components");
  }
  int n = space->num_points();

  Observable f;
  f.space = space;
  f.components.resize(d);
  for (int j = 0; j < d; ++j) {
    auto [class_of, m] = level_classes(levels, *space, j);
    int denom = std::max(1, m);
    std::vector<Rat> vals;
    while (true) {
      vals.clear();
      for (int i = 0; i < denom && (int)vals.size() < m; ++i) {
        Rat v(2 * i + 1, 2 * denom);
        if (std::find(avoid.begin(), avoid.end(), v) == avoid.end()) vals.push_back(v);
      }
      if ((int)vals.size() == m) break;
      denom *= 2;
    }
    f.components[j].resize(n);
    for (int p = 0; p < n; ++p) f.components[j][p] = vals[class_of[p]];
  }

  // replay: distinct sets get distinct point values by construction, but
  // interpolation segments on grid spaces can straddle other sets when
  // non-nested levels force a set to take several values
  for (size_t l = 0; l < levels.size(); ++l)
    for (int j = 0; j < d; ++j)
      if (!separates(*space, f.components[j], levels[l].families[j].sets))
        throw ValidationError(
            "family levels are not simultaneously separable by cellwise-linear values");
  return f;
}

PipelineResult thm103_run(const FinitePermSystem& sys, int d, const Observable* supplied) {
  if (d < 1) throw ValidationError("the embedding target dimension must be positive");
  if (!sys.space) throw ValidationError("the pipeline needs a sampled system");
  if (sys.space->kind != SpaceKind::Discrete)
    throw ValidationError("the almost-embedding pipeline runs on finite discrete systems");
  int n = sys.num_points();

  PipelineResult out;
  Certificate& c = out.cert;
  c.kind = CertKind::PassFail;
  c.quantity = "almost_embedding_pipeline";
  c.verified = true;
  Json stages = Json::array();
  auto fail_at = [&](const char* stage) {
    c.pass = false;
    c.witness["stages"] = stages;
    c.witness["failed_stage"] = stage;
  };

  // certified dimension bound from the singleton partition
  Cover u = singleton_partition(sys.space);
  Certificate upper = dim_U_T_upper(sys, u, u);
  Rat bound = upper.value;
  Rat half_d = Rat(d) / 2;
  c.value = bound;
  {
    Json st = Json::object();
    st["stage"] = "dimension_bound";
    st["upper_bound"] = rat_json(bound);
    st["threshold"] = rat_json(half_d);
    stages.push_back(st);
  }
  if (!(bound < half_d)) {
    fail_at("dimension_bound");
    return out;
  }
  Rat gap = half_d - bound;
  Rat eta = gap / 2;

  // the cover level: mesh zero, orbit averages below d/2 - eta
  Rat u_mesh = mesh(u);
  Rat u_ord = ord_T(sys, u);
  Rat cover_cap = half_d - eta;
  {
    Json st = Json::object();
    st["stage"] = "covers";
    st["cover"] = u.label;
    st["mesh"] = rat_json(u_mesh);
    st["ord_T"] = rat_json(u_ord);
    st["threshold"] = rat_json(cover_cap);
    stages.push_back(st);
  }
  if (!(u_ord < cover_cap)) {
    fail_at("covers");
    return out;
  }

  // disjoint families refining the cover, orders certified by replay
  OkFamilies ok = build_ok(u, d);
  Certificate okc = verify_ok(ok);
  {
    Json st = Json::object();
    st["stage"] = "disjoint_families";
    st["families"] = ok.k;
    st["verified"] = okc.pass;
    stages.push_back(st);
  }
  if (!okc.pass) {
    c.witness["family_check"] = okc.to_json();
    fail_at("disjoint_families");
    return out;
  }

  // observable: built deterministically, or supplied by the caller (the
  // replay is then informational and the fiber product renders the verdict)
  std::vector<OkFamilies> levels;
  levels.push_back(std::move(ok));
  if (supplied) {
    supplied->validate();
    if (supplied->space != sys.space)
      throw ValidationError("the supplied observable lives on a different space");
    if (supplied->d() != d)
      throw ValidationError("the supplied observable has the wrong number of components");
    out.observable = *supplied;
  } else {
    out.observable = build_separating_observable(levels, d);
  }
  bool sep_all = true;
  Json replay = Json::array();
  for (int j = 0; j < d; ++j) {
    bool s = separates(*sys.space, out.observable.components[j], levels[0].families[j].sets);
    sep_all = sep_all && s;
    replay.push_back(s);
  }
  {
    Json st = Json::object();
    st["stage"] = "separating_observable";
    st["supplied"] = (supplied != nullptr);
    st["separates"] = replay;
    stages.push_back(st);
  }
  if (!sep_all && !supplied) {
    fail_at("separating_observable");
    return out;
  }

  // fiber product of the orbit-matched observable, and the exact measure
  // inequality over its product orbits
  out.fiber = fiber_product(sys, out.observable.tuples(), true);
  std::vector<int> indicator_sum(n, 0);
  for (int j = 0; j < d; ++j) {
    Bitset support(n);
    for (const auto& s : levels[0].families[j].sets)
      support = support | set_bits_on_space(*sys.space, s);
    for (int p : support.members()) ++indicator_sum[p];
  }
  std::map<std::pair<int, int>, int> pair_index;
  for (size_t i = 0; i < out.fiber.pairs.size(); ++i) pair_index[out.fiber.pairs[i]] = (int)i;
  std::vector<int> orbit_of(out.fiber.pairs.size(), -1);
  Rat min_avg(2 * d);
  bool have_orbit = false;
  for (size_t i = 0; i < out.fiber.pairs.size(); ++i) {
    if (orbit_of[i] >= 0) continue;
    std::vector<int> stack{(int)i};
    orbit_of[i] = (int)i;
    long long total = 0, size = 0;
    while (!stack.empty()) {
      int cur = stack.back();
      stack.pop_back();
      auto [a, b] = out.fiber.pairs[cur];
      total += indicator_sum[a] + indicator_sum[b];
      ++size;
      for (const auto& tables : {sys.gens, sys.gen_inv})
        for (const auto& perm : tables) {
          auto it = pair_index.find({perm[a], perm[b]});
          if (it == pair_index.end())
            throw InternalError("orbit-matched fiber product is not product-invariant");
          if (orbit_of[it->second] < 0) {
            orbit_of[it->second] = (int)i;
            stack.push_back(it->second);
          }
        }
    }
    Rat avg(total, size);
    if (!have_orbit || avg < min_avg) min_avg = avg;
    have_orbit = true;
  }
  Rat two_eta = eta * 2;
  Rat threshold = Rat(d) + two_eta;
  bool measure_ok = have_orbit && min_avg > threshold;
  {
    Json st = Json::object();
    st["stage"] = "measure_inequality";
    st["min_orbit_average"] = rat_json(min_avg);
    st["threshold"] = rat_json(threshold);
    st["holds"] = measure_ok;
    stages.push_back(st);
  }
  if (!measure_ok) {
    fail_at("measure_inequality");
    return out;
  }

  AlmostEmbeddingResult aec = almost_embedding_check(sys, out.fiber);
  {
    Json st = Json::object();
    st["stage"] = "almost_embedding";
    st["pass"] = aec.ok;
    stages.push_back(st);
  }
  c.pass = aec.ok;
  c.witness["stages"] = stages;
  c.witness["eta"] = rat_json(eta);
  c.witness["fiber_pairs"] = (Json::number_integer_t)out.fiber.pairs.size();
  c.witness["almost_embedding"] = aec.cert.to_json();
  if (!aec.ok) c.witness["failed_stage"] = "almost_embedding";
  return out;
}

Certificate thm103_pipeline(const FinitePermSystem& sys, int d, const Observable* supplied) {
  return thm103_run(sys, d, supplied).cert;
}

Certificate cor104_check(const FinitePermSystem& sys, int d) {
  if (!distal_check(sys))
    throw ValidationError("the embedding upgrade needs a distal system");
  PipelineResult run = thm103_run(sys, d);

  Certificate c;
  c.kind = CertKind::PassFail;
  c.quantity = "distal_embedding";
  c.verified = true;
  long long off = 0;
  std::pair<int, int> first{-1, -1};
  for (const auto& pr : run.fiber.pairs)
    if (pr.first != pr.second) {
      if (off == 0) first = pr;
      ++off;
    }
  bool injective = off == 0;
  c.pass = run.cert.pass && injective;
  c.value = Rat(off);
  c.witness["distal"] = true;
  c.witness["pipeline_pass"] = run.cert.pass;
  c.witness["off_diagonal_pairs"] = (Json::number_integer_t)off;
  c.witness["injective"] = injective;
  if (!injective) c.witness["pair"] = Json::array({first.first, first.second});
  c.witness["argument"] =
      "distal almost embeddings are embeddings; on a finite system injectivity of the "
      "orbit-matched observable is confirmed by enumerating the fiber product";
  c.witness["pipeline"] = run.cert.to_json();
  return c;
}

Json DensityReport::to_json() const {
  Json j = Json::object();
  j["d"] = d;
  j["resolution"] = resolution;
  j["base_seed"] = base_seed;
  j["num_seeds"] = (int)samples.size();
  j["separation_density"] = rat_json(separation_density);
  j["pass_density"] = rat_json(pass_density);
  Json rows = Json::array();
  for (const DitherSample& s : samples) {
    Json r = Json::object();
    r["seed"] = s.seed;
    r["separates"] = s.separates_all;
    r["pipeline_pass"] = s.pipeline_pass;
    rows.push_back(r);
  }
  j["samples"] = rows;
  return j;
}

DensityReport estimate_separation_density(const FinitePermSystem& sys, int d, int num_seeds,
                                          unsigned base_seed, int threads) {
  if (d < 1) throw ValidationError("the observable needs at least one component");
  if (!sys.space || sys.space->has_cells())
    throw ValidationError("the almost-embedding pipeline runs on finite discrete systems");
  if (num_seeds < 0) throw ValidationError("seed count must be nonnegative");

  Cover u = singleton_partition(sys.space);
  std::vector<OkFamilies> levels{build_ok(u, d)};
  const GroundSpace& space = *sys.space;
  int n = space.num_points();

  std::vector<std::vector<int>> class_of(d);
  int max_classes = 1;
  for (int j = 0; j < d; ++j) {
    auto [cls, m] = level_classes(levels, space, j);
    class_of[j] = std::move(cls);
    max_classes = std::max(max_classes, m);
  }
  int resolution = 1;
  while (resolution < 4 * max_classes) resolution *= 2;

  DensityReport rep;
  rep.d = d;
  rep.resolution = resolution;
  rep.base_seed = base_seed;
  rep.samples.resize(num_seeds);

  auto run_seed = [&](int i) {
    std::mt19937 rng(base_seed + (unsigned)i);
    Observable f;
    f.space = sys.space;
    f.components.resize(d);
    for (int j = 0; j < d; ++j) {
      int m = 1 + *std::max_element(class_of[j].begin(), class_of[j].end());
      std::vector<Rat> vals(m);
      for (Rat& v : vals) v = Rat(2 * (rng() % (unsigned)resolution) + 1, 2 * resolution);
      f.components[j].resize(n);
      for (int p = 0; p < n; ++p) f.components[j][p] = vals[class_of[j][p]];
    }
    bool sep = true;
    for (const OkFamilies& lv : levels)
      for (int j = 0; j < d && sep; ++j)
        sep = separates(space, f.components[j], lv.families[j].sets);
    PipelineResult run = thm103_run(sys, d, &f);
    rep.samples[i] = DitherSample{base_seed + (unsigned)i, sep, run.cert.pass};
  };

  int workers = std::max(1, threads);
  if (workers == 1 || num_seeds <= 1) {
    for (int i = 0; i < num_seeds; ++i) run_seed(i);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&, w] {
        for (int i = w; i < num_seeds; i += workers) run_seed(i);
      });
    for (std::thread& t : pool) t.join();
  }

  if (num_seeds > 0) {
    int sep_count = 0, pass_count = 0;
    for (const DitherSample& s : rep.samples) {
      sep_count += s.separates_all ? 1 : 0;
      pass_count += s.pipeline_pass ? 1 : 0;
    }
    rep.separation_density = Rat(sep_count, num_seeds);
    rep.pass_density = Rat(pass_count, num_seeds);
  }
  return rep;
}

}  // namespace dyndim
