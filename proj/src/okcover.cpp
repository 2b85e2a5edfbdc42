#include "dyndim/okcover.hpp"

#include <map>

#include "dyndim/error.hpp"
#include "dyndim/jsonio.hpp"
#include "dyndim/nerve.hpp"

namespace dyndim {

namespace {

// n-th pattern interval at lattice denominator den, clipped to [0,1];
// empty optional when the intersection is empty
std::optional<Interval> pattern_interval(const Int& n, int j, int k, const Int& den) {
  Int lo_num = (Int(k) + 1) * n - j;
  Int hi_num = lo_num + k;
  Rat lo(lo_num, den);
  Rat hi(hi_num, den);
  if (hi < 0 || lo > 1) return std::nullopt;
  if (lo < 0) lo = 0;
  if (hi > 1) hi = 1;
  return Interval{lo, hi};
}

std::vector<Interval> pattern_family(int j, int k, const Int& den) {
  std::vector<Interval> out;
  for (Int n = 0;; ++n) {
    auto iv = pattern_interval(n, j, k, den);
    if (!iv) break;
    out.push_back(*iv);
  }
  return out;
}

}  // namespace

std::vector<Interval> interval_family(int j, int k, int r) {
  if (k < 1 || r < 1) throw ValidationError("family parameters must be positive");
  if (j < 0 || j >= k) throw ValidationError("family index out of range");
  return pattern_family(j, k, Int(2) * k * r);
}

OkFamilies build_ok(const Cover& u, int k) {
  if (k < 1) throw ValidationError("family count must be positive");
  auto pou = partition_of_unity(u);  // validates covering, sampled space
  int n = u.space->num_points();
  int r = (int)u.sets.size();

  // Value-lattice denominator: a common denominator of every partition value,
  // raised to at least 2kr so interval lengths stay below 1/r.
  Int base = 1;
  for (const auto& row : pou.values)
    for (const auto& v : row) base = int_lcm(base, rat_den(v));
  Int target = Int(2) * k * r;
  Int mult = (target + base - 1) / base;
  if (mult < 1) mult = 1;
  Int den = base * mult;

  // integer value coordinates m[i][p] = f_i(p) * den
  std::vector<std::vector<Int>> m(r, std::vector<Int>(n));
  for (int i = 0; i < r; ++i)
    for (int p = 0; p < n; ++p) {
      Rat scaled = pou.values[i][p] * Rat(den);
      if (!rat_is_integer(scaled)) throw InternalError("value lattice misses a partition value");
      m[i][p] = rat_num(scaled);
    }

  OkFamilies ok;
  ok.k = k;
  ok.source = u;
  ok.denom = den;

  Int period = Int(k) + 1;
  for (int j = 0; j < k; ++j) {
    // group samples by their interval-index tuple; tuples are per-coordinate
    // floor((m + j) / (k+1)), which is exact because integers never land in
    // the unit gaps of the pattern
    std::map<std::vector<Int>, int> group_of;
    std::vector<Bitset> groups;
    std::vector<std::vector<Int>> tuples;
    for (int p = 0; p < n; ++p) {
      std::vector<Int> tup(r);
      for (int i = 0; i < r; ++i) tup[i] = (m[i][p] + j) / period;
      auto it = group_of.find(tup);
      if (it == group_of.end()) {
        it = group_of.emplace(tup, (int)groups.size()).first;
        groups.push_back(Bitset(n));
        tuples.push_back(tup);
      }
      groups[it->second].set(p);
    }

    std::vector<SetExpr> sets;
    std::vector<Box> boxes;
    for (size_t g = 0; g < groups.size(); ++g) {
      sets.push_back(SetExpr::from_bits(groups[g]));
      Box b;
      for (int i = 0; i < r; ++i) {
        auto iv = pattern_interval(tuples[g][i], j, k, den);
        if (!iv) throw InternalError("sample value escaped the clipped pattern");
        b.push_back(*iv);
      }
      boxes.push_back(std::move(b));
    }
    Cover fam = make_bitset_cover(u.space, std::move(sets), "ok" + std::to_string(j));
    ok.family_mesh.push_back(mesh(fam));
    ok.families.push_back(std::move(fam));
    ok.intervals.push_back(pattern_family(j, k, den));
    ok.value_boxes.push_back(std::move(boxes));
  }
  return ok;
}

Certificate verify_ok(const OkFamilies& ok) {
  Certificate cert;
  cert.kind = CertKind::PassFail;
  cert.quantity = "disjoint_family_bound";
  cert.verified = true;
  Json w = Json::object();
  w["k"] = ok.k;
  w["sets_in_source"] = (int)ok.source.sets.size();

  auto fail = [&](const std::string& reason, Json detail) {
    w["failure"] = reason;
    w["detail"] = std::move(detail);
    cert.pass = false;
    cert.value = 0;
    cert.witness = w;
    return cert;
  };

  if ((int)ok.families.size() != ok.k)
    return fail("family count mismatch", Json((int)ok.families.size()));
  if (ok.source.symbolic()) return fail("source cover must be sampled", Json());
  const GroundSpace& sp = *ok.source.space;
  int n = sp.num_points();

  for (int j = 0; j < ok.k; ++j) {
    const Cover& fam = ok.families[j];
    if (fam.space != ok.source.space)
      return fail("family lives on a different space", Json(j));
    std::vector<Bitset> bits;
    for (const auto& s : fam.sets) bits.push_back(set_bits_on_space(sp, s));
    for (size_t a = 0; a < bits.size(); ++a)
      for (size_t b = a + 1; b < bits.size(); ++b)
        if (bits[a].intersects(bits[b])) {
          Json d;
          d["family"] = j;
          d["sets"] = Json::array({(int)a, (int)b});
          d["sample"] = (bits[a] & bits[b]).members()[0];
          return fail("family sets overlap", d);
        }
    int bad_set = -1;
    if (!refines(fam, ok.source, &bad_set)) {
      Json d;
      d["family"] = j;
      d["set"] = bad_set;
      return fail("family does not refine the source cover", d);
    }
  }

  bool have = false;
  Rat worst = 0;
  int worst_p = -1;
  for (int p = 0; p < n; ++p) {
    int total = 0;
    for (const auto& fam : ok.families) total += ord_at(fam, p);
    Rat slack = total + ord_at(ok.source, p);
    if (!have || slack < worst) {
      worst = slack;
      worst_p = p;
      have = true;
    }
  }
  if (!have) return fail("empty sample space", Json());

  w["min_order_slack"] = rat_json(worst);
  if (worst < 0) {
    Json d;
    d["sample"] = worst_p;
    return fail("order inequality violated", d);
  }
  cert.pass = true;
  cert.value = worst;
  cert.witness = w;
  return cert;
}

}  // namespace dyndim
