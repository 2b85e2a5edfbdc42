#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dyndim/error.hpp"
#include "dyndim/okcover.hpp"
#include "fixtures.hpp"

using namespace dyndim;

namespace {

Bitset range_bits(int n, int lo, int hi) {
  Bitset b(n);
  for (int p = lo; p <= hi; ++p) b.set(p);
  return b;
}

bool interval_contains(const Interval& iv, const Rat& t) { return iv.lo <= t && t <= iv.hi; }

int family_ord(const std::vector<Interval>& fam, const Rat& t) {
  int count = 0;
  for (const auto& iv : fam)
    if (interval_contains(iv, t)) ++count;
  return count - 1;
}

Cover random_cover(std::mt19937& rng, std::shared_ptr<const GroundSpace> sp, int k) {
  int n = sp->num_points();
  std::vector<SetExpr> sets;
  Bitset all(n);
  for (int i = 0; i < k; ++i) {
    Bitset b(n);
    for (int p = 0; p < n; ++p)
      if (fx::draw(rng, 3) < 2) b.set(p);
    b.set(fx::draw(rng, n));
    for (int p = 0; p < n; ++p)
      if (b.test(p)) all.set(p);
    sets.push_back(SetExpr::from_bits(b));
  }
  Bitset hole = all.complement();
  if (hole.any()) sets[0] = SetExpr::from_bits(sets[0].bits | hole);
  auto u = make_bitset_cover(sp, sets, "rand");
  u.validate();
  return u;
}

}  // namespace

TEST_CASE("interval pattern for two families at two sets") {
  auto f0 = interval_family(0, 2, 2);
  REQUIRE(f0.size() == 3);
  CHECK(f0[0].lo == Rat(0));
  CHECK(f0[0].hi == Rat(1, 4));
  CHECK(f0[1].lo == Rat(3, 8));
  CHECK(f0[1].hi == Rat(5, 8));
  CHECK(f0[2].lo == Rat(3, 4));
  CHECK(f0[2].hi == Rat(1));

  auto f1 = interval_family(1, 2, 2);
  REQUIRE(f1.size() == 4);
  CHECK(f1[0].lo == Rat(0));
  CHECK(f1[0].hi == Rat(1, 8));
  CHECK(f1[1].lo == Rat(1, 4));
  CHECK(f1[1].hi == Rat(1, 2));
  CHECK(f1[2].lo == Rat(5, 8));
  CHECK(f1[2].hi == Rat(7, 8));
  CHECK(f1[3].lo == Rat(1));
  CHECK(f1[3].hi == Rat(1));

  CHECK_THROWS_AS(interval_family(2, 2, 2), ValidationError);
  CHECK_THROWS_AS(interval_family(0, 0, 1), ValidationError);
}

TEST_CASE("pattern intervals are disjoint, short, and anchored at zero") {
  for (int k = 1; k <= 4; ++k)
    for (int r = 1; r <= 4; ++r)
      for (int j = 0; j < k; ++j) {
        auto fam = interval_family(j, k, r);
        REQUIRE(!fam.empty());
        CHECK(interval_contains(fam[0], Rat(0)));
        for (size_t i = 0; i < fam.size(); ++i) {
          Rat len = fam[i].hi - fam[i].lo;
          CHECK(len < Rat(1, r));
          if (i + 1 < fam.size()) CHECK(fam[i].hi < fam[i + 1].lo);
        }
      }
}

TEST_CASE("per-point order sums of the pattern never drop below minus one") {
  std::mt19937 rng(91);
  for (int k = 1; k <= 4; ++k)
    for (int r = 1; r <= 3; ++r) {
      std::vector<std::vector<Interval>> fams;
      for (int j = 0; j < k; ++j) fams.push_back(interval_family(j, k, r));

      int at_zero = 0;
      for (const auto& fam : fams) at_zero += family_ord(fam, Rat(0));
      CHECK(at_zero == 0);

      for (int trial = 0; trial < 60; ++trial) {
        int den = 1 + fx::draw(rng, 40);
        Rat t(fx::draw(rng, den + 1), den);
        int total = 0;
        for (const auto& fam : fams) {
          int o = family_ord(fam, t);
          CHECK(o <= 0);  // disjointness
          total += o;
        }
        CHECK(total >= -1);
      }
    }

  // a value inside a gap of one family is caught by the others
  auto f0 = interval_family(0, 2, 2);
  CHECK(family_ord(f0, Rat(5, 16)) == -1);
  auto f1 = interval_family(1, 2, 2);
  CHECK(family_ord(f1, Rat(5, 16)) == 0);
}

TEST_CASE("one-set cover collapses every family to the whole space") {
  auto sp = make_grid_interval(4);
  int n = sp->num_points();
  auto u = make_bitset_cover(sp, {SetExpr::from_bits(range_bits(n, 0, n - 1))}, "whole");
  auto ok = build_ok(u, 3);
  REQUIRE(ok.families.size() == 3);
  for (const auto& fam : ok.families) {
    REQUIRE(fam.sets.size() == 1);
    CHECK(fam.sets[0].bits.count() == n);
  }
  auto cert = verify_ok(ok);
  CHECK(cert.pass);
}

TEST_CASE("two-interval cover at two families") {
  auto sp = make_grid_interval(6);
  int n = sp->num_points();
  auto u = make_bitset_cover(
      sp, {SetExpr::from_bits(range_bits(n, 0, 8)), SetExpr::from_bits(range_bits(n, 4, 12))},
      "two");
  auto ok = build_ok(u, 2);
  auto cert = verify_ok(ok);
  CHECK(cert.pass);
  CHECK(cert.value >= Rat(0));
  CHECK(cert.witness["min_order_slack"].is_string());

  // families built this way are partitions: order sums are exactly zero
  for (int p = 0; p < n; ++p) {
    int total = 0;
    for (const auto& fam : ok.families) total += ord_at(fam, p);
    CHECK(total == 0);
  }
  // interval data matches the declared lattice
  for (int j = 0; j < ok.k; ++j) {
    REQUIRE(!ok.intervals[j].empty());
    CHECK(interval_contains(ok.intervals[j][0], Rat(0)));
    CHECK(ok.family_mesh[j] == mesh(ok.families[j]));
  }
}

TEST_CASE("random covers on interval and square grids verify") {
  std::mt19937 rng(92);
  for (int trial = 0; trial < 10; ++trial) {
    std::shared_ptr<const GroundSpace> sp;
    int pick = fx::draw(rng, 3);
    if (pick == 0) sp = make_grid_interval(3 + fx::draw(rng, 6));
    if (pick == 1) sp = make_grid_cycle(3 + fx::draw(rng, 6));
    if (pick == 2) sp = make_grid_square(2 + fx::draw(rng, 2));
    auto u = random_cover(rng, sp, 2 + fx::draw(rng, 2));
    int k = 1 + fx::draw(rng, 3);
    auto ok = build_ok(u, k);
    auto cert = verify_ok(ok);
    CHECK(cert.pass);
    for (int j = 0; j < k; ++j) CHECK(refines(ok.families[j], u));
  }
}

TEST_CASE("rebuilding gives identical families") {
  auto sp = make_grid_cycle(5);
  std::mt19937 rng(93);
  auto u = random_cover(rng, sp, 3);
  auto a = build_ok(u, 2);
  auto b = build_ok(u, 2);
  REQUIRE(a.families.size() == b.families.size());
  CHECK(a.denom == b.denom);
  for (size_t j = 0; j < a.families.size(); ++j) {
    REQUIRE(a.families[j].sets.size() == b.families[j].sets.size());
    for (size_t s = 0; s < a.families[j].sets.size(); ++s)
      CHECK(a.families[j].sets[s].bits == b.families[j].sets[s].bits);
    for (size_t s = 0; s < a.value_boxes[j].size(); ++s)
      CHECK(boxes_equal(a.value_boxes[j][s], b.value_boxes[j][s]));
  }
}

TEST_CASE("verify_ok pinpoints injected violations") {
  auto sp = make_grid_interval(5);
  int n = sp->num_points();
  auto u = make_bitset_cover(
      sp, {SetExpr::from_bits(range_bits(n, 0, 7)), SetExpr::from_bits(range_bits(n, 5, n - 1))},
      "two");
  auto ok = build_ok(u, 2);
  REQUIRE(verify_ok(ok).pass);

  auto overlap = ok;
  overlap.families[0].sets.push_back(overlap.families[0].sets[0]);
  auto c1 = verify_ok(overlap);
  CHECK_FALSE(c1.pass);
  CHECK(c1.witness["failure"] == "family sets overlap");
  CHECK(c1.witness["detail"]["family"] == 0);

  auto escape = ok;
  escape.families[0].sets = {SetExpr::from_bits(range_bits(n, 0, n - 1))};
  auto c2 = verify_ok(escape);
  CHECK_FALSE(c2.pass);
  CHECK(c2.witness["failure"] == "family does not refine the source cover");

  auto starved = ok;
  starved.families[0].sets.clear();
  auto c3 = verify_ok(starved);
  CHECK_FALSE(c3.pass);
  CHECK(c3.witness["failure"] == "order inequality violated");

  auto short_list = ok;
  short_list.families.pop_back();
  auto c4 = verify_ok(short_list);
  CHECK_FALSE(c4.pass);
  CHECK(c4.witness["failure"] == "family count mismatch");
}

TEST_CASE("single-family degenerate case") {
  auto sp = make_grid_interval(4);
  int n = sp->num_points();
  auto u = make_bitset_cover(
      sp, {SetExpr::from_bits(range_bits(n, 0, 5)), SetExpr::from_bits(range_bits(n, 3, n - 1))},
      "two");
  auto ok = build_ok(u, 1);
  REQUIRE(ok.families.size() == 1);
  auto cert = verify_ok(ok);
  CHECK(cert.pass);
  // one family alone must already be a partition refining the cover
  Bitset seen(n);
  for (const auto& s : ok.families[0].sets) {
    CHECK_FALSE(seen.intersects(s.bits));
    seen = seen | s.bits;
  }
  CHECK(seen.count() == n);
}
