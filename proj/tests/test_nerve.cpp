#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dyndim/error.hpp"
#include "dyndim/nerve.hpp"
#include "fixtures.hpp"

using namespace dyndim;

namespace {

Bitset range_bits(int n, int lo, int hi) {  // inclusive ends
  Bitset b(n);
  for (int p = lo; p <= hi; ++p) b.set(p);
  return b;
}

Cover random_bitset_cover(std::mt19937& rng, std::shared_ptr<const GroundSpace> sp, int k) {
  int n = sp->num_points();
  std::vector<SetExpr> sets;
  Bitset all(n);
  for (int i = 0; i < k; ++i) {
    Bitset b(n);
    for (int p = 0; p < n; ++p)
      if (fx::draw(rng, 2)) b.set(p);
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

TEST_CASE("one-set cover yields the constant partition") {
  auto sp = make_grid_interval(4);
  int n = sp->num_points();
  auto u = make_bitset_cover(sp, {SetExpr::from_bits(range_bits(n, 0, n - 1))}, "whole");
  auto pou = partition_of_unity(u);
  pou.validate();
  for (int p = 0; p < n; ++p) CHECK(pou.values[0][p] == Rat(1));
}

TEST_CASE("two-interval cover splits evenly at the midpoint") {
  // [0,2/3] and [1/3,1] on the granularity-6 grid; atom 6 sits at 1/2
  auto sp = make_grid_interval(6);
  int n = sp->num_points();
  auto u = make_bitset_cover(
      sp, {SetExpr::from_bits(range_bits(n, 0, 8)), SetExpr::from_bits(range_bits(n, 4, 12))},
      "two");
  auto pou = partition_of_unity(u);
  pou.validate();
  CHECK(pou.values[0][6] == Rat(1, 2));
  CHECK(pou.values[1][6] == Rat(1, 2));
  // deep inside the first set only
  CHECK(pou.values[0][0] == Rat(1));
  CHECK(pou.values[1][0] == Rat(0));

  auto bary = nerve_map(pou, 6);
  REQUIRE(bary.size() == 2);
  CHECK(bary[0] + bary[1] == Rat(1));

  // x in one set: a vertex of the nerve
  auto v0 = nerve_map(pou, 0);
  CHECK(v0[0] == Rat(1));
  CHECK(v0[1] == Rat(0));
}

TEST_CASE("partition of unity demands a covering family") {
  auto sp = make_grid_interval(2);
  int n = sp->num_points();
  auto u = make_bitset_cover(sp, {SetExpr::from_bits(range_bits(n, 0, 1))}, "gap");
  CHECK_THROWS_AS(partition_of_unity(u), ValidationError);
}

TEST_CASE("supports match sets and positives count the order") {
  std::mt19937 rng(81);
  for (int trial = 0; trial < 20; ++trial) {
    auto sp = fx::draw(rng, 2) ? make_grid_cycle(3 + fx::draw(rng, 5))
                               : make_grid_interval(3 + fx::draw(rng, 5));
    auto u = random_bitset_cover(rng, sp, 2 + fx::draw(rng, 3));
    auto pou = partition_of_unity(u);
    pou.validate();
    for (int p = 0; p < sp->num_points(); ++p) {
      int positive = 0;
      for (size_t i = 0; i < pou.values.size(); ++i)
        if (pou.values[i][p] > 0) ++positive;
      CHECK(positive - 1 == ord_at(u, p));
    }
  }
}

TEST_CASE("tampered partitions fail validation") {
  auto sp = make_grid_interval(3);
  int n = sp->num_points();
  auto u = make_bitset_cover(
      sp, {SetExpr::from_bits(range_bits(n, 0, 4)), SetExpr::from_bits(range_bits(n, 3, n - 1))},
      "two");
  auto pou = partition_of_unity(u);

  auto broken_sum = pou;
  broken_sum.values[0][0] = Rat(1, 2);
  CHECK_THROWS_AS(broken_sum.validate(), ValidationError);

  auto escaped = pou;
  escaped.values[0][n - 1] = Rat(1, 3);
  escaped.values[1][n - 1] = Rat(2, 3);
  CHECK_THROWS_AS(escaped.validate(), ValidationError);
}

TEST_CASE("nerve of three pairwise overlapping sets is a hollow triangle") {
  auto sp = make_discrete_space(3);
  Bitset a(3), b(3), c(3);
  a.set(0);
  a.set(1);
  b.set(1);
  b.set(2);
  c.set(2);
  c.set(0);
  auto u = make_bitset_cover(
      sp, {SetExpr::from_bits(a), SetExpr::from_bits(b), SetExpr::from_bits(c)}, "tri");
  auto k = nerve_complex(u);
  CHECK(k.num_vertices == 3);
  CHECK(k.simplices.size() == 6);  // three vertices, three edges
  CHECK(k.dim() == 1);
  CHECK(k.has_simplex({0, 1}));
  CHECK(k.has_simplex({2, 0}));
  CHECK_FALSE(k.has_simplex({0, 1, 2}));
  CHECK(k.dim() == ord_sup(u));
}

TEST_CASE("nerve dimension equals the static order supremum") {
  std::mt19937 rng(82);
  for (int trial = 0; trial < 20; ++trial) {
    auto sp = make_discrete_space(3 + fx::draw(rng, 8));
    auto u = random_bitset_cover(rng, sp, 2 + fx::draw(rng, 4));
    auto k = nerve_complex(u);
    CHECK(k.dim() == ord_sup(u));
    // faces of every simplex are present
    for (const auto& s : k.simplices) {
      if (s.size() == 1) continue;
      for (size_t drop = 0; drop < s.size(); ++drop) {
        std::vector<int> face;
        for (size_t i = 0; i < s.size(); ++i)
          if (i != drop) face.push_back(s[i]);
        CHECK(k.has_simplex(face));
      }
    }
  }
}

TEST_CASE("a partition is subadditive against itself") {
  auto sp = make_discrete_space(6);
  auto u = make_bitset_cover(sp, {SetExpr::from_bits(range_bits(6, 0, 2)),
                                  SetExpr::from_bits(range_bits(6, 3, 5))},
                             "part");
  auto cert = verify_subadditive(u, u, u);
  CHECK(cert.pass);
  CHECK(cert.value == Rat(0));
  CHECK(cert.witness["refines_join"] == true);
}

TEST_CASE("the join itself can violate the order bound") {
  auto sp = make_grid_cycle(12);
  int n = sp->num_points();
  // junctions of u1 at atoms 0 and 10, of u2 at atoms 0 and 12
  auto u1 = make_bitset_cover(sp,
                              {SetExpr::from_cells_closed(*sp, {0, 1, 2, 3, 4}),
                               SetExpr::from_cells_closed(*sp, {5, 6, 7, 8, 9, 10, 11})},
                              "u1");
  auto u2 = make_bitset_cover(sp,
                              {SetExpr::from_cells_closed(*sp, {0, 1, 2, 3, 4, 5}),
                               SetExpr::from_cells_closed(*sp, {6, 7, 8, 9, 10, 11})},
                              "u2");
  u1.validate();
  u2.validate();
  REQUIRE(ord_at(u1, 0) == 1);
  REQUIRE(ord_at(u2, 0) == 1);

  auto join = joint_refinement(u1, u2);
  REQUIRE(ord_at(join, 0) == 3);
  auto cert = verify_subadditive(join, u1, u2);
  CHECK_FALSE(cert.pass);
  CHECK(cert.value == Rat(1));
  CHECK(cert.witness["violation"]["where"] == 0);

  // the search repairs it
  auto found = subadditive_search(u1, u2);
  REQUIRE(found.found);
  CHECK(found.cert.pass);
  CHECK(found.cert.value <= Rat(0));
  CHECK(refines(found.v, join));
  (void)n;
}

TEST_CASE("search shortcuts: whole-space second cover and discrete spaces") {
  auto sp = make_grid_interval(8);
  int n = sp->num_points();
  auto u1 = make_bitset_cover(
      sp, {SetExpr::from_bits(range_bits(n, 0, 10)), SetExpr::from_bits(range_bits(n, 6, 16))},
      "u1");
  auto whole = make_bitset_cover(sp, {SetExpr::from_bits(range_bits(n, 0, n - 1))}, "whole");
  auto res = subadditive_search(u1, whole);
  REQUIRE(res.found);
  CHECK(res.cert.pass);

  auto dsp = make_discrete_space(7);
  auto d1 = make_bitset_cover(
      dsp, {SetExpr::from_bits(range_bits(7, 0, 4)), SetExpr::from_bits(range_bits(7, 3, 6))},
      "d1");
  auto res2 = subadditive_search(d1, d1);
  REQUIRE(res2.found);
  CHECK(res2.cert.pass);
  CHECK(ord_sup(res2.v) == 0);  // singleton partition
}

TEST_CASE("interval covers at granularity eight admit a subadditive refinement") {
  auto sp = make_grid_interval(8);
  int n = sp->num_points();
  auto u1 = make_bitset_cover(
      sp, {SetExpr::from_bits(range_bits(n, 0, 10)), SetExpr::from_bits(range_bits(n, 6, 16))},
      "u1");
  auto u2 = make_bitset_cover(
      sp, {SetExpr::from_bits(range_bits(n, 0, 8)), SetExpr::from_bits(range_bits(n, 7, 16))},
      "u2");
  auto res = subadditive_search(u1, u2);
  REQUIRE(res.found);
  CHECK(res.cert.pass);
  for (int p = 0; p < n; ++p) CHECK(ord_at(res.v, p) <= ord_at(u1, p) + ord_at(u2, p));
}

TEST_CASE("exhausted budget reports failure without weakening the check") {
  auto sp = make_grid_cycle(6);
  int n = sp->num_points();
  auto u1 = make_bitset_cover(sp,
                              {SetExpr::from_cells_closed(*sp, {0, 1, 2}),
                               SetExpr::from_cells_closed(*sp, {3, 4, 5})},
                              "u1");
  u1.validate();
  auto res = subadditive_search(u1, u1, 0);
  CHECK_FALSE(res.found);
  CHECK(res.cert.witness["reason"] == "budget exhausted");
  (void)n;
}

TEST_CASE("symbolic covers are checked on arrangement atoms") {
  Box ambient = {{Rat(0), Rat(1)}};
  auto whole = make_box_cover(ambient, {SetExpr::from_boxes({{{Rat(0), Rat(1)}}})}, "whole");
  auto halves = make_box_cover(ambient,
                               {SetExpr::from_boxes({{{Rat(0), Rat(1, 2)}}}),
                                SetExpr::from_boxes({{{Rat(1, 2), Rat(1)}}})},
                               "halves");
  // closed halves meet at 1/2: order one there, zero allowed
  auto bad = verify_subadditive(halves, whole, whole);
  CHECK_FALSE(bad.pass);
  CHECK(bad.value == Rat(1));

  auto good = verify_subadditive(whole, whole, whole);
  CHECK(good.pass);
  CHECK(good.value == Rat(0));

  // a set escaping the sole cover set fails the refinement step
  auto escape = make_box_cover(ambient, {SetExpr::from_boxes({{{Rat(0), Rat(2)}}})}, "escape");
  auto ref = verify_subadditive(escape, whole, whole);
  CHECK_FALSE(ref.pass);
  CHECK(ref.witness["refines_join"] == false);
  CHECK(ref.witness["refinement_witness_set"] == 0);
}
