#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dyndim/error.hpp"
#include "dyndim/ground.hpp"

using namespace dyndim;

TEST_CASE("bitset basics") {
  Bitset a(70), b(70);
  a.set(0);
  a.set(63);
  a.set(64);
  b.set(64);
  b.set(69);
  CHECK(a.count() == 3);
  CHECK((a & b).members() == std::vector<int>{64});
  CHECK((a | b).count() == 4);
  CHECK(a.and_not(b).members() == std::vector<int>{0, 63});
  CHECK(a.complement().count() == 67);
  CHECK(a.intersects(b));
  CHECK_FALSE(a.subset_of(b));
  Bitset c = a | b;
  CHECK(a.subset_of(c));
  CHECK(a < c);
}

TEST_CASE("grid interval layout") {
  auto sp = make_grid_interval(4);
  CHECK(sp->num_points() == 9);
  CHECK(sp->num_cells() == 4);
  CHECK(sp->position(3) == Rat(3, 8));
  CHECK(sp->is_vertex_atom(2));
  CHECK_FALSE(sp->is_vertex_atom(3));
  CHECK(sp->distance(0, 8) == 1);
  CHECK(sp->distance(2, 5) == Rat(3, 8));
  CHECK(sp->cell_atoms(1) == std::vector<PointId>{2, 3, 4});
  CHECK(sp->adjacent_atoms(0) == std::vector<PointId>{1});
  CHECK(sp->adjacent_atoms(4) == std::vector<PointId>{3, 5});
  CHECK((*sp->coords_of(6))[0] == Rat(3, 4));
}

TEST_CASE("grid cycle layout") {
  auto sp = make_grid_cycle(6);
  CHECK(sp->num_points() == 12);
  CHECK(sp->num_cells() == 6);
  CHECK(sp->distance(0, 6) == Rat(1, 2));
  CHECK(sp->distance(1, 11) == Rat(1, 6));  // wraps around
  CHECK(sp->cell_atoms(5) == std::vector<PointId>{10, 11, 0});
  CHECK(sp->adjacent_atoms(0) == std::vector<PointId>{11, 1});
}

TEST_CASE("grid square metric") {
  auto sp = make_grid_square(2);
  CHECK(sp->num_points() == 25);
  // corner to corner under sup metric
  CHECK(sp->distance(0, 24) == 1);
  auto c = *sp->coords_of(7);  // row 1, col 2
  CHECK(c[0] == Rat(1, 4));
  CHECK(c[1] == Rat(1, 2));
  CHECK_FALSE(sp->has_cells());
}

TEST_CASE("closed and open cell unions") {
  auto sp = make_grid_interval(4);
  auto closed = SetExpr::from_cells_closed(*sp, {0, 1});
  CHECK(closed.bits.members() == std::vector<int>{0, 1, 2, 3, 4});
  auto open = SetExpr::from_cells_open(*sp, {0, 1});
  // relative interior keeps the boundary vertex of the ambient interval
  CHECK(open.bits.members() == std::vector<int>{0, 1, 2, 3});
  CHECK(open.open);

  auto cyc = make_grid_cycle(6);
  auto oc = SetExpr::from_cells_open(*cyc, {5, 0, 1, 2});
  CHECK(oc.bits.members() == std::vector<int>{0, 1, 2, 3, 4, 5, 11});
}

TEST_CASE("order of a two arc cover of the cycle") {
  auto sp = make_grid_cycle(4);
  auto A = SetExpr::from_cells_closed(*sp, {0, 1});
  auto B = SetExpr::from_cells_closed(*sp, {2, 3});
  Cover u = make_bitset_cover(sp, {A, B}, "arcs");
  u.validate();
  CHECK(ord_at(u, 0) == 1);
  CHECK(ord_at(u, 4) == 1);
  CHECK(ord_at(u, 1) == 0);
  CHECK(ord_sup(u) == 1);
}

TEST_CASE("symbolic cover order and covering check") {
  Box amb = {{Rat(0), Rat(1)}};
  auto s1 = SetExpr::from_boxes({{{Rat(0), Rat(5, 8)}}});
  auto s2 = SetExpr::from_boxes({{{Rat(1, 2), Rat(1)}}});
  Cover u = make_box_cover(amb, {s1, s2});
  u.validate();
  CHECK(ord_sup(u) == 1);
  CHECK(ord_at(u, std::vector<Rat>{Rat(9, 16)}) == 1);
  CHECK(ord_at(u, std::vector<Rat>{Rat(1, 4)}) == 0);

  Cover gap = make_box_cover(amb, {s1});
  CHECK_THROWS_AS(gap.validate(), ValidationError);

  auto o1 = SetExpr::from_boxes({{{Rat(-1, 8), Rat(9, 16)}}}, true);
  auto o2 = SetExpr::from_boxes({{{Rat(7, 16), Rat(9, 8)}}}, true);
  Cover open_cover = make_box_cover(amb, {o1, o2});
  open_cover.validate();
  CHECK(ord_sup(open_cover) == 1);
}

TEST_CASE("refinement direction") {
  Box amb = {{Rat(0), Rat(1)}};
  auto c1 = SetExpr::from_boxes({{{Rat(0), Rat(5, 8)}}});
  auto c2 = SetExpr::from_boxes({{{Rat(3, 8), Rat(1)}}});
  auto f1 = SetExpr::from_boxes({{{Rat(0), Rat(1, 2)}}});
  auto f2 = SetExpr::from_boxes({{{Rat(1, 2), Rat(1)}}});
  Cover coarse = make_box_cover(amb, {c1, c2});
  Cover fine = make_box_cover(amb, {f1, f2});
  CHECK(refines(fine, coarse));
  int w = -1;
  CHECK_FALSE(refines(coarse, fine, &w));
  CHECK(w == 0);  // [0,5/8] fits in neither half

  auto sp = make_grid_cycle(4);
  auto A = SetExpr::from_cells_closed(*sp, {0, 1});
  auto B = SetExpr::from_cells_closed(*sp, {2, 3});
  auto big = SetExpr::from_cells_closed(*sp, {0, 1, 2});
  Cover fine_b = make_bitset_cover(sp, {A, B});
  Cover coarse_b = make_bitset_cover(sp, {big, B});
  CHECK(refines(fine_b, coarse_b));
  CHECK_FALSE(refines(coarse_b, fine_b));
}

TEST_CASE("joint refinement with the whole space is the identity") {
  auto sp = make_grid_cycle(4);
  auto A = SetExpr::from_cells_closed(*sp, {0, 1});
  auto B = SetExpr::from_cells_closed(*sp, {2, 3});
  Cover u = make_bitset_cover(sp, {A, B});
  Bitset full(sp->num_points());
  for (int i = 0; i < sp->num_points(); ++i) full.set(i);
  Cover triv = make_bitset_cover(sp, {SetExpr::from_bits(full)});
  Cover j = joint_refinement(u, triv);
  CHECK(j.sets.size() == 2);
  CHECK(j.sets[0].bits == A.bits);
  CHECK(j.sets[1].bits == B.bits);
  CHECK(refines(j, u));
  CHECK(refines(j, triv));
}

TEST_CASE("joint refinement of box covers intersects and dedupes") {
  Box amb = {{Rat(0), Rat(1)}};
  auto a1 = SetExpr::from_boxes({{{Rat(0), Rat(3, 4)}}});
  auto a2 = SetExpr::from_boxes({{{Rat(1, 4), Rat(1)}}});
  Cover a = make_box_cover(amb, {a1, a2});
  Cover j = joint_refinement(a, a);
  // pieces: [0,3/4], [1/4,3/4], [1/4,1]
  CHECK(j.sets.size() == 3);
  CHECK(refines(j, a));
  CHECK(ord_sup(j) == 2);
}

TEST_CASE("mesh and diameters") {
  auto sp = make_grid_cycle(6);
  auto arc = SetExpr::from_cells_closed(*sp, {0});
  Cover u = make_bitset_cover(sp, {arc, SetExpr::from_cells_closed(*sp, {1, 2, 3, 4, 5})});
  CHECK(set_diameter(u, arc) == Rat(1, 6));
  CHECK(mesh(u) == Rat(1, 2));  // the long arc wraps to the path-metric diameter

  Box amb = {{Rat(0), Rat(1)}};
  auto halves1 = SetExpr::from_boxes({{{Rat(0), Rat(1, 2)}}});
  auto split = SetExpr::from_boxes({{{Rat(0), Rat(1, 4)}}, {{Rat(3, 4), Rat(1)}}});
  Cover b = make_box_cover(amb, {halves1, split});
  CHECK(set_diameter(b, halves1) == Rat(1, 2));
  CHECK(set_diameter(b, split) == Rat(1));  // bounding extent of the union
  CHECK(mesh(b) == Rat(1));
}

TEST_CASE("shrinking an open box cover to a closed one") {
  Box amb = {{Rat(0), Rat(1)}};
  auto o1 = SetExpr::from_boxes({{{Rat(-1, 4), Rat(5, 8)}}}, true);
  auto o2 = SetExpr::from_boxes({{{Rat(3, 8), Rat(5, 4)}}}, true);
  Cover u = make_box_cover(amb, {o1, o2});
  auto res = shrink_to_closed(u);
  CHECK_FALSE(res.fallback);
  CHECK(res.margin == Rat(1, 8));
  REQUIRE(res.cover.sets.size() == 2);
  CHECK(boxes_equal(res.cover.sets[0].boxes[0], Box{{Rat(0), Rat(1, 2)}}));
  CHECK(boxes_equal(res.cover.sets[1].boxes[0], Box{{Rat(1, 2), Rat(1)}}));
  res.cover.validate();
  CHECK(refines(res.cover, res.cover));
}

TEST_CASE("shrinking open cell covers") {
  auto sp = make_grid_cycle(6);
  auto u1 = SetExpr::from_cells_open(*sp, {5, 0, 1, 2});
  auto u2 = SetExpr::from_cells_open(*sp, {1, 2, 3, 4});
  auto u3 = SetExpr::from_cells_open(*sp, {3, 4, 5, 0});
  Cover u = make_bitset_cover(sp, {u1, u2, u3});
  u.validate();
  auto res = shrink_to_closed(u);
  CHECK_FALSE(res.fallback);
  CHECK(res.cover.sets[0].bits.members() == std::vector<int>{0, 1, 2, 3, 4});
  CHECK(res.cover.sets[1].bits.members() == std::vector<int>{4, 5, 6, 7, 8});
  CHECK(res.cover.sets[2].bits.members() == std::vector<int>{0, 8, 9, 10, 11});
  res.cover.validate();
  for (std::size_t i = 0; i < 3; ++i) CHECK(res.cover.sets[i].bits.subset_of(u.sets[i].bits));
}

TEST_CASE("shrink falls back when straddling cells block closure") {
  auto sp = make_grid_cycle(6);
  auto u1 = SetExpr::from_cells_open(*sp, {5, 0, 1, 2});
  auto u2 = SetExpr::from_cells_open(*sp, {1, 2, 3, 4, 5});
  Cover u = make_bitset_cover(sp, {u1, u2});
  u.validate();
  auto res = shrink_to_closed(u);
  CHECK(res.fallback);
  res.cover.validate();  // still a covering
  // disjointified closures share no midpoints
  CHECK_FALSE([&] {
    Bitset mid(sp->num_points());
    for (int c = 0; c < sp->num_cells(); ++c) mid.set(2 * c + 1);
    return (res.cover.sets[0].bits & res.cover.sets[1].bits).intersects(mid);
  }());
}

TEST_CASE("bruteforce cover dimension on a discrete space") {
  auto sp = make_discrete_space(5);
  Bitset all(5);
  for (int i = 0; i < 5; ++i) all.set(i);
  Cover u = make_bitset_cover(sp, {SetExpr::from_bits(all)});
  auto res = dim_of_cover_bruteforce(u);
  CHECK(res.value == 0);
  CHECK(res.witness.sets.size() == 5);
  res.witness.validate();
  CHECK(refines(res.witness, u));
}

TEST_CASE("bruteforce cover dimension on the cycle is one") {
  auto sp = make_grid_cycle(6);
  auto A = SetExpr::from_cells_closed(*sp, {0, 1, 2, 3});
  auto B = SetExpr::from_cells_closed(*sp, {3, 4, 5});
  Cover u = make_bitset_cover(sp, {A, B}, "two-arcs");
  auto res = dim_of_cover_bruteforce(u);
  CHECK(res.value == 1);
  res.witness.validate();
  CHECK(refines(res.witness, u));
  CHECK(ord_sup(res.witness) == 1);
}

TEST_CASE("bruteforce cover dimension on an interval is zero for the trivial cover") {
  auto sp = make_grid_interval(3);
  Bitset all(sp->num_points());
  for (int i = 0; i < sp->num_points(); ++i) all.set(i);
  Cover u = make_bitset_cover(sp, {SetExpr::from_bits(all)});
  auto res = dim_of_cover_bruteforce(u);
  CHECK(res.value == 0);
}

TEST_CASE("bruteforce reports uncoverable atoms and budget exhaustion") {
  auto sp = make_grid_interval(2);
  Bitset b1(5), b2(5);
  b1.set(0);
  b1.set(1);
  for (int i = 1; i < 5; ++i) b2.set(i);
  Cover u = make_bitset_cover(sp, {SetExpr::from_bits(b1), SetExpr::from_bits(b2)});
  CHECK_THROWS_AS(dim_of_cover_bruteforce(u), ValidationError);

  auto cyc = make_grid_cycle(6);
  auto A = SetExpr::from_cells_closed(*cyc, {0, 1, 2, 3});
  auto B = SetExpr::from_cells_closed(*cyc, {3, 4, 5});
  Cover v = make_bitset_cover(cyc, {A, B});
  SearchBudget tiny;
  tiny.node_cap = 1;
  CHECK_THROWS_AS(dim_of_cover_bruteforce(v, &tiny), BudgetError);
}
