#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "dyndim/error.hpp"
#include "dyndim/simplex.hpp"

using namespace dyndim;

TEST_CASE("simple equality program") {
  // max x0 + 2 x1 with x0 + x1 = 1
  LpProblem p;
  p.a = {{Rat(1), Rat(1)}};
  p.b = {Rat(1)};
  p.c = {Rat(1), Rat(2)};
  auto r = lp_solve_max(p);
  REQUIRE(r.status == LpStatus::Optimal);
  CHECK(r.value == 2);
  CHECK(r.x == std::vector<Rat>{Rat(0), Rat(1)});
}

TEST_CASE("inequalities via slack variables") {
  // max 3x + 2y, x + y + s1 = 4, x + 3y + s2 = 6
  LpProblem p;
  p.a = {{Rat(1), Rat(1), Rat(1), Rat(0)}, {Rat(1), Rat(3), Rat(0), Rat(1)}};
  p.b = {Rat(4), Rat(6)};
  p.c = {Rat(3), Rat(2), Rat(0), Rat(0)};
  auto r = lp_solve_max(p);
  REQUIRE(r.status == LpStatus::Optimal);
  CHECK(r.value == 12);  // x = 4, y = 0
  CHECK(r.x[0] == 4);
}

TEST_CASE("fractional optimum stays exact") {
  // max y, 3y <= 1
  LpProblem p;
  p.a = {{Rat(3), Rat(1)}};
  p.b = {Rat(1)};
  p.c = {Rat(1), Rat(0)};
  auto r = lp_solve_max(p);
  REQUIRE(r.status == LpStatus::Optimal);
  CHECK(r.value == Rat(1, 3));
}

TEST_CASE("infeasible and unbounded detection") {
  LpProblem inf;
  inf.a = {{Rat(1)}, {Rat(1)}};
  inf.b = {Rat(1), Rat(2)};
  inf.c = {Rat(1)};
  CHECK(lp_solve_max(inf).status == LpStatus::Infeasible);

  // max x - y with x - y = 0: x free to grow along the ray
  LpProblem unb;
  unb.a = {{Rat(1), Rat(-1)}};
  unb.b = {Rat(0)};
  unb.c = {Rat(1), Rat(1)};
  CHECK(lp_solve_max(unb).status == LpStatus::Unbounded);
}

TEST_CASE("negative right-hand sides are normalized") {
  // -x0 - x1 = -1 is x0 + x1 = 1
  LpProblem p;
  p.a = {{Rat(-1), Rat(-1)}};
  p.b = {Rat(-1)};
  p.c = {Rat(0), Rat(1)};
  auto r = lp_solve_max(p);
  REQUIRE(r.status == LpStatus::Optimal);
  CHECK(r.value == 1);
}

TEST_CASE("redundant rows are dropped in phase one") {
  LpProblem p;
  p.a = {{Rat(1), Rat(1)}, {Rat(2), Rat(2)}};
  p.b = {Rat(1), Rat(2)};
  p.c = {Rat(5), Rat(1)};
  auto r = lp_solve_max(p);
  REQUIRE(r.status == LpStatus::Optimal);
  CHECK(r.value == 5);
}

TEST_CASE("random problems agree with vertex enumeration") {
  // max c.x over x >= 0, sum x = 1, one random equality through a feasible
  // point; compare against brute force over basic solutions
  std::mt19937 rng(11);
  for (int trial = 0; trial < 40; ++trial) {
    int n = 3 + (int)(rng() % 3);
    LpProblem p;
    p.c.resize(n);
    for (auto& v : p.c) v = Rat((long long)(rng() % 11) - 5);
    std::vector<Rat> row(n);
    for (auto& v : row) v = Rat((long long)(rng() % 7) - 3);
    // rhs chosen so the uniform point is feasible
    Rat rhs(0);
    for (const auto& v : row) rhs += v / n;
    p.a = {std::vector<Rat>(n, Rat(1)), row};
    p.b = {Rat(1), rhs};
    auto r = lp_solve_max(p);
    REQUIRE(r.status == LpStatus::Optimal);
    // feasibility of the reported point
    Rat mass(0), dot(0), obj(0);
    for (int j = 0; j < n; ++j) {
      CHECK(r.x[j] >= 0);
      mass += r.x[j];
      dot += row[j] * r.x[j];
      obj += p.c[j] * r.x[j];
    }
    CHECK(mass == 1);
    CHECK(dot == rhs);
    CHECK(obj == r.value);
    // vertex oracle: all basic solutions from pairs of coordinates
    Rat best = r.value;
    bool beaten = false;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        if (i == j) continue;
        // x_i + x_j = 1, row_i x_i + row_j x_j = rhs
        Rat det = row[j] - row[i];
        if (det == 0) continue;
        Rat xj = (rhs - row[i]) / det;
        Rat xi = 1 - xj;
        if (xi < 0 || xj < 0) continue;
        Rat val = p.c[i] * xi + p.c[j] * xj;
        if (val > best) beaten = true;
      }
    // single-coordinate vertices
    for (int i = 0; i < n; ++i)
      if (row[i] == rhs && p.c[i] > best) beaten = true;
    CHECK_FALSE(beaten);
  }
}
