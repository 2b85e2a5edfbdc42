#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "dyndim/error.hpp"
#include "dyndim/serialize.hpp"
#include "fixtures.hpp"

using namespace dyndim;

TEST_CASE("spaces round-trip through their JSON names") {
  for (auto sp : {make_discrete_space(7), make_grid_interval(4), make_grid_cycle(12),
                  make_grid_square(3)}) {
    auto back = space_from_json(space_json(*sp));
    CHECK(back->kind == sp->kind);
    CHECK(back->num_points() == sp->num_points());
    CHECK(space_json(*back) == space_json(*sp));
  }
  CHECK_THROWS_AS(space_from_json(Json{{"kind", "torus"}, {"granularity", 3}}), ValidationError);
  CHECK_THROWS_AS(space_from_json(Json{{"kind", "discrete"}, {"points", 0}}), ValidationError);
  CHECK_THROWS_AS(space_from_json(Json{{"kind", "grid_cycle"}}), ValidationError);
}

TEST_CASE("sets accept atom, cell, and box forms") {
  auto sp = make_grid_cycle(4);
  SetExpr closed = set_from_json(Json::parse(R"({"cells": [0, 1]})"), sp.get());
  CHECK(closed.bits == SetExpr::from_cells_closed(*sp, {0, 1}).bits);
  SetExpr open = set_from_json(Json::parse(R"({"cells": [0], "open": true})"), sp.get());
  CHECK(open.open);

  SetExpr atoms = set_from_json(Json::parse(R"({"atoms": [1, 3, 5]})"), sp.get());
  CHECK(atoms.bits.count() == 3);
  SetExpr back = set_from_json(set_json(atoms), sp.get());
  CHECK(back.bits == atoms.bits);

  SetExpr box = set_from_json(Json::parse(R"({"boxes": [[["0","1/2"],["0","1"]]]})"), nullptr);
  CHECK(box.kind == SetExpr::Kind::Boxes);
  CHECK(box.boxes[0][0].hi == Rat(1, 2));
  CHECK(set_json(set_from_json(set_json(box), nullptr)) == set_json(box));

  CHECK_THROWS_AS(set_from_json(Json::parse(R"({"atoms": [99]})"), sp.get()), ValidationError);
  CHECK_THROWS_AS(set_from_json(Json::parse(R"({"cells": [-1]})"), sp.get()), ValidationError);
  CHECK_THROWS_AS(set_from_json(Json::parse(R"({"atoms": [0]})"), nullptr), ValidationError);
}

TEST_CASE("covers round-trip and keep their order structure") {
  auto sp = make_grid_cycle(6);
  Cover u = make_bitset_cover(
      sp, {SetExpr::from_cells_closed(*sp, {0, 1, 2}), SetExpr::from_cells_closed(*sp, {3, 4, 5}),
           SetExpr::from_cells_closed(*sp, {5, 0})},
      "arcs");
  Cover back = cover_from_json(cover_json(u));
  CHECK(back.label == "arcs");
  CHECK(back.sets.size() == 3);
  CHECK(ord_sup(back) == ord_sup(u));
  CHECK(cover_json(back) == cover_json(u));

  Json bad = cover_json(u);
  bad["sets"].erase(2);
  bad["sets"].erase(1);  // remaining arc misses points
  CHECK_THROWS_AS(cover_from_json(bad), ValidationError);
  CHECK_NOTHROW(cover_from_json(bad, false));
}

TEST_CASE("systems round-trip with their group tags") {
  FinitePermSystem sys = fx::rotation_12gon();
  Json j = system_json(sys);
  FinitePermSystem back = system_from_json(j);
  CHECK(back.group.kind == sys.group.kind);
  CHECK(back.group.orders == sys.group.orders);
  CHECK(back.gens == sys.gens);
  CHECK(back.gen_inv == sys.gen_inv);
  CHECK(system_json(back) == j);

  Json bad = j;
  bad["generators"][0][0] = 0;  // not a permutation: 0 appears twice
  CHECK_THROWS_AS(system_from_json(bad), ValidationError);
  CHECK_THROWS_AS(system_from_json(Json::object()), ValidationError);
}

TEST_CASE("subshift definitions round-trip and validate") {
  SftSystem gm;
  gm.forbidden = {{1, 1}};
  gm.validate();
  Json j = sft_json(gm);
  CHECK(is_sft_json(j));
  SftSystem back = sft_from_json(j);
  CHECK(back.forbidden == gm.forbidden);
  CHECK(back.allowed_blocks() == gm.allowed_blocks());
  CHECK_FALSE(is_sft_json(system_json(fx::rotation_12gon())));

  Json bad = j;
  bad["forbidden"] = Json::array({Json::array({0, 0}), Json::array({0, 1}), Json::array({1, 0}),
                                  Json::array({1, 1})});
  CHECK_THROWS_AS(sft_from_json(bad), ValidationError);  // empty language
}

TEST_CASE("tower data and K families parse against a declared space") {
  auto sp = make_grid_cycle(6);
  UrpTowerCertificate t;
  t.v_sets = {SetExpr::from_cells_closed(*sp, {0})};
  t.shapes = {{Word{{}}, Word{{0}}}};
  t.k_set = {Word{{0}}};
  t.epsilon = Rat(1, 2);
  t.leftover_bound = Rat(3, 4);
  Json j = towers_json(t);
  UrpTowerCertificate back = towers_from_json(j, *sp);
  CHECK(back.shapes == t.shapes);
  CHECK(back.epsilon == t.epsilon);
  CHECK(back.leftover_bound == t.leftover_bound);
  CHECK(back.v_sets[0].bits == t.v_sets[0].bits);

  KSetFamily kf;
  kf.rows = {{{Word{{}}, SetExpr::from_cells_closed(*sp, {0})},
              {Word{{0}}, SetExpr::from_cells_closed(*sp, {2})}}};
  KSetFamily kback = kset_family_from_json(kset_family_json(kf), *sp);
  CHECK(kback.rows.size() == 1);
  CHECK(kback.rows[0][1].first == Word{{0}});
  CHECK(kback.rows[0][1].second.bits == kf.rows[0][1].second.bits);
}

TEST_CASE("observables and scalar values enforce their lengths") {
  auto sp = make_discrete_space(3);
  Observable f;
  f.space = sp;
  f.components = {{Rat(0), Rat(1, 2), Rat(1)}};
  Observable back = observable_from_json(observable_json(f));
  CHECK(back.components == f.components);

  CHECK(scalar_observable_from_json(Json::parse(R"(["0","1/2","1"])"), 3)[1] == Rat(1, 2));
  CHECK(scalar_observable_from_json(Json::parse(R"({"values": [0, 1, 2]})"), 3)[2] == Rat(2));
  CHECK_THROWS_AS(scalar_observable_from_json(Json::parse(R"(["0"])"), 3), ValidationError);
  CHECK_THROWS_AS(scalar_observable_from_json(Json::parse(R"(["1/0","0","0"])"), 3),
                  ValidationError);
}

TEST_CASE("file helpers reject unreadable and malformed input") {
  CHECK_THROWS_AS(load_json_file("/nonexistent/path.json"), ValidationError);
  std::string path = "serialize_test_tmp.json";
  {
    std::ofstream out(path);
    out << "{not json";
  }
  CHECK_THROWS_AS(load_json_file(path), ValidationError);
  save_json_file(path, Json{{"x", "1/2"}});
  CHECK(load_json_file(path)["x"] == Json("1/2"));
  std::remove(path.c_str());
}
