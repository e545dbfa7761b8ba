#include <doctest.h>

#include <cstdio>
#include <fstream>

#include <json.hpp>

#include "lisac/scenario.hpp"

using namespace lisac;

TEST_SUITE("scenario") {

TEST_CASE("defaults validate and dimensions line up") {
  const Scenario desk = Scenario::desk();
  CHECK_NOTHROW(desk.validate());
  CHECK(desk.num_users() == 2);
  CHECK(desk.m_antennas == 2);
  CHECK(desk.l_elements == 8);
  CHECK(desk.t_slots == 40);
  CHECK(desk.action_dim() == 2 * 2 * 2 + 8 + 2);
  CHECK(desk.state_dim() == 1 + 3 + 6 + 3);

  const Scenario paper = Scenario::paper();
  CHECK_NOTHROW(paper.validate());
  CHECK(paper.num_users() == 3);
  CHECK(paper.m_antennas == 4);
  CHECK(paper.l_elements == 16);
  CHECK(paper.t_slots == 100);
  CHECK(paper.action_dim() == 2 * 4 * 3 + 16 + 2);
}

TEST_CASE("json round trip") {
  const Scenario sc = Scenario::desk();
  const Scenario back = Scenario::from_json(sc.to_json());
  CHECK(back.x_max == sc.x_max);
  CHECK(back.t_slots == sc.t_slots);
  CHECK(back.m_antennas == sc.m_antennas);
  CHECK(back.l_elements == sc.l_elements);
  CHECK(back.num_users() == sc.num_users());
  CHECK(back.users[0].x == sc.users[0].x);
  CHECK(back.users[1].y == sc.users[1].y);
  CHECK(back.target.x == sc.target.x);
  CHECK(back.uav_start.z == sc.uav_start.z);
  CHECK(back.sigma2 == sc.sigma2);
  CHECK(back.channel.rician_eta == sc.channel.rician_eta);
  CHECK(back.energy.p_b == sc.energy.p_b);
  CHECK(back.xi1 == sc.xi1);
}

TEST_CASE("load from file") {
  const Scenario sc = Scenario::paper();
  const std::string path = "scenario_roundtrip_test.json";
  {
    std::ofstream out(path);
    out << sc.to_json().dump(2);
  }
  const Scenario back = Scenario::load(path);
  CHECK(back.num_users() == 3);
  CHECK(back.p_max == sc.p_max);
  std::remove(path.c_str());

  CHECK_THROWS(Scenario::load("does_not_exist_12345.json"));
}

TEST_CASE("validation rejects bad instances") {
  Scenario sc = Scenario::desk();
  sc.users[0].x = 500.0;  // outside the area
  CHECK_THROWS_AS(sc.validate(), std::invalid_argument);

  sc = Scenario::desk();
  sc.uav_start.z = 50.0;  // disagrees with z_r
  CHECK_THROWS_AS(sc.validate(), std::invalid_argument);

  sc = Scenario::desk();
  sc.users.clear();
  CHECK_THROWS_AS(sc.validate(), std::invalid_argument);

  sc = Scenario::desk();
  sc.t_slots = 0;
  CHECK_THROWS_AS(sc.validate(), std::invalid_argument);
}

TEST_CASE("default cluster layout is fixed") {
  Scenario a = Scenario::desk(), b = Scenario::desk();
  REQUIRE(a.num_users() == b.num_users());
  for (int i = 0; i < a.num_users(); ++i) {
    CHECK(a.users[i].x == b.users[i].x);
    CHECK(a.users[i].y == b.users[i].y);
    const double dx = a.users[i].x - 150.0, dy = a.users[i].y - 150.0;
    CHECK(dx * dx + dy * dy <= 60.0 * 60.0 + 1e-9);
    CHECK(a.users[i].z == 0.0);
  }
  CHECK(a.target.x == b.target.x);
  CHECK(a.target.y == b.target.y);
}

}  // TEST_SUITE
