#include <algorithm>
#include <numeric>

#include "doctest.h"
#include "dronecd/model.hpp"
#include "test_support.hpp"

using namespace dronecd;
using namespace dronecd::testing;

TEST_CASE("completion times") {
  SUBCASE("three-route example: A,B on one drone, C on the other") {
    const auto t = completion_times(three_routes(), Assignment{{0, 0, 1}});
    CHECK(t[0] == doctest::Approx(7.35).epsilon(1e-12));
    CHECK(t[1] == doctest::Approx(4.4).epsilon(1e-12));
  }
  SUBCASE("single drone, no recharge") {
    CHECK_THROWS_AS(make({5}, 1, 0), InstanceError);
    const auto t = completion_times(make({5, 1}, 1, 0), Assignment{{0, 0}});
    CHECK(t[0] == doctest::Approx(6));
  }
  SUBCASE("recharge counted between routes only") {
    const auto t = completion_times(make({1, 1, 2}, 2, 0.5), Assignment{{0, 0, 1}});
    CHECK(t[0] == doctest::Approx(2.5));
    CHECK(t[1] == doctest::Approx(2));
  }
  SUBCASE("idle drone is an error") {
    CHECK_THROWS_AS(completion_times(make({1, 2, 3}, 2, 1), Assignment{{0, 0, 0}}),
                    IdleDroneError);
  }
  SUBCASE("bad drone index") {
    CHECK_THROWS_AS(completion_times(three_routes(), Assignment{{0, 2, 1}}), DimensionError);
    CHECK_THROWS_AS(completion_times(three_routes(), Assignment{{0, 1}}), DimensionError);
  }
}

TEST_CASE("makespan") {
  CHECK(makespan(three_routes(), Assignment{{0, 0, 1}}) == doctest::Approx(7.35));
  CHECK(makespan(make({2, 3, 4, 1}, 3, 0), Assignment{{0, 1, 2, 2}}) == doctest::Approx(5));
  CHECK(makespan(make({1, 1, 1, 1}, 2, 0), Assignment{{0, 1, 0, 1}}) == doctest::Approx(2));
}

TEST_CASE("total time and lower bound") {
  CHECK(total_time(three_routes()) == doctest::Approx(11.75));
  CHECK(total_time(make({1.5, 2, 3}, 2, 0)) == doctest::Approx(6.5));
  CHECK(total_time(make({1, 1, 1, 1}, 2, 2)) == doctest::Approx(8));

  CHECK(lower_bound(three_routes()) == doctest::Approx(5.875));
  CHECK(lower_bound(make({10, 1, 1}, 2, 0)) == doctest::Approx(10));
  for (int q = 1; q <= 5; ++q)
    CHECK(lower_bound(make(std::vector<double>(q + 1, 1.0), q, 0)) ==
          doctest::Approx(static_cast<double>(q + 1) / q));
}

TEST_CASE("instance validation") {
  CHECK_THROWS_AS(make({1, 2}, 2, 0), InstanceError);
  CHECK_THROWS_AS(make({1, -2, 3}, 2, 0), InstanceError);
  CHECK_THROWS_AS(make({1, 0, 3}, 2, 0), InstanceError);
  CHECK_THROWS_AS(make({1, 2, 3}, 2, -1), InstanceError);
  CHECK_THROWS_AS(make({1, 2, 3}, 0, 0), InstanceError);
  CHECK_NOTHROW(ScheduleInstance::relaxed(Eigen::Vector2d(1, 2), 7, 0.5));
  CHECK_THROWS_AS(ScheduleInstance::relaxed(Eigen::Vector2d(1, -2), 7, 0.5), InstanceError);
}

TEST_CASE("conservation and lower bound hold on random feasible assignments") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 500; ++trial) {
    const auto inst = random_instance(rng, 2, 12, 1, 5);
    const auto a = random_feasible(rng, inst);
    REQUIRE(is_feasible(inst, a));
    const auto t = completion_times(inst, a);
    CHECK(std::abs(t.sum() - total_time(inst)) <= 1e-9);
    CHECK(t.maxCoeff() >= lower_bound(inst) - 1e-12);
  }
}

TEST_CASE("makespan >= lower bound over every assignment of small instances") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 40; ++trial) {
    const auto inst = random_instance(rng, 3, 6, 2, 3);
    std::vector<int> digits(inst.n(), 0);
    while (true) {
      const Assignment a{digits};
      if (is_feasible(inst, a)) CHECK(makespan(inst, a) >= lower_bound(inst) - 1e-12);
      int i = inst.n() - 1;
      while (i >= 0 && ++digits[i] == inst.q()) digits[i--] = 0;
      if (i < 0) break;
    }
  }
}

TEST_CASE("relabeling drones permutes completion times") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 200; ++trial) {
    const auto inst = random_instance(rng, 3, 10, 2, 5);
    const auto a = random_feasible(rng, inst);
    std::vector<int> perm(inst.q());
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    Assignment b = a;
    for (int& j : b.drone_of) j = perm[j];
    const auto ta = completion_times(inst, a), tb = completion_times(inst, b);
    for (int j = 0; j < inst.q(); ++j) CHECK(tb[perm[j]] == ta[j]);
  }
}

TEST_CASE("bit encoding inverts for one-hot rows only") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const auto inst = random_instance(rng, 2, 8, 1, 4);
    const auto a = random_feasible(rng, inst);
    Assignment back;
    REQUIRE(from_bits(inst, to_bits(inst, a), back));
    CHECK(back == a);
  }
  auto bits = to_bits(three_routes(), Assignment{{0, 0, 1}});
  bits[1] = 1;  // route 0 on both drones
  Assignment out;
  CHECK_FALSE(from_bits(three_routes(), bits, out));
  bits[0] = bits[1] = 0;
  CHECK_FALSE(from_bits(three_routes(), bits, out));
}
