#include <map>

#include "doctest.h"
#include "dronecd/qubo.hpp"
#include "test_support.hpp"

using namespace dronecd;
using namespace dronecd::testing;

namespace {

double scale_of(const QuboModel<double>& m) { return std::max(1.0, m.max_abs_coefficient()); }

// Freeze everything outside N x Q at the current assignment.
std::map<Eigen::Index, std::uint8_t> frozen_outside(const ScheduleInstance& inst,
                                                    const Assignment& a, const Selection& sel) {
  std::map<Eigen::Index, std::uint8_t> fixed;
  for (int i = 0; i < inst.n(); ++i)
    for (int j = 0; j < inst.q(); ++j) {
      const bool free = std::binary_search(sel.routes.begin(), sel.routes.end(), i) &&
                        std::binary_search(sel.drones.begin(), sel.drones.end(), j);
      if (!free) fixed[Eigen::Index{i} * inst.q() + j] = a.drone_of[i] == j;
    }
  return fixed;
}

Selection random_hosted_selection(std::mt19937_64& rng, const ScheduleInstance& inst,
                                  const Assignment& a) {
  Selection sel;
  std::bernoulli_distribution coin(0.6);
  for (int j = 0; j < inst.q(); ++j)
    if (coin(rng)) sel.drones.push_back(j);
  if (sel.drones.empty()) sel.drones.push_back(a.drone_of[0]);
  for (int i = 0; i < inst.n(); ++i)
    if (std::binary_search(sel.drones.begin(), sel.drones.end(), a.drone_of[i]) && coin(rng))
      sel.routes.push_back(i);
  if (sel.routes.empty())
    for (int i = 0; i < inst.n(); ++i)
      if (std::binary_search(sel.drones.begin(), sel.drones.end(), a.drone_of[i])) {
        sel.routes.push_back(i);
        break;
      }
  return sel;
}

}  // namespace

TEST_CASE("default penalty") {
  CHECK(default_penalty(three_routes()) == doctest::Approx(14.05));
  CHECK(default_penalty(ScheduleInstance::relaxed(Eigen::Vector2d(1, 1), 1, 0)) ==
        doctest::Approx(2));
  CHECK(default_penalty(make({1, 1, 2}, 2, 0)) == doctest::Approx(4));
}

TEST_CASE("qubo_energy") {
  CHECK(qubo_energy(QuboModel<double>(3), BitAssignment{0, 0, 0}) == 0);

  QuboBuilder<double> one(1);
  one.add_linear(0, 1);
  CHECK(qubo_energy(one.build(), BitAssignment{1}) == 1);

  QuboBuilder<double> two(2);
  two.add_offset(3);
  two.add_linear(0, -2);
  two.add_linear(1, -2);
  two.add_quadratic(0, 1, 4);
  const auto m = two.build();
  CHECK(qubo_energy(m, BitAssignment{0, 0}) == 3);
  CHECK(qubo_energy(m, BitAssignment{1, 0}) == 1);
  CHECK(qubo_energy(m, BitAssignment{0, 1}) == 1);
  CHECK(qubo_energy(m, BitAssignment{1, 1}) == 3);
  CHECK_THROWS_AS(qubo_energy(m, BitAssignment{1}), DimensionError);
}

TEST_CASE("builder sums duplicates and folds lower-triangle terms") {
  QuboBuilder<double> b(3);
  b.add_quadratic(0, 2, 1.5);
  b.add_quadratic(2, 0, 2.0);
  b.add_quadratic(1, 1, 4.0);
  const auto m = b.build();
  CHECK(m.quad().coeff(0, 2) == 3.5);
  CHECK(m.linear()[1] == 4.0);
  CHECK(m.quad().nonZeros() == 1);
}

TEST_CASE("full model matches the objective on every bit vector") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 25; ++trial) {
    const auto inst = random_instance(rng, 2, 5, 1, 3);
    if (inst.n() * inst.q() > 12) continue;
    const double p = trial % 2 ? default_penalty(inst) : 3.7;
    const auto m = build_full_qubo(inst, p);
    for (std::uint64_t z = 0; z < (1ull << m.num_vars()); ++z) {
      const auto x = bits_of(z, m.num_vars());
      CHECK(std::abs(qubo_energy(m, x) - penalized_objective(inst, p, x)) <= 1e-9 * scale_of(m));
    }
  }
}

TEST_CASE("full model examples") {
  SUBCASE("balanced feasible assignment has zero energy") {
    const auto inst = make({1, 1, 2}, 2, 0);
    const auto m = build_full_qubo(inst, 4);
    CHECK(qubo_energy(m, to_bits(inst, Assignment{{0, 0, 1}})) == doctest::Approx(0).epsilon(1e-12));
  }
  SUBCASE("all-zero energy is the offset") {
    const auto inst = make({1, 1, 2}, 2, 0);
    const auto m = build_full_qubo(inst, 4);
    const double mean = total_time(inst) / 2;
    CHECK(m.offset() == doctest::Approx(2 * mean * mean + 4 * 3));
    // With recharge, every T_j is -c at x = 0.
    const auto f1 = three_routes();
    const double p = default_penalty(f1);
    const auto m1 = build_full_qubo(f1, p);
    const double k = f1.c() + total_time(f1) / 2;
    CHECK(m1.offset() == doctest::Approx(2 * k * k + p * 3));
    CHECK(qubo_energy(m1, BitAssignment(6, 0)) == m1.offset());
  }
  SUBCASE("constraint violations cost at least p each") {
    const auto inst = make({1.3, 0.7, 2.2}, 2, 0.4);
    const double p = default_penalty(inst);
    const auto m = build_full_qubo(inst, p);
    for (std::uint64_t z = 0; z < 64; ++z) {
      const auto x = bits_of(z, 6);
      double violation = 0;
      for (int i = 0; i < 3; ++i) {
        const double s = x[2 * i] + x[2 * i + 1] - 1.0;
        violation += s * s;
      }
      CHECK(qubo_energy(m, x) >= p * violation - 1e-9);
    }
  }
  SUBCASE("capacity") {
    FullQuboLimits tight;
    tight.max_vars = 5;
    CHECK_THROWS_AS(build_full_qubo(three_routes(), 1.0, tight), CapacityError);
  }
}

TEST_CASE("feasible encodings carry no penalty, and the objective is nonnegative") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const auto inst = random_instance(rng, 2, 4, 1, 3);
    const double p = default_penalty(inst);
    const auto m = build_full_qubo(inst, p);
    const double mean = total_time(inst) / inst.q();
    for (std::uint64_t z = 0; z < (1ull << m.num_vars()); ++z) {
      const auto x = bits_of(z, m.num_vars());
      const double e = qubo_energy(m, x);
      CHECK(e >= -1e-9 * scale_of(m));
      Assignment a;
      if (!from_bits(inst, x, a)) continue;
      // One-hot rows: only the balance term remains (idle drones sit at -c).
      double balance = 0;
      for (int j = 0; j < inst.q(); ++j) {
        double t = -inst.c();
        for (int i = 0; i < inst.n(); ++i)
          if (a.drone_of[i] == j) t += inst.r(i) + inst.c();
        balance += (t - mean) * (t - mean);
      }
      CHECK(std::abs(e - balance) <= 1e-9 * scale_of(m));
    }
  }
}

TEST_CASE("global minimizers encode balance-optimal one-hot assignments") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 30; ++trial) {
    const auto inst = random_instance(rng, 3, 4, 2, 2);
    const auto m = build_full_qubo(inst, default_penalty(inst));
    const int k = static_cast<int>(m.num_vars());
    double best = 1e300;
    std::vector<std::uint64_t> argmins;
    for (std::uint64_t z = 0; z < (1ull << k); ++z) {
      const double e = qubo_energy(m, bits_of(z, k));
      if (e < best - 1e-9) {
        best = e;
        argmins = {z};
      } else if (e <= best + 1e-9) {
        argmins.push_back(z);
      }
    }
    // Best balance over one-hot encodings.
    double best_onehot = 1e300;
    for (std::uint64_t z = 0; z < (1ull << inst.n()); ++z) {
      Assignment a;
      a.drone_of.resize(inst.n());
      for (int i = 0; i < inst.n(); ++i) a.drone_of[i] = (z >> i) & 1;
      best_onehot = std::min(best_onehot, qubo_energy(m, to_bits(inst, a)));
    }
    CHECK(best == doctest::Approx(best_onehot).epsilon(1e-12));
    for (auto z : argmins) {
      Assignment a;
      CHECK(from_bits(inst, bits_of(z, k), a));
      CHECK(is_feasible(inst, a));
    }
  }
}

TEST_CASE("clamp") {
  std::mt19937_64 rng(41);
  SUBCASE("clamping everything leaves the energy as offset") {
    const auto m = random_model(rng, 6);
    std::map<Eigen::Index, std::uint8_t> all;
    BitAssignment x(6);
    for (int i = 0; i < 6; ++i) all[i] = x[i] = static_cast<std::uint8_t>(i % 2);
    const auto c = clamp(m, all);
    CHECK(c.model.num_vars() == 0);
    CHECK(c.model.offset() == doctest::Approx(qubo_energy(m, x)));
  }
  SUBCASE("clamping nothing is the identity") {
    const auto m = random_model(rng, 6);
    const auto c = clamp(m, {});
    CHECK(coefficients_match(c.model, m));
    CHECK(c.model.offset() == m.offset());
  }
  SUBCASE("exhaustive agreement on random fixings") {
    for (int trial = 0; trial < 30; ++trial) {
      const int k = 4 + trial % 12;
      const auto m = random_model(rng, k);
      std::map<Eigen::Index, std::uint8_t> fixed;
      std::bernoulli_distribution coin(0.4);
      for (int i = 0; i < k; ++i)
        if (coin(rng)) fixed[i] = coin(rng);
      const auto c = clamp(m, fixed);
      const auto free = static_cast<int>(c.free_to_original.size());
      REQUIRE(free <= 12);
      for (std::uint64_t z = 0; z < (1ull << free); ++z) {
        BitAssignment full(k), reduced = bits_of(z, free);
        for (const auto& [v, b] : fixed) full[v] = b;
        for (int f = 0; f < free; ++f) full[c.free_to_original[f]] = reduced[f];
        CHECK(std::abs(qubo_energy(c.model, reduced) - qubo_energy(m, full)) <= 1e-9 * scale_of(m));
      }
    }
  }
  SUBCASE("composition") {
    for (int trial = 0; trial < 20; ++trial) {
      const int k = 8;
      const auto m = random_model(rng, k);
      std::map<Eigen::Index, std::uint8_t> f1{{1, 1}, {4, 0}}, f12{{1, 1}, {4, 0}};
      const auto first = clamp(m, f1);
      // Fix original variables 2 and 7 in the reduced model.
      std::map<Eigen::Index, std::uint8_t> f2;
      for (std::size_t r = 0; r < first.free_to_original.size(); ++r) {
        const auto orig = first.free_to_original[r];
        if (orig == 2) f2[static_cast<Eigen::Index>(r)] = 1;
        if (orig == 7) f2[static_cast<Eigen::Index>(r)] = trial % 2;
      }
      f12[2] = 1;
      f12[7] = trial % 2;
      const auto twice = clamp(first.model, f2);
      const auto once = clamp(m, f12);
      CHECK(coefficients_match(twice.model, once.model));
    }
  }
}

TEST_CASE("subproblem model equals the clamped full model") {
  SUBCASE("everything free") {
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 10; ++trial) {
      const auto inst = random_instance(rng, 3, 5, 2, 3);
      const auto a = random_feasible(rng, inst);
      Selection sel;
      for (int i = 0; i < inst.n(); ++i) sel.routes.push_back(i);
      for (int j = 0; j < inst.q(); ++j) sel.drones.push_back(j);
      const double p = default_penalty(inst);
      const auto sub = build_subproblem_qubo(inst, p, a, sel);
      CHECK(coefficients_match(sub.model, build_full_qubo(inst, p)));
    }
  }
  SUBCASE("two routes over four drones of seven") {
    // Routes 1 and 4 (one-based) sit on drones 4 and 1; routes 2 and 3 are
    // hosted by selected drones 2 and 5.
    const auto inst = ScheduleInstance::relaxed(Eigen::Vector4d(2.0, 1.5, 3.0, 2.5), 7, 0.5);
    const Assignment a{{3, 1, 4, 0}};
    const Selection sel{{1, 2}, {1, 3, 4, 5}};
    const double p = default_penalty(inst);
    const auto sub = build_subproblem_qubo(inst, p, a, sel, 10);
    CHECK(sub.model.num_vars() == 8);
    CHECK(sub.vars.front() == std::pair{1, 1});
    CHECK(sub.vars.back() == std::pair{2, 5});
    const auto clamped = clamp(build_full_qubo(inst, p), frozen_outside(inst, a, sel));
    CHECK(coefficients_match(sub.model, clamped.model));
  }
  SUBCASE("random instances, assignments and hosted selections") {
    std::mt19937_64 rng(123);
    for (int trial = 0; trial < 60; ++trial) {
      const auto inst = random_instance(rng, 4, 5, 2, 3);
      const auto a = random_feasible(rng, inst);
      const auto sel = random_hosted_selection(rng, inst, a);
      const double p = trial % 3 ? default_penalty(inst) : 0.0;
      const auto sub = build_subproblem_qubo(inst, p, a, sel);
      const auto clamped = clamp(build_full_qubo(inst, p), frozen_outside(inst, a, sel));
      CHECK(coefficients_match(sub.model, clamped.model));
    }
  }
  SUBCASE("invalid selections") {
    const auto inst = make({1, 2, 3, 4}, 2, 0.5);
    const Assignment a{{0, 0, 1, 1}};
    const double p = default_penalty(inst);
    CHECK_THROWS_AS(build_subproblem_qubo(inst, p, a, Selection{{0, 2}, {0}}), InvalidSelectionError);
    CHECK_THROWS_AS(build_subproblem_qubo(inst, p, a, Selection{{}, {0}}), InvalidSelectionError);
    CHECK_THROWS_AS(build_subproblem_qubo(inst, p, a, Selection{{1, 0}, {0}}), InvalidSelectionError);
    CHECK_THROWS_AS(build_subproblem_qubo(inst, p, a, Selection{{0}, {0, 2}}), InvalidSelectionError);
    CHECK_THROWS_AS(build_subproblem_qubo(inst, p, a, Selection{{0, 1, 2, 3}, {0, 1}}, 7),
                    CapacityError);
  }
}
