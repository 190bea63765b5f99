#include <doctest.h>

#include <cmath>
#include <vector>

#include "evsched/rng.hpp"
#include "evsched/simplex.hpp"

using namespace evsched;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

// Expected objective values and solutions frozen from an independent LP
// solve (scipy.optimize.linprog, HiGHS backend) of the same data.
TEST_SUITE("simplex") {
  TEST_CASE("bounded variables with mixed senses") {
    lp::Problem p;
    p.add_var(3.0, 0.0, 2.5);
    p.add_var(-2.0, 0.0, 3.0);
    p.add_var(1.5, 0.5, 2.0);
    p.add_var(-0.5, 0.0, 1.5);
    p.add_row(lp::Sense::le, 4.0, {{0, 1.0}, {1, 1.0}});
    p.add_row(lp::Sense::le, 3.0, {{1, 2.0}, {2, 1.0}, {3, -1.0}});
    p.add_row(lp::Sense::ge, 1.0, {{0, 1.0}, {2, 1.0}, {3, 1.0}});
    const auto sol = lp::solve(p);
    REQUIRE(sol.status == lp::Status::optimal);
    CHECK(sol.objective == doctest::Approx(-4.0).epsilon(1e-9));
    CHECK(sol.x[0] == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(sol.x[1] == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(sol.x[2] == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(sol.x[3] == doctest::Approx(1.5).epsilon(1e-9));
  }

  TEST_CASE("equality row with active upper bounds") {
    lp::Problem p;
    p.add_var(1.0, 0.0, 2.0);
    p.add_var(2.0, 0.0, 2.0);
    p.add_var(3.0, 0.0, 2.0);
    p.add_row(lp::Sense::eq, 5.0, {{0, 1.0}, {1, 1.0}, {2, 1.0}});
    const auto sol = lp::solve(p);
    REQUIRE(sol.status == lp::Status::optimal);
    CHECK(sol.objective == doctest::Approx(9.0).epsilon(1e-9));
    CHECK(sol.x[0] == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(sol.x[1] == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(sol.x[2] == doctest::Approx(1.0).epsilon(1e-9));
  }

  TEST_CASE("equality and inequalities with shifted lower bounds") {
    lp::Problem p;
    p.add_var(-1.0, 0.5, 4.0);
    p.add_var(-1.0, 0.0, 2.5);
    p.add_var(2.0, 0.0, 3.0);
    p.add_var(0.0, 1.0, 3.0);
    p.add_var(0.5, 0.0, 2.0);
    p.add_row(lp::Sense::eq, 6.0, {{0, 1.0}, {1, 2.0}, {3, 1.0}});
    p.add_row(lp::Sense::le, 5.0, {{0, 1.0}, {1, 1.0}, {2, 1.0}});
    p.add_row(lp::Sense::le, 2.0, {{2, 1.0}, {3, 1.0}, {4, -2.0}});
    const auto sol = lp::solve(p);
    REQUIRE(sol.status == lp::Status::optimal);
    CHECK(sol.objective == doctest::Approx(-4.5).epsilon(1e-9));
    CHECK(sol.x[0] == doctest::Approx(4.0).epsilon(1e-9));
    CHECK(sol.x[1] == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(sol.x[3] == doctest::Approx(1.0).epsilon(1e-9));
  }

  TEST_CASE("infeasible system is reported") {
    lp::Problem p;
    p.add_var(1.0, 0.0, 2.0);
    p.add_var(1.0, 0.0, 2.0);
    p.add_row(lp::Sense::le, 1.0, {{0, 1.0}, {1, 1.0}});
    p.add_row(lp::Sense::eq, 3.0, {{0, 1.0}, {1, 1.0}});
    CHECK(lp::solve(p).status == lp::Status::infeasible);
  }

  TEST_CASE("unbounded ray is reported") {
    lp::Problem p;
    p.add_var(-1.0, 0.0, kInf);
    p.add_var(0.0, 0.0, 3.0);
    p.add_row(lp::Sense::le, 1.0, {{0, -1.0}, {1, 1.0}});
    CHECK(lp::solve(p).status == lp::Status::unbounded);
  }

  TEST_CASE("degenerate rows do not cycle") {
    lp::Problem p;
    p.add_var(-0.75, 0.0, kInf);
    p.add_var(150.0, 0.0, kInf);
    p.add_var(-0.02, 0.0, kInf);
    p.add_var(6.0, 0.0, kInf);
    // Beale's classic cycling example (as <= rows with rhs 0)
    p.add_row(lp::Sense::le, 0.0, {{0, 0.25}, {1, -60.0}, {2, -0.04}, {3, 9.0}});
    p.add_row(lp::Sense::le, 0.0, {{0, 0.5}, {1, -90.0}, {2, -0.02}, {3, 3.0}});
    p.add_row(lp::Sense::le, 1.0, {{2, 1.0}});
    const auto sol = lp::solve(p);
    REQUIRE(sol.status == lp::Status::optimal);
    CHECK(sol.objective == doctest::Approx(-0.05).epsilon(1e-9));
  }

  TEST_CASE("fixed variables are respected") {
    lp::Problem p;
    p.add_var(1.0, 1.5, 1.5);  // pinned
    p.add_var(1.0, 0.0, 5.0);
    p.add_row(lp::Sense::ge, 4.0, {{0, 1.0}, {1, 1.0}});
    const auto sol = lp::solve(p);
    REQUIRE(sol.status == lp::Status::optimal);
    CHECK(sol.x[0] == doctest::Approx(1.5));
    CHECK(sol.x[1] == doctest::Approx(2.5));
    CHECK(sol.objective == doctest::Approx(4.0));
  }

  TEST_CASE("redundant equality rows do not break the basis") {
    lp::Problem p;
    p.add_var(2.0, 0.0, 4.0);
    p.add_var(1.0, 0.0, 4.0);
    p.add_row(lp::Sense::eq, 3.0, {{0, 1.0}, {1, 1.0}});
    p.add_row(lp::Sense::eq, 3.0, {{0, 1.0}, {1, 1.0}});  // duplicate
    p.add_row(lp::Sense::eq, 6.0, {{0, 2.0}, {1, 2.0}});  // scaled duplicate
    const auto sol = lp::solve(p);
    REQUIRE(sol.status == lp::Status::optimal);
    CHECK(sol.objective == doctest::Approx(3.0));
    CHECK(sol.x[1] == doctest::Approx(3.0));
  }

  TEST_CASE("random boxed problems return feasible, undominated solutions") {
    // feasibility fuzz: every returned point must satisfy its rows and
    // bounds, and no sampled feasible point may beat the reported optimum
    evsched::SeedStream rng(4242);
    for (int instance = 0; instance < 20; ++instance) {
      const int n = 3 + static_cast<int>(rng.uniform_int(0, 4));
      const int m = 2 + static_cast<int>(rng.uniform_int(0, 3));
      lp::Problem p;
      for (int j = 0; j < n; ++j) {
        const double lo = rng.uniform(-2.0, 1.0);
        p.add_var(rng.uniform(-3.0, 3.0), lo, lo + rng.uniform(0.5, 4.0));
      }
      // rows built around an interior point so the instance is feasible
      std::vector<double> interior(static_cast<size_t>(n));
      for (int j = 0; j < n; ++j)
        interior[static_cast<size_t>(j)] =
            0.5 * (p.lower[static_cast<size_t>(j)] + p.upper[static_cast<size_t>(j)]);
      for (int i = 0; i < m; ++i) {
        std::vector<std::pair<int, double>> terms;
        double at_interior = 0.0;
        for (int j = 0; j < n; ++j) {
          const double a = rng.uniform(-2.0, 2.0);
          terms.emplace_back(j, a);
          at_interior += a * interior[static_cast<size_t>(j)];
        }
        p.add_row(lp::Sense::le, at_interior + rng.uniform(0.1, 2.0), std::move(terms));
      }
      const auto sol = lp::solve(p);
      REQUIRE(sol.status == lp::Status::optimal);
      for (int j = 0; j < n; ++j) {
        CHECK(sol.x[static_cast<size_t>(j)] >= p.lower[static_cast<size_t>(j)] - 1e-7);
        CHECK(sol.x[static_cast<size_t>(j)] <= p.upper[static_cast<size_t>(j)] + 1e-7);
      }
      for (const auto& row : p.rows) {
        double lhs = 0.0;
        for (auto [j, a] : row.terms) lhs += a * sol.x[static_cast<size_t>(j)];
        CHECK(lhs <= row.rhs + 1e-7);
      }
      // random feasible candidates never undercut the reported optimum
      for (int probe = 0; probe < 200; ++probe) {
        std::vector<double> x(static_cast<size_t>(n));
        for (int j = 0; j < n; ++j)
          x[static_cast<size_t>(j)] =
              rng.uniform(p.lower[static_cast<size_t>(j)], p.upper[static_cast<size_t>(j)]);
        bool feasible = true;
        for (const auto& row : p.rows) {
          double lhs = 0.0;
          for (auto [j, a] : row.terms) lhs += a * x[static_cast<size_t>(j)];
          if (lhs > row.rhs + 1e-12) {
            feasible = false;
            break;
          }
        }
        if (!feasible) continue;
        double obj = 0.0;
        for (int j = 0; j < n; ++j)
          obj += p.objective[static_cast<size_t>(j)] * x[static_cast<size_t>(j)];
        CHECK(obj >= sol.objective - 1e-7);
      }
    }
  }
}
