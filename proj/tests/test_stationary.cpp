#include <doctest.h>

#include <dnls/stationary.hpp>

#include <cmath>
#include <vector>

#include "oracles.hpp"

using dnls::BranchPoint;
using dnls::Params;
using oracle::rel_close;

namespace {

void check_gates(const BranchPoint& pt) {
  INFO(dnls::describe(pt));
  CHECK(dnls::vertex_residual_rel(pt) <= 1e-8);
  CHECK(dnls::matching_residual(pt) <= 1e-8);
  CHECK(dnls::branch_equation_residual(pt) <= 1e-10);
  CHECK(rel_close(dnls::profile(pt, 0.0), pt.u0, 1e-13));
  for (double x : {1e-3, 0.1, 1.0, 3.0, 10.0}) {
    CHECK(dnls::first_integral_residual(pt, x) <= 1e-8);
  }
}

}  // namespace

TEST_CASE("lambda_bar closed form") {
  CHECK(rel_close(*dnls::lambda_bar(Params(4, 2.5)), 1.0 / 32, 1e-14));
  CHECK_FALSE(dnls::lambda_bar(Params(4, 3.5)).has_value());
  CHECK_THROWS(dnls::lambda_bar(Params(16, 9)));
}

TEST_CASE("lambda_bar routes agree") {
  for (auto pq : {Params(4, 2.5), Params(8, 3), Params(10, 5)}) {
    const double closed = *dnls::lambda_bar(pq);
    const double counted = dnls::lambda_bar_by_root_count(pq);
    CHECK(closed > 0);
    CHECK(rel_close(closed, counted, 1e-8));
  }
}

TEST_CASE("diagonal existence") {
  auto d16 = dnls::diagonal_exists(Params(16, 9));
  CHECK(d16.exists);
  CHECK(*d16.t == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
  CHECK_FALSE(dnls::diagonal_exists(Params(8, 5)).exists);
  CHECK_FALSE(dnls::diagonal_exists(Params(6, 4)).exists);
  CHECK_THROWS(dnls::diagonal_exists(Params(8, 4)));
  for (double lam : {0.5, 1.0, 2.0}) {
    auto s = dnls::solve_for_lambda(Params(16, 9), lam);
    REQUIRE(s.count() == 1);
    check_gates(s.points[0]);
    CHECK(dnls::solve_for_lambda(Params(8, 5), lam).count() == 0);
  }
}

TEST_CASE("exact two-root regression") {
  const Params a(4, 2.5);
  auto s = dnls::solve_for_lambda(a, 3.0 / 128);
  REQUIRE(s.count() == 2);
  CHECK(std::fabs(s.points[0].t.t() - 2 / std::sqrt(3.0)) <= 1e-10);
  CHECK(std::fabs(s.points[1].t.t() - 2.0) <= 1e-10);
  for (const auto& pt : s.points) check_gates(pt);

  auto tangent = dnls::solve_for_lambda(a, 1.0 / 32);
  REQUIRE(tangent.count() == 1);
  CHECK(tangent.points[0].t.t() == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
  CHECK(dnls::solve_for_lambda(a, 0.05).count() == 0);
}

TEST_CASE("lambda = 0 solutions") {
  auto z = dnls::solve_for_lambda(Params(4, 2.5), 0.0);
  REQUIRE(z.count() == 1);
  const auto& pt = z.points[0];
  CHECK(pt.lambda_zero());
  check_gates(pt);
  // u ~ c_p / x
  const double x = 1e8;
  CHECK(rel_close(dnls::profile(pt, x) * x, dnls::c_p(4), 1e-7));
  CHECK(dnls::solve_for_lambda(Params(6, 3), 0.0).count() == 0);
  CHECK(dnls::solve_for_lambda(Params(8, 3), 0.0).count() == 0);
  CHECK(dnls::solve_for_lambda(Params(5, 3.5), 0.0).count() == 0);
  CHECK(dnls::solve_for_lambda(Params(3, 4.5), 0.0).count() == 1);
  CHECK_THROWS(dnls::solve_for_lambda(Params(4, 2.5), -1.0));
}

TEST_CASE("root-count staircase below the diagonal") {
  for (auto pq : {Params(4, 2.5), Params(8, 3), Params(10, 5)}) {
    const double lb = *dnls::lambda_bar(pq);
    for (double frac : {1e-3, 0.1, 0.5, 0.9, 0.999999}) {
      const auto s = dnls::solve_for_lambda(pq, frac * lb);
      CHECK(s.count() == 2);
      CHECK(dnls::count_roots_scan(pq, frac * lb) == 2);
      for (const auto& pt : s.points) check_gates(pt);
    }
    CHECK(dnls::solve_for_lambda(pq, lb).count() == 1);
    for (double frac : {1.000001, 1.5, 10.0}) {
      CHECK(dnls::solve_for_lambda(pq, frac * lb).count() == 0);
      CHECK(dnls::count_roots_scan(pq, frac * lb) == 0);
    }
  }
}

TEST_CASE("uniqueness above the diagonal") {
  for (auto pq : {Params(4, 3.5), Params(3, 4.5), Params(6, 5)}) {
    for (int i = 0; i <= 80; ++i) {
      const double lam = std::pow(10.0, -4 + 8.0 * i / 80);
      const auto s = dnls::solve_for_lambda(pq, lam);
      REQUIRE(s.count() == 1);
      check_gates(s.points[0]);
    }
  }
}

TEST_CASE("profiles are even, decreasing and decay exponentially") {
  auto s = dnls::solve_for_lambda(Params(8, 3), 0.5 * *dnls::lambda_bar(Params(8, 3)));
  REQUIRE(s.count() == 2);
  for (const auto& pt : s.points) {
    double prev = dnls::profile(pt, 0.0);
    for (double x = 0.05; x < 30; x += 0.05) {
      CHECK(dnls::profile(pt, x) == dnls::profile(pt, -x));
      CHECK(dnls::profile_derivative(pt, -x) == -dnls::profile_derivative(pt, x));
      const double u = dnls::profile(pt, x);
      CHECK(u < prev);
      prev = u;
    }
    // log-linear fit of u over [5, 50]/sqrt(lambda)
    const double sl = std::sqrt(pt.lambda);
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const int n = 50;
    for (int i = 0; i < n; ++i) {
      const double x = (5.0 + 45.0 * i / (n - 1)) / sl;
      const double y = std::log(dnls::profile(pt, x));
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    const double c = -(n * sxy - sx * sy) / (n * sxx - sx * sx);
    CHECK(c > 0);
    CHECK(c == doctest::Approx(sl).epsilon(1e-6));
    for (double x : {5 / sl, 20 / sl, 50 / sl}) {
      CHECK(dnls::profile(pt, x) <= pt.u0 * std::exp(-0.99 * c * x));
    }
  }
}
