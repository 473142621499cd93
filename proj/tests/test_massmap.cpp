#include <doctest.h>

#include <dnls/massmap.hpp>

#include <cmath>
#include <random>

#include "oracles.hpp"

using dnls::BranchCoord;
using dnls::Params;
using oracle::rel_close;

namespace {

// exact mass maps for p = 4
double mu_A(double t) { return std::sqrt(2.0) * (t - 1) * std::sqrt(t * t - 1) / (t * t); }
double mu_F(double t) { return std::pow(2.0, 2.5) * t * t / (std::pow(t + 1, 1.5) * std::sqrt(t - 1)); }

}  // namespace

TEST_CASE("mass_of_t exact values") {
  CHECK(std::fabs(dnls::mass_of_t(Params(4, 2.5), 2.0).value - std::sqrt(6.0) / 4) <= 1e-12);
  CHECK(rel_close(dnls::mass_of_t(Params(4, 2.5), BranchCoord::infinity()).value, std::sqrt(2.0), 1e-15));
  CHECK(rel_close(dnls::mass_of_t(Params(4, 3.5), 2.0).value, 16 * std::sqrt(6.0) / 9, 1e-14));
  CHECK_THROWS(dnls::mass_of_t(Params(8, 3), BranchCoord::infinity()));
  CHECK_THROWS(dnls::mass_of_t(Params(16, 9), 2.0));
  for (double t : {1.0001, 1.3, 5.0, 1e3}) {
    CHECK(rel_close(dnls::mass_of_t(Params(4, 2.5), t).value, mu_A(t), 1e-12));
    CHECK(rel_close(dnls::mass_of_t(Params(4, 3.5), t).value, mu_F(t), 1e-12));
  }
}

TEST_CASE("mass from the branch scaling agrees with mu(t) and with profile quadrature") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> up(2.5, 12), uq(2.2, 9), uy(-6, 6);
  int done = 0;
  while (done < 50) {
    const Params pq(up(rng), uq(rng));
    if (pq.diagonal()) continue;
    const BranchCoord t = BranchCoord::from_log_excess(uy(rng));
    const auto pt = dnls::branch_point_at(pq, t);
    const double mu = dnls::mass_of_t(pq, t).value;
    INFO(dnls::describe(pt));
    CHECK(rel_close(dnls::mass_of_point(pt), mu, 1e-11));
    CHECK(rel_close(dnls::profile_mass_quadrature(pt), mu, 1e-6));
    ++done;
  }
  for (auto pq : {Params(4, 2.5), Params(3, 4.5), Params(5, 4)}) {
    const auto z = *dnls::lambda_zero_point(pq);
    CHECK(rel_close(dnls::mass_of_point(z), *dnls::mu0(pq), 1e-12));
    CHECK(rel_close(dnls::profile_mass_quadrature(z), *dnls::mu0(pq), 1e-6));
  }
}

TEST_CASE("diagonal mass law") {
  const Params d(16, 9);
  const double lo = 1e-2, hi = 1e2;
  const double slope = (std::log(dnls::mass_of_lambda_diagonal(d, hi).value) -
                        std::log(dnls::mass_of_lambda_diagonal(d, lo).value)) /
                       (std::log(hi) - std::log(lo));
  CHECK(std::fabs(slope + 5.0 / 14) <= 1e-6);
  const auto s = dnls::solve_for_lambda(d, 1.0);
  REQUIRE(s.count() == 1);
  CHECK(rel_close(dnls::profile_mass_quadrature(s.points[0]), dnls::diagonal_mass_constant(d).value, 1e-6));
  const Params d10(10, 6);
  const double r = dnls::mass_of_lambda_diagonal(d10, 3.0).value / dnls::mass_of_lambda_diagonal(d10, 0.5).value;
  CHECK(rel_close(r, std::pow(6.0, -0.25), 1e-12));
  CHECK_THROWS(dnls::mass_of_lambda_diagonal(Params(8, 5), 1.0));
}

TEST_CASE("asymptotic limits and Richardson extrapolation at t = 1") {
  auto h = dnls::asymptotics(Params(8, 4));
  CHECK(h.t1_exponent == 0.0);
  CHECK(h.t1_limit == doctest::Approx(2.0).epsilon(1e-15));
  auto a = dnls::asymptotics(Params(4, 2.5));
  CHECK(a.t1_limit == 0.0);
  CHECK(a.t1_exponent == doctest::Approx(1.5));
  auto f = dnls::asymptotics(Params(4, 3.5));
  CHECK(std::isinf(f.t1_limit));
  CHECK(f.t1_exponent == doctest::Approx(-0.5));
  // extrapolated prefactor against the predicted one
  for (auto pq : {Params(8, 4), Params(4, 2.5), Params(4, 3.5), Params(5, 4), Params(10, 5)}) {
    const auto as = dnls::asymptotics(pq);
    CHECK(std::fabs(dnls::extrapolate_t1_prefactor(pq) - as.t1_coefficient) <= 1e-4 * as.t1_coefficient);
  }
  CHECK(std::fabs(dnls::extrapolate_t1_prefactor(Params(8, 4)) - 2.0) <= 1e-4);
  CHECK(std::fabs(dnls::extrapolate_t1_prefactor(Params(5, 4)) - 2.0) <= 1e-4);
}

TEST_CASE("tail behaviour as t -> inf") {
  auto a = dnls::asymptotics(Params(4, 2.5));
  CHECK(a.tail == dnls::MassAsymptotics::Tail::Plateau);
  CHECK(rel_close(a.tinf_limit, std::sqrt(2.0), 1e-15));
  auto six = dnls::asymptotics(Params(6, 3));
  CHECK(six.tail == dnls::MassAsymptotics::Tail::Logarithmic);
  const double t = 1e12;
  CHECK(rel_close(dnls::mass_of_t(Params(6, 3), t).value, *six.tinf_coefficient * std::log(2 * t), 1e-10));
  for (auto pq : {Params(8, 3), Params(10, 5), Params(16, 4)}) {
    auto as = dnls::asymptotics(pq);
    CHECK(as.tail == dnls::MassAsymptotics::Tail::Power);
    CHECK(std::fabs(*as.tinf_fitted_slope - as.tinf_exponent) <= 1e-9);
    const double predicted = dnls::C_pq(pq) * dnls::I_of_t(pq, BranchCoord::infinity()).value;
    CHECK(rel_close(*as.tinf_coefficient, predicted, 1e-8));
  }
}

TEST_CASE("monotone mass maps") {
  for (auto pq : {Params(4, 2.5), Params(8, 3), Params(8, 4), Params(3, 4.5), Params(5, 4), Params(6, 5),
                  Params(4, 6)}) {
    REQUIRE(dnls::mass_map_monotone(pq));
    const auto curve = dnls::mass_curve(pq, -12, 12, 400);
    CHECK(curve.strictly_increasing());
    CHECK(curve.extrema.empty());
  }
}

TEST_CASE("non-monotone witness") {
  const auto curve = dnls::mass_curve(Params(4, 3.5), -12, 12, 400);
  REQUIRE(curve.extrema.size() == 1);
  CHECK(curve.extrema[0].minimum);
  CHECK(std::fabs(curve.extrema[0].t - 2.0) <= 1e-10);
  int interior_minima = 0;
  for (std::size_t i = 1; i + 1 < curve.samples.size(); ++i) {
    const auto& s = curve.samples;
    if (s[i].mu < s[i - 1].mu && s[i].mu < s[i + 1].mu) ++interior_minima;
  }
  CHECK(interior_minima == 1);
}

TEST_CASE("normalized solutions, spec examples") {
  auto a = dnls::normalized_solutions(Params(4, 2.5), std::sqrt(6.0) / 4);
  REQUIRE(a.size() == 1);
  CHECK(std::fabs(a[0].point.t.t() - 2.0) <= 1e-9);

  auto f = dnls::normalized_solutions(Params(4, 3.5), 5.0);
  REQUIRE(f.size() == 2);
  CHECK(f[0].point.t.t() < 2.0);
  CHECK(f[1].point.t.t() > 2.0);
  // brute-force crossing count on the exact map
  int crossings = 0;
  double prev = mu_F(1 + 1e-9) - 5;
  for (int i = 1; i <= 200000; ++i) {
    const double t = 1 + std::pow(10.0, -9 + 17.0 * i / 200000);
    const double v = mu_F(t) - 5;
    if ((v > 0) != (prev > 0)) ++crossings;
    prev = v;
  }
  CHECK(crossings == 2);
  for (const auto& s : f) CHECK(rel_close(mu_F(s.point.t.t()), 5.0, 1e-10));

  CHECK(dnls::normalized_solutions(Params(4, 3.5), 4.3).empty());
  CHECK(dnls::normalized_solutions(Params(8, 4), 1.5).empty());
  CHECK(dnls::normalized_solutions(Params(8, 4), 1.9).empty());
  CHECK(dnls::normalized_solutions(Params(8, 4), 2.1).size() == 1);
  CHECK(dnls::normalized_solutions(Params(4, 2.5), 2.0).empty());
  CHECK(dnls::normalized_solutions(Params(6, 4), 1.0).empty());
  CHECK(dnls::normalized_solutions(Params(16, 9), 1.0).size() == 1);
  // plateau endpoint is the lambda = 0 solution
  auto p0 = dnls::normalized_solutions(Params(4, 2.5), std::sqrt(2.0));
  REQUIRE(p0.size() == 1);
  CHECK(p0[0].point.lambda_zero());
  // region F at and above mu0
  auto f0 = dnls::normalized_solutions(Params(4, 3.5), std::pow(2.0, 2.5));
  REQUIRE(f0.size() == 2);
  CHECK(f0[1].point.lambda_zero());
  CHECK(dnls::normalized_solutions(Params(4, 3.5), 7.0).size() == 1);
  // just below mu0 the upper root sits far out on the branch
  auto fn = dnls::normalized_solutions(Params(4, 3.5), std::pow(2.0, 2.5) * (1 - 1e-9));
  REQUIRE(fn.size() == 2);
  CHECK(fn[1].point.t.t() > 1e6);
}

TEST_CASE("normalized solutions pass gates and round-trip through solve_for_lambda") {
  struct Case {
    Params pq;
    double mu;
  };
  const Case cases[] = {{Params(4, 2.5), 0.3},  {Params(4, 2.5), 1.2}, {Params(8, 3), 1.0},
                        {Params(8, 3), 100.0},  {Params(4, 3.5), 5.0}, {Params(10, 5), 0.0},
                        {Params(8, 4), 2.1},    {Params(5, 4), 2.5},   {Params(3, 4.5), 0.5},
                        {Params(6, 5), 3.0},    {Params(16, 9), 2.0},  {Params(12, 7), 0.7}};
  for (const auto& c : cases) {
    double mu = c.mu;
    if (mu == 0.0) mu = 1.1 * *dnls::mass_threshold(c.pq).mu_pq;
    const auto sols = dnls::normalized_solutions(c.pq, mu);
    CHECK(!sols.empty());
    for (const auto& s : sols) {
      INFO(dnls::describe(s.point));
      CHECK(s.mass_gate_residual <= 1e-6);
      CHECK(rel_close(dnls::mass_of_point(s.point), mu, 1e-9));
      if (s.point.lambda_zero()) continue;
      const auto back = dnls::solve_for_lambda(c.pq, s.point.lambda);
      bool found = false;
      for (const auto& b : back.points) {
        if (std::fabs(b.t.t() - s.point.t.t()) <= 1e-9 * s.point.t.t()) found = true;
      }
      CHECK(found);
    }
  }
}

TEST_CASE("mass thresholds") {
  auto a = dnls::mass_threshold(Params(4, 2.5));
  CHECK(a.source == dnls::ThresholdSource::ClosedForm);
  CHECK(rel_close(*a.mu_pq, std::sqrt(2.0), 1e-15));
  auto f = dnls::mass_threshold(Params(4, 3.5));
  CHECK(f.source == dnls::ThresholdSource::Minimized);
  CHECK(std::fabs(*f.mu_pq - 16 * std::sqrt(6.0) / 9) <= 1e-10);
  CHECK(std::fabs(*f.t_min - 2.0) <= 1e-10);
  CHECK(*f.certification_gap <= 1e-10);
  auto h = dnls::mass_threshold(Params(8, 4));
  CHECK(*h.mu_lower == 2.0);
  CHECK_FALSE(h.mu_pq.has_value());
  auto g = dnls::mass_threshold(Params(5, 4));
  CHECK(*g.mu_lower == 2.0);
  CHECK(rel_close(*g.mu_pq, *dnls::mu0(Params(5, 4)), 1e-15));
  CHECK_FALSE(dnls::mass_threshold(Params(8, 3)).mu_pq.has_value());
  auto c = dnls::mass_threshold(Params(10, 5));
  CHECK(*c.certification_gap <= 1e-10);
  // minimum is below every sampled mass
  const auto curve = dnls::mass_curve(Params(10, 5), -20, 20, 800);
  for (const auto& s : curve.samples) CHECK(s.mu >= *c.mu_pq * (1 - 1e-12));
}
