#include <doctest.h>

#include <dnls/energy.hpp>

#include <cmath>
#include <vector>

#include "oracles.hpp"

using dnls::EnergyFlag;
using dnls::Params;
using oracle::rel_close;

namespace {

std::vector<double> linear_grid(double a, double b, int n) {
  std::vector<double> g;
  for (int i = 0; i < n; ++i) g.push_back(a + (b - a) * i / (n - 1));
  return g;
}

std::vector<double> log_grid(double a, double b, int n) {
  std::vector<double> g;
  for (int i = 0; i < n; ++i) g.push_back(a * std::pow(b / a, static_cast<double>(i) / (n - 1)));
  return g;
}

}  // namespace

TEST_CASE("branch energy components") {
  const auto s = dnls::solve_for_lambda(Params(4, 2.5), 3.0 / 128);
  for (const auto& pt : s.points) {
    const auto e = dnls::branch_energy(pt);
    CHECK(e.kinetic >= 0);
    CHECK(e.bulk >= 0);
    CHECK(e.total == e.kinetic + e.bulk - e.point);
    // the multiplier identity returns the branch frequency
    CHECK(rel_close(dnls::multiplier_from_energy(pt.params, e, dnls::mass_of_point(pt)), pt.lambda, 1e-10));
    // |u|_inf^2 <= |u|_2 |u'|_2
    CHECK(pt.u0 * pt.u0 <= std::sqrt(dnls::mass_of_point(pt) * 2 * e.kinetic));
  }
  const auto z = *dnls::lambda_zero_point(Params(4, 2.5));
  const auto ez = dnls::branch_energy(z);
  CHECK(std::fabs(dnls::multiplier_from_energy(z.params, ez, dnls::mass_of_point(z))) <= 1e-12);
}

TEST_CASE("diagonal branch energies are positive") {
  for (double p : {10.0, 12.0, 16.0}) {
    for (double lam : {0.1, 1.0, 10.0}) {
      const auto s = dnls::solve_for_lambda(Params(p, p / 2 + 1), lam);
      REQUIRE(s.count() == 1);
      CHECK(dnls::branch_energy(s.points[0]).total > 0);
    }
  }
  // closed form at p = 16, lambda = 1, t = sqrt 2: on the diagonal the 2t term of
  // the combined formula cancels the point term, leaving 2^((p-4)/(p-2)) p^(2/(p-2))
  // lambda^((p+2)/(2(p-2))) (p-6) I(t) / ((p+2)(p-2))
  const Params d(16, 9);
  const auto pt = dnls::solve_for_lambda(d, 1.0).points[0];
  const double I = dnls::I_of_t(d, std::sqrt(2.0)).value;
  const double expect = std::pow(2.0, 12.0 / 14) * std::pow(16.0, 2.0 / 14) * 10.0 * I / (18.0 * 14.0);
  CHECK(rel_close(dnls::branch_energy(pt).total, expect, 1e-10));
}

TEST_CASE("peak bound below the diagonal") {
  for (auto pq : {Params(4, 2.5), Params(8, 3), Params(8, 4), Params(10, 5), Params(12, 4.5)}) {
    const double lb = *dnls::lambda_bar(pq);
    for (double frac : {1e-6, 1e-3, 0.1, 0.5, 0.99, 1.0}) {
      for (const auto& pt : dnls::solve_for_lambda(pq, frac * lb).points) {
        CHECK(std::pow(pt.u0, pq.p() + 2 - 2 * pq.q()) <= pq.p() / 8.0 * (1 + 1e-12));
      }
    }
  }
}

TEST_CASE("energy level is non-positive and non-increasing") {
  struct Case {
    Params pq;
    std::vector<double> grid;
  };
  const std::vector<Case> cases = {
      {Params(4, 2.5), linear_grid(0.05, 3.0, 60)},  {Params(8, 3), log_grid(1e-2, 1e3, 60)},
      {Params(4, 3.5), linear_grid(0.5, 9.0, 60)},   {Params(10, 5), log_grid(0.1, 100, 60)},
      {Params(8, 4), linear_grid(0.5, 6.0, 60)},     {Params(5, 4), linear_grid(0.1, 2.0, 30)},
      {Params(3, 2.2), log_grid(1e-2, 1e2, 40)},     {Params(6, 3), log_grid(1e-2, 1e2, 40)}};
  for (const auto& c : cases) {
    const auto curve = dnls::energy_curve(c.pq, c.grid, 2);
    double prev = 0.0;
    for (const auto& s : curve.samples) {
      INFO(c.pq.to_string() << " mu=" << s.mu);
      REQUIRE(s.E.has_value());
      CHECK(*s.E <= 0.0);
      CHECK(*s.E <= prev + 1e-12 * std::fabs(prev));
      prev = *s.E;
    }
  }
}

TEST_CASE("region A plateau") {
  const Params a(4, 2.5);
  const auto at = dnls::energy_at(a, std::sqrt(2.0));
  REQUIRE(at.E.has_value());
  CHECK(at.flag == EnergyFlag::Attained);
  for (double mu : {1.5, 2.0, 3.0}) {
    const auto s = dnls::energy_at(a, mu);
    CHECK(std::fabs(*s.E - *at.E) <= 1e-8);
    CHECK(s.flag == EnergyFlag::NotAttained);
    CHECK(*s.lambda == 0.0);
  }
  for (double mu : {0.1, 0.7, 1.4}) CHECK(dnls::energy_at(a, mu).E < 0);
  // the multiplier vanishes approaching the plateau
  const auto near = dnls::energy_at(a, std::sqrt(2.0) * (1 - 1e-6));
  CHECK(*near.lambda < 1e-4);
  CHECK(*near.lambda < *dnls::energy_at(a, 1.0).lambda);
}

TEST_CASE("region B tail is bounded with shrinking gaps") {
  const Params b(8, 3);
  const double e1 = *dnls::energy_at(b, 10).E, e2 = *dnls::energy_at(b, 100).E, e3 = *dnls::energy_at(b, 1000).E;
  CHECK(e2 < e1);
  CHECK(e3 < e2);
  CHECK((e2 - e3) * 2 <= (e1 - e2));
  CHECK(e3 >= *dnls::energy_lower_bound(b, 1000));
}

TEST_CASE("vanishing and unbounded regimes") {
  for (double mu : {0.5, 1.5, 2.0}) {
    const auto s = dnls::energy_at(Params(8, 4), mu);
    CHECK(*s.E == 0.0);
    CHECK(s.flag == EnergyFlag::NotAttained);
    CHECK(s.branch_id == dnls::kVanishingBranch);
  }
  CHECK(*dnls::energy_at(Params(5, 4), 1.0).E == 0.0);
  CHECK(dnls::energy_at(Params(5, 4), 3.0).flag == EnergyFlag::MinusInfinity);
  CHECK(dnls::energy_at(Params(3, 5), 1.0).flag == EnergyFlag::MinusInfinity);
  CHECK(dnls::energy_at(Params(8, 6), 1.0).flag == EnergyFlag::MinusInfinity);
  CHECK_FALSE(dnls::energy_refusal_reason(Params(3, 5)).empty());
  CHECK(dnls::energy_refusal_reason(Params(4, 2.5)).empty());
  CHECK(dnls::energy_at(Params(16, 9), 1.0).flag == EnergyFlag::Unknown);
  CHECK(dnls::energy_at(Params(4, 3), 1.0).flag == EnergyFlag::NotAttained);
}

TEST_CASE("mu_tilde") {
  CHECK(std::fabs(*dnls::mu_tilde(Params(8, 4)) - 2.0) <= 1e-6);
  for (auto pq : {Params(4, 3.5), Params(10, 5)}) {
    const double mt = *dnls::mu_tilde(pq);
    const double mpq = *dnls::mass_threshold(pq).mu_pq;
    CHECK(mpq <= mt);
    CHECK(*dnls::energy_at(pq, mt * 1.001).E < 0);
    CHECK(*dnls::energy_at(pq, mt * 0.999).E == 0.0);
  }
  CHECK_FALSE(dnls::mu_tilde(Params(4, 2.5)).has_value());
}

TEST_CASE("multiplier identity dE/dmu = -lambda/2") {
  CHECK(dnls::multiplier_consistency(Params(4, 2.5), 0.3, 1e-3) <= 1e-5);
  CHECK(dnls::multiplier_consistency(Params(8, 3), 1.0, 1e-3) <= 1e-5);
  for (double mu : {0.2, 0.5, 0.8, 1.1, 1.3}) {
    CHECK(dnls::multiplier_consistency(Params(4, 2.5), mu, 1e-3 * mu) <= 1e-5);
  }
  for (double mu : {0.1, 1.0, 3.0, 10.0, 100.0}) {
    CHECK(dnls::multiplier_consistency(Params(8, 3), mu, 1e-3 * mu) <= 1e-5);
  }
  CHECK_THROWS(dnls::multiplier_consistency(Params(8, 4), 1.0, 1e-3));
}

TEST_CASE("scaling estimate in region F") {
  const Params f(4, 3.5);
  const double mt = *dnls::mu_tilde(f);
  const double k = f.q() / (4 - f.q());
  for (double m1 : {1.01 * mt, 1.2 * mt, 1.5 * mt}) {
    for (double ratio : {1.05, 1.5, 3.0}) {
      const double m2 = m1 * ratio;
      CHECK(*dnls::energy_at(f, m2).E < std::pow(ratio, k) * *dnls::energy_at(f, m1).E);
    }
  }
}

TEST_CASE("unboundedness probes") {
  CHECK(dnls::unboundedness_probe(Params(3, 5), 1.0).below_floor);
  CHECK(dnls::unboundedness_probe(Params(5, 4), 3.0).below_floor);
  CHECK(dnls::unboundedness_probe(Params(4, 6), 1.0).below_floor);
  CHECK_FALSE(dnls::unboundedness_probe(Params(5, 4), 1.0).below_floor);
  for (auto pq : {Params(4, 2.5), Params(8, 4.5), Params(8, 3), Params(4, 3.5)}) {
    const auto r = dnls::unboundedness_probe(pq, 1.0);
    CHECK_FALSE(r.below_floor);
    REQUIRE(r.lower_bound.has_value());
    CHECK(r.infimum >= *r.lower_bound);
  }
  // the bound is consistent with the computed level
  const Params a(4, 2.5);
  CHECK(*dnls::energy_at(a, 1.0).E >= *dnls::energy_lower_bound(a, 1.0));
  CHECK(*dnls::energy_at(a, 1.0).E <= dnls::unboundedness_probe(a, 1.0).infimum);
}

TEST_CASE("convexity switch") {
  const Params a(4, 2.5);
  const auto ga = linear_grid(0.01, std::sqrt(2.0) - 0.01, 140);
  const auto ca = dnls::convexity_scan(a, ga);
  CHECK(ca.resolved);
  CHECK(ca.sign_changes == 1);
  const double spacing = ga[1] - ga[0];
  // lambda peaks where the branch crosses t*, i.e. at mu(t*)
  const double mu_star = dnls::mass_of_t(a, *dnls::f_minimizer(a)).value;
  CHECK(std::fabs(*ca.mu_bar - mu_star) <= 2 * spacing);
  CHECK(std::fabs(*ca.mu_bar - *ca.mu_lambda_max) <= 2 * spacing);

  const Params b(8, 3);
  const auto gb = log_grid(1e-3, 1e3, 240);
  const auto cb = dnls::convexity_scan(b, gb);
  CHECK(cb.resolved);
  const double ratio = gb[1] / gb[0];
  CHECK(*cb.mu_bar / *cb.mu_lambda_max <= ratio * ratio);
  CHECK(*cb.mu_lambda_max / *cb.mu_bar <= ratio * ratio);

  CHECK_FALSE(dnls::convexity_scan(Params(4, 3.5), ga).resolved);
  CHECK_FALSE(dnls::convexity_scan(a, {0.1, 0.2, 0.3}).resolved);
}
