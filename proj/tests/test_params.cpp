#include <doctest.h>

#include <dnls/params.hpp>

#include <cmath>
#include <stdexcept>

using dnls::classify;
using dnls::Params;
using dnls::Region;

TEST_CASE("construction rejects exponents at or below two") {
  CHECK_THROWS_AS(Params(2.0, 3.0), std::invalid_argument);
  CHECK_THROWS_AS(Params(3.0, 2.0), std::invalid_argument);
  CHECK_THROWS_AS(Params(1.5, 1.5), std::invalid_argument);
  CHECK_THROWS_AS(Params(NAN, 3.0), std::invalid_argument);
  CHECK_THROWS_AS(Params(INFINITY, 3.0), std::invalid_argument);
  CHECK_NOTHROW(Params(2.0000001, 2.0000001));
}

TEST_CASE("diagonal flag is exact") {
  CHECK(Params(6.0, 4.0).diagonal());
  CHECK(Params(16.0, 9.0).diagonal());
  CHECK_FALSE(Params(6.0, std::nextafter(4.0, 5.0)).diagonal());
  CHECK(Params(6.0, 4.0).side() == 0);
  CHECK(Params(4.0, 3.5).side() == 1);
  CHECK(Params(4.0, 2.5).side() == -1);
}

TEST_CASE("classify examples and boundary conventions") {
  CHECK(classify(Params(4, 2.5)) == Region::A);
  CHECK(classify(Params(6, 4)) == Region::I);
  CHECK(classify(Params(4, 3.5)) == Region::F);
  CHECK(classify(Params(6, 3)) == Region::B);
  CHECK(classify(Params(6, 5)) == Region::D);
  CHECK(classify(Params(5, 4)) == Region::G);
  CHECK(classify(Params(8, 4)) == Region::H);
  CHECK(classify(Params(10, 5)) == Region::C);
  CHECK(classify(Params(3, 4.5)) == Region::E);
  CHECK(classify(Params(4, 6)) == Region::E);
  CHECK(classify(Params(8, 3)) == Region::B);
  CHECK(classify(Params(8, 5)) == Region::I);
  CHECK(classify(Params(8, 6)) == Region::D);
}

namespace {

// Direct transcription of the set inequalities, used as an independent oracle.
int matching_sets(double p, double q) {
  const double d = p / 2 + 1;
  int n = 0;
  n += (p > 2 && p < 6 && q > 2 && q < d);                 // A
  n += (p >= 6 && q > 2 && q < 4);                         // B
  n += (p > 6 && q > 4 && q < d);                          // C
  n += (p >= 6 && q > d);                                  // D
  n += (p > 2 && p < 6 && q > 4);                          // E
  n += (p > 2 && p < 6 && q > d && q < 4);                 // F
  n += (p > 2 && p < 6 && q == 4);                         // G
  n += (p > 6 && q == 4);                                  // H
  n += (q == d);                                           // I
  return n;
}

double radical_inverse(unsigned i, unsigned base) {
  double f = 1.0, r = 0.0;
  while (i > 0) {
    f /= base;
    r += f * (i % base);
    i /= base;
  }
  return r;
}

}  // namespace

TEST_CASE("nine regions partition the quadrant") {
  for (unsigned i = 1; i <= 10000; ++i) {
    const double p = 2.01 + (12.0 - 2.01) * radical_inverse(i, 2);
    const double q = 2.01 + (12.0 - 2.01) * radical_inverse(i, 3);
    REQUIRE(matching_sets(p, q) == 1);
    CHECK_NOTHROW(classify(Params(p, q)));
  }
  const double lines[][2] = {{6, 3}, {6, 4}, {6, 5}, {5, 4}, {8, 4}, {8, 5}, {3, 2.5}, {7, 4}};
  for (const auto& pq : lines) CHECK(matching_sets(pq[0], pq[1]) == 1);
}

TEST_CASE("existence rules") {
  using dnls::expected_solution_regime;
  using dnls::RuleShape;
  auto h = expected_solution_regime(Params(8, 4));
  CHECK(h.shape == RuleShape::Above);
  CHECK(h.unique);
  CHECK(h.describe() == "(2, inf), unique");

  auto i = expected_solution_regime(Params(6, 4));
  CHECK(i.shape == RuleShape::None);
  CHECK(i.describe() == "none");
  CHECK(expected_solution_regime(Params(16, 9)).shape == RuleShape::AllMasses);

  auto f = expected_solution_regime(Params(4, 3.5));
  CHECK(f.shape == RuleShape::From);
  CHECK(f.lower_inclusive);
  CHECK_FALSE(f.unique);

  auto a = expected_solution_regime(Params(4, 2.5));
  CHECK(a.shape == RuleShape::UpTo);
  CHECK(a.upper_inclusive);
  CHECK(a.unique);

  auto g = expected_solution_regime(Params(5, 4));
  CHECK(g.shape == RuleShape::Window);
  CHECK_FALSE(g.lower_inclusive);
  CHECK(g.upper_inclusive);
}

TEST_CASE("monotone mass map regimes") {
  CHECK(dnls::mass_map_monotone(Params(4, 2.5)));
  CHECK(dnls::mass_map_monotone(Params(8, 3)));
  CHECK(dnls::mass_map_monotone(Params(8, 4)));
  CHECK(dnls::mass_map_monotone(Params(3, 4.5)));
  CHECK_FALSE(dnls::mass_map_monotone(Params(4, 3.5)));
  CHECK_FALSE(dnls::mass_map_monotone(Params(10, 5)));
  CHECK_FALSE(dnls::mass_map_monotone(Params(16, 9)));
}
