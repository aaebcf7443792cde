#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>

#include "hetnet/numerics.hpp"
#include "test_helpers.hpp"

using namespace hetnet;
using testutil::rel_close;

TEST_CASE("bisect finds a bracketed root") {
  const double r = num::bisect([](double x) { return x * x - 2.0; }, 0.0, 2.0);
  REQUIRE(rel_close(r, std::sqrt(2.0), 1e-11));
  REQUIRE_THROWS(num::bisect([](double x) { return x * x + 1.0; }, 0.0, 2.0));
}

TEST_CASE("bisect tolerates infinite endpoint values") {
  const double r =
      num::bisect([](double x) { return 1.0 / x - 2.0; }, 0.0, 1.0, 1e-13);
  REQUIRE(rel_close(r, 0.5, 1e-11));
}

TEST_CASE("sign change scan brackets every crossing") {
  auto f = [](double x) { return (x - 2.0) * (x - 5.0); };
  const auto brackets = num::sign_change_brackets(f, 1.0, 10.0, 400, true);
  REQUIRE(brackets.size() == 2);
  REQUIRE(rel_close(num::bisect(f, brackets[0].first, brackets[0].second), 2.0,
                    1e-9));
  REQUIRE(rel_close(num::bisect(f, brackets[1].first, brackets[1].second), 5.0,
                    1e-9));
  REQUIRE(num::sign_change_brackets(f, 5.5, 10.0, 100, false).empty());
}

TEST_CASE("golden section maximizes a concave function") {
  const double x =
      num::golden_max([](double t) { return -(t - 1.3) * (t - 1.3); }, 0.0, 4.0,
                      1e-11);
  REQUIRE(rel_close(x, 1.3, 1e-8));
  // monotone increasing: optimum at the upper end
  const double hi = num::golden_max([](double t) { return t; }, 0.0, 2.0, 1e-11);
  REQUIRE(std::abs(hi - 2.0) < 1e-8);
}

TEST_CASE("central differences are near exact on quadratics") {
  auto f = [](double x) { return 3.0 * x * x - x + 2.0; };
  REQUIRE(num::fd_relative_error(f, 1.7, 1e-4, 3.0 * 2.0 * 1.7 - 1.0) < 1e-10);
}
