#include "doctest.h"

#include "segscore/error.hpp"
#include "segscore/law_spec.hpp"

using namespace segscore;

TEST_CASE("grammar form") {
  const auto law = parse_law("gaussian_drift:mu=-0.5,sigma=1");
  const auto& g = std::get<GaussianDrift>(law.family());
  CHECK(g.mu == -0.5);
  CHECK(g.sigma == 1);

  CHECK(std::get<TwoPointLattice>(parse_law("two_point_lattice:p=0.3").family()).p == 0.3);
  const auto e = std::get<ExpMinusDrift>(parse_law("exp_minus_drift:c=2,lambda=1").family());
  CHECK(e.lambda == 1);
  CHECK(e.c == 2);
  CHECK(std::get<LaplaceDrift>(parse_law("laplace_drift:mu=-1,b=1").family()).b == 1);
}

TEST_CASE("JSON form") {
  const auto law = parse_law(R"({"family":"laplace_drift","mu":-1,"b":0.5})");
  const auto& l = std::get<LaplaceDrift>(law.family());
  CHECK(l.mu == -1);
  CHECK(l.b == 0.5);
}

TEST_CASE("malformed specs") {
  CHECK_THROWS_AS(parse_law(""), ConfigError);
  CHECK_THROWS_AS(parse_law("gaussian_drift"), ConfigError);
  CHECK_THROWS_AS(parse_law("cauchy:mu=-1"), ConfigError);
  CHECK_THROWS_AS(parse_law("gaussian_drift:mu=-0.5"), ConfigError);
  CHECK_THROWS_AS(parse_law("gaussian_drift:mu=-0.5,sigma=1,nu=3"), ConfigError);
  CHECK_THROWS_AS(parse_law("gaussian_drift:mu=-0.5,mu=-1,sigma=1"), ConfigError);
  CHECK_THROWS_AS(parse_law("gaussian_drift:mu=abc,sigma=1"), ConfigError);
  CHECK_THROWS_AS(parse_law("gaussian_drift:mu=-0.5x,sigma=1"), ConfigError);
  CHECK_THROWS_AS(parse_law("gaussian_drift:mu,sigma=1"), ConfigError);
  CHECK_THROWS_AS(parse_law(R"({"family":"gaussian_drift","mu":"a","sigma":1})"), ConfigError);
  CHECK_THROWS_AS(parse_law(R"({"mu":-1})"), ConfigError);
  CHECK_THROWS_AS(parse_law("{not json"), ConfigError);
  // Parameter constraints are enforced by the law itself.
  CHECK_THROWS_AS(parse_law("gaussian_drift:mu=0.5,sigma=1"), NegDriftViolated);
}

TEST_CASE("format and JSON round trips are exact") {
  const std::vector<std::string> specs{
      "gaussian_drift:mu=-0.5,sigma=1", "exp_minus_drift:lambda=1,c=2",
      "laplace_drift:mu=-0.1,b=0.30000000000000004", "two_point_lattice:p=0.3"};
  for (const auto& s : specs) {
    const auto law = parse_law(s);
    const auto again = parse_law(format_law(law));
    CHECK(format_law(again) == format_law(law));
    CHECK(law_to_json(law_from_json(law_to_json(law))) == law_to_json(law));
    CHECK(law.mgf(0.1) == again.mgf(0.1));
  }
  CHECK(format_law(parse_law("gaussian_drift:sigma=1,mu=-0.5")) ==
        "gaussian_drift:mu=-0.5,sigma=1");
}
