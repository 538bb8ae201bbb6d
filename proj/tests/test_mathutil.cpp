#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "echelon/errors.hpp"
#include "echelon/mathutil.hpp"

using namespace echelon;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("mean and variances", "[mathutil]") {
    const std::vector<double> v{10.0, 20.0, 30.0, 40.0, 50.0};
    REQUIRE(math::mean(v) == 30.0);
    REQUIRE_THAT(math::population_sd(v), WithinAbs(14.142135623730951, 1e-14));
    REQUIRE_THAT(math::sample_variance(v), WithinAbs(250.0, 1e-12));
    REQUIRE(math::population_variance(std::vector<double>{4.0, 4.0, 4.0}) == 0.0);
    REQUIRE_THROWS_AS(math::mean(std::vector<double>{}), DomainError);
    REQUIRE_THROWS_AS(math::sample_variance(std::vector<double>{1.0}), DomainError);
}

TEST_CASE("clamp", "[mathutil]") {
    REQUIRE(math::clamp(0.5, 0.05, 0.95) == 0.5);
    REQUIRE(math::clamp(-1.0, 0.05, 0.95) == 0.05);
    REQUIRE(math::clamp(2.0, 0.05, 0.95) == 0.95);
}

TEST_CASE("log gamma matches factorials and half-integers", "[mathutil]") {
    REQUIRE_THAT(math::log_gamma(5.0), WithinAbs(std::log(24.0), 1e-12));
    REQUIRE_THAT(math::log_gamma(1.0), WithinAbs(0.0, 1e-13));
    REQUIRE_THAT(math::log_gamma(0.5), WithinAbs(0.5723649429247001, 1e-12));  // log(sqrt(pi))
    REQUIRE_THAT(math::log_gamma(10.5), WithinAbs(std::lgamma(10.5), 1e-10));
}

TEST_CASE("incomplete beta endpoints and symmetry", "[mathutil]") {
    REQUIRE(math::incomplete_beta(2.0, 3.0, 0.0) == 0.0);
    REQUIRE(math::incomplete_beta(2.0, 3.0, 1.0) == 1.0);
    REQUIRE_THAT(math::incomplete_beta(0.5, 0.5, 0.5), WithinAbs(0.5, 1e-12));
    for (double x : {0.1, 0.3, 0.7, 0.9}) {
        REQUIRE_THAT(math::incomplete_beta(2.5, 1.5, x) + math::incomplete_beta(1.5, 2.5, 1.0 - x),
                     WithinAbs(1.0, 1e-12));
    }
    // I_x(1, b) = 1 - (1-x)^b
    REQUIRE_THAT(math::incomplete_beta(1.0, 4.0, 0.2), WithinAbs(1.0 - std::pow(0.8, 4.0), 1e-13));
    REQUIRE_THROWS_AS(math::incomplete_beta(0.0, 1.0, 0.5), DomainError);
    REQUIRE_THROWS_AS(math::incomplete_beta(1.0, 1.0, 1.5), DomainError);
}

TEST_CASE("t distribution p-values", "[mathutil]") {
    REQUIRE_THAT(math::t_two_sided_p(0.0, 10.0), WithinAbs(1.0, 1e-13));
    // scipy.stats.t.sf(2.228, 10) * 2 = 0.050011771817111327
    REQUIRE_THAT(math::t_two_sided_p(2.228, 10.0), WithinAbs(0.050011771817111327, 1e-9));
    // with 1 dof the t is Cauchy: p(t=1) = 0.5
    REQUIRE_THAT(math::t_two_sided_p(1.0, 1.0), WithinAbs(0.5, 1e-12));
    REQUIRE(math::t_two_sided_p(-3.0, 7.0) == math::t_two_sided_p(3.0, 7.0));
    REQUIRE_THROWS_AS(math::t_two_sided_p(1.0, 0.0), DomainError);
}

TEST_CASE("F survival function", "[mathutil]") {
    REQUIRE(math::f_sf(0.0, 3.0, 10.0) == 1.0);
    REQUIRE(math::f_sf(-1.0, 3.0, 10.0) == 1.0);
    // scipy.stats.f.sf(1.0, 5, 5) = 0.5
    REQUIRE_THAT(math::f_sf(1.0, 5.0, 5.0), WithinAbs(0.5, 1e-12));
    // scipy.stats.f.sf(4.846087862380136, 2, 27) = 0.0159099583256229
    REQUIRE_THAT(math::f_sf(4.846087862380136, 2.0, 27.0), WithinAbs(0.0159099583256229, 1e-9));
    REQUIRE_THROWS_AS(math::f_sf(1.0, 0.0, 5.0), DomainError);
}

TEST_CASE("require_finite flags bad values", "[mathutil]") {
    REQUIRE_NOTHROW(math::require_finite(1.0, "x"));
    REQUIRE_THROWS_AS(math::require_finite(std::numeric_limits<double>::infinity(), "x"), NumericError);
    REQUIRE_THROWS_AS(math::require_finite(std::nan(""), "x"), NumericError);
}
