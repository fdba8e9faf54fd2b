#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "decum/mortality.hpp"
#include "helpers.hpp"

using Catch::Approx;
using decum::GompertzMakeham;

// Expected values below were produced by an independent 40-digit reference
// implementation of the same closed forms.

TEST_CASE("hazard at pinned ages") {
    GompertzMakeham law;
    CHECK(decum::hazard(law, 0.0) == Approx(0.00058412).epsilon(1e-12));
    CHECK(decum::hazard(law, 60.0) == Approx(0.00885756202505).epsilon(1e-11));
    CHECK(decum::hazard(law, 75.0) == Approx(0.0357495681755).epsilon(1e-11));
}

TEST_CASE("hazard is increasing in age") {
    GompertzMakeham law;
    double prev = decum::hazard(law, 0.0);
    for (int age = 1; age <= 100; ++age) {
        const double h = decum::hazard(law, age);
        CHECK(h > prev);
        prev = h;
    }
}

TEST_CASE("cumulative hazard closed form matches quadrature") {
    GompertzMakeham law;
    const double closed = decum::cumulative_hazard(law, 60.0, 15.0);
    CHECK(closed == Approx(0.287601082508742).epsilon(1e-12));
    const double quad =
        testutil::integrate([&](double t) { return decum::hazard(law, 60.0 + t); }, 0.0, 15.0);
    CHECK(closed == Approx(quad).epsilon(1e-11));
    // one-year increment is close to the midpoint hazard
    const double one = decum::cumulative_hazard(law, 60.0, 1.0);
    CHECK(one == Approx(0.00927034920406109).epsilon(1e-12));
    CHECK(one == Approx(decum::hazard(law, 60.5)).epsilon(1e-3));
}

TEST_CASE("combined discount at the pinned rates") {
    GompertzMakeham law;
    CHECK(decum::combined_discount(law, 0.03, 60.0, 15.0) ==
          Approx(0.478259846385547).epsilon(1e-12));
    CHECK(decum::combined_discount(law, 0.05, 60.0, 15.0) ==
          Approx(0.354303608422853).epsilon(1e-12));
    CHECK(decum::combined_discount(law, 0.05, 60.0, 5.0) ==
          Approx(0.736316032363634).epsilon(1e-12));
    CHECK(decum::combined_discount(law, 0.0, 60.0, 0.0) == 1.0);
}

TEST_CASE("annuity quotes at the pinned rates") {
    GompertzMakeham law;
    const double a60 = decum::annuity_value(law, 60.0, 0.03, 100.0);
    const double a75 = decum::annuity_value(law, 75.0, 0.03, 100.0);
    CHECK(a60 == Approx(15.3283659068696).epsilon(1e-11));
    CHECK(a75 == Approx(9.14926704728454).epsilon(1e-11));
    CHECK(decum::annuity_value(law, 75.0, 0.05, 100.0) ==
          Approx(8.04169592172186).epsilon(1e-11));
    // the parameters were fitted to a published age-60 quote of 15.348
    CHECK(std::fabs(a60 - 15.348) / 15.348 < 0.02);
}

TEST_CASE("deferred annuity factorizes through the discount") {
    // int_T^{Tm-age0} e^{-r t} surv(age0, t) dt
    //   == e^{-r T} surv(age0, T) * a(age0 + T); both sides on the same
    // weekly Simpson grid, so they agree to rounding.
    GompertzMakeham law;
    const double lhs = decum::simpson(
        [&](double t) {
            return std::exp(-0.03 * t) * decum::survival(law, 60.0, t);
        },
        15.0, 40.0, 1.0 / 52.0);
    const double rhs = decum::combined_discount(law, 0.03, 60.0, 15.0) *
                       decum::annuity_value(law, 75.0, 0.03, 100.0);
    CHECK(lhs == Approx(4.37572705257465).epsilon(1e-11));
    CHECK(lhs == Approx(rhs).epsilon(1e-12));
}

TEST_CASE("mortality validation names the offending field") {
    GompertzMakeham law;
    law.b = 0.0;
    CHECK_THROWS_WITH(decum::validate(law),
                      Catch::Matchers::ContainsSubstring("B > 0"));
    law = GompertzMakeham{};
    law.c = 0.9;
    CHECK_THROWS_WITH(decum::validate(law),
                      Catch::Matchers::ContainsSubstring("C > 1"));
    law = GompertzMakeham{};
    law.a = -1e-9;
    CHECK_THROWS_WITH(decum::validate(law),
                      Catch::Matchers::ContainsSubstring("A >= 0"));
}
