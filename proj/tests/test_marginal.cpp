#include "cmsum/errors.hpp"
#include "cmsum/marginal.hpp"
#include "cmsum/special.hpp"
#include "reference_values.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>

using namespace cmsum;
using Catch::Approx;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("cdf of each family", "[marginal]") {
    CHECK(Marginal::degenerate(5.0).cdf(4.9) == 0.0);
    CHECK(Marginal::degenerate(5.0).cdf(5.0) == 1.0);
    CHECK_THAT(Marginal::poisson(5).cdf(4.0), WithinRel(ref::poisson5_cdf4, 1e-14));
    CHECK_THAT(Marginal::poisson(5).cdf(4.5), WithinRel(ref::poisson5_cdf4, 1e-14));
    CHECK_THAT(Marginal::gamma(4, 1).cdf(8.94), WithinRel(ref::gamma4_cdf_894, 1e-13));
    CHECK_THAT(Marginal::uniform(0, 1).cdf(0.3), WithinAbs(0.3, 1e-15));
    CHECK_THAT(Marginal::normal(0, 1).cdf(0.0), WithinAbs(0.5, 1e-16));
    CHECK(Marginal::empirical({1, 3}, {0.25, 0.75}).cdf(2.0) == Approx(0.25));
}

TEST_CASE("survival function keeps upper-tail precision", "[marginal]") {
    const auto n = Marginal::normal(0, 1);
    CHECK_THAT(n.sf(10.0), WithinRel(ref::normal_sf10, 1e-12));
    const auto p = Marginal::poisson(5);
    CHECK_THAT(p.sf(4.0), WithinRel(1.0 - ref::poisson5_cdf4, 1e-13));
}

TEST_CASE("left and right inverses", "[marginal]") {
    const auto u = Marginal::uniform(0, 1);
    CHECK_THAT(u.quantile_left(0.3), WithinAbs(0.3, 1e-15));
    CHECK_THAT(u.quantile_right(0.3), WithinAbs(0.3, 1e-15));

    const auto p = Marginal::poisson(5);
    CHECK(p.quantile_left(0.5) == 5.0);
    CHECK(p.quantile_left(ref::poisson5_cdf4) == 4.0);
    CHECK(p.quantile_right(ref::poisson5_cdf4) == 5.0);
    CHECK(p.quantile_alpha(ref::poisson5_cdf4, 0.5) == 4.5);
    CHECK(p.quantile_alpha(0.37, 0.0) == p.quantile_left(0.37));

    const auto e = Marginal::empirical({0, 1}, {0.5, 0.5});
    CHECK(e.quantile_left(0.5) == 0.0);
    CHECK(e.quantile_right(0.5) == 1.0);

    const auto d = Marginal::degenerate(2.5);
    for (double q : {0.01, 0.5, 1.0})
        CHECK(d.quantile_left(q) == 2.5);

    CHECK_THAT(Marginal::normal(0, 1).quantile_left(0.8), WithinRel(ref::normal_q08, 1e-14));
    CHECK_THAT(Marginal::gamma(4, 1).quantile_left(0.95), WithinRel(ref::gamma4_q095, 1e-13));
    CHECK_THAT(Marginal::gamma(3, 1).quantile_left(0.95), WithinRel(ref::gamma3_q095, 1e-13));
}

TEST_CASE("support endpoints and infinite inverses", "[marginal]") {
    const auto g = Marginal::gamma(2, 1);
    CHECK(g.quantile_left(0.0) == 0.0);
    CHECK(std::isinf(g.quantile_left(1.0)));
    CHECK_THROWS_AS(g.quantile_alpha(1.0, 0.5), RangeError);
    CHECK_THROWS_AS(g.quantile_left(1.5), RangeError);
    CHECK(Marginal::uniform(2, 3).quantile_right(1.0) == 3.0);
}

TEST_CASE("quantile and cdf are mutually consistent", "[marginal][property]") {
    for (const auto& m : {Marginal::gamma(0.5, 2.0), Marginal::gamma(5, 1), Marginal::normal(1, 3),
                          Marginal::uniform(-1, 4)}) {
        for (int i = 1; i < 100; ++i) {
            const double p = i / 100.0;
            CHECK_THAT(m.cdf(m.quantile_left(p)), WithinAbs(p, 1e-12));
        }
    }
    // Left inverse of a discrete law: smallest atom with F >= p.
    const auto p = Marginal::poisson(7.5);
    for (int i = 1; i < 100; ++i) {
        const double q = i / 100.0;
        const double k = p.quantile_left(q);
        CHECK(p.cdf(k) >= q);
        CHECK(p.cdf(k - 1.0) < q);
    }
}

TEST_CASE("means", "[marginal]") {
    CHECK(Marginal::gamma(4, 1).mean() == 4.0);
    CHECK(Marginal::poisson(5).mean() == 5.0);
    CHECK_THAT(Marginal::empirical({1, 3}, {0.25, 0.75}).mean(), WithinAbs(2.5, 1e-15));
    CHECK(Marginal::uniform(1, 2).mean() == 1.5);
}

TEST_CASE("atom levels", "[marginal]") {
    CHECK(Marginal::normal(0, 1).atoms(0.01, 0.99).empty());
    CHECK(Marginal::degenerate(3).atoms(0.01, 0.99).empty());
    const auto a = Marginal::poisson(5).atoms(0.4, 0.7);
    REQUIRE(a.size() == 2);
    CHECK_THAT(a[0], WithinRel(ref::poisson5_cdf4, 1e-14));
    CHECK_THAT(a[1], WithinRel(ref::poisson5_cdf5, 1e-14));
    CHECK_THROWS_AS(Marginal::poisson(5).atoms(0.0, 1.0, 3), CapExceeded);
}

TEST_CASE("constructor validation", "[marginal]") {
    CHECK_THROWS_AS(Marginal::gamma(-1, 1), InvalidArgument);
    CHECK_THROWS_AS(Marginal::gamma(1, 0), InvalidArgument);
    CHECK_THROWS_AS(Marginal::poisson(0), InvalidArgument);
    CHECK_THROWS_AS(Marginal::normal(0, -1), InvalidArgument);
    CHECK_THROWS_AS(Marginal::uniform(1, 1), InvalidArgument);
    CHECK_THROWS_AS(Marginal::degenerate(NAN), InvalidArgument);
    CHECK_THROWS_AS(Marginal::empirical({}, {}), InvalidArgument);
    CHECK_THROWS_AS(Marginal::empirical({1, 1}, {0.5, 0.5}), InvalidArgument);
    CHECK_THROWS_AS(Marginal::empirical({1, 2}, {0.5, 0.6}), InvalidArgument);
    CHECK_THROWS_AS(Marginal::empirical({1, 2}, {1.0, 0.0}), InvalidArgument);
}

TEST_CASE("special functions in the far tails", "[special]") {
    CHECK_THAT(special::normal_quantile(1e-300), WithinRel(ref::normal_q_1e300, 1e-13));
    CHECK_THAT(special::gamma_q_inv(5.0, 1e-20), WithinRel(ref::gamma5_q_inv_1e20, 1e-12));
    CHECK_THAT(special::gamma_p(5.0, 1e-3), WithinRel(ref::gamma5_p_1e3, 1e-12));
}
