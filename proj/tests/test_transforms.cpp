#include "cmsum/transforms.hpp"
#include "reference_values.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <vector>

using namespace cmsum;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

std::vector<Marginal> all_families() {
    return {Marginal::gamma(4, 1),   Marginal::gamma(0.7, 3.0), Marginal::poisson(5),  Marginal::poisson(0.3),
            Marginal::normal(1, 2),  Marginal::uniform(-1, 3),  Marginal::degenerate(2.5),
            Marginal::empirical({-1, 0.5, 4}, {0.2, 0.5, 0.3})};
}

} // namespace

TEST_CASE("closed forms", "[transforms]") {
    CHECK(tvar(Marginal::degenerate(3), 0.4) == 3.0);
    CHECK(ltvar(Marginal::degenerate(3), 0.4) == 3.0);
    for (double p : {0.1, 0.5, 0.9}) {
        CHECK_THAT(tvar(Marginal::uniform(0, 1), p), WithinAbs((1 + p) / 2, 1e-14));
        CHECK_THAT(ltvar(Marginal::uniform(0, 1), p), WithinAbs(p / 2, 1e-14));
    }
    CHECK_THAT(tvar(Marginal::normal(0, 1), 0.95), WithinRel(ref::normal_tvar095, 1e-12));
    CHECK_THAT(tvar(Marginal::gamma(4, 1), 0.9), WithinRel(ref::gamma4_tvar09, 1e-12));

    CHECK(upper_tail(Marginal::degenerate(2), 1.5) == 0.5);
    CHECK(upper_tail(Marginal::degenerate(2), 2.5) == 0.0);
    CHECK(lower_tail(Marginal::degenerate(2), 2.5) == 0.5);
    for (double x : {0.0, 0.25, 1.0}) {
        CHECK_THAT(upper_tail(Marginal::uniform(0, 1), x), WithinAbs((1 - x) * (1 - x) / 2, 1e-15));
        CHECK_THAT(lower_tail(Marginal::uniform(0, 1), x), WithinAbs(x * x / 2, 1e-15));
    }
    CHECK_THAT(upper_tail(Marginal::poisson(5), 5.0), WithinRel(ref::poisson5_upper_tail5, 1e-13));
    CHECK_THAT(upper_tail(Marginal::gamma(4, 1), 6.0), WithinRel(ref::gamma4_upper_tail6, 1e-12));
    CHECK_THAT(lower_tail(Marginal::gamma(4, 1), 3.0), WithinRel(ref::gamma4_lower_tail3, 1e-12));
}

TEST_CASE("quadrature agrees with closed forms", "[transforms]") {
    for (const auto& m : all_families()) {
        for (double p : {0.05, 0.5, 0.95}) {
            const auto q = tvar_value(m, p, TailMethod::quadrature);
            CHECK(q.method == TailMethod::quadrature);
            CHECK_THAT(q.value, WithinAbs(tvar(m, p), 1e-8 * std::max(1.0, std::abs(q.value))));
            const auto l = ltvar_value(m, p, TailMethod::quadrature);
            CHECK_THAT(l.value, WithinAbs(ltvar(m, p), 1e-8 * std::max(1.0, std::abs(l.value))));
        }
    }
}

TEST_CASE("put-call parity and tail identities", "[transforms][property]") {
    for (const auto& m : all_families()) {
        const double mu = m.mean();
        for (int i = 1; i <= 100; ++i) {
            const double p = (i - 0.5) / 100.0;
            const double v = m.quantile_left(p);
            // pi(x) - lambda(x) = E[X] - x
            CHECK_THAT(upper_tail(m, v) - lower_tail(m, v), WithinAbs(mu - v, 1e-8));
            // TVaR_p = VaR_p + pi(VaR_p) / (1 - p)
            CHECK_THAT(tvar(m, p), WithinAbs(v + upper_tail(m, v) / (1 - p), 1e-8));
            // LTVaR_p = VaR_p - lambda(VaR_p) / p
            CHECK_THAT(ltvar(m, p), WithinAbs(v - lower_tail(m, v) / p, 1e-8));
            // p LTVaR_p + (1 - p) TVaR_p = E[X]
            CHECK_THAT(p * ltvar(m, p) + (1 - p) * tvar(m, p), WithinAbs(mu, 1e-8));
        }
    }
}

TEST_CASE("tail integrals at the ends of the unit interval", "[transforms]") {
    const auto g = Marginal::gamma(4, 1);
    CHECK_THAT(upper_quantile_integral(g, 0.0), WithinRel(4.0, 1e-14));
    CHECK(upper_quantile_integral(g, 1.0) == 0.0);
    CHECK(lower_quantile_integral(g, 0.0) == 0.0);
    CHECK_THAT(tvar(g, 0.0), WithinRel(4.0, 1e-14));
}
