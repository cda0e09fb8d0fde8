// Acceptance suite: one PASS/FAIL line per criterion.
//
// Usage: acceptance [--expect-red 2,3,...]
// Without the flag the exit status is 0 only when every criterion passes. With it, the
// exit status is 0 only when exactly the listed criteria fail.

#include "cmsum/decomposition.hpp"
#include "cmsum/errors.hpp"
#include "cmsum/oracle.hpp"
#include "cmsum/quadrature.hpp"
#include "cmsum/special.hpp"
#include "cmsum/transforms.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

using namespace cmsum;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

// Accumulates individual checks into one criterion outcome.
class Checks {
public:
    void within(const std::string& what, double got, double want, double tol) {
        const bool ok = std::abs(got - want) <= tol;
        note(ok, what, got, want, tol);
    }
    void in_band(const std::string& what, double got, double lo, double hi) {
        const bool ok = got >= lo && got <= hi;
        std::ostringstream os;
        os.precision(6);
        os << what << "=" << got << " in [" << lo << "," << hi << "]" << (ok ? "" : " MISS");
        add(ok, os.str());
    }
    void that(const std::string& what, bool ok) { add(ok, what + (ok ? "" : " MISS")); }
    void add(bool ok, const std::string& text) {
        pass_ = pass_ && ok;
        if (!detail_.empty())
            detail_ += "; ";
        detail_ += text;
    }
    Outcome outcome() const { return {pass_, detail_}; }

private:
    void note(bool ok, const std::string& what, double got, double want, double tol) {
        std::ostringstream os;
        os.precision(7);
        os << what << "=" << got << " (want " << want << " +/- " << tol << ")" << (ok ? "" : " MISS");
        add(ok, os.str());
    }
    bool pass_ = true;
    std::string detail_;
};

GPair example1() { return GPair(Marginal::gamma(4, 1), Marginal::gamma(3, 1)); }
GPair example2() { return GPair(Marginal::gamma(5, 1), Marginal::poisson(5)); }
GPair normal_pair() { return GPair(Marginal::normal(0, 2), Marginal::normal(0, 1)); }

// Target values.
constexpr double kEx1U[2] = {0.01328, 0.96358};
constexpr double kEx2U[12] = {0.13337, 0.15843, 0.23781, 0.33971, 0.38404, 0.53079,
                              0.55951, 0.69279, 0.73497, 0.81179, 0.87535, 0.89076};
constexpr double kEx2Alpha[6] = {0.83598, 0.46330, 0.22700, 0.16108, 0.31461, 0.76530};

Outcome criterion1() {
    Checks c;
    c.within("sum_quantile(0.95)", example1().sum_quantile(0.95, 0.0), 8.94, 0.01);
    return c.outcome();
}

Outcome criterion2() {
    Checks c;
    const auto pair = example1();
    const auto s = pair.crossing_set(pair.sum_quantile(0.95, 0.0));
    c.that("N=" + std::to_string(s.n()), s.n() == 2);
    for (std::size_t j = 0; j < std::min<std::size_t>(2, s.n()); ++j) {
        c.within("u" + std::to_string(j + 1), s.points[j].u, kEx1U[j], 1e-4);
        c.that("u" + std::to_string(j + 1) + " continuous", !s.points[j].is_jump);
    }
    return c.outcome();
}

Outcome criterion3() {
    Checks c;
    c.within("sum_quantile(0.5)", example2().sum_quantile(0.5, 0.0), 9.85, 0.01);
    return c.outcome();
}

Outcome criterion4() {
    Checks c;
    const auto pair = example2();
    const auto s = pair.crossing_set(pair.sum_quantile(0.5, 0.0));
    c.that("N=" + std::to_string(s.n()), s.n() == 12);
    std::string jumps;
    for (std::size_t j = 0; j < s.n(); ++j)
        if (s.points[j].is_jump)
            jumps += (jumps.empty() ? "" : ",") + std::to_string(j + 1);
    c.that("jumps at {" + jumps + "}", jumps == "1,3,5,7,9,11");
    for (std::size_t j = 0; j < std::min<std::size_t>(12, s.n()); ++j)
        c.within("u" + std::to_string(j + 1), s.points[j].u, kEx2U[j], 1e-4);
    return c.outcome();
}

Outcome criterion5() {
    Checks c;
    const auto pair = example2();
    const auto s = pair.crossing_set(pair.sum_quantile(0.5, 0.0));
    std::size_t k = 0;
    for (const auto& pt : s.points) {
        if (!pt.is_jump)
            continue;
        if (k < 6)
            c.within("alpha" + std::to_string(2 * k + 1), pt.alpha, kEx2Alpha[k], 1e-3);
        ++k;
    }
    c.that("six jump weights", k == 6);
    return c.outcome();
}

Outcome criterion6() {
    Checks c;
    c.within("TVaR_0.5", tvar_countermonotonic(example2(), 0.5, 0.0).total, 10.51, 0.01);
    return c.outcome();
}

Outcome criterion7() {
    Checks c;
    const auto pair = example2();
    const auto d = stoploss_countermonotonic(pair, pair.sum_quantile(0.5, 0.0), StopLossForm::left_inverse);
    c.within("total", d.total, 0.33610, 5e-4);
    c.within("leading", d.leading_upper - d.leading_lower, 0.03918, 5e-4);
    c.within("S", d.s_sum, 0.92823, 5e-4);
    c.within("jump part", d.jump_correction + d.j_sum, -0.63130, 5e-4);
    return c.outcome();
}

Outcome criterion8() {
    Checks c;
    std::vector<double> grid;
    for (int i = 1; i <= 99; ++i)
        grid.push_back(i / 100.0);
    struct Maxima {
        double under1 = -1e300, under2 = -1e300, spread1 = -1e300, spread2 = -1e300;
    };
    const auto maxima = [&](const GPair& pair) {
        Maxima m;
        for (const auto& r : approximation_report(pair, grid)) {
            m.under1 = std::max(m.under1, -r.rel_err1);
            m.under2 = std::max(m.under2, -r.rel_err2);
            m.spread1 = std::max(m.spread1, r.spread_rel_err1);
            m.spread2 = std::max(m.spread2, r.spread_rel_err2);
        }
        return m;
    };
    const Maxima e1 = maxima(example1());
    const Maxima e2 = maxima(example2());
    c.in_band("ex1 t1 underestimation %", e1.under1, 3, 7);
    c.in_band("ex2 t1 underestimation %", e2.under1, 4, 8);
    c.in_band("ex1 t2 underestimation %", e1.under2, 12, 16);
    c.in_band("ex1 spread overestimation %", e1.spread1, 60, 80);
    c.in_band("ex2 spread overestimation %", e2.spread1, 30, 50);
    return c.outcome();
}

std::vector<Marginal> family_zoo() {
    return {Marginal::gamma(4, 1),   Marginal::gamma(0.6, 2.5), Marginal::poisson(5),  Marginal::poisson(0.4),
            Marginal::normal(1, 2),  Marginal::uniform(-1, 3),  Marginal::degenerate(2.5),
            Marginal::empirical({-1, 0.5, 4}, {0.2, 0.5, 0.3})};
}

Marginal random_marginal(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> U(0.0, 1.0);
    switch (rng() % 5) {
    case 0:
        return Marginal::gamma(0.5 + 6 * U(rng), 0.5 + 2 * U(rng));
    case 1:
        return Marginal::poisson(0.5 + 8 * U(rng));
    case 2:
        return Marginal::normal(4 * U(rng) - 2, 0.3 + 2 * U(rng));
    case 3: {
        const double lo = 4 * U(rng) - 2;
        return Marginal::uniform(lo, lo + 0.5 + 3 * U(rng));
    }
    default: {
        const double a = U(rng), b = U(rng), s = a + b + 0.5;
        return Marginal::empirical({0.0, 1.0 + U(rng), 3.0 + 2 * U(rng)}, {a / s, b / s, 0.5 / s});
    }
    }
}

Outcome criterion9() {
    Checks c;

    // (a) single-marginal identities
    double worst_a = 0.0;
    for (const auto& m : family_zoo()) {
        const double mu = m.mean();
        for (int i = 1; i <= 100; ++i) {
            const double p = (i - 0.5) / 100.0;
            const double v = m.quantile_left(p);
            const double pi = upper_tail(m, v), lam = lower_tail(m, v);
            worst_a = std::max({worst_a, std::abs(pi - lam - (mu - v)), std::abs(tvar(m, p) - (v + pi / (1 - p))),
                                std::abs(ltvar(m, p) - (v - lam / p))});
        }
    }
    c.that("(a) max residual " + std::to_string(worst_a), worst_a <= 1e-8);

    // (b) comonotonic additivity, checked against direct quadrature of Q1 + Q2
    double worst_b = 0.0;
    for (const auto& pair : {example1(), example2(), normal_pair()}) {
        for (double p : {0.1, 0.5, 0.9, 0.99}) {
            const double v = pair.first().quantile_left(p) + pair.second().quantile_left(p);
            worst_b = std::max(worst_b, std::abs(var_comonotonic(pair, p) - v));
            std::vector<double> br = pair.first().atoms(p, 1.0);
            for (double a : pair.second().atoms(p, 1.0))
                br.push_back(a);
            const auto q = integrate_piecewise(
                [&](double u) { return pair.first().quantile_left(u) + pair.second().quantile_left(u); }, p,
                1.0 - 1e-15, br);
            worst_b = std::max(worst_b, std::abs(tvar_comonotonic(pair, p) - q.value / (1 - p)));
        }
    }
    c.that("(b) max residual " + std::to_string(worst_b), worst_b <= 1e-9);

    // (c) counter-monotonic below comonotonic; (d) both stop-loss forms agree; (e) s1 + s2 = E - x
    std::mt19937_64 rng(20240601);
    std::uniform_real_distribution<double> U(0.02, 0.98);
    int draws = 0, order_bad = 0;
    double worst_d = 0.0, worst_e = 0.0;
    while (draws < 200) {
        const GPair pair(random_marginal(rng), random_marginal(rng));
        if (pair.is_degenerate())
            continue;
        ++draws;
        const double p = U(rng);
        if (tvar_countermonotonic(pair, p).total > tvar_comonotonic(pair, p) + 1e-9)
            ++order_bad;
        const double x = pair.sum_quantile(p);
        const auto left = stoploss_countermonotonic(pair, x, StopLossForm::left_inverse);
        const auto gen = stoploss_countermonotonic(pair, x, StopLossForm::generalized_inverse);
        try {
            if (left.total > stoploss_comonotonic(pair, x).value + 1e-9)
                ++order_bad;
        } catch (const RangeError&) {
            // x at the edge of the comonotonic range: the premium there is trivially ordered.
        }
        const double mean = pair.first().mean() + pair.second().mean();
        worst_d = std::max(worst_d, std::abs(left.total - gen.total));
        worst_e = std::max({worst_e, std::abs(left.s1 + left.s2 - (mean - x)), std::abs(gen.s1 + gen.s2 - (mean - x))});
    }
    c.that("(c) order violations " + std::to_string(order_bad) + "/400", order_bad == 0);
    c.that("(d) max form gap " + std::to_string(worst_d), worst_d <= 1e-8);
    c.that("(e) max residual " + std::to_string(worst_e), worst_e <= 1e-8);

    // (f) alpha invariance
    double worst_f = 0.0;
    for (const auto& [pair, p] : std::vector<std::pair<GPair, double>>{
             {example1(), 0.95}, {example2(), 0.5}, {normal_pair(), 0.9},
             {GPair(Marginal::poisson(2), Marginal::poisson(4)), 0.5}}) {
        const double t0 = tvar_countermonotonic(pair, p, 0.0).total;
        for (double a : {0.5, 1.0})
            worst_f = std::max(worst_f, std::abs(tvar_countermonotonic(pair, p, a).total - t0));
    }
    c.that("(f) max alpha gap " + std::to_string(worst_f), worst_f <= 1e-8);

    // (g) oracle agreement on fixture pairs
    const std::vector<std::pair<std::string, GPair>> fixtures{
        {"gamma/gamma", example1()},
        {"normal/normal", normal_pair()},
        {"gamma/poisson", example2()},
        {"poisson/uniform", GPair(Marginal::poisson(3), Marginal::uniform(0, 4))},
        {"poisson/poisson", GPair(Marginal::poisson(2), Marginal::poisson(4))},
        {"empirical/empirical", GPair(Marginal::empirical({0, 1, 5}, {0.2, 0.5, 0.3}),
                                      Marginal::empirical({-2, 0, 1, 3}, {0.1, 0.4, 0.3, 0.2}))},
        {"degenerate/gamma", GPair(Marginal::degenerate(1), Marginal::gamma(2, 1))},
        {"degenerate/empirical",
         GPair(Marginal::degenerate(0), Marginal::empirical({0, 1, 2}, {1.0 / 3, 1.0 / 3, 1.0 / 3}))},
    };
    int checked = 0;
    std::string failures;
    std::uint64_t seed = 1;
    for (const auto& [name, pair] : fixtures) {
        std::vector<std::pair<OracleTarget, double>> what;
        std::vector<double> analytic;
        for (double p : {0.5, 0.9}) {
            what.emplace_back(OracleTarget::tvar, p);
            analytic.push_back(tvar_countermonotonic(pair, p).total);
        }
        for (double p : {0.3, 0.75}) {
            const double x = pair.sum_quantile(p);
            what.emplace_back(OracleTarget::stoploss, x);
            analytic.push_back(stoploss_countermonotonic(pair, x).total);
        }
        const auto reports = oracle_reports(pair, what, 1000000, seed++);
        for (std::size_t i = 0; i < reports.size(); ++i) {
            const auto& r = reports[i];
            const bool quad_ok = std::abs(analytic[i] - r.quadrature_value) <= 1e-6;
            const bool mc_ok = std::abs(analytic[i] - r.mc_value) <= 4 * r.mc_std_error ||
                               (r.mc_std_error == 0.0 && std::abs(analytic[i] - r.mc_value) <= 1e-12);
            ++checked;
            if (!(quad_ok && mc_ok))
                failures += " " + name + ":" + to_string(r.target) + "@" + std::to_string(r.level);
        }
    }
    c.that("(g) " + std::to_string(checked) + " oracle checks" + (failures.empty() ? "" : " failed:" + failures),
           failures.empty());
    return c.outcome();
}

Outcome criterion10() {
    Checks c;
    const auto pair = normal_pair();
    double worst_cdf = 0.0;
    for (int i = -30; i <= 30; ++i) {
        const double x = i / 10.0;
        worst_cdf = std::max(worst_cdf, std::abs(pair.sum_cdf(x) - special::normal_cdf(x)));
    }
    c.that("S ~ N(0,1), max cdf gap " + std::to_string(worst_cdf), worst_cdf <= 1e-9);
    for (double p : {0.5, 0.9, 0.99}) {
        const double closed = special::normal_pdf(special::normal_quantile(p)) / (1 - p);
        const double full = tvar_countermonotonic(pair, p).total;
        const auto simple = tvar_simple(pair, p);
        const std::string tag = "p=" + std::to_string(p).substr(0, 4);
        c.within(tag + " full decomposition vs closed form", full, closed, 1e-9);
        c.that(tag + " two-term form available", simple.has_value());
        if (simple)
            c.within(tag + " two-term vs full decomposition", *simple, full, 1e-9);
    }
    return c.outcome();
}

} // namespace

int main(int argc, char** argv) {
    std::set<int> expect_red;
    bool use_expectation = false;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--expect-red") == 0 && i + 1 < argc) {
            use_expectation = true;
            std::stringstream ss(argv[++i]);
            std::string item;
            while (std::getline(ss, item, ','))
                if (!item.empty())
                    expect_red.insert(std::stoi(item));
        }
    }

    struct Criterion {
        int id;
        double budget_s;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria{
        {1, 1, criterion1}, {2, 1, criterion2}, {3, 1, criterion3},   {4, 2, criterion4},   {5, 2, criterion5},
        {6, 2, criterion6}, {7, 2, criterion7}, {8, 30, criterion8}, {9, 300, criterion9}, {10, 1, criterion10},
    };

    std::set<int> red;
    for (const auto& cr : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = cr.run();
        } catch (const std::exception& e) {
            o = {false, std::string("threw: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool in_time = secs < cr.budget_s;
        const bool pass = o.pass && in_time;
        if (!pass)
            red.insert(cr.id);
        std::printf("criterion %2d: %s [%.2fs/%gs%s] %s\n", cr.id, pass ? "PASS" : "FAIL", secs, cr.budget_s,
                    in_time ? "" : " over budget", o.detail.c_str());
        std::fflush(stdout);
    }

    if (!use_expectation)
        return red.empty() ? 0 : 1;
    if (red == expect_red) {
        std::printf("red set matches the documented known disagreements\n");
        return 0;
    }
    std::printf("red set differs from the expected one\n");
    return 1;
}
