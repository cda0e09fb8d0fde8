#include "cmsum/decomposition.hpp"

#include "cmsum/compensated.hpp"
#include "cmsum/errors.hpp"
#include "cmsum/parallel.hpp"
#include "cmsum/transforms.hpp"

#include <algorithm>
#include <cmath>

namespace cmsum {

namespace {

void check_open_level(double p, const char* what) {
    if (!(p > 0.0 && p < 1.0))
        throw RangeError(std::string(what) + ": level must lie in (0,1)");
}

double alt_sign(std::size_t j) { return j % 2 == 0 ? 1.0 : -1.0; } // (-1)^j, j one-based

// alpha-inverse of X1 at u and (1 - alpha)-inverse of X2 at 1 - u, read off the crossing's one-sided quantiles.
double retention1(const CrossingPoint& pt) { return (1.0 - pt.alpha) * pt.q1_left + pt.alpha * pt.q1_right; }
double retention2(const CrossingPoint& pt) { return pt.alpha * pt.q2_left + (1.0 - pt.alpha) * pt.q2_right; }

//! True when the counter-monotonic sum puts mass on x.
bool has_atom_at(const GPair& pair, double x) {
    const double d = flat_tolerance(x);
    const double f = pair.sum_cdf(x);
    const double left_gap = f - pair.sum_cdf(x - d);
    const double right_gap = pair.sum_cdf(x + d) - f;
    return left_gap > 1e-12 && left_gap > 10.0 * right_gap;
}

} // namespace

double var_comonotonic(const GPair& pair, double p) {
    check_open_level(p, "var_comonotonic");
    return pair.first().quantile_left(p) + pair.second().quantile_left(p);
}

double tvar_comonotonic(const GPair& pair, double p) {
    check_open_level(p, "tvar_comonotonic");
    return tvar(pair.first(), p) + tvar(pair.second(), p);
}

double comonotonic_cdf(const GPair& pair, double x) {
    const auto f = [&](double p) { return pair.first().quantile_left(p) + pair.second().quantile_left(p); };
    if (f(1.0) <= x)
        return 1.0;
    if (!(f(0.0) <= x))
        return 0.0;
    double lo = 0.0, hi = 1.0; // f(lo) <= x < f(hi)
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi)
            break;
        if (f(mid) <= x)
            lo = mid;
        else
            hi = mid;
    }
    return lo;
}

ComonotonicStopLoss stoploss_comonotonic(const GPair& pair, double x) {
    const Marginal& m1 = pair.first();
    const Marginal& m2 = pair.second();
    const double lower = m1.support().lower + m2.support().lower;
    const double upper = m1.support().upper + m2.support().upper;
    if (!(x > lower && x < upper))
        throw RangeError("stoploss_comonotonic: retention outside the range of the comonotonic sum");
    ComonotonicStopLoss r;
    r.level = comonotonic_cdf(pair, x);
    const double q = std::clamp(r.level, 1e-300, 1.0 - 1e-16);
    const double l1 = m1.quantile_left(q), l2 = m2.quantile_left(q);
    const double h1 = m1.quantile_right(q), h2 = m2.quantile_right(q);
    const double left = l1 + l2, right = h1 + h2;
    r.alpha = right > left ? std::clamp((x - left) / (right - left), 0.0, 1.0) : 0.0;
    r.x1 = (1.0 - r.alpha) * l1 + r.alpha * h1;
    r.x2 = x - r.x1;
    r.value = upper_tail(m1, r.x1) + upper_tail(m2, r.x2);
    return r;
}

VarDecomposition var_countermonotonic(const GPair& pair, double p) {
    check_open_level(p, "var_countermonotonic");
    VarDecomposition d;
    d.p = p;
    d.value = pair.sum_quantile(p, 0.0);
    const CrossingSet set = pair.crossing_set(d.value);
    for (const CrossingPoint& pt : set.points) {
        d.representations.push_back({pt.u, pt.alpha, retention1(pt), retention2(pt), pt.is_jump});
        if (pt.flat_onset)
            d.non_unique = true;
    }
    if (d.representations.empty()) {
        // The level is an extreme atom of the sum; g meets it on a set without crossings.
        const double u = p;
        d.representations.push_back(
            {u, 0.0, pair.first().quantile_left(u), pair.second().quantile_left(1.0 - u), false});
        d.non_unique = true;
    }
    if (d.representations.size() > 1)
        d.non_unique = true;
    return d;
}

TVarDecomposition tvar_countermonotonic(const GPair& pair, double p, double alpha) {
    check_open_level(p, "tvar_countermonotonic");
    if (!(alpha >= 0.0 && alpha <= 1.0))
        throw RangeError("tvar_countermonotonic: alpha must lie in [0,1]");
    const Marginal& m1 = pair.first();
    const Marginal& m2 = pair.second();

    TVarDecomposition d;
    d.p = p;
    d.alpha = alpha;
    d.x = pair.sum_quantile(p, alpha);
    const CrossingSet set = pair.crossing_set(d.x);
    d.n = set.n();
    d.which = set.initial_below ? TvarCase::t1 : TvarCase::t2;

    // Without crossings g stays on one side of x; u_1 = 1 reproduces both cases.
    const double u1 = d.n ? set.points[0].u : 1.0;
    const auto w = [&](double u) { return upper_quantile_integral(m1, u) + lower_quantile_integral(m2, 1.0 - u); };

    CompensatedSum t_sum, d_sum;
    std::vector<double> wj(d.n);
    for (std::size_t j = 2; j <= d.n; ++j) {
        const double u = set.points[j - 1].u;
        wj[j - 1] = w(u);
        t_sum += alt_sign(j) * wj[j - 1];
        d_sum += alt_sign(j) * (1.0 - u);
    }
    d.t_sum = t_sum.value();
    d.d_sum = d_sum.value();

    const double lead1 = w(u1);
    const double lead2 = lower_quantile_integral(m1, u1) + upper_quantile_integral(m2, 1.0 - u1);
    const double flat1 = d.x * ((u1 + d.d_sum) - p);
    const double flat2 = d.x * ((1.0 - u1 - d.d_sum) - p);
    d.t1 = lead1 - d.t_sum + flat1;
    d.t2 = lead2 + d.t_sum + flat2;

    const bool first = d.which == TvarCase::t1;
    d.leading = first ? lead1 : lead2;
    d.flat_correction = first ? flat1 : flat2;
    d.level_residual = first ? p - (u1 + d.d_sum) : p - (1.0 - u1 - d.d_sum);
    d.total = (first ? d.t1 : d.t2) / (1.0 - p);
    d.max_form = std::max(d.t1, d.t2) / (1.0 - p);
    d.sum_cdf_continuous = !has_atom_at(pair, d.x);

    const double sign = first ? -1.0 : 1.0;
    d.terms.push_back({u1, d.leading / (1.0 - p)});
    for (std::size_t j = 2; j <= d.n; ++j)
        d.terms.push_back({set.points[j - 1].u, sign * alt_sign(j) * wj[j - 1] / (1.0 - p)});
    return d;
}

std::optional<double> tvar_simple(const GPair& pair, double p) {
    check_open_level(p, "tvar_simple");
    if (pair.is_degenerate())
        return std::nullopt;
    const double x = pair.sum_quantile(p, 0.0);
    const CrossingSet set = pair.crossing_set(x);
    if (set.n() != 1 || has_atom_at(pair, x))
        return std::nullopt;
    const double u = set.points[0].u;
    const double c = pair.clip();
    if (u - c < 1e-10 || (1.0 - c) - u < 1e-10)
        return std::nullopt;
    const Marginal& m1 = pair.first();
    const Marginal& m2 = pair.second();
    if (pair.g(c) <= pair.g(1.0 - c))
        return tvar(m1, p) + ltvar(m2, 1.0 - p);
    return ltvar(m1, 1.0 - p) + tvar(m2, p);
}

StopLossDecomposition stoploss_countermonotonic(const GPair& pair, double x, StopLossForm form) {
    const auto [x_min, x_max] = pair.extrema();
    if (!(x >= x_min && x <= x_max))
        throw RangeError("stoploss_countermonotonic: retention outside [x_min, x_max]");
    const Marginal& m1 = pair.first();
    const Marginal& m2 = pair.second();
    const double mean_minus_x = (m1.mean() + m2.mean()) - x;

    StopLossDecomposition d;
    d.x = x;
    d.form = form;
    const CrossingSet set = pair.crossing_set(x);
    d.n = set.n();
    d.which = set.initial_below ? StopLossCase::s1 : StopLossCase::s2;
    if (d.n == 0) {
        // g stays on one side of x: the premium is 0 or E[S] - x.
        d.s1 = 0.0;
        d.s2 = mean_minus_x;
        d.total = set.initial_below ? d.s1 : d.s2;
        return d;
    }

    const CrossingPoint& first = set.points[0];
    const double u1 = first.u;
    CompensatedSum s_sum, j_sum;
    if (form == StopLossForm::left_inverse) {
        // Left inverses are read as limits u -> u_j-, so X2 is taken at (1 - u_j)+ and g(u_j) is g(u_j-).
        for (std::size_t j = 2; j <= d.n; ++j) {
            const CrossingPoint& pt = set.points[j - 1];
            s_sum += alt_sign(j) * (upper_tail(m1, pt.q1_left) - lower_tail(m2, pt.q2_right));
            j_sum += alt_sign(j) * (1.0 - pt.u) * (pt.g_left - x);
        }
        d.s_sum = s_sum.value();
        d.j_sum = j_sum.value();
        const double gap = first.g_left - x;
        const double a1 = upper_tail(m1, first.q1_left) - lower_tail(m2, first.q2_right);
        const double b1 = upper_tail(m2, first.q2_right) - lower_tail(m1, first.q1_left);
        d.s1 = a1 - d.s_sum + (1.0 - u1) * gap - d.j_sum;
        d.s2 = b1 + d.s_sum + u1 * gap + d.j_sum;
        if (d.which == StopLossCase::s1) {
            d.leading_upper = upper_tail(m1, first.q1_left);
            d.leading_lower = lower_tail(m2, first.q2_right);
            d.jump_correction = (1.0 - u1) * gap;
        } else {
            d.leading_upper = upper_tail(m2, first.q2_right);
            d.leading_lower = lower_tail(m1, first.q1_left);
            d.jump_correction = u1 * gap;
        }
    } else {
        for (std::size_t j = 2; j <= d.n; ++j) {
            const CrossingPoint& pt = set.points[j - 1];
            s_sum += alt_sign(j) * (upper_tail(m1, retention1(pt)) - lower_tail(m2, retention2(pt)));
        }
        d.s_sum = s_sum.value();
        const double r1 = retention1(first), r2 = retention2(first);
        d.s1 = upper_tail(m1, r1) - lower_tail(m2, r2) - d.s_sum;
        d.s2 = upper_tail(m2, r2) - lower_tail(m1, r1) + d.s_sum;
        if (d.which == StopLossCase::s1) {
            d.leading_upper = upper_tail(m1, r1);
            d.leading_lower = lower_tail(m2, r2);
        } else {
            d.leading_upper = upper_tail(m2, r2);
            d.leading_lower = lower_tail(m1, r1);
        }
    }
    d.total = d.which == StopLossCase::s1 ? d.s1 : d.s2;
    return d;
}

std::optional<SingleCrossingStopLoss> stoploss_single_crossing(const GPair& pair, double x) {
    if (pair.is_degenerate())
        return std::nullopt;
    const auto [x_min, x_max] = pair.extrema();
    if (!(x > x_min && x < x_max))
        return std::nullopt;
    const CrossingSet set = pair.crossing_set(x);
    if (set.n() != 1)
        return std::nullopt;
    const Marginal& m1 = pair.first();
    const Marginal& m2 = pair.second();
    const CrossingPoint& pt = set.points[0];

    SingleCrossingStopLoss r;
    if (set.initial_below) {
        r.level = pt.u;
        r.alpha = pt.alpha;
        r.retention1 = retention1(pt);
        r.retention2 = retention2(pt);
        r.value = upper_tail(m1, r.retention1) - lower_tail(m2, r.retention2);
        return r;
    }
    // g >= x before the crossing; a flat run at x starting at u* moves the cdf to 1 - u*.
    const double u_star = pt.flat_onset.value_or(pt.u);
    r.level = 1.0 - u_star;
    CrossingPoint at = pt;
    if (pt.flat_onset) {
        at.u = u_star;
        at.q1_left = m1.quantile_left(u_star);
        at.q1_right = m1.quantile_right(u_star);
        at.q2_left = m2.quantile_left(1.0 - u_star);
        at.q2_right = m2.quantile_right(1.0 - u_star);
        at.g_left = at.q1_left + at.q2_right;
        at.g_right = at.q1_right + at.q2_left;
        at.is_jump = std::abs(at.g_right - at.g_left) > flat_tolerance(x);
        at.alpha = alpha_at(at, x);
    }
    r.alpha = at.alpha;
    r.retention1 = retention1(at);
    r.retention2 = retention2(at);
    r.value = upper_tail(m2, r.retention2) - lower_tail(m1, r.retention1);
    return r;
}

SpreadReport spread(const GPair& pair, double p) {
    SpreadReport r;
    r.p = p;
    r.upper = tvar_comonotonic(pair, p);
    r.lower = tvar_countermonotonic(pair, p, 0.0).max_form;
    r.spread = r.upper - r.lower;
    if (tvar_simple(pair, p)) {
        const double c = pair.clip();
        const Marginal& m = pair.g(c) <= pair.g(1.0 - c) ? pair.second() : pair.first();
        r.single_variable_form = tvar(m, p) - ltvar(m, 1.0 - p);
    }
    return r;
}

std::vector<ApproximationRow> approximation_report(const GPair& pair, const std::vector<double>& p_grid) {
    std::vector<ApproximationRow> rows(p_grid.size());
    const Marginal& m1 = pair.first();
    const Marginal& m2 = pair.second();
    parallel_for(
        p_grid.size(),
        [&](std::size_t b, std::size_t e) {
            for (std::size_t i = b; i < e; ++i) {
                const double p = p_grid[i];
                ApproximationRow& row = rows[i];
                row.p = p;
                row.exact = tvar_countermonotonic(pair, p, 0.0).max_form;
                row.t1_tilde = tvar(m1, p) + ltvar(m2, 1.0 - p);
                row.t2_tilde = ltvar(m1, 1.0 - p) + tvar(m2, p);
                row.rel_err1 = 100.0 * (row.t1_tilde - row.exact) / row.exact;
                row.rel_err2 = 100.0 * (row.t2_tilde - row.exact) / row.exact;
                const double spread_exact = tvar_comonotonic(pair, p) - row.exact;
                row.spread_rel_err1 = 100.0 * (row.exact - row.t1_tilde) / spread_exact;
                row.spread_rel_err2 = 100.0 * (row.exact - row.t2_tilde) / spread_exact;
            }
        },
        1);
    return rows;
}

} // namespace cmsum
