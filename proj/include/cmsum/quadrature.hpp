#pragma once

#include "cmsum/compensated.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace cmsum {

struct QuadResult {
    double value = 0.0;
    double error_bound = 0.0;
};

//! Globally adaptive 15-point Gauss-Kronrod over [a, b], split at the given interior breakpoints.
//!
//! The panel with the largest error estimate is bisected until the summed estimate falls
//! below max(abs_tol, rel_tol * |value|) or max_panels is reached. The integrand is never
//! evaluated at a panel end, so integrable endpoint singularities are fine.
template <class F>
QuadResult integrate_piecewise(F&& f, double a, double b, std::vector<double> breaks, double rel_tol = 1e-13,
                               double abs_tol = 1e-15, std::size_t max_panels = 20000) {
    using rule = boost::math::quadrature::gauss_kronrod<double, 15>;
    struct Panel {
        double lo, hi, value, error;
        bool operator<(const Panel& o) const { return error < o.error; }
    };
    const auto eval = [&](double lo, double hi) {
        double e = 0.0;
        const double v = rule::integrate(f, lo, hi, 0, 0.0, &e);
        // Without refinement the estimate is reported for the reference interval [-1, 1].
        return Panel{lo, hi, v, e * 0.5 * (hi - lo)};
    };

    breaks.erase(std::remove_if(breaks.begin(), breaks.end(), [&](double x) { return !(x > a && x < b); }),
                 breaks.end());
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
    breaks.insert(breaks.begin(), a);
    breaks.push_back(b);

    std::priority_queue<Panel> heap;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        if (!(breaks[i + 1] > breaks[i]))
            continue;
        heap.push(eval(breaks[i], breaks[i + 1]));
    }
    double value = 0.0, error = 0.0;
    const auto totals = [&] {
        CompensatedSum v;
        double e = 0.0;
        auto copy = heap;
        while (!copy.empty()) {
            v += copy.top().value;
            e += copy.top().error;
            copy.pop();
        }
        value = v.value();
        error = e;
    };
    totals();

    while (!heap.empty() && heap.size() < max_panels && error > std::max(abs_tol, rel_tol * std::abs(value))) {
        const Panel worst = heap.top();
        const double mid = 0.5 * (worst.lo + worst.hi);
        if (!(mid > worst.lo && mid < worst.hi))
            break;
        heap.pop();
        const Panel left = eval(worst.lo, mid);
        const Panel right = eval(mid, worst.hi);
        value += (left.value + right.value) - worst.value;
        error += (left.error + right.error) - worst.error;
        heap.push(left);
        heap.push(right);
        if (heap.size() % 512 == 0)
            totals(); // curb drift in the running sums
    }
    totals();
    return {value, error};
}

} // namespace cmsum
