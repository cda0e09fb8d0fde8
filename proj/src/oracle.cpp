#include "cmsum/oracle.hpp"

#include "cmsum/compensated.hpp"
#include "cmsum/errors.hpp"
#include "cmsum/parallel.hpp"
#include "cmsum/quadrature.hpp"

#include <algorithm>
#include <cmath>

namespace cmsum {

std::string to_string(OracleTarget t) {
    switch (t) {
    case OracleTarget::var:
        return "var";
    case OracleTarget::tvar:
        return "tvar";
    case OracleTarget::stoploss:
        return "stoploss";
    case OracleTarget::cdf:
        return "cdf";
    }
    return "?";
}

std::string to_string(Verdict v) {
    switch (v) {
    case Verdict::pass:
        return "pass";
    case Verdict::fail:
        return "fail";
    case Verdict::inconclusive:
        return "inconclusive";
    }
    return "?";
}

namespace {

// Below this distance from 0 or 1 the level 1 - u is no longer resolvable in double precision.
constexpr double kEdge = 1e-15;

// Value of g when the sum is a constant.
double constant_value(const GPair& pair) { return pair.g(0.5); }

std::vector<double> quadrature_breaks(const GPair& pair, double x) {
    std::vector<double> breaks = pair.breakpoints();
    // Kinks of the integrand deep in a tail would otherwise fall between every rule node.
    try {
        for (const auto& pt : pair.crossing_set(x).points) {
            breaks.push_back(pt.u);
            if (pt.flat_onset)
                breaks.push_back(*pt.flat_onset);
        }
    } catch (const Error&) {
        // Unresolvable crossings: the uniform panels below still apply.
    }
    // Uniform panels keep the adaptive rule from straddling several kinks of (g - x)+ at once.
    for (int i = 1; i < 256; ++i)
        breaks.push_back(i / 256.0);
    return breaks;
}

template <class F>
QuadEstimate integrate_g(const GPair& pair, double x, F&& integrand) {
    const auto r = integrate_piecewise([&](double u) { return integrand(pair.g(u)); }, kEdge, 1.0 - kEdge,
                                       quadrature_breaks(pair, x), 1e-13, 1e-14);
    return {r.value, r.error_bound};
}

} // namespace

QuadEstimate quad_stoploss(const GPair& pair, double x) {
    if (pair.is_degenerate())
        return {std::max(constant_value(pair) - x, 0.0), 0.0};
    return integrate_g(pair, x, [x](double v) { return v > x ? v - x : 0.0; });
}

QuadEstimate quad_lower_tail(const GPair& pair, double x) {
    if (pair.is_degenerate())
        return {std::max(x - constant_value(pair), 0.0), 0.0};
    return integrate_g(pair, x, [x](double v) { return v < x ? x - v : 0.0; });
}

QuadEstimate quad_tvar(const GPair& pair, double p, double alpha) {
    if (!(p > 0.0 && p < 1.0))
        throw RangeError("quad_tvar: level must lie in (0,1)");
    if (pair.is_degenerate())
        return {constant_value(pair), 0.0};
    const double x = pair.sum_quantile(p, alpha);
    const QuadEstimate sl = quad_stoploss(pair, x);
    return {x + sl.value / (1.0 - p), sl.error_bound / (1.0 - p)};
}

std::uint64_t counter_random(std::uint64_t seed, std::uint64_t i) {
    std::uint64_t z = seed + (i + 1) * 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

double counter_uniform(std::uint64_t seed, std::uint64_t i) {
    return (static_cast<double>(counter_random(seed, i) >> 11) + 0.5) * 0x1.0p-53;
}

namespace {

template <class Level>
std::vector<double> sample_with(const GPair& pair, std::size_t n, Structure structure, Level&& level) {
    std::vector<double> out(n);
    const Marginal& m1 = pair.first();
    const Marginal& m2 = pair.second();
    parallel_for(n, [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) {
            const double u = level(i);
            const double v = structure == Structure::counter ? 1.0 - u : u;
            out[i] = m1.quantile_left(u) + m2.quantile_left(v);
        }
    });
    return out;
}

double equispaced_level(std::size_t i, std::size_t n) { return (static_cast<double>(i) + 0.5) / static_cast<double>(n); }

} // namespace

std::vector<double> mc_sample(const GPair& pair, std::size_t n, std::uint64_t seed, Structure structure) {
    if (n == 0)
        throw RangeError("mc_sample: need at least one draw");
    return sample_with(pair, n, structure, [seed](std::size_t i) { return counter_uniform(seed, i); });
}

std::vector<double> equispaced_sample(const GPair& pair, std::size_t n, Structure structure) {
    if (n == 0)
        throw RangeError("equispaced_sample: need at least one point");
    return sample_with(pair, n, structure, [n](std::size_t i) { return equispaced_level(i, n); });
}

namespace {

// Equispaced sample of the sum, sorted, built once per batch of oracle requests.
std::vector<double> sorted_equispaced(const GPair& pair, std::size_t n) {
    std::vector<double> g = equispaced_sample(pair, n);
    std::sort(g.begin(), g.end());
    return g;
}

double cdf_from_sorted(const std::vector<double>& g, double x) {
    const auto below = std::upper_bound(g.begin(), g.end(), x) - g.begin();
    return static_cast<double>(below) / static_cast<double>(g.size());
}

QuadEstimate var_from_sorted(const std::vector<double>& g, double p) {
    if (!(p > 0.0 && p < 1.0))
        throw RangeError("equispaced_var: level must lie in (0,1)");
    const std::size_t n = g.size();
    const auto k = static_cast<std::size_t>(std::ceil(p * static_cast<double>(n) - 1e-9));
    const std::size_t idx = std::clamp<std::size_t>(k, 1, n) - 1;
    const std::size_t lo = idx >= 2 ? idx - 2 : 0;
    const std::size_t hi = std::min(n - 1, idx + 2);
    return {g[idx], g[hi] - g[lo]};
}

constexpr std::size_t kEquispacedPoints = 1000000;

} // namespace

double equispaced_cdf(const GPair& pair, double x, std::size_t n) {
    return cdf_from_sorted(sorted_equispaced(pair, n), x);
}

QuadEstimate equispaced_var(const GPair& pair, double p, std::size_t n) {
    return var_from_sorted(sorted_equispaced(pair, n), p);
}

McMeasures mc_measures(std::vector<double> samples, const std::vector<double>& levels,
                       const std::vector<double>& retentions) {
    const std::size_t n = samples.size();
    if (n < kMinMcSamples)
        throw InsufficientSamples("mc_measures: at least 10000 samples are required");
    std::sort(samples.begin(), samples.end());
    const double dn = static_cast<double>(n);

    // Mean and standard error of h(X) over the sample.
    const auto mean_se = [&](auto&& h) {
        CompensatedSum s, s2;
        for (double v : samples) {
            const double y = h(v);
            s += y;
            s2 += y * y;
        }
        const double mean = s.value() / dn;
        const double var = std::max(0.0, s2.value() / dn - mean * mean) * dn / (dn - 1.0);
        return McEstimate{mean, std::sqrt(var / dn)};
    };
    const auto order_stat = [&](double k) {
        const auto i = static_cast<std::size_t>(std::clamp(std::ceil(k), 1.0, dn)) - 1;
        return samples[i];
    };

    McMeasures m;
    m.n = n;
    m.levels = levels;
    m.retentions = retentions;
    for (double p : levels) {
        if (!(p > 0.0 && p < 1.0))
            throw RangeError("mc_measures: levels must lie in (0,1)");
        const double v = order_stat(p * dn - 1e-9);
        // Binomial band on the rank of the p-quantile.
        const double half = std::sqrt(dn * p * (1.0 - p));
        const double se = 0.5 * (order_stat(p * dn + half) - order_stat(p * dn - half));
        m.var.push_back({v, se});
        const McEstimate excess = mean_se([v](double s) { return s > v ? s - v : 0.0; });
        m.tvar.push_back({v + excess.value / (1.0 - p), excess.std_error / (1.0 - p)});
    }
    for (double x : retentions)
        m.stoploss.push_back(mean_se([x](double s) { return s > x ? s - x : 0.0; }));
    return m;
}

std::vector<OracleReport> oracle_reports(const GPair& pair, const std::vector<std::pair<OracleTarget, double>>& what,
                                         std::size_t n_samples, std::uint64_t seed, double alpha) {
    std::vector<OracleReport> out;
    std::vector<double> mc;
    if (n_samples > 0)
        mc = mc_sample(pair, n_samples, seed, Structure::counter);
    std::vector<double> sorted = mc;
    std::sort(sorted.begin(), sorted.end());
    std::vector<double> raw_grid, grid;
    for (const auto& w : what)
        if (w.first == OracleTarget::var || w.first == OracleTarget::cdf) {
            raw_grid = equispaced_sample(pair, kEquispacedPoints);
            grid = raw_grid;
            std::sort(grid.begin(), grid.end());
            break;
        }

    for (const auto& [target, level] : what) {
        OracleReport r;
        r.target = target;
        r.level = level;
        r.seed = seed;
        r.n_samples = n_samples;
        switch (target) {
        case OracleTarget::tvar: {
            const QuadEstimate q = quad_tvar(pair, level, alpha);
            r.quadrature_value = q.value;
            r.quadrature_error_bound = q.error_bound;
            break;
        }
        case OracleTarget::stoploss: {
            const QuadEstimate q = quad_stoploss(pair, level);
            r.quadrature_value = q.value;
            r.quadrature_error_bound = q.error_bound;
            break;
        }
        case OracleTarget::var: {
            const QuadEstimate q = var_from_sorted(grid, level);
            r.quadrature_value = q.value;
            r.quadrature_error_bound = q.error_bound;
            break;
        }
        case OracleTarget::cdf: {
            r.quadrature_value = cdf_from_sorted(grid, level);
            // Each boundary of {u : g(u) <= x} can misplace at most one grid cell.
            std::size_t flips = 0;
            for (std::size_t i = 1; i < raw_grid.size(); ++i)
                flips += (raw_grid[i] <= level) != (raw_grid[i - 1] <= level);
            r.quadrature_error_bound = static_cast<double>(flips + 2) / static_cast<double>(kEquispacedPoints);
            break;
        }
        }
        if (n_samples > 0) {
            if (target == OracleTarget::cdf) {
                const auto below = std::upper_bound(sorted.begin(), sorted.end(), level) - sorted.begin();
                const double f = static_cast<double>(below) / static_cast<double>(n_samples);
                r.mc_value = f;
                r.mc_std_error = std::sqrt(f * (1.0 - f) / static_cast<double>(n_samples));
            } else {
                const bool by_level = target != OracleTarget::stoploss;
                const McMeasures m = mc_measures(sorted, by_level ? std::vector<double>{level} : std::vector<double>{},
                                                 by_level ? std::vector<double>{} : std::vector<double>{level});
                const McEstimate e = target == OracleTarget::var    ? m.var[0]
                                     : target == OracleTarget::tvar ? m.tvar[0]
                                                                    : m.stoploss[0];
                r.mc_value = e.value;
                r.mc_std_error = e.std_error;
            }
        }
        out.push_back(r);
    }
    return out;
}

OracleReport oracle_report(const GPair& pair, OracleTarget target, double level, std::size_t n_samples,
                           std::uint64_t seed, double alpha) {
    return oracle_reports(pair, {{target, level}}, n_samples, seed, alpha).front();
}

Verdict compare(const AnalyticValue& analytic, const OracleReport& report, const CompareOptions& options) {
    if (analytic.target != report.target || analytic.level != report.level)
        throw MismatchedTarget("compare: oracle report is for " + to_string(report.target) + " at a different level");
    const double a = analytic.value;
    const bool quad_ok =
        std::abs(a - report.quadrature_value) <= std::max(options.abs_floor, report.quadrature_error_bound);
    if (report.n_samples == 0)
        return quad_ok ? Verdict::pass : Verdict::fail;
    const double se = report.mc_std_error;
    const bool noisy = se > options.noise_rel * std::max(1.0, std::abs(a));
    const bool mc_ok = std::abs(a - report.mc_value) <= std::max(options.se_multiple * se, options.abs_floor);
    if (quad_ok && noisy)
        return Verdict::inconclusive;
    return quad_ok && mc_ok ? Verdict::pass : Verdict::fail;
}

} // namespace cmsum
