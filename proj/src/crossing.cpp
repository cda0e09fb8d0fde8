#include "cmsum/crossing.hpp"

#include "cmsum/compensated.hpp"
#include "cmsum/errors.hpp"
#include "cmsum/parallel.hpp"

#include <boost/math/tools/minima.hpp>

#include <limits>

namespace cmsum {

namespace {

constexpr double kNodeMerge = 1e-15;
constexpr double kFlatOnsetMin = 1e-9;

//! Narrows [lo, hi] with pred(lo) false and pred(hi) true down to adjacent doubles
//! (or width 1e-15). Returns the final bracket.
template <class Pred>
std::pair<double, double> bisect(double lo, double hi, Pred&& pred) {
    for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi)
            break;
        if (pred(mid))
            hi = mid;
        else
            lo = mid;
    }
    return {lo, hi};
}

struct Break {
    double u;
    double level1; //!< probability level at which the first marginal is read
    double level2; //!< probability level at which the second marginal is read
    bool from_first;
};

} // namespace

GPair::GPair(Marginal first, Marginal second) : GPair(std::move(first), std::move(second), Options{}) {}

GPair::GPair(Marginal first, Marginal second, Options options)
    : first_(std::move(first)), second_(std::move(second)), options_(options) {
    if (!(options_.clip > 0.0 && options_.clip < 0.01))
        throw InvalidArgument("clip must lie in (0, 0.01)");
    if (options_.grid_log2 < 2 || options_.grid_log2 > 24)
        throw InvalidArgument("grid_log2 must lie in [2, 24]");
    build();
}

void GPair::build() {
    const double c = options_.clip;
    auto grid = std::make_shared<Grid>();

    std::vector<Break> breaks;
    for (double level : first_.atoms(c, 1.0 - c))
        breaks.push_back({level, level, 1.0 - level, true});
    for (double level : second_.atoms(c, 1.0 - c))
        breaks.push_back({1.0 - level, 1.0 - level, level, false});
    std::sort(breaks.begin(), breaks.end(), [](const Break& a, const Break& b) { return a.u < b.u; });
    // An atom level shared by both marginals (after u -> 1 - u) is a single breakpoint
    // reading each marginal at its own exact atom level.
    std::vector<Break> merged;
    for (const Break& b : breaks) {
        if (!merged.empty() && b.u - merged.back().u <= kNodeMerge && b.from_first != merged.back().from_first) {
            if (b.from_first)
                merged.back().level1 = b.level1;
            else
                merged.back().level2 = b.level2;
            continue;
        }
        merged.push_back(b);
    }

    const std::size_t n_cells = std::size_t{1} << options_.grid_log2;
    const double width = (1.0 - 2.0 * c) / static_cast<double>(n_cells);
    std::vector<double> us;
    us.reserve(n_cells + 1);
    std::size_t bi = 0;
    for (std::size_t i = 0; i <= n_cells; ++i) {
        const double u = i == n_cells ? 1.0 - c : c + width * static_cast<double>(i);
        while (bi < merged.size() && merged[bi].u < u - kNodeMerge)
            ++bi;
        if (bi < merged.size() && std::abs(merged[bi].u - u) <= kNodeMerge)
            continue;
        us.push_back(u);
    }

    std::vector<GNode> plain(us.size());
    parallel_for(us.size(), [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) {
            const double q1 = first_.quantile_left(us[i]);
            const double q2 = second_.quantile_left(1.0 - us[i]);
            plain[i] = {us[i], q1, q2, q1 + q2, false};
        }
    });

    auto& nodes = grid->nodes;
    nodes.reserve(plain.size() + 2 * merged.size());
    std::size_t pi = 0;
    for (const Break& b : merged) {
        while (pi < plain.size() && plain[pi].u < b.u)
            nodes.push_back(plain[pi++]);
        const double q1l = first_.quantile_left(b.level1);
        const double q1r = first_.quantile_right(b.level1);
        const double q2l = second_.quantile_left(b.level2);
        const double q2r = second_.quantile_right(b.level2);
        nodes.push_back({b.u, q1l, q2r, q1l + q2r, true});
        nodes.push_back({b.u, q1r, q2l, q1r + q2l, true});
        grid->breaks.push_back(b.u);
    }
    while (pi < plain.size())
        nodes.push_back(plain[pi++]);

    grid_ = grid;

    std::size_t imin = 0, imax = 0;
    double lo = nodes[0].g, hi = nodes[0].g;
    for (std::size_t i = 1; i < nodes.size(); ++i) {
        if (nodes[i].g < lo) {
            lo = nodes[i].g;
            imin = i;
        }
        if (nodes[i].g > hi) {
            hi = nodes[i].g;
            imax = i;
        }
        // g at a breakpoint shared by both marginals can undercut both one-sided limits.
        if (jump_segment(i - 1))
            lo = std::min(lo, nodes[i - 1].q1 + nodes[i].q2);
    }
    lo = std::min(lo, refine_extremum(imin, true));
    hi = std::max(hi, refine_extremum(imax, false));
    grid->x_min = lo;
    grid->x_max = hi;
    grid->degenerate = !(hi - lo > flat_tolerance(std::max(std::abs(lo), std::abs(hi))));
}

bool GPair::jump_segment(std::size_t i) const {
    const auto& nodes = grid_->nodes;
    return nodes[i].breakpoint && nodes[i + 1].breakpoint && nodes[i].u == nodes[i + 1].u;
}

double GPair::refine_extremum(std::size_t i, bool minimum) const {
    const auto& nodes = grid_->nodes;
    const double at = nodes[i].g;
    if (i == 0 || i + 1 >= nodes.size() || nodes[i].breakpoint)
        return at;
    if (jump_segment(i - 1) || jump_segment(i))
        return at;
    const double sign = minimum ? 1.0 : -1.0;
    const auto r = boost::math::tools::brent_find_minima([&](double u) { return sign * g(u); }, nodes[i - 1].u,
                                                         nodes[i + 1].u, std::numeric_limits<double>::digits / 2);
    return sign * r.second;
}

double GPair::g(double u) const { return first_.quantile_left(u) + second_.quantile_left(1.0 - u); }

std::pair<double, double> GPair::g_limits(double u) const {
    const double q1l = first_.quantile_left(u);
    const double q1r = first_.quantile_right(u);
    const double q2l = second_.quantile_left(1.0 - u);
    const double q2r = second_.quantile_right(1.0 - u);
    return {q1l + q2r, q1r + q2l};
}

std::pair<double, double> GPair::extrema() const {
    if (grid_->degenerate)
        throw DegenerateSum();
    return {grid_->x_min, grid_->x_max};
}

bool GPair::is_degenerate() const { return grid_->degenerate; }

std::vector<double> GPair::breakpoints() const { return grid_->breaks; }

CrossingPoint GPair::make_point(std::size_t k, int s_new, double x) const {
    const auto& nodes = grid_->nodes;
    const double tol = flat_tolerance(x);
    CrossingPoint pt;
    pt.direction = s_new > 0 ? Direction::upcross : Direction::downcross;
    if (jump_segment(k)) {
        pt.u = nodes[k].u;
        pt.q1_left = nodes[k].q1;
        pt.q2_right = nodes[k].q2;
        pt.q1_right = nodes[k + 1].q1;
        pt.q2_left = nodes[k + 1].q2;
        pt.g_left = nodes[k].g;
        pt.g_right = nodes[k + 1].g;
        pt.is_jump = std::abs(pt.g_right - pt.g_left) > tol;
        pt.alpha = alpha_at(pt, x);
        return pt;
    }
    const auto on_new_side = [&](double u) { return s_new * (g(u) - x) > 0.0; };
    const auto [lo, hi] = bisect(nodes[k].u, nodes[k + 1].u, on_new_side);
    (void)hi;
    pt.u = lo;
    pt.q1_left = pt.q1_right = first_.quantile_left(lo);
    pt.q2_left = pt.q2_right = second_.quantile_left(1.0 - lo);
    pt.g_left = pt.g_right = pt.q1_left + pt.q2_left;
    pt.is_jump = false;
    pt.alpha = 0.0;
    return pt;
}

CrossingSet GPair::crossing_set(double x) const {
    if (grid_->degenerate)
        throw DegenerateSum();
    if (!std::isfinite(x))
        throw RangeError("crossing_set: level must be finite");
    const auto& nodes = grid_->nodes;
    const double tol = flat_tolerance(x);
    const auto sign_of = [&](double v) { return v > x + tol ? 1 : (v < x - tol ? -1 : 0); };

    CrossingSet set;
    set.x = x;
    std::size_t prev = nodes.size();
    int prev_sign = 0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if ((prev_sign = sign_of(nodes[i].g)) != 0) {
            prev = i;
            break;
        }
    }
    if (prev == nodes.size())
        return set; // g stays within the band around x
    set.initial_below = prev_sign < 0;

    for (std::size_t j = prev + 1; j < nodes.size(); ++j) {
        const int s = sign_of(nodes[j].g);
        if (s == 0)
            continue;
        if (s == prev_sign) {
            prev = j;
            continue;
        }
        // Last node before j not already strictly on the new side.
        std::size_t k = j - 1;
        while (k > prev && s * (nodes[k].g - x) > 0.0)
            --k;
        CrossingPoint pt = make_point(k, s, x);

        if (j - 1 > prev) {
            // Band nodes precede the crossing: locate where g entered the band.
            double onset = nodes[prev + 1].u;
            if (!jump_segment(prev)) {
                const auto in_band = [&](double u) { return sign_of(g(u)) != prev_sign; };
                onset = bisect(nodes[prev].u, nodes[prev + 1].u, in_band).second;
            }
            if (pt.u - onset > kFlatOnsetMin)
                pt.flat_onset = onset;
        }
        if (!set.points.empty() && !(pt.u > set.points.back().u))
            throw UnresolvedOscillation("crossing_set: crossings could not be separated");
        set.points.push_back(pt);
        if (set.points.size() > options_.max_crossings)
            throw CapExceeded("crossing_set: more crossings than max_crossings");
        prev = j;
        prev_sign = s;
    }
    return set;
}

double GPair::measure_below(double x) const {
    const auto& nodes = grid_->nodes;
    const auto below = [&](double u) { return g(u) <= x; };
    CompensatedSum m;
    if (nodes.front().g <= x)
        m += nodes.front().u;
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
        if (jump_segment(i))
            continue;
        const bool a = nodes[i].g <= x;
        const bool b = nodes[i + 1].g <= x;
        const double du = nodes[i + 1].u - nodes[i].u;
        if (a && b) {
            m += du;
        } else if (a != b) {
            if (a) {
                const auto [lo, hi] = bisect(nodes[i].u, nodes[i + 1].u, [&](double u) { return !below(u); });
                m += 0.5 * (lo + hi) - nodes[i].u;
            } else {
                const auto [lo, hi] = bisect(nodes[i].u, nodes[i + 1].u, below);
                m += nodes[i + 1].u - 0.5 * (lo + hi);
            }
        }
    }
    if (nodes.back().g <= x)
        m += 1.0 - nodes.back().u;
    return std::clamp(m.value(), 0.0, 1.0);
}

double GPair::sum_cdf(double x) const {
    if (grid_->degenerate)
        return x >= 0.5 * (grid_->x_min + grid_->x_max) ? 1.0 : 0.0;
    if (x < grid_->x_min)
        return 0.0;
    if (x >= grid_->x_max)
        return 1.0;
    return measure_below(x);
}

namespace {

template <class Pred>
double invert_monotone(const GPair& pair, double x_lo, double x_hi, Pred&& reached) {
    if (reached(x_lo))
        return x_lo;
    double lo = x_lo, hi = x_hi;
    const double tol = 1e-12 * (x_hi - x_lo);
    for (int it = 0; it < 200 && hi - lo > tol; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi)
            break;
        if (reached(mid))
            hi = mid;
        else
            lo = mid;
    }
    // Atoms of the sum sit at node values of g; prefer one inside the final bracket.
    double best = hi;
    for (const GNode& n : pair.nodes())
        if (n.g > lo && n.g < best && reached(n.g))
            best = n.g;
    return best;
}

} // namespace

double GPair::sum_quantile_left(double p) const {
    if (!(p > 0.0 && p < 1.0))
        throw RangeError("sum_quantile: level must lie in (0,1)");
    if (grid_->degenerate)
        throw DegenerateSum();
    return invert_monotone(*this, grid_->x_min, grid_->x_max, [&](double x) { return sum_cdf(x) >= p - kAtomSnap; });
}

double GPair::sum_quantile_right(double p) const {
    if (!(p > 0.0 && p < 1.0))
        throw RangeError("sum_quantile: level must lie in (0,1)");
    if (grid_->degenerate)
        throw DegenerateSum();
    return invert_monotone(*this, grid_->x_min, grid_->x_max, [&](double x) { return sum_cdf(x) > p + kAtomSnap; });
}

double GPair::sum_quantile(double p, double alpha) const {
    if (!(alpha >= 0.0 && alpha <= 1.0))
        throw RangeError("alpha must lie in [0,1]");
    if (alpha == 0.0)
        return sum_quantile_left(p);
    if (alpha == 1.0)
        return sum_quantile_right(p);
    return (1.0 - alpha) * sum_quantile_left(p) + alpha * sum_quantile_right(p);
}

std::vector<GSample> GPair::samples(std::size_t n) const {
    if (n < 2)
        throw RangeError("samples: need at least two points");
    const double c = options_.clip;
    std::vector<GSample> out(n);
    parallel_for(n, [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) {
            const double u = i + 1 == n ? 1.0 - c : c + (1.0 - 2.0 * c) * static_cast<double>(i) / (n - 1);
            out[i] = {u, g(u), false};
        }
    });
    for (const GNode& node : grid_->nodes)
        if (node.breakpoint)
            out.push_back({node.u, node.g, true});
    std::stable_sort(out.begin(), out.end(), [](const GSample& a, const GSample& b) { return a.u < b.u; });
    return out;
}

double alpha_at(const CrossingPoint& point, double x) {
    if (!point.is_jump)
        return 0.0;
    return std::clamp((x - point.g_left) / (point.g_right - point.g_left), 0.0, 1.0);
}

} // namespace cmsum
