#pragma once

#include "cmsum/marginal.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

namespace cmsum {

inline constexpr double kDefaultClip = 1e-9;
inline constexpr std::size_t kDefaultMaxCrossings = 10000;
inline constexpr unsigned kDefaultGridLog2 = 14;

//! Band within which g is treated as equal to the level x.
inline double flat_tolerance(double x) { return 1e-9 * std::max(1.0, std::abs(x)); }

enum class Direction { upcross, downcross };

//! One node of the evaluation grid. Breakpoints appear twice, once per one-sided limit.
struct GNode {
    double u;
    double q1; //!< quantile of the first marginal on the relevant side of u
    double q2; //!< quantile of the second marginal at 1 - u, same side
    double g;
    bool breakpoint;
};

struct CrossingPoint {
    double u = 0.0;
    double g_left = 0.0;  //!< g(u-)
    double g_right = 0.0; //!< g(u+)
    Direction direction = Direction::upcross;
    bool is_jump = false;
    double alpha = 0.0;
    std::optional<double> flat_onset;

    // One-sided quantiles at the crossing; g_left = q1_left + q2_right, g_right = q1_right + q2_left.
    double q1_left = 0.0;
    double q1_right = 0.0;
    double q2_left = 0.0; //!< left inverse of the second marginal at 1 - u
    double q2_right = 0.0;

    //! g(u) itself, i.e. left inverses at u and 1 - u.
    double g_value() const { return q1_left + q2_left; }
};

struct CrossingSet {
    double x = 0.0;
    std::vector<CrossingPoint> points;
    bool initial_below = true; //!< g <= x on (0, u_1)
    std::size_t n() const { return points.size(); }
};

struct GSample {
    double u;
    double g;
    bool is_breakpoint;
};

//! The pair (X1, X2) and the quantile-sum function g(u) = F1^{-1}(u) + F2^{-1}(1 - u).
//!
//! Construction evaluates g on a grid of 2^grid_log2 + 1 levels in [clip, 1 - clip]
//! augmented with every atom level of either marginal; the grid is cached and shared
//! between copies.
class GPair {
public:
    struct Options {
        double clip = kDefaultClip;
        unsigned grid_log2 = kDefaultGridLog2;
        std::size_t max_crossings = kDefaultMaxCrossings;
    };

    GPair(Marginal first, Marginal second);
    GPair(Marginal first, Marginal second, Options options);

    const Marginal& first() const { return first_; }
    const Marginal& second() const { return second_; }
    double clip() const { return options_.clip; }
    const Options& options() const { return options_; }

    double g(double u) const;
    //! (g(u-), g(u+)).
    std::pair<double, double> g_limits(double u) const;

    //! inf and sup of g over [clip, 1 - clip]. Throws DegenerateSum if g is numerically constant.
    std::pair<double, double> extrema() const;
    bool is_degenerate() const;

    CrossingSet crossing_set(double x) const;

    //! Lebesgue measure of {u : g(u) <= x}, i.e. the cdf of the counter-monotonic sum.
    double sum_cdf(double x) const;
    //! Generalized alpha-inverse of the counter-monotonic sum. Throws DegenerateSum.
    double sum_quantile(double p, double alpha = 0.0) const;
    double sum_quantile_left(double p) const;
    double sum_quantile_right(double p) const;

    //! n equispaced samples over [clip, 1 - clip], plus both one-sided limits at every breakpoint.
    std::vector<GSample> samples(std::size_t n) const;

    //! Probability levels in (0,1) where g may jump.
    std::vector<double> breakpoints() const;

    const std::vector<GNode>& nodes() const { return grid_->nodes; }

private:
    struct Grid {
        std::vector<GNode> nodes;
        std::vector<double> breaks;
        double x_min = 0.0;
        double x_max = 0.0;
        bool degenerate = false;
    };

    void build();
    double refine_extremum(std::size_t i, bool minimum) const;
    double measure_below(double x) const;
    bool jump_segment(std::size_t i) const;
    CrossingPoint make_point(std::size_t k, int s_new, double x) const;

    Marginal first_;
    Marginal second_;
    Options options_;
    std::shared_ptr<const Grid> grid_;
};

//! Interpolation weight placing x inside the jump of g at the point; 0 for continuous crossings.
double alpha_at(const CrossingPoint& point, double x);

} // namespace cmsum
