#include "cmsum/marginal.hpp"

#include "cmsum/compensated.hpp"
#include "cmsum/errors.hpp"
#include "cmsum/special.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace cmsum {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool finite(double v) { return std::isfinite(v); }

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

void finish_table(AtomTable& t) {
    const std::size_t n = t.points.size();
    t.cum.resize(n);
    t.surv.resize(n);
    t.below_exp.resize(n);
    t.above_exp.resize(n);

    CompensatedSum mass, expect;
    for (std::size_t k = 0; k < n; ++k) {
        mass += t.pmf[k];
        expect += t.pmf[k] * t.points[k];
        t.cum[k] = std::min(1.0, mass.value());
        t.below_exp[k] = expect.value();
    }
    CompensatedSum tail, tail_exp;
    for (std::size_t k = n; k-- > 0;) {
        t.surv[k] = std::min(1.0, tail.value());
        t.above_exp[k] = tail_exp.value();
        tail += t.pmf[k];
        tail_exp += t.pmf[k] * t.points[k];
    }
}

std::shared_ptr<const AtomTable> poisson_table(double rate) {
    const double spread = 40.0 * std::sqrt(rate) + 60.0;
    const auto mode = static_cast<long long>(std::floor(rate));
    const auto kmin = std::max<long long>(0, static_cast<long long>(std::floor(rate - spread)));
    const auto kmax = static_cast<long long>(std::ceil(rate + spread));

    std::vector<double> pmf(static_cast<std::size_t>(kmax - kmin + 1), 0.0);
    const auto at = [&](long long k) -> double& { return pmf[static_cast<std::size_t>(k - kmin)]; };
    at(mode) = std::exp(-rate + static_cast<double>(mode) * std::log(rate) - std::lgamma(static_cast<double>(mode) + 1.0));
    for (long long k = mode; k < kmax; ++k)
        at(k + 1) = at(k) * rate / static_cast<double>(k + 1);
    for (long long k = mode; k > kmin; --k)
        at(k - 1) = at(k) * static_cast<double>(k) / rate;

    // Drop the negligible ends.
    constexpr double kNegligible = 1e-40;
    long long lo = kmin, hi = kmax;
    while (lo < mode && at(lo) < kNegligible)
        ++lo;
    while (hi > mode && at(hi) < kNegligible)
        --hi;

    auto t = std::make_shared<AtomTable>();
    t->unbounded_above = true;
    for (long long k = lo; k <= hi; ++k) {
        t->points.push_back(static_cast<double>(k));
        t->pmf.push_back(at(k));
    }
    finish_table(*t);
    return t;
}

double table_value(const AtomTable& t, std::size_t k) {
    if (k >= t.size())
        return t.unbounded_above ? t.points.back() + 1.0 : t.points.back();
    return t.points[k];
}

} // namespace

std::size_t AtomTable::left_index(double p) const {
    if (p <= 0.5)
        return static_cast<std::size_t>(std::lower_bound(cum.begin(), cum.end(), p - kAtomSnap) - cum.begin());
    const double q = 1.0 - p;
    return static_cast<std::size_t>(
        std::partition_point(surv.begin(), surv.end(), [&](double s) { return s > q + kAtomSnap; }) - surv.begin());
}

std::size_t AtomTable::right_index(double p) const {
    if (p <= 0.5)
        return static_cast<std::size_t>(std::upper_bound(cum.begin(), cum.end(), p + kAtomSnap) - cum.begin());
    const double q = 1.0 - p;
    return static_cast<std::size_t>(
        std::partition_point(surv.begin(), surv.end(), [&](double s) { return s >= q - kAtomSnap; }) - surv.begin());
}

std::size_t AtomTable::floor_index(double x) const {
    const auto it = std::upper_bound(points.begin(), points.end(), x);
    if (it == points.begin())
        return size();
    return static_cast<std::size_t>(it - points.begin()) - 1;
}

Marginal::Marginal(Family f) : family_(std::move(f)) {}

Marginal Marginal::gamma(double shape, double scale) {
    if (!(shape > 0.0) || !(scale > 0.0) || !finite(shape) || !finite(scale))
        throw InvalidArgument("gamma: shape and scale must be positive and finite");
    return Marginal(GammaFamily{shape, scale});
}

Marginal Marginal::poisson(double rate) {
    if (!(rate > 0.0) || !(rate <= 1e9))
        throw InvalidArgument("poisson: rate must lie in (0, 1e9]");
    Marginal m(PoissonFamily{rate});
    m.table_ = poisson_table(rate);
    return m;
}

Marginal Marginal::normal(double mean, double sd) {
    if (!finite(mean) || !(sd > 0.0) || !finite(sd))
        throw InvalidArgument("normal: mean must be finite and sd positive");
    return Marginal(NormalFamily{mean, sd});
}

Marginal Marginal::uniform(double lo, double hi) {
    if (!finite(lo) || !finite(hi) || !(lo < hi))
        throw InvalidArgument("uniform: require finite lo < hi");
    return Marginal(UniformFamily{lo, hi});
}

Marginal Marginal::degenerate(double point) {
    if (!finite(point))
        throw InvalidArgument("degenerate: point must be finite");
    Marginal m(DegenerateFamily{point});
    auto t = std::make_shared<AtomTable>();
    t->points = {point};
    t->pmf = {1.0};
    finish_table(*t);
    m.table_ = std::move(t);
    return m;
}

Marginal Marginal::empirical(std::vector<double> points, std::vector<double> probs) {
    if (points.empty() || points.size() != probs.size())
        throw InvalidArgument("empirical: points and probs must be non-empty and of equal length");
    std::vector<std::size_t> order(points.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return points[a] < points[b]; });

    EmpiricalFamily fam;
    CompensatedSum total;
    for (std::size_t i : order) {
        if (!finite(points[i]) || !(probs[i] > 0.0))
            throw InvalidArgument("empirical: points must be finite and probs positive");
        if (!fam.points.empty() && points[i] == fam.points.back())
            throw InvalidArgument("empirical: points must be distinct");
        fam.points.push_back(points[i]);
        fam.probs.push_back(probs[i]);
        total += probs[i];
    }
    if (std::fabs(total.value() - 1.0) > 1e-12)
        throw InvalidArgument("empirical: probabilities must sum to 1");
    for (double& q : fam.probs)
        q /= total.value();

    auto t = std::make_shared<AtomTable>();
    t->points = fam.points;
    t->pmf = fam.probs;
    finish_table(*t);
    Marginal m(std::move(fam));
    m.table_ = std::move(t);
    return m;
}

std::string Marginal::name() const {
    std::ostringstream os;
    std::visit(overloaded{
                   [&](const GammaFamily& g) { os << "Gamma(" << g.shape << "," << g.scale << ")"; },
                   [&](const PoissonFamily& p) { os << "Poisson(" << p.rate << ")"; },
                   [&](const NormalFamily& n) { os << "Normal(" << n.mean << "," << n.sd << ")"; },
                   [&](const UniformFamily& u) { os << "Uniform(" << u.lo << "," << u.hi << ")"; },
                   [&](const DegenerateFamily& d) { os << "Degenerate(" << d.point << ")"; },
                   [&](const EmpiricalFamily& e) { os << "Empirical(" << e.points.size() << " points)"; },
               },
               family_);
    return os.str();
}

SupportBounds Marginal::support() const {
    return std::visit(overloaded{
                          [](const GammaFamily&) { return SupportBounds{0.0, kInf, true, false}; },
                          [](const PoissonFamily&) { return SupportBounds{0.0, kInf, true, false}; },
                          [](const NormalFamily&) { return SupportBounds{-kInf, kInf, false, false}; },
                          [](const UniformFamily& u) { return SupportBounds{u.lo, u.hi, true, true}; },
                          [](const DegenerateFamily& d) { return SupportBounds{d.point, d.point, true, true}; },
                          [](const EmpiricalFamily& e) {
                              return SupportBounds{e.points.front(), e.points.back(), true, true};
                          },
                      },
                      family_);
}

double Marginal::cdf(double x) const {
    if (table_) {
        const auto& t = *table_;
        const auto it = std::upper_bound(t.points.begin(), t.points.end(), x);
        if (it == t.points.begin())
            return 0.0;
        return t.cdf_at(static_cast<std::size_t>(it - t.points.begin()) - 1);
    }
    return std::visit(overloaded{
                          [&](const GammaFamily& g) { return special::gamma_p(g.shape, x / g.scale); },
                          [&](const NormalFamily& n) { return special::normal_cdf((x - n.mean) / n.sd); },
                          [&](const UniformFamily& u) { return std::clamp((x - u.lo) / (u.hi - u.lo), 0.0, 1.0); },
                          [](const auto&) { return 0.0; },
                      },
                      family_);
}

double Marginal::sf(double x) const {
    if (table_) {
        const auto& t = *table_;
        const auto it = std::upper_bound(t.points.begin(), t.points.end(), x);
        if (it == t.points.begin())
            return 1.0;
        return t.surv[static_cast<std::size_t>(it - t.points.begin()) - 1];
    }
    return std::visit(overloaded{
                          [&](const GammaFamily& g) { return special::gamma_q(g.shape, x / g.scale); },
                          [&](const NormalFamily& n) { return special::normal_sf((x - n.mean) / n.sd); },
                          [&](const UniformFamily& u) { return std::clamp((u.hi - x) / (u.hi - u.lo), 0.0, 1.0); },
                          [](const auto&) { return 0.0; },
                      },
                      family_);
}

double Marginal::quantile_left(double p) const {
    if (!(p >= 0.0 && p <= 1.0))
        throw RangeError("quantile level must lie in [0,1]");
    const SupportBounds s = support();
    if (p == 0.0)
        return s.lower;
    if (table_) {
        if (p == 1.0)
            return s.upper;
        return table_value(*table_, table_->left_index(p));
    }
    if (p == 1.0)
        return s.upper;
    return std::visit(overloaded{
                          [&](const GammaFamily& g) {
                              return g.scale * (p <= 0.5 ? special::gamma_p_inv(g.shape, p)
                                                         : special::gamma_q_inv(g.shape, 1.0 - p));
                          },
                          [&](const NormalFamily& n) { return n.mean + n.sd * special::normal_quantile(p); },
                          [&](const UniformFamily& u) { return u.lo + p * (u.hi - u.lo); },
                          [](const auto&) { return 0.0; },
                      },
                      family_);
}

double Marginal::quantile_right(double p) const {
    if (!(p >= 0.0 && p <= 1.0))
        throw RangeError("quantile level must lie in [0,1]");
    const SupportBounds s = support();
    if (p == 1.0)
        return s.upper;
    if (table_) {
        if (p == 0.0)
            return s.lower;
        return table_value(*table_, table_->right_index(p));
    }
    return quantile_left(p);
}

double Marginal::quantile_alpha(double p, double alpha) const {
    if (!(alpha >= 0.0 && alpha <= 1.0))
        throw RangeError("alpha must lie in [0,1]");
    if (alpha == 0.0)
        return quantile_left(p);
    if (alpha == 1.0)
        return quantile_right(p);
    const double left = quantile_left(p);
    const double right = quantile_right(p);
    if (!finite(left) || !finite(right))
        throw RangeError("generalized inverse is infinite at this level");
    return (1.0 - alpha) * left + alpha * right;
}

double Marginal::mean() const {
    return std::visit(overloaded{
                          [](const GammaFamily& g) { return g.shape * g.scale; },
                          [](const PoissonFamily& p) { return p.rate; },
                          [](const NormalFamily& n) { return n.mean; },
                          [](const UniformFamily& u) { return 0.5 * (u.lo + u.hi); },
                          [](const DegenerateFamily& d) { return d.point; },
                          [this](const EmpiricalFamily&) { return table_->below_exp.back(); },
                      },
                      family_);
}

std::vector<double> Marginal::atoms(double plo, double phi, std::size_t cap) const {
    if (!(plo >= 0.0 && plo < phi && phi <= 1.0))
        throw RangeError("atoms: require 0 <= plo < phi <= 1");
    std::vector<double> levels;
    if (!table_)
        return levels;
    const auto& t = *table_;
    for (std::size_t k = 0; k < t.size(); ++k) {
        const double c = t.cdf_at(k);
        if (c <= plo || c >= phi)
            continue;
        if (!levels.empty() && c <= levels.back())
            continue;
        if (levels.size() >= cap)
            throw CapExceeded("atoms: more atom levels than the configured cap");
        levels.push_back(c);
    }
    return levels;
}

} // namespace cmsum
