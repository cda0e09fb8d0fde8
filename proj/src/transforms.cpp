#include "cmsum/transforms.hpp"

#include "cmsum/errors.hpp"
#include "cmsum/quadrature.hpp"
#include "cmsum/special.hpp"

#include <algorithm>
#include <cmath>

namespace cmsum {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

void check_level(double p) {
    if (!(p >= 0.0 && p <= 1.0))
        throw RangeError("probability level must lie in [0,1]");
}

// Mass of the atom x_k lying above level p, i.e. F(x_k) - p, for k = left_index(p).
double mass_above_level(const AtomTable& t, std::size_t k, double p) {
    const double d = p > 0.5 ? (1.0 - p) - t.surv[k] : t.cum[k] - p;
    return std::max(0.0, d);
}

// p - F(x_{k-1}) for k = left_index(p).
double mass_below_level(const AtomTable& t, std::size_t k, double p) {
    if (k == 0)
        return p;
    const double d = p > 0.5 ? t.surv[k - 1] - (1.0 - p) : p - t.cum[k - 1];
    return std::max(0.0, d);
}

double quantile_integral_by_quadrature(const Marginal& m, double a, double b, double* error) {
    std::vector<double> breaks;
    if (a < b)
        breaks = m.atoms(a, b);
    // Quantiles at 0 or 1 may be infinite; the clipped mass is below double resolution.
    a = std::max(a, 1e-15);
    b = std::min(b, 1.0 - 1e-15);
    const auto r = integrate_piecewise([&](double q) { return m.quantile_left(q); }, a, b, std::move(breaks));
    if (error)
        *error = r.error_bound;
    return r.value;
}

} // namespace

double upper_quantile_integral(const Marginal& m, double p) {
    check_level(p);
    if (p == 1.0)
        return 0.0;
    if (const AtomTable* t = m.atom_table()) {
        if (p == 0.0)
            return m.mean();
        const std::size_t k = t->left_index(p);
        if (k >= t->size())
            return 0.0;
        return t->points[k] * mass_above_level(*t, k, p) + t->above_exp[k];
    }
    return std::visit(overloaded{
                          [&](const GammaFamily& g) {
                              const double y = m.quantile_left(p) / g.scale;
                              return g.shape * g.scale * special::gamma_q(g.shape + 1.0, y);
                          },
                          [&](const NormalFamily& n) {
                              const double z = special::normal_quantile(std::clamp(p, 1e-300, 1.0));
                              return n.mean * (1.0 - p) + n.sd * (p == 0.0 ? 0.0 : special::normal_pdf(z));
                          },
                          [&](const UniformFamily& u) {
                              return u.lo * (1.0 - p) + (u.hi - u.lo) * 0.5 * (1.0 - p) * (1.0 + p);
                          },
                          [](const auto&) { return 0.0; },
                      },
                      m.family());
}

double lower_quantile_integral(const Marginal& m, double p) {
    check_level(p);
    if (p == 0.0)
        return 0.0;
    if (const AtomTable* t = m.atom_table()) {
        if (p == 1.0)
            return m.mean();
        const std::size_t k = t->left_index(p);
        if (k >= t->size())
            return m.mean();
        const double below = k == 0 ? 0.0 : t->below_exp[k - 1];
        return below + t->points[k] * mass_below_level(*t, k, p);
    }
    return std::visit(overloaded{
                          [&](const GammaFamily& g) {
                              if (p == 1.0)
                                  return g.shape * g.scale;
                              const double y = m.quantile_left(p) / g.scale;
                              return g.shape * g.scale * special::gamma_p(g.shape + 1.0, y);
                          },
                          [&](const NormalFamily& n) {
                              const double z = special::normal_quantile(std::clamp(p, 0.0, 1.0 - 1e-16));
                              return n.mean * p - n.sd * (p == 1.0 ? 0.0 : special::normal_pdf(z));
                          },
                          [&](const UniformFamily& u) { return u.lo * p + (u.hi - u.lo) * 0.5 * p * p; },
                          [](const auto&) { return 0.0; },
                      },
                      m.family());
}

double tvar(const Marginal& m, double p) {
    if (!(p >= 0.0 && p < 1.0))
        throw RangeError("tvar: level must lie in [0,1)");
    if (const AtomTable* t = m.atom_table(); t && !std::holds_alternative<PoissonFamily>(m.family()) &&
                                           t->left_index(p) + 1 >= t->size())
        return t->points.back();
    return upper_quantile_integral(m, p) / (1.0 - p);
}

double ltvar(const Marginal& m, double p) {
    if (!(p > 0.0 && p <= 1.0))
        throw RangeError("ltvar: level must lie in (0,1]");
    if (const AtomTable* t = m.atom_table(); t && t->left_index(p) == 0)
        return t->points.front();
    return lower_quantile_integral(m, p) / p;
}

double upper_tail(const Marginal& m, double x) {
    if (!std::isfinite(x))
        throw RangeError("upper_tail: retention must be finite");
    if (const AtomTable* t = m.atom_table()) {
        const std::size_t k = t->floor_index(x);
        if (k >= t->size())
            return m.mean() - x;
        return std::max(0.0, t->above_exp[k] - x * t->surv[k]);
    }
    return std::visit(overloaded{
                          [&](const GammaFamily& g) {
                              if (x <= 0.0)
                                  return g.shape * g.scale - x;
                              const double y = x / g.scale;
                              return std::max(0.0, g.shape * g.scale * special::gamma_q(g.shape + 1.0, y) -
                                                       x * special::gamma_q(g.shape, y));
                          },
                          [&](const NormalFamily& n) {
                              const double z = (x - n.mean) / n.sd;
                              return std::max(0.0, n.sd * (special::normal_pdf(z) - z * special::normal_sf(z)));
                          },
                          [&](const UniformFamily& u) {
                              if (x <= u.lo)
                                  return 0.5 * (u.lo + u.hi) - x;
                              if (x >= u.hi)
                                  return 0.0;
                              return (u.hi - x) * (u.hi - x) / (2.0 * (u.hi - u.lo));
                          },
                          [](const auto&) { return 0.0; },
                      },
                      m.family());
}

double lower_tail(const Marginal& m, double x) {
    if (!std::isfinite(x))
        throw RangeError("lower_tail: retention must be finite");
    if (const AtomTable* t = m.atom_table()) {
        const std::size_t k = t->floor_index(x);
        if (k >= t->size())
            return 0.0;
        return std::max(0.0, x * t->cum[k] - t->below_exp[k]);
    }
    return std::visit(overloaded{
                          [&](const GammaFamily& g) {
                              if (x <= 0.0)
                                  return 0.0;
                              const double y = x / g.scale;
                              return std::max(0.0, x * special::gamma_p(g.shape, y) -
                                                       g.shape * g.scale * special::gamma_p(g.shape + 1.0, y));
                          },
                          [&](const NormalFamily& n) {
                              const double z = (x - n.mean) / n.sd;
                              return std::max(0.0, n.sd * (special::normal_pdf(z) + z * special::normal_cdf(z)));
                          },
                          [&](const UniformFamily& u) {
                              if (x <= u.lo)
                                  return 0.0;
                              if (x >= u.hi)
                                  return x - 0.5 * (u.lo + u.hi);
                              return (x - u.lo) * (x - u.lo) / (2.0 * (u.hi - u.lo));
                          },
                          [](const auto&) { return 0.0; },
                      },
                      m.family());
}

TailValue tvar_value(const Marginal& m, double p, TailMethod method) {
    if (method == TailMethod::closed_form)
        return {ProbabilityLevel{p}, tvar(m, p), method, 0.0};
    if (!(p >= 0.0 && p < 1.0))
        throw RangeError("tvar: level must lie in [0,1)");
    double err = 0.0;
    const double integral = quantile_integral_by_quadrature(m, p, 1.0, &err);
    return {ProbabilityLevel{p}, integral / (1.0 - p), method, err / (1.0 - p)};
}

TailValue ltvar_value(const Marginal& m, double p, TailMethod method) {
    if (method == TailMethod::closed_form)
        return {ProbabilityLevel{p}, ltvar(m, p), method, 0.0};
    if (!(p > 0.0 && p <= 1.0))
        throw RangeError("ltvar: level must lie in (0,1]");
    double err = 0.0;
    const double integral = quantile_integral_by_quadrature(m, 0.0, p, &err);
    return {ProbabilityLevel{p}, integral / p, method, err / p};
}

} // namespace cmsum
