#include "cmsum/json_io.hpp"

#include "cmsum/errors.hpp"

#include <cmath>
#include <variant>

namespace cmsum {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double number(const json& j, const char* key) {
    if (!j.contains(key) || !j.at(key).is_number())
        throw InvalidArgument(std::string("marginal: missing numeric field '") + key + "'");
    return j.at(key).get<double>();
}

std::vector<double> numbers(const json& j, const char* key) {
    if (!j.contains(key) || !j.at(key).is_array())
        throw InvalidArgument(std::string("marginal: missing array field '") + key + "'");
    std::vector<double> out;
    for (const auto& v : j.at(key)) {
        if (!v.is_number())
            throw InvalidArgument(std::string("marginal: non-numeric entry in '") + key + "'");
        out.push_back(v.get<double>());
    }
    return out;
}

// JSON has no infinities; unbounded values are written as null.
json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

const char* direction_name(Direction d) { return d == Direction::upcross ? "upcross" : "downcross"; }

} // namespace

Marginal marginal_from_json(const json& j) {
    if (!j.is_object() || !j.contains("family") || !j.at("family").is_string())
        throw InvalidArgument("marginal: expected an object with a string 'family'");
    const std::string f = j.at("family").get<std::string>();
    if (f == "gamma")
        return Marginal::gamma(number(j, "shape"), j.contains("scale") ? number(j, "scale") : 1.0);
    if (f == "poisson")
        return Marginal::poisson(number(j, "rate"));
    if (f == "normal")
        return Marginal::normal(number(j, "mean"), number(j, "sd"));
    if (f == "uniform")
        return Marginal::uniform(number(j, "lo"), number(j, "hi"));
    if (f == "degenerate")
        return Marginal::degenerate(number(j, "point"));
    if (f == "empirical")
        return Marginal::empirical(numbers(j, "points"), numbers(j, "probs"));
    throw InvalidArgument("marginal: unknown family '" + f + "'");
}

json to_json(const Marginal& m) {
    return std::visit(overloaded{
                          [](const GammaFamily& g) {
                              return json{{"family", "gamma"}, {"shape", g.shape}, {"scale", g.scale}};
                          },
                          [](const PoissonFamily& p) { return json{{"family", "poisson"}, {"rate", p.rate}}; },
                          [](const NormalFamily& n) { return json{{"family", "normal"}, {"mean", n.mean}, {"sd", n.sd}}; },
                          [](const UniformFamily& u) { return json{{"family", "uniform"}, {"lo", u.lo}, {"hi", u.hi}}; },
                          [](const DegenerateFamily& d) { return json{{"family", "degenerate"}, {"point", d.point}}; },
                          [](const EmpiricalFamily& e) {
                              return json{{"family", "empirical"}, {"points", e.points}, {"probs", e.probs}};
                          },
                      },
                      m.family());
}

json to_json(const CrossingPoint& c) {
    json j{{"u", c.u},
           {"direction", direction_name(c.direction)},
           {"is_jump", c.is_jump},
           {"alpha", c.alpha},
           {"g_left", num(c.g_left)},
           {"g_right", num(c.g_right)},
           {"q1_left", num(c.q1_left)},
           {"q1_right", num(c.q1_right)},
           {"q2_left", num(c.q2_left)},
           {"q2_right", num(c.q2_right)}};
    j["flat_onset"] = c.flat_onset ? json(*c.flat_onset) : json(nullptr);
    return j;
}

json to_json(const CrossingSet& s) {
    json pts = json::array();
    for (const auto& p : s.points)
        pts.push_back(to_json(p));
    return json{{"x", s.x}, {"n", s.n()}, {"initial_below", s.initial_below}, {"points", pts}};
}

json to_json(const VarDecomposition& d) {
    json reps = json::array();
    for (const auto& r : d.representations)
        reps.push_back(json{{"u", r.u}, {"alpha", r.alpha}, {"term1", r.term1}, {"term2", r.term2}, {"is_jump", r.is_jump}});
    return json{{"p", d.p}, {"value", d.value}, {"non_unique", d.non_unique}, {"representations", reps}};
}

json to_json(const TVarDecomposition& d) {
    json terms = json::array();
    for (const auto& t : d.terms)
        terms.push_back(json{{"u", t.u}, {"value", t.value}});
    return json{{"p", d.p},
                {"alpha", d.alpha},
                {"x", d.x},
                {"case", d.which == TvarCase::t1 ? "t1" : "t2"},
                {"n", d.n},
                {"leading", d.leading},
                {"t_sum", d.t_sum},
                {"d_sum", d.d_sum},
                {"flat_correction", d.flat_correction},
                {"t1", d.t1},
                {"t2", d.t2},
                {"total", d.total},
                {"max_form", d.max_form},
                {"level_residual", d.level_residual},
                {"sum_cdf_continuous", d.sum_cdf_continuous},
                {"terms", terms}};
}

json to_json(const StopLossDecomposition& d) {
    return json{{"x", d.x},
                {"form", d.form == StopLossForm::left_inverse ? "left_inverse" : "generalized_inverse"},
                {"case", d.which == StopLossCase::s1 ? "s1" : "s2"},
                {"n", d.n},
                {"leading_upper", d.leading_upper},
                {"leading_lower", d.leading_lower},
                {"leading", d.leading_upper - d.leading_lower},
                {"s_sum", d.s_sum},
                {"j_sum", d.j_sum},
                {"jump_correction", d.jump_correction},
                {"s1", d.s1},
                {"s2", d.s2},
                {"total", d.total}};
}

json to_json(const SingleCrossingStopLoss& s) {
    return json{{"value", s.value},
                {"alpha", s.alpha},
                {"retention1", s.retention1},
                {"retention2", s.retention2},
                {"level", s.level}};
}

json to_json(const ComonotonicStopLoss& s) {
    return json{{"value", s.value}, {"x1", s.x1}, {"x2", s.x2}, {"alpha", s.alpha}, {"level", s.level}};
}

json to_json(const SpreadReport& s) {
    json j{{"p", s.p}, {"upper", s.upper}, {"lower", s.lower}, {"spread", s.spread}};
    j["single_variable_form"] = s.single_variable_form ? json(*s.single_variable_form) : json(nullptr);
    return j;
}

json to_json(const ApproximationRow& r) {
    return json{{"p", r.p},
                {"exact", r.exact},
                {"t1_tilde", r.t1_tilde},
                {"t2_tilde", r.t2_tilde},
                {"rel_err1_percent", r.rel_err1},
                {"rel_err2_percent", r.rel_err2},
                {"spread_rel_err1_percent", r.spread_rel_err1},
                {"spread_rel_err2_percent", r.spread_rel_err2}};
}

json to_json(const OracleReport& r) {
    return json{{"target", to_string(r.target)},
                {"level", r.level},
                {"quadrature_value", r.quadrature_value},
                {"quadrature_error_bound", r.quadrature_error_bound},
                {"mc_value", r.mc_value},
                {"mc_std_error", r.mc_std_error},
                {"n_samples", r.n_samples},
                {"seed", r.seed}};
}

OracleTarget target_from_string(const std::string& s) {
    if (s == "var")
        return OracleTarget::var;
    if (s == "tvar")
        return OracleTarget::tvar;
    if (s == "stoploss")
        return OracleTarget::stoploss;
    if (s == "cdf")
        return OracleTarget::cdf;
    throw InvalidArgument("unknown oracle target '" + s + "'");
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

} // namespace cmsum
