#include "cmsum/problem.hpp"

#include "cmsum/decomposition.hpp"
#include "cmsum/errors.hpp"

#include <charconv>
#include <fstream>
#include <set>

namespace cmsum {

namespace {

std::vector<double> number_list(const json& j, const char* key) {
    std::vector<double> out;
    if (!j.contains(key))
        return out;
    if (!j.at(key).is_array())
        throw InvalidArgument(std::string("problem: '") + key + "' must be an array");
    for (const auto& v : j.at(key)) {
        if (!v.is_number())
            throw InvalidArgument(std::string("problem: '") + key + "' must hold numbers");
        out.push_back(v.get<double>());
    }
    return out;
}

void append_double(std::string& out, double v) {
    char buf[32];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    out.append(buf, r.ptr);
}

// Records a RangeError as {"error": ...} instead of aborting the whole report.
template <class F>
json or_error(F&& f) {
    try {
        return f();
    } catch (const RangeError& e) {
        return json{{"error", e.what()}};
    }
}

} // namespace

ProblemSpec parse_problem(const json& j) {
    if (!j.is_object())
        throw InvalidArgument("problem: top level must be an object");
    static const std::set<std::string> known{"marginal1", "marginal2", "levels", "retentions", "alpha",
                                             "verify",    "mc_samples", "seed", "outputs",    "perturbation"};
    for (const auto& [key, value] : j.items())
        if (!known.count(key))
            throw InvalidArgument("problem: unknown field '" + key + "'");

    ProblemSpec s;
    s.source = j;
    if (!j.contains("marginal1") || !j.contains("marginal2"))
        throw InvalidArgument("problem: 'marginal1' and 'marginal2' are required");
    s.marginal1 = j.at("marginal1");
    s.marginal2 = j.at("marginal2");
    // Validate eagerly so a bad descriptor is a parse error.
    marginal_from_json(s.marginal1);
    marginal_from_json(s.marginal2);

    s.levels = number_list(j, "levels");
    s.retentions = number_list(j, "retentions");
    if (s.levels.empty() && s.retentions.empty())
        throw InvalidArgument("problem: nothing to compute (levels and retentions are both empty)");
    for (double p : s.levels)
        if (!(p > 0.0 && p < 1.0))
            throw InvalidArgument("problem: levels must lie in (0,1)");
    for (double x : s.retentions)
        if (!std::isfinite(x))
            throw InvalidArgument("problem: retentions must be finite");

    if (j.contains("alpha")) {
        if (!j.at("alpha").is_number())
            throw InvalidArgument("problem: 'alpha' must be a number");
        s.alpha = j.at("alpha").get<double>();
        if (!(s.alpha >= 0.0 && s.alpha <= 1.0))
            throw InvalidArgument("problem: 'alpha' must lie in [0,1]");
    }
    if (j.contains("verify")) {
        if (!j.at("verify").is_boolean())
            throw InvalidArgument("problem: 'verify' must be a boolean");
        s.verify = j.at("verify").get<bool>();
    }
    if (j.contains("mc_samples")) {
        if (!j.at("mc_samples").is_number_unsigned())
            throw InvalidArgument("problem: 'mc_samples' must be a non-negative integer");
        s.mc_samples = j.at("mc_samples").get<std::size_t>();
        if (s.mc_samples > 0 && s.mc_samples < kMinMcSamples)
            throw InvalidArgument("problem: 'mc_samples' must be 0 or at least 10000");
    }
    if (j.contains("seed")) {
        if (!j.at("seed").is_number_integer())
            throw InvalidArgument("problem: 'seed' must be an integer");
        s.seed = j.at("seed").is_number_unsigned() ? j.at("seed").get<std::uint64_t>()
                                                   : static_cast<std::uint64_t>(j.at("seed").get<std::int64_t>());
    }
    if (j.contains("outputs")) {
        if (!j.at("outputs").is_array())
            throw InvalidArgument("problem: 'outputs' must be an array of paths");
        for (const auto& v : j.at("outputs")) {
            if (!v.is_string())
                throw InvalidArgument("problem: 'outputs' must be an array of paths");
            s.outputs.push_back(v.get<std::string>());
        }
    }
    if (j.contains("perturbation")) {
        if (!j.at("perturbation").is_number())
            throw InvalidArgument("problem: 'perturbation' must be a number");
        s.perturbation = j.at("perturbation").get<double>();
    }
    return s;
}

ProblemSpec load_problem(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw InvalidArgument("problem: cannot open '" + path + "'");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw InvalidArgument(std::string("problem: invalid JSON: ") + e.what());
    }
    return parse_problem(j);
}

GPair make_pair(const ProblemSpec& spec) {
    return GPair(marginal_from_json(spec.marginal1), marginal_from_json(spec.marginal2));
}

std::vector<VerificationRow> run_verification(const ProblemSpec& spec, const GPair& pair) {
    const auto [x_min, x_max] = pair.extrema();
    std::vector<std::pair<OracleTarget, double>> what;
    std::vector<double> analytic;
    for (double p : spec.levels) {
        what.emplace_back(OracleTarget::var, p);
        analytic.push_back(var_countermonotonic(pair, p).value);
        what.emplace_back(OracleTarget::tvar, p);
        analytic.push_back(tvar_countermonotonic(pair, p, spec.alpha).total);
    }
    for (double x : spec.retentions) {
        if (x < x_min || x > x_max)
            continue;
        what.emplace_back(OracleTarget::stoploss, x);
        analytic.push_back(stoploss_countermonotonic(pair, x).total);
    }

    const auto reports = oracle_reports(pair, what, spec.mc_samples, spec.seed, spec.alpha);
    std::vector<VerificationRow> rows;
    for (std::size_t i = 0; i < reports.size(); ++i) {
        VerificationRow r;
        r.analytic = analytic[i] + spec.perturbation;
        r.oracle = reports[i];
        r.verdict = compare({reports[i].target, reports[i].level, r.analytic}, reports[i]);
        rows.push_back(r);
    }
    return rows;
}

bool ReportResult::all_pass() const {
    for (const auto& r : verification)
        if (r.verdict != Verdict::pass)
            return false;
    return true;
}

json to_json(const VerificationRow& row) {
    json j = to_json(row.oracle);
    j["analytic"] = row.analytic;
    j["verdict"] = to_string(row.verdict);
    return j;
}

ReportResult build_report(const ProblemSpec& spec) {
    const GPair pair = make_pair(spec);
    const auto [x_min, x_max] = pair.extrema(); // throws DegenerateSum

    ReportResult out;
    json& rep = out.report;
    rep["spec"] = spec.source;
    rep["pair"] = json{{"first", to_json(pair.first())},
                       {"second", to_json(pair.second())},
                       {"x_min", x_min},
                       {"x_max", x_max},
                       {"mean", pair.first().mean() + pair.second().mean()}};

    const auto rows = approximation_report(pair, spec.levels);
    json levels = json::array();
    for (std::size_t i = 0; i < spec.levels.size(); ++i) {
        const double p = spec.levels[i];
        json e;
        e["p"] = p;
        e["var_comonotonic"] = var_comonotonic(pair, p);
        e["tvar_comonotonic"] = tvar_comonotonic(pair, p);
        e["var_countermonotonic"] = to_json(var_countermonotonic(pair, p));
        e["tvar_countermonotonic"] = to_json(tvar_countermonotonic(pair, p, spec.alpha));
        const auto simple = tvar_simple(pair, p);
        e["tvar_simple"] = simple ? json(*simple) : json(nullptr);
        e["spread"] = to_json(spread(pair, p));
        e["approximation"] = to_json(rows[i]);
        levels.push_back(e);
    }
    rep["levels"] = levels;

    json retentions = json::array();
    for (double x : spec.retentions) {
        json e;
        e["x"] = x;
        e["sum_cdf"] = pair.sum_cdf(x);
        e["stoploss_comonotonic"] = or_error([&] { return to_json(stoploss_comonotonic(pair, x)); });
        e["stoploss_countermonotonic"] = or_error([&] {
            return json{{"left_inverse", to_json(stoploss_countermonotonic(pair, x, StopLossForm::left_inverse))},
                        {"generalized_inverse",
                         to_json(stoploss_countermonotonic(pair, x, StopLossForm::generalized_inverse))}};
        });
        const auto single = stoploss_single_crossing(pair, x);
        e["stoploss_single_crossing"] = single ? to_json(*single) : json(nullptr);
        retentions.push_back(e);
    }
    rep["retentions"] = retentions;

    if (spec.verify) {
        out.verification = run_verification(spec, pair);
        json v = json::array();
        for (const auto& r : out.verification)
            v.push_back(to_json(r));
        rep["verification"] = json{{"all_pass", out.all_pass()}, {"rows", v}};
    }
    return out;
}

json crossing_sidecar(const ProblemSpec& spec, const GPair& pair) {
    json levels = json::array();
    for (double p : spec.levels) {
        const double x = pair.sum_quantile(p, spec.alpha);
        levels.push_back(json{{"p", p}, {"alpha", spec.alpha}, {"crossing_set", to_json(pair.crossing_set(x))}});
    }
    json retentions = json::array();
    for (double x : spec.retentions)
        retentions.push_back(json{{"x", x}, {"crossing_set", to_json(pair.crossing_set(x))}});
    return json{{"spec", spec.source}, {"levels", levels}, {"retentions", retentions}};
}

std::string g_csv(const GPair& pair, std::size_t n_points) {
    if (n_points < 2)
        throw InvalidArgument("gplot: need at least two points");
    std::string out = "u,g,is_breakpoint\n";
    for (const auto& s : pair.samples(n_points)) {
        append_double(out, s.u);
        out += ',';
        append_double(out, s.g);
        out += s.is_breakpoint ? ",1\n" : ",0\n";
    }
    return out;
}

} // namespace cmsum
