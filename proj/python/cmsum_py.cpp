#include "cmsum/decomposition.hpp"
#include "cmsum/errors.hpp"
#include "cmsum/json_io.hpp"
#include "cmsum/oracle.hpp"
#include "cmsum/problem.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace cmsum;

namespace {

// Structured results cross the boundary as plain dicts with the same keys as the JSON reports.
py::object to_py(const json& j) { return py::module_::import("json").attr("loads")(j.dump()); }
json from_py(const py::object& o) { return json::parse(py::module_::import("json").attr("dumps")(o).cast<std::string>()); }

StopLossForm form_from_string(const std::string& s) {
    if (s == "left_inverse")
        return StopLossForm::left_inverse;
    if (s == "generalized_inverse")
        return StopLossForm::generalized_inverse;
    throw InvalidArgument("form must be 'left_inverse' or 'generalized_inverse'");
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Counter-monotonic sums: VaR, TVaR and stop-loss decompositions with brute-force oracles";
    m.attr("__version__") = "0.1.0";

    auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<InvalidArgument>(m, "InvalidArgument", base.ptr());
    py::register_exception<DegenerateSum>(m, "DegenerateSum", base.ptr());
    py::register_exception<RangeError>(m, "RangeError", base.ptr());
    py::register_exception<CapExceeded>(m, "CapExceeded", base.ptr());
    py::register_exception<UnresolvedOscillation>(m, "UnresolvedOscillation", base.ptr());
    py::register_exception<InsufficientSamples>(m, "InsufficientSamples", base.ptr());
    py::register_exception<MismatchedTarget>(m, "MismatchedTarget", base.ptr());

    py::class_<Marginal>(m, "Marginal")
        .def_static("gamma", &Marginal::gamma, py::arg("shape"), py::arg("scale") = 1.0)
        .def_static("poisson", &Marginal::poisson, py::arg("rate"))
        .def_static("normal", &Marginal::normal, py::arg("mean") = 0.0, py::arg("sd") = 1.0)
        .def_static("uniform", &Marginal::uniform, py::arg("lo") = 0.0, py::arg("hi") = 1.0)
        .def_static("degenerate", &Marginal::degenerate, py::arg("point"))
        .def_static("empirical", &Marginal::empirical, py::arg("points"), py::arg("probs"))
        .def_static("from_dict", [](const py::dict& d) { return marginal_from_json(from_py(d)); })
        .def("to_dict", [](const Marginal& x) { return to_py(to_json(x)); })
        .def("cdf", &Marginal::cdf)
        .def("sf", &Marginal::sf)
        .def("quantile_left", &Marginal::quantile_left)
        .def("quantile_right", &Marginal::quantile_right)
        .def("quantile_alpha", &Marginal::quantile_alpha)
        .def("mean", &Marginal::mean)
        .def("__repr__", &Marginal::name);

    py::class_<GPair>(m, "GPair")
        .def(py::init([](const Marginal& a, const Marginal& b, double clip) {
                 GPair::Options o;
                 o.clip = clip;
                 return GPair(a, b, o);
             }),
             py::arg("first"), py::arg("second"), py::arg("clip") = kDefaultClip)
        .def("g", &GPair::g)
        .def("g_limits", &GPair::g_limits)
        .def("extrema", &GPair::extrema)
        .def("is_degenerate", &GPair::is_degenerate)
        .def("sum_cdf", &GPair::sum_cdf)
        .def("sum_quantile", &GPair::sum_quantile, py::arg("p"), py::arg("alpha") = 0.0)
        .def("crossing_set", [](const GPair& p, double x) { return to_py(to_json(p.crossing_set(x))); })
        .def("breakpoints", &GPair::breakpoints)
        .def("samples", [](const GPair& p, std::size_t n) {
            std::vector<std::tuple<double, double, bool>> out;
            for (const auto& s : p.samples(n))
                out.emplace_back(s.u, s.g, s.is_breakpoint);
            return out;
        });

    m.def("var_comonotonic", &var_comonotonic);
    m.def("tvar_comonotonic", &tvar_comonotonic);
    m.def("stoploss_comonotonic", [](const GPair& p, double x) { return to_py(to_json(stoploss_comonotonic(p, x))); });
    m.def("var_countermonotonic", [](const GPair& p, double q) { return to_py(to_json(var_countermonotonic(p, q))); });
    m.def(
        "tvar_countermonotonic",
        [](const GPair& p, double q, double alpha) { return to_py(to_json(tvar_countermonotonic(p, q, alpha))); },
        py::arg("pair"), py::arg("p"), py::arg("alpha") = 0.0);
    m.def("tvar_simple", &tvar_simple);
    m.def(
        "stoploss_countermonotonic",
        [](const GPair& p, double x, const std::string& form) {
            return to_py(to_json(stoploss_countermonotonic(p, x, form_from_string(form))));
        },
        py::arg("pair"), py::arg("x"), py::arg("form") = "left_inverse");
    m.def("stoploss_single_crossing", [](const GPair& p, double x) -> py::object {
        const auto r = stoploss_single_crossing(p, x);
        return r ? to_py(to_json(*r)) : py::none();
    });
    m.def("spread", [](const GPair& p, double q) { return to_py(to_json(spread(p, q))); });
    m.def("approximation_report", [](const GPair& p, const std::vector<double>& grid) {
        json rows = json::array();
        for (const auto& r : approximation_report(p, grid))
            rows.push_back(to_json(r));
        return to_py(rows);
    });

    m.def("quad_stoploss", [](const GPair& p, double x) {
        const auto q = quad_stoploss(p, x);
        return std::make_pair(q.value, q.error_bound);
    });
    m.def(
        "quad_tvar",
        [](const GPair& p, double q, double alpha) {
            const auto r = quad_tvar(p, q, alpha);
            return std::make_pair(r.value, r.error_bound);
        },
        py::arg("pair"), py::arg("p"), py::arg("alpha") = 0.0);
    m.def(
        "mc_sample",
        [](const GPair& p, std::size_t n, std::uint64_t seed, const std::string& structure) {
            if (structure != "counter" && structure != "co")
                throw InvalidArgument("structure must be 'counter' or 'co'");
            return mc_sample(p, n, seed, structure == "co" ? Structure::co : Structure::counter);
        },
        py::arg("pair"), py::arg("n"), py::arg("seed"), py::arg("structure") = "counter");
    m.def(
        "oracle_report",
        [](const GPair& p, const std::string& target, double level, std::size_t n_samples, std::uint64_t seed,
           double alpha) { return to_py(to_json(oracle_report(p, target_from_string(target), level, n_samples, seed, alpha))); },
        py::arg("pair"), py::arg("target"), py::arg("level"), py::arg("n_samples") = 0, py::arg("seed") = 0,
        py::arg("alpha") = 0.0);

    m.def(
        "report", [](const py::dict& spec) { return to_py(build_report(parse_problem(from_py(spec))).report); },
        "Full report for a problem given as a dict with the problem-file schema.");
    m.def(
        "verify",
        [](const py::dict& spec) {
            const auto s = parse_problem(from_py(spec));
            json rows = json::array();
            for (const auto& r : run_verification(s, make_pair(s)))
                rows.push_back(to_json(r));
            return to_py(rows);
        },
        "Oracle verdicts for every requested measure.");
}
