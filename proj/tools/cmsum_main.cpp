#include "cmsum/decomposition.hpp"
#include "cmsum/errors.hpp"
#include "cmsum/problem.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>

namespace {

constexpr int kOk = 0;
constexpr int kSpecError = 2;
constexpr int kDegenerate = 3;
constexpr int kVerifyFailed = 4;

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw cmsum::InvalidArgument("cannot write '" + path + "'");
    out << text;
}

void print_verification(const std::vector<cmsum::VerificationRow>& rows) {
    std::printf("%-9s %12s %18s %18s %12s %18s %12s  %s\n", "measure", "level", "analytic", "quadrature", "quad_err",
                "monte_carlo", "mc_se", "verdict");
    for (const auto& r : rows) {
        const auto& o = r.oracle;
        std::printf("%-9s %12.6g %18.10g %18.10g %12.3g ", cmsum::to_string(o.target).c_str(), o.level, r.analytic,
                    o.quadrature_value, o.quadrature_error_bound);
        if (o.n_samples > 0)
            std::printf("%18.10g %12.3g", o.mc_value, o.mc_std_error);
        else
            std::printf("%18s %12s", "-", "-");
        std::printf("  %s\n", cmsum::to_string(r.verdict).c_str());
    }
}

void print_summary(const cmsum::json& rep) {
    const auto& pair = rep.at("pair");
    std::printf("range of the counter-monotonic sum: [%.10g, %.10g], mean %.10g\n", pair.at("x_min").get<double>(),
                pair.at("x_max").get<double>(), pair.at("mean").get<double>());
    if (!rep.at("levels").empty()) {
        std::printf("%8s %14s %14s %14s %14s %14s %4s\n", "p", "VaR_co", "VaR_counter", "TVaR_co", "TVaR_counter",
                    "spread", "N");
        for (const auto& e : rep.at("levels")) {
            const auto& t = e.at("tvar_countermonotonic");
            std::printf("%8.4g %14.8g %14.8g %14.8g %14.8g %14.8g %4zu\n", e.at("p").get<double>(),
                        e.at("var_comonotonic").get<double>(), e.at("var_countermonotonic").at("value").get<double>(),
                        e.at("tvar_comonotonic").get<double>(), t.at("total").get<double>(),
                        e.at("spread").at("spread").get<double>(), t.at("n").get<std::size_t>());
        }
    }
    if (!rep.at("retentions").empty()) {
        std::printf("%12s %14s %14s %14s\n", "x", "cdf", "SL_co", "SL_counter");
        for (const auto& e : rep.at("retentions")) {
            const auto& co = e.at("stoploss_comonotonic");
            const auto& cm = e.at("stoploss_countermonotonic");
            std::printf("%12.8g %14.8g ", e.at("x").get<double>(), e.at("sum_cdf").get<double>());
            if (co.contains("value"))
                std::printf("%14.8g ", co.at("value").get<double>());
            else
                std::printf("%14s ", "out of range");
            if (cm.contains("left_inverse"))
                std::printf("%14.8g\n", cm.at("left_inverse").at("total").get<double>());
            else
                std::printf("%14s\n", "out of range");
        }
    }
}

int cmd_report(const std::string& spec_path, const std::string& out_path) {
    const auto spec = cmsum::load_problem(spec_path);
    const auto result = cmsum::build_report(spec);
    const std::string text = cmsum::dump(result.report);
    const std::string target = !out_path.empty() ? out_path : (spec.outputs.empty() ? "" : spec.outputs.front());
    if (target.empty()) {
        std::cout << text;
    } else {
        write_file(target, text);
        print_summary(result.report);
        if (spec.verify)
            print_verification(result.verification);
    }
    return result.all_pass() ? kOk : kVerifyFailed;
}

int cmd_gplot(const std::string& spec_path, std::size_t points, const std::string& out_path,
              std::string sidecar_path) {
    const auto spec = cmsum::load_problem(spec_path);
    const auto pair = cmsum::make_pair(spec);
    pair.extrema(); // throws DegenerateSum
    write_file(out_path, cmsum::g_csv(pair, points));
    if (sidecar_path.empty())
        sidecar_path = out_path + ".crossings.json";
    write_file(sidecar_path, cmsum::dump(cmsum::crossing_sidecar(spec, pair)));
    return kOk;
}

int cmd_verify(const std::string& spec_path) {
    const auto spec = cmsum::load_problem(spec_path);
    const auto pair = cmsum::make_pair(spec);
    const auto rows = cmsum::run_verification(spec, pair);
    print_verification(rows);
    for (const auto& r : rows)
        if (r.verdict != cmsum::Verdict::pass)
            return kVerifyFailed;
    return kOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Risk measures of counter-monotonic sums"};
    app.require_subcommand(1);

    std::string spec_path, out_path, sidecar_path;
    std::size_t points = 1001;

    auto* report = app.add_subcommand("report", "Decompositions, spreads and approximations as JSON");
    report->add_option("spec", spec_path, "Problem file")->required();
    report->add_option("--out", out_path, "Report destination (default: first entry of outputs, else stdout)");

    auto* gplot = app.add_subcommand("gplot", "Samples of g as CSV plus crossing sets as JSON");
    gplot->add_option("spec", spec_path, "Problem file")->required();
    gplot->add_option("--points", points, "Number of equispaced samples")->check(CLI::Range(std::size_t{2}, std::size_t{100000000}));
    gplot->add_option("--out", out_path, "CSV destination")->required();
    gplot->add_option("--sidecar", sidecar_path, "Crossing-set JSON destination (default: <out>.crossings.json)");

    auto* verify = app.add_subcommand("verify", "Check every requested measure against the oracle");
    verify->add_option("spec", spec_path, "Problem file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kSpecError;
    }

    try {
        if (*report)
            return cmd_report(spec_path, out_path);
        if (*gplot)
            return cmd_gplot(spec_path, points, out_path, sidecar_path);
        return cmd_verify(spec_path);
    } catch (const cmsum::DegenerateSum& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kDegenerate;
    } catch (const cmsum::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kSpecError;
    } catch (const cmsum::json::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kSpecError;
    }
}
