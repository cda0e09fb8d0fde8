#pragma once

#include "cmsum/crossing.hpp"
#include "cmsum/json_io.hpp"
#include "cmsum/oracle.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace cmsum {

//! A batch problem file.
//!
//! Required: "marginal1", "marginal2" and at least one of "levels" / "retentions".
//! Optional: "alpha" (0), "verify" (false), "mc_samples" (0), "seed", "outputs" ([]),
//! and "perturbation" (0), an offset added to every analytic value before it is checked.
//! The perturbation exists so regression files can force a verification failure.
struct ProblemSpec {
    json source; //!< the file as read, embedded in reports
    json marginal1;
    json marginal2;
    std::vector<double> levels;
    std::vector<double> retentions;
    double alpha = 0.0;
    bool verify = false;
    std::size_t mc_samples = 0;
    std::uint64_t seed = 0x2545F4914F6CDD1DULL;
    std::vector<std::string> outputs;
    double perturbation = 0.0;
};

//! Throws InvalidArgument on any schema violation, including an empty request.
ProblemSpec parse_problem(const json& j);
//! Reads and parses a file. Throws InvalidArgument when it cannot be read or is not JSON.
ProblemSpec load_problem(const std::string& path);

GPair make_pair(const ProblemSpec& spec);

struct VerificationRow {
    double analytic = 0.0;
    OracleReport oracle;
    Verdict verdict = Verdict::fail;
};

//! Checks counter-monotonic VaR and TVaR at every level and the stop-loss premium at every
//! retention inside the range of the sum against the oracle.
std::vector<VerificationRow> run_verification(const ProblemSpec& spec, const GPair& pair);

struct ReportResult {
    json report;
    std::vector<VerificationRow> verification; //!< empty unless the spec asks for it
    bool all_pass() const;
};

//! Full report. Throws DegenerateSum when the counter-monotonic sum is a constant.
ReportResult build_report(const ProblemSpec& spec);

//! Crossing sets at the quantile of every level and at every retention.
json crossing_sidecar(const ProblemSpec& spec, const GPair& pair);

//! CSV with header "u,g,is_breakpoint".
std::string g_csv(const GPair& pair, std::size_t n_points);

json to_json(const VerificationRow& row);

} // namespace cmsum
