#pragma once

#include "cmsum/crossing.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace cmsum {

enum class OracleTarget { var, tvar, stoploss, cdf };
enum class Structure { counter, co };
enum class Verdict { pass, fail, inconclusive };

std::string to_string(OracleTarget t);
std::string to_string(Verdict v);

struct QuadEstimate {
    double value = 0.0;
    double error_bound = 0.0;
};

//! Adaptive quadrature of (g(u) - x)+ over [1e-15, 1 - 1e-15], split at every atom level of the marginals.
QuadEstimate quad_stoploss(const GPair& pair, double x);
//! Adaptive quadrature of (x - g(u))+ over the same range.
QuadEstimate quad_lower_tail(const GPair& pair, double x);
//! x + quad_stoploss(x) / (1 - p) at x = sum_quantile(p, alpha); the constant for a degenerate sum.
QuadEstimate quad_tvar(const GPair& pair, double p, double alpha = 0.0);

//! Fraction of the equispaced levels u_i = (i - 0.5)/n with g(u_i) <= x.
double equispaced_cdf(const GPair& pair, double x, std::size_t n = 1000000);
//! ceil(n p)-th order statistic of g over the equispaced levels, with the local order-statistic spread.
QuadEstimate equispaced_var(const GPair& pair, double p, std::size_t n = 1000000);

//! SplitMix64 output function applied to the counter seed + (i + 1) * 0x9E3779B97F4A7C15.
std::uint64_t counter_random(std::uint64_t seed, std::uint64_t i);
//! Uniform on (0,1) from the top 53 bits of counter_random, offset by half a unit.
double counter_uniform(std::uint64_t seed, std::uint64_t i);

//! n draws of X1 + X2 under the given dependence; draw i depends only on (seed, i).
std::vector<double> mc_sample(const GPair& pair, std::size_t n, std::uint64_t seed,
                              Structure structure = Structure::counter);
//! Noise-free variant on u_i = (i - 0.5)/n.
std::vector<double> equispaced_sample(const GPair& pair, std::size_t n, Structure structure = Structure::counter);

struct McEstimate {
    double value = 0.0;
    double std_error = 0.0;
};

struct McMeasures {
    std::size_t n = 0;
    std::vector<double> levels;
    std::vector<McEstimate> var;
    std::vector<McEstimate> tvar;
    std::vector<double> retentions;
    std::vector<McEstimate> stoploss;
};

inline constexpr std::size_t kMinMcSamples = 10000;

//! Empirical VaR, TVaR and stop-loss estimates with analytic standard errors.
//! Throws InsufficientSamples below kMinMcSamples draws.
McMeasures mc_measures(std::vector<double> samples, const std::vector<double>& levels,
                       const std::vector<double>& retentions);

struct OracleReport {
    OracleTarget target = OracleTarget::tvar;
    double level = 0.0; //!< probability for var/tvar, retention for stoploss/cdf
    double quadrature_value = 0.0;
    double quadrature_error_bound = 0.0;
    double mc_value = 0.0;
    double mc_std_error = 0.0;
    std::size_t n_samples = 0; //!< zero when Monte Carlo was skipped
    std::uint64_t seed = 0;
};

//! Brute-force estimate of one measure. Monte Carlo runs only when n_samples > 0.
OracleReport oracle_report(const GPair& pair, OracleTarget target, double level, std::size_t n_samples,
                           std::uint64_t seed, double alpha = 0.0);

//! Builds reports for several measures from a single Monte Carlo sample.
std::vector<OracleReport> oracle_reports(const GPair& pair, const std::vector<std::pair<OracleTarget, double>>& what,
                                         std::size_t n_samples, std::uint64_t seed, double alpha = 0.0);

struct AnalyticValue {
    OracleTarget target = OracleTarget::tvar;
    double level = 0.0;
    double value = 0.0;
};

struct CompareOptions {
    double abs_floor = 1e-6;
    double se_multiple = 4.0;
    //! Monte Carlo is noise dominated when its standard error exceeds this fraction of max(1, |value|).
    double noise_rel = 2e-3;
};

//! Throws MismatchedTarget when the report is for a different measure or level.
Verdict compare(const AnalyticValue& analytic, const OracleReport& report, const CompareOptions& options = {});

} // namespace cmsum
