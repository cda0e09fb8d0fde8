#pragma once

#include "cmsum/crossing.hpp"

#include <optional>
#include <vector>

namespace cmsum {

// ---- comonotonic baselines -------------------------------------------------

double var_comonotonic(const GPair& pair, double p);
double tvar_comonotonic(const GPair& pair, double p);

struct ComonotonicStopLoss {
    double value = 0.0;
    double x1 = 0.0; //!< retention of the first marginal
    double x2 = 0.0;
    double alpha = 0.0;
    double level = 0.0; //!< cdf of the comonotonic sum at x
};

//! Throws RangeError unless x lies strictly inside the range of the comonotonic sum.
ComonotonicStopLoss stoploss_comonotonic(const GPair& pair, double x);

//! Cdf of the comonotonic sum, sup{p : F1^{-1}(p) + F2^{-1}(p) <= x}.
double comonotonic_cdf(const GPair& pair, double x);

// ---- counter-monotonic VaR -------------------------------------------------

struct VarRepresentation {
    double u = 0.0;
    double alpha = 0.0;
    double term1 = 0.0; //!< alpha-inverse of X1 at u
    double term2 = 0.0; //!< (1 - alpha)-inverse of X2 at 1 - u
    bool is_jump = false;
};

struct VarDecomposition {
    double p = 0.0;
    double value = 0.0;
    std::vector<VarRepresentation> representations;
    //! Set when g may meet the level at more points than the crossing set lists
    //! (several crossings, or flat runs at the level).
    bool non_unique = false;
};

VarDecomposition var_countermonotonic(const GPair& pair, double p);

// ---- counter-monotonic TVaR ------------------------------------------------

enum class TvarCase { t1, t2 };

struct TvarTerm {
    double u = 0.0;
    double value = 0.0; //!< signed contribution to the total
};

struct TVarDecomposition {
    double p = 0.0;
    double alpha = 0.0;
    double x = 0.0; //!< alpha-quantile of the sum at p
    TvarCase which = TvarCase::t1;
    std::size_t n = 0;
    double leading = 0.0;
    double t_sum = 0.0;
    double d_sum = 0.0;
    double flat_correction = 0.0;
    double t1 = 0.0;
    double t2 = 0.0;
    double total = 0.0;
    double max_form = 0.0; //!< max(t1, t2) / (1 - p)
    //! Residual of p against u_1 and the D-sum; zero when the sum has no atom at x.
    double level_residual = 0.0;
    bool sum_cdf_continuous = false;
    std::vector<TvarTerm> terms;
};

TVarDecomposition tvar_countermonotonic(const GPair& pair, double p, double alpha = 0.0);

//! Two-term value when the crossing set at the quantile is a singleton and the sum has no atom there.
std::optional<double> tvar_simple(const GPair& pair, double p);

// ---- counter-monotonic stop-loss -------------------------------------------

enum class StopLossCase { s1, s2 };
enum class StopLossForm { left_inverse, generalized_inverse };

struct StopLossDecomposition {
    double x = 0.0;
    StopLossForm form = StopLossForm::left_inverse;
    StopLossCase which = StopLossCase::s1;
    std::size_t n = 0;
    double leading_upper = 0.0; //!< upper tail transform in the leading term
    double leading_lower = 0.0; //!< lower tail transform subtracted in the leading term
    double s_sum = 0.0;
    double j_sum = 0.0;           //!< zero for the generalized-inverse form
    double jump_correction = 0.0; //!< zero for the generalized-inverse form
    double s1 = 0.0;
    double s2 = 0.0;
    double total = 0.0;
};

//! Throws RangeError when x lies outside [x_min, x_max].
StopLossDecomposition stoploss_countermonotonic(const GPair& pair, double x,
                                                StopLossForm form = StopLossForm::left_inverse);

struct SingleCrossingStopLoss {
    double value = 0.0;
    double alpha = 0.0;
    double retention1 = 0.0;
    double retention2 = 0.0;
    double level = 0.0; //!< cdf of the sum at x
};

std::optional<SingleCrossingStopLoss> stoploss_single_crossing(const GPair& pair, double x);

// ---- spreads and naive approximations --------------------------------------

struct SpreadReport {
    double p = 0.0;
    double upper = 0.0;
    double lower = 0.0;
    double spread = 0.0;
    std::optional<double> single_variable_form;
};

SpreadReport spread(const GPair& pair, double p);

struct ApproximationRow {
    double p = 0.0;
    double exact = 0.0;
    double t1_tilde = 0.0;
    double t2_tilde = 0.0;
    double rel_err1 = 0.0; //!< percent
    double rel_err2 = 0.0;
    double spread_rel_err1 = 0.0; //!< percent
    double spread_rel_err2 = 0.0;
};

std::vector<ApproximationRow> approximation_report(const GPair& pair, const std::vector<double>& p_grid);

} // namespace cmsum
