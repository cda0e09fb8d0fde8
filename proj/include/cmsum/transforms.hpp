#pragma once

#include "cmsum/marginal.hpp"

#include <variant>

namespace cmsum {

enum class TailMethod { closed_form, quadrature };

struct ProbabilityLevel {
    double p;
};
struct Retention {
    double x;
};

//! A single-marginal tail quantity together with how it was obtained.
struct TailValue {
    std::variant<ProbabilityLevel, Retention> level;
    double value = 0.0;
    TailMethod method = TailMethod::closed_form;
    double error_bound = 0.0; //!< zero for closed forms
};

//! Integral of the left quantile over [p, 1].
double upper_quantile_integral(const Marginal& m, double p);
//! Integral of the left quantile over [0, p].
double lower_quantile_integral(const Marginal& m, double p);

//! Tail Value-at-Risk, p in [0,1).
double tvar(const Marginal& m, double p);
//! Lower Tail Value-at-Risk, p in (0,1].
double ltvar(const Marginal& m, double p);
//! Stop-loss premium E[(X - x)+].
double upper_tail(const Marginal& m, double x);
//! E[(x - X)+].
double lower_tail(const Marginal& m, double x);

TailValue tvar_value(const Marginal& m, double p, TailMethod method = TailMethod::closed_form);
TailValue ltvar_value(const Marginal& m, double p, TailMethod method = TailMethod::closed_form);

} // namespace cmsum
