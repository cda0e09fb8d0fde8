#include "cmsum/special.hpp"

#include <cmath>
#include <numbers>

#include <boost/math/policies/policy.hpp>
#include <boost/math/special_functions/erf.hpp>
#include <boost/math/special_functions/gamma.hpp>

namespace cmsum::special {

namespace {

using namespace boost::math::policies;
// Underflow to zero and saturate overflow; quantiles at the extreme ends are clipped by callers.
using Policy = policy<underflow_error<ignore_error>, overflow_error<ignore_error>,
                      denorm_error<ignore_error>, promote_double<false>>;
constexpr Policy kPolicy{};

} // namespace

double normal_cdf(double z) { return 0.5 * boost::math::erfc(-z / std::numbers::sqrt2, kPolicy); }

double normal_sf(double z) { return 0.5 * boost::math::erfc(z / std::numbers::sqrt2, kPolicy); }

double normal_pdf(double z) { return std::exp(-0.5 * z * z) * 0.5 * std::numbers::inv_sqrtpi * std::numbers::sqrt2; }

double normal_quantile(double p) {
    if (p <= 0.5)
        return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p, kPolicy);
    return std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * (1.0 - p), kPolicy);
}

double gamma_p(double shape, double x) {
    if (x <= 0.0)
        return 0.0;
    return boost::math::gamma_p(shape, x, kPolicy);
}

double gamma_q(double shape, double x) {
    if (x <= 0.0)
        return 1.0;
    return boost::math::gamma_q(shape, x, kPolicy);
}

double gamma_p_inv(double shape, double p) { return boost::math::gamma_p_inv(shape, p, kPolicy); }

double gamma_q_inv(double shape, double q) { return boost::math::gamma_q_inv(shape, q, kPolicy); }

} // namespace cmsum::special
