#pragma once

#include <cmath>

namespace cmsum {

//! Neumaier-compensated running sum.
class CompensatedSum {
public:
    CompensatedSum& operator+=(double v) {
        const double t = sum_ + v;
        if (std::fabs(sum_) >= std::fabs(v))
            carry_ += (sum_ - t) + v;
        else
            carry_ += (v - t) + sum_;
        sum_ = t;
        return *this;
    }
    CompensatedSum& operator-=(double v) { return *this += -v; }

    double value() const { return sum_ + carry_; }

private:
    double sum_ = 0.0;
    double carry_ = 0.0;
};

} // namespace cmsum
