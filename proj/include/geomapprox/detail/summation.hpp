#pragma once

#include <cmath>
#include <span>

namespace geomapprox::detail {

// Neumaier-compensated running sum.
class CompensatedSum {
public:
    CompensatedSum& operator+=(double x) noexcept {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x)) {
            comp_ += (sum_ - t) + x;
        } else {
            comp_ += (x - t) + sum_;
        }
        sum_ = t;
        return *this;
    }
    double value() const noexcept { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

inline double compensated_total(std::span<const double> xs) noexcept {
    CompensatedSum s;
    for (double x : xs) s += x;
    return s.value();
}

}  // namespace geomapprox::detail
