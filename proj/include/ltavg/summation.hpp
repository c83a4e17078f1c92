#pragma once

#include <cmath>

namespace ltavg {

/// Neumaier-compensated accumulator. Results depend only on the order of add() calls.
class CompensatedSum {
public:
    void add(double x)
    {
        const double t = sum_ + x;
        if (std::fabs(sum_) >= std::fabs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    CompensatedSum& operator+=(double x)
    {
        add(x);
        return *this;
    }
    void merge(const CompensatedSum& o)
    {
        add(o.sum_);
        add(o.comp_);
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

} // namespace ltavg
