#pragma once

// Order-fixed floating point reductions. Parallel kernels write one value per
// item into an ordered buffer and reduce it here, so results do not depend on
// the thread count or the schedule.

#include <cmath>
#include <cstddef>
#include <span>

namespace qtwist {

// Neumaier's variant of Kahan summation.
class CompensatedSum {
public:
    void add(double x) noexcept {
        const double t = sum_ + x;
        if (std::fabs(sum_) >= std::fabs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    double value() const noexcept { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

// Pairwise (tree) summation with a fixed split rule.
inline double pairwise_sum(std::span<const double> xs) noexcept {
    constexpr std::size_t kLeaf = 32;
    if (xs.size() <= kLeaf) {
        CompensatedSum acc;
        for (double x : xs) acc.add(x);
        return acc.value();
    }
    const std::size_t half = xs.size() / 2;
    return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

}  // namespace qtwist
