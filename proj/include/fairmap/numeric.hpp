#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace fairmap {

/// Correctly rounded sum of finite doubles (Shewchuk partials). The result depends
/// only on the multiset of inputs, not their order.
class ExactSum {
public:
    void add(double x);
    double value() const;

private:
    std::vector<double> partials_;
};

double exact_sum(std::span<const double> xs);

/// Pearson correlation coefficient; NaN when either series has zero variance.
double pearson(std::span<const double> x, std::span<const double> y);

double mean(std::span<const double> xs);

} // namespace fairmap
