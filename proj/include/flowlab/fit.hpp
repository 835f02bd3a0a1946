#ifndef FLOWLAB_FIT_HPP
#define FLOWLAB_FIT_HPP

#include <vector>

namespace flowlab {

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    double se_slope = 0.0;  // standard error of the slope
    int n = 0;
};

LineFit linear_fit(const std::vector<double>& xs, const std::vector<double>& ys);

/// Running maximum of ys (envelope for oscillating magnitudes).
std::vector<double> running_max(const std::vector<double>& ys);

struct MeanEstimate {
    double value = 0.0;
    double stderr_ = 0.0;
    long n = 0;
};

/// Mean and standard error of the mean, accumulated in index order.
MeanEstimate mean_estimate(const std::vector<double>& xs);

}  // namespace flowlab

#endif
