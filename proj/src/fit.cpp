#include "flowlab/fit.hpp"

#include <algorithm>
#include <cmath>

#include "flowlab/errors.hpp"

namespace flowlab {

LineFit linear_fit(const std::vector<double>& xs, const std::vector<double>& ys) {
    const size_t n = xs.size();
    if (n != ys.size() || n < 2) throw DegenerateData("need >= 2 points for a line fit");
    double sx = 0, sy = 0;
    for (size_t i = 0; i < n; ++i) {
        sx += xs[i];
        sy += ys[i];
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0, syy = 0;
    for (size_t i = 0; i < n; ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    if (sxx <= 0) throw DegenerateData("degenerate abscissae in line fit");
    LineFit fit;
    fit.n = static_cast<int>(n);
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ss_res = 0;
    for (size_t i = 0; i < n; ++i) {
        double r = ys[i] - (fit.intercept + fit.slope * xs[i]);
        ss_res += r * r;
    }
    fit.r_squared = syy > 0 ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : 1.0;
    fit.se_slope = n > 2 ? std::sqrt(ss_res / (n - 2) / sxx) : 0.0;
    return fit;
}

std::vector<double> running_max(const std::vector<double>& ys) {
    std::vector<double> out(ys.size());
    double m = -HUGE_VAL;
    for (size_t i = 0; i < ys.size(); ++i) {
        m = std::max(m, ys[i]);
        out[i] = m;
    }
    return out;
}

MeanEstimate mean_estimate(const std::vector<double>& xs) {
    MeanEstimate e;
    e.n = static_cast<long>(xs.size());
    if (xs.empty()) return e;
    double s = 0;
    for (double x : xs) s += x;
    e.value = s / e.n;
    double v = 0;
    for (double x : xs) v += (x - e.value) * (x - e.value);
    if (e.n > 1) e.stderr_ = std::sqrt(v / (e.n - 1) / e.n);
    return e;
}

}  // namespace flowlab
