#ifndef FLOWLAB_TWISTED_HPP
#define FLOWLAB_TWISTED_HPP

#include <utility>
#include <vector>

#include "flowlab/fit.hpp"
#include "flowlab/observable.hpp"
#include "flowlab/surface.hpp"

namespace flowlab {

/** Twisted ergodic integral int_0^T e^{2*pi*i*lambda*t} f(phi_t(x)) dt.
 * absolute_phase means the integrand phase uses global orbit time, so traces
 * over consecutive segments add exactly. */
struct TwistedTrace {
    cplx value{0.0, 0.0};
    double T = 0.0;
    double lambda = 0.0;
    SurfacePoint start;
    bool absolute_phase = true;
};

/// Exact piecewise evaluation along the orbit (every observable class).
TwistedTrace twisted_integral_direct(const ZipperedRectangles& s, const CellwiseObservable& f,
                                     double lambda, const SurfacePoint& x0, double T);

/// One orbit walk, the trace recorded at each grid time (grid must ascend).
std::vector<TwistedTrace> sweep_trace(const ZipperedRectangles& s, const CellwiseObservable& f,
                                      double lambda, const SurfacePoint& x0,
                                      const std::vector<double>& T_grid);

struct RenormStats {
    int levels = 0;     // renormalization depth used (matrix products built)
    long towers = 0;    // full return towers consumed
};

/** Renormalized evaluation of the same integral for cellwise-constant f:
 * the orbit is decomposed into full Rauzy-Veech return towers of increasing
 * depth, whose twisted contributions are transfer-matrix products computed
 * once per level.  Cost in matrix products grows like log T. */
TwistedTrace twisted_sum_renormalized(const ZipperedRectangles& s, const CellwiseObservable& f,
                                      double lambda, const SurfacePoint& x0, double T,
                                      RenormStats* stats = nullptr);

struct ChopSegment {
    double start = 0.0;
    double duration = 0.0;
    int scale_index = 0;  // 1-based index into the time sequence; 0 = remainder
};

/** Orbit-segment decomposition at scales T_l = e^{t_l}: counts m_l per scale,
 * remainder tau <= e^{t_1}, with m_l <= e^{t_{l+1}-t_l}.  Folding
 * counts*scales from the largest scale down and adding tau reproduces T
 * bit-exactly (that is the order the greedy subtraction used). */
struct ChopDecomposition {
    std::vector<double> scales;       // T_l for every provided time
    std::vector<long long> counts;    // m_l, same indexing
    double remainder = 0.0;           // tau
    std::vector<ChopSegment> segments;  // orbit order: ascending scale, tau last
};

ChopDecomposition chop_decompose(double T, const std::vector<double>& times);

/// Fourier-mode reduction of a product-flow integral on M x T^1:
/// sum_n e^{2*pi*i*n*theta} * twisted_integral_direct(f_n, n*lambda).
cplx product_flow_integral(const ZipperedRectangles& s,
                           const std::vector<std::pair<long, CellwiseObservable>>& modes,
                           double lambda, const SurfacePoint& x0, double theta, double T);

struct ExponentFit {
    double exponent = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    double se = 0.0;
    std::vector<double> T_grid;
};

/// Log-log fit of |I(T)| over a geometric grid (>= 8 points).  The envelope
/// option (default) fits the running maximum; twisted integrals oscillate and
/// raw slopes underestimate the supremum growth the bounds speak about.
ExponentFit sweep_and_fit(const ZipperedRectangles& s, const CellwiseObservable& f, double lambda,
                          const SurfacePoint& x0, const std::vector<double>& T_grid,
                          bool envelope = true);

ExponentFit fit_exponent(const std::vector<double>& T_grid, const std::vector<double>& magnitudes,
                         bool envelope);

}  // namespace flowlab

#endif
