#ifndef FLOWLAB_SPECTRAL_HPP
#define FLOWLAB_SPECTRAL_HPP

#include <cstdint>
#include <vector>

#include "flowlab/fit.hpp"
#include "flowlab/observable.hpp"
#include "flowlab/parallel.hpp"
#include "flowlab/twisted.hpp"

namespace flowlab {

/** L2 norm of int_0^T e^{-2*pi*i*lambda*t} f(phi_t(.)) dt by Monte Carlo over
 * start points, stratified per rectangle proportional to area.  Returns the
 * mean of |trace|^2 with its standard error; the RMS is sqrt(value). */
MeanEstimate l2_twisted_sq(const ZipperedRectangles& s, const CellwiseObservable& f,
                           double lambda, double T, long n_samples, std::uint64_t seed,
                           Exec exec = Exec::serial, int threads = 0);

double l2_twisted_norm(const ZipperedRectangles& s, const CellwiseObservable& f, double lambda,
                       double T, long n_samples, std::uint64_t seed, Exec exec = Exec::serial,
                       int threads = 0);

struct SpectralEstimate {
    double lambda = 0.0;
    double r = 0.0;
    double mass_upper = 0.0;   // 8 * r^2 * l2_twisted^2
    double l2_twisted = 0.0;   // RMS of the twisted integral at T = 1/(2r)
    long n_samples = 0;
    double T_used = 0.0;       // 1/(2r)
    double stderr_ = 0.0;      // statistical error on mass_upper
};

/// sigma_f([lambda-r, lambda+r]) <= 8 r^2 ||int_0^{1/(2r)} e^{-2 pi i lambda t} f.phi_t||^2.
SpectralEstimate spectral_mass_upper(const ZipperedRectangles& s, const CellwiseObservable& f,
                                     double lambda, double r, long n_samples, std::uint64_t seed,
                                     Exec exec = Exec::serial, int threads = 0);

struct LocalDimension {
    double dimension = 0.0;  // regression slope of log mass vs log r
    double se = 0.0;
    LineFit fit;
    std::vector<SpectralEstimate> points;
};

/// Slope of log mass_upper against log r over a geometric grid (>= 6 points
/// spanning >= 2 decades).
LocalDimension local_dimension(const ZipperedRectangles& s, const CellwiseObservable& f,
                               double lambda, const std::vector<double>& r_grid, long n_samples,
                               std::uint64_t seed, Exec exec = Exec::serial, int threads = 0);

// ---------------------------------------------------------------------------
// Correlations <f.phi_t, g>: exact fiber integration, Monte Carlo in the base
// ---------------------------------------------------------------------------

struct CorrelationQuadrature {
    long n_base_samples = 256;        // base points (exact vertical-fiber integrals)
    int time_samples_per_T = 256;     // stratified midpoint t-samples per grid T
    long max_fiber_evals = 400000000; // budget cap; exceeding it is an error
};

struct CorrelationMoments {
    std::vector<cplx> mean;          // c(t_j) estimates
    std::vector<double> var_of_mean; // complex variance of the mean estimate
    long n_samples = 0;
};

/// <f.phi_t, g> on a sorted time grid.
CorrelationMoments correlation_samples(const ZipperedRectangles& s, const CellwiseObservable& f,
                                       const CellwiseObservable& g,
                                       const std::vector<double>& t_grid, long n_samples,
                                       std::uint64_t seed, Exec exec = Exec::serial,
                                       int threads = 0);

struct DecayCurve {
    std::vector<double> T_grid;
    std::vector<double> values;    // (1/T) int_0^T |<f.phi_t, g>|^2 dt, noise-debiased
    double exponent = 0.0;         // fitted log-log slope
    double exponent_se = 0.0;
    double r_squared = 0.0;
    double inner_product_sq = 0.0; // |<f,g>|^2, the T->0 limit
};

/// Cesaro average of squared correlations per grid T; f must have zero mean.
DecayCurve correlation_decay(const ZipperedRectangles& s, const CellwiseObservable& f,
                             const CellwiseObservable& g, const std::vector<double>& T_grid,
                             const CorrelationQuadrature& quad, std::uint64_t seed,
                             Exec exec = Exec::serial, int threads = 0);

// ---------------------------------------------------------------------------
// Independent spectral oracle: windowed transform of the autocorrelation
// ---------------------------------------------------------------------------

struct SpectralWindow {
    double lambda = 0.0;
    double r = 0.0;
};

struct WindowMassLower {
    double value = 0.0;    // lower estimate of sigma_f([lambda-r, lambda+r])
    double se = 0.0;       // statistical error of the smoothed transform
    double smoothed = 0.0; // Fejer-smoothed mass at the window
    double tail = 0.0;     // kernel tail bound that was subtracted
};

/** Fejer-window estimate: E = int (1-|t|/L) e^{-2 pi i lambda t} R(t) dt equals
 * int L sinc^2(pi L (xi-lambda)) d sigma_f(xi) >= 0, so
 * sigma_f([lambda-r,lambda+r]) >= (E - ||f||^2/(pi^2 L r^2)) / L.
 * L is min(L_max, 8/r), snapped to the autocorrelation grid. */
std::vector<WindowMassLower> autocorrelation_mass_lower(
    const ZipperedRectangles& s, const CellwiseObservable& f,
    const std::vector<SpectralWindow>& windows, double dt, double L_max, long n_samples,
    std::uint64_t seed, Exec exec = Exec::serial, int threads = 0);

// ---------------------------------------------------------------------------
// Both directions of the twisted-growth / spectral-mass correspondence
// ---------------------------------------------------------------------------

struct SandwichViolation {
    double where = 0.0;  // r or T
    double measured = 0.0;
    double bound = 0.0;
};

struct SandwichReport {
    double alpha_minus = 0.0;  // from the growth envelope fit
    double beta_minus = 0.0;   // from the mass fit
    double alpha_plus = 0.0;   // raw-fit growth, used by the conditional branch
    std::vector<SpectralEstimate> mass_points;
    std::vector<double> T_grid;
    std::vector<double> l2_rms;  // measured RMS per grid T
    std::vector<SandwichViolation> growth_to_mass;  // unconditional: growth envelope must dominate mass
    std::vector<SandwichViolation> mass_to_growth;  // unconditional: mass exponent bounds the growth
    std::vector<SandwichViolation> conditional_lower;  // reported only, never failed
};

SandwichReport sandwich_check(const ZipperedRectangles& s, const CellwiseObservable& f,
                              double lambda, const std::vector<double>& r_grid,
                              const std::vector<double>& T_grid, long n_samples,
                              std::uint64_t seed, Exec exec = Exec::serial, int threads = 0);

}  // namespace flowlab

#endif
