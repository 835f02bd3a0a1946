#ifndef FLOWLAB_COCYCLE_HPP
#define FLOWLAB_COCYCLE_HPP

#include <complex>
#include <cstdint>
#include <vector>

#include "flowlab/cellmath.hpp"
#include "flowlab/iet.hpp"
#include "flowlab/parallel.hpp"

namespace flowlab {

using Mat64 = std::vector<std::vector<std::int64_t>>;
using MatC = std::vector<std::vector<cplx>>;

/** Zorich-accelerated Rauzy-Veech path.
 *
 * Per step: the accelerated matrix B (product of elementary matrices),
 * heights evolving by heights' = B^T heights, and the Teichmueller time
 * t_n = -log(|I^(n)|/|I^(0)|).  Lengths are renormalized to sum 1 after each
 * step; heights carry a shared log-scale factor so that long paths do not
 * overflow.
 */
struct CocyclePath {
    struct Step {
        ZorichStep zorich;
        double t_after = 0.0;
        std::vector<double> heights_after;  // times exp(heights_log_scale)
        double heights_log_scale = 0.0;
    };
    Permutation p0;
    std::vector<double> lengths0;
    std::vector<double> heights0;
    std::vector<Step> steps;
};

/// n_zorich accelerated steps from Keane-generic lengths; initial heights
/// default to all ones when empty.
CocyclePath build_path(const Permutation& p, const std::vector<double>& lengths, int n_zorich,
                       std::vector<double> heights0 = {});

/** Twisted transfer matrix of one accelerated step at frequency lambda.
 *
 * Column of each letter lists its return word over the previous alphabet;
 * entry (w_i, letter) accumulates e^{2*pi*i*lambda*(h_{w_1}+...+h_{w_{i-1}})}.
 * Phases are computed from lambda*heights mod 1, which keeps them exact for
 * heights far beyond 1/eps.  At lambda = 0 this is the untwisted count
 * matrix.
 */
MatC twisted_matrix(const ZorichStep& step, const std::vector<double>& heights_before,
                    double lambda);

struct ExponentEstimate {
    double value = 0.0;
    double stderr_ = 0.0;
};

/** Top-k Lyapunov exponents of the Rauzy-Veech cocycle per unit Teichmueller
 * time (Kontsevich-Zorich normalization: top exponent 1), by QR
 * re-orthonormalization along independent random Zorich paths. */
std::vector<ExponentEstimate> kz_exponents(const Permutation& p, int n_paths, int n_zorich,
                                           int k, std::uint64_t seed, Exec exec = Exec::serial,
                                           int threads = 0);

struct GapEstimate {
    double lambda = 0.0;
    double alpha_hat = 0.0;  // 1 - log||B_lambda(n)|| / t_n
    long n_steps = 0;
    double band = 0.0;  // convergence band: |alpha(n) - alpha(n/2)|
    std::vector<std::pair<long, double>> checkpoints;  // running-n diagnostics
};

/** Growth-gap sweep of the twisted cocycle along one Zorich path (shared
 * across the grid).  alpha_hat(0) ~ 0 because untwisted norms grow like
 * e^{t_n}; a positive alpha_hat at lambda != 0 is the empirical spectral
 * gap. */
std::vector<GapEstimate> gap_sweep(const Permutation& p, const std::vector<double>& lengths,
                                   const std::vector<double>& lambda_grid, int n_zorich,
                                   std::vector<double> heights0 = {},
                                   Exec exec = Exec::serial, int threads = 0);

/// Operator 2-norm (largest singular value) of a small complex matrix.
double operator_norm(const MatC& m);

/// log of the operator norm of the twisted product over a stored path.
double twisted_product_log_norm(const CocyclePath& path, double lambda);

}  // namespace flowlab

#endif
