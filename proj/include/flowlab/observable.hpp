#ifndef FLOWLAB_OBSERVABLE_HPP
#define FLOWLAB_OBSERVABLE_HPP

#include <complex>
#include <cstdint>
#include <vector>

#include "flowlab/cellmath.hpp"
#include "flowlab/surface.hpp"

namespace flowlab {

/** Cellwise trigonometric observable.
 *
 * On rectangle j a term (m, n, c) stands for c * e^{2*pi*i*(m*x/len_j + n*y/h_j)}
 * in the rectangle's local coordinates.  Integer (m, n) are the cell
 * harmonics; real values are allowed so that global eigenfunctions of the
 * torus flow (whose x-frequency is not a cell harmonic) stay in the class.
 */
class CellwiseObservable {
  public:
    struct Term {
        double m = 0.0;
        double n = 0.0;
        cplx c;
    };

    explicit CellwiseObservable(int cells) : cells_(cells) { terms_.resize(cells); }

    int cells() const { return cells_; }
    const std::vector<Term>& terms(int cell) const { return terms_[cell]; }

    void add_term(int cell, double m, double n, cplx c);

    bool zero_mean_flag() const { return zero_mean_; }
    void set_zero_mean_flag(bool v) { zero_mean_ = v; }

    /// True when every term has (m,n) = (0,0), the fast-path class.
    bool cellwise_constant() const;
    /// Constant value on a cell (requires cellwise_constant()).
    cplx cell_value(int cell) const;

    cplx eval(const ZipperedRectangles& s, const SurfacePoint& pt) const;

    CellwiseObservable conj() const;
    CellwiseObservable scaled(cplx factor) const;

    static CellwiseObservable constant(const ZipperedRectangles& s, cplx c);
    static CellwiseObservable cell_values(const ZipperedRectangles& s, std::vector<cplx> values);
    static CellwiseObservable harmonic(const ZipperedRectangles& s, int cell, long m, long n,
                                       cplx c);

    /// Eigenfunction e^{2*pi*i*(k*x_base + lambda*y)} of the square-torus
    /// suspension flow, eigenvalue lambda = k*rot + branch (d = 2 only).
    static CellwiseObservable torus_eigenfunction(const ZipperedRectangles& s, long k,
                                                  long branch);

    /// Zero-mean cellwise-constant observable with unit L2 norm.
    static CellwiseObservable random_zero_mean_cells(const ZipperedRectangles& s,
                                                     std::uint64_t seed);
    /// Random low-order harmonics on every cell, mean subtracted.
    static CellwiseObservable random_zero_mean_harmonics(const ZipperedRectangles& s,
                                                         std::uint64_t seed, long max_m,
                                                         long max_n);

  private:
    int cells_;
    std::vector<std::vector<Term>> terms_;
    bool zero_mean_ = false;
};

/// Eigenvalue of the k-th torus eigenfunction family, branch index b:
/// lambda = (k * rotation + b) / height.
double torus_eigenvalue(const ZipperedRectangles& s, long k, long branch);

struct NormReport {
    double l2_norm = 0.0;
    double sup_norm_bound = 0.0;
    double sobolev1_proxy = 0.0;
};

/// Exact surface mean (closed form per term).
cplx mean(const CellwiseObservable& f, const ZipperedRectangles& s);

/// f minus its mean, as additional (0,0) terms; zero_mean flag set.
CellwiseObservable minus_mean(const CellwiseObservable& f, const ZipperedRectangles& s);

/// Exact cellwise Parseval evaluation of <f,g> in the weighted L2 space.
cplx inner_product(const CellwiseObservable& f, const CellwiseObservable& g,
                   const ZipperedRectangles& s);

/// Weighted Sobolev data: l2 norm, sup bound (sum of coefficient moduli per
/// cell), and the |f|_1 proxy sqrt(|f|^2 + |Sf|^2 + |Tf|^2) with S = d/dy
/// (flow direction) and T = d/dx, all cellwise exact.
NormReport sobolev1_proxy(const CellwiseObservable& f, const ZipperedRectangles& s);

}  // namespace flowlab

#endif
