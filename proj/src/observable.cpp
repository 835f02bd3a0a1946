#include "flowlab/observable.hpp"

#include <cmath>

#include "flowlab/errors.hpp"
#include "flowlab/rng.hpp"

namespace flowlab {

void CellwiseObservable::add_term(int cell, double m, double n, cplx c) {
    if (cell < 0 || cell >= cells_) throw ConfigInvalid("term cell index out of range");
    if (!std::isfinite(m) || !std::isfinite(n) || !std::isfinite(c.real()) ||
        !std::isfinite(c.imag()))
        throw NonFiniteInput();
    terms_[cell].push_back(Term{m, n, c});
}

bool CellwiseObservable::cellwise_constant() const {
    for (const auto& ts : terms_)
        for (const auto& t : ts)
            if (t.m != 0.0 || t.n != 0.0) return false;
    return true;
}

cplx CellwiseObservable::cell_value(int cell) const {
    cplx v(0.0, 0.0);
    for (const auto& t : terms_[cell]) v += t.c;
    return v;
}

cplx CellwiseObservable::eval(const ZipperedRectangles& s, const SurfacePoint& pt) const {
    cplx v(0.0, 0.0);
    const double len = s.lengths()[pt.rectangle];
    const double h = s.heights()[pt.rectangle];
    for (const auto& t : terms_[pt.rectangle])
        v += t.c * expi(t.m * pt.x / len + t.n * pt.y / h);
    return v;
}

CellwiseObservable CellwiseObservable::conj() const {
    CellwiseObservable g(cells_);
    for (int j = 0; j < cells_; ++j)
        for (const auto& t : terms_[j]) g.add_term(j, -t.m, -t.n, std::conj(t.c));
    g.zero_mean_ = zero_mean_;
    return g;
}

CellwiseObservable CellwiseObservable::scaled(cplx factor) const {
    CellwiseObservable g(cells_);
    for (int j = 0; j < cells_; ++j)
        for (const auto& t : terms_[j]) g.add_term(j, t.m, t.n, factor * t.c);
    g.zero_mean_ = zero_mean_;
    return g;
}

CellwiseObservable CellwiseObservable::constant(const ZipperedRectangles& s, cplx c) {
    CellwiseObservable f(s.size());
    for (int j = 0; j < s.size(); ++j) f.add_term(j, 0, 0, c);
    return f;
}

CellwiseObservable CellwiseObservable::cell_values(const ZipperedRectangles& s,
                                                   std::vector<cplx> values) {
    if (values.size() != static_cast<size_t>(s.size()))
        throw ConfigInvalid("one value per rectangle required");
    CellwiseObservable f(s.size());
    for (int j = 0; j < s.size(); ++j) f.add_term(j, 0, 0, values[j]);
    return f;
}

CellwiseObservable CellwiseObservable::harmonic(const ZipperedRectangles& s, int cell, long m,
                                                long n, cplx c) {
    CellwiseObservable f(s.size());
    f.add_term(cell, static_cast<double>(m), static_cast<double>(n), c);
    return f;
}

double torus_eigenvalue(const ZipperedRectangles& s, long k, long branch) {
    if (s.size() != 2) throw UnsupportedObservable("torus eigenfunctions need d = 2");
    const double h = s.heights()[0];
    if (std::abs(s.heights()[1] - h) > 1e-12 * h)
        throw UnsupportedObservable("torus eigenfunctions need a constant roof");
    const double rot = s.lengths()[s.permutation().bottom()[0]];
    return (static_cast<double>(k) * rot + static_cast<double>(branch)) / h;
}

CellwiseObservable CellwiseObservable::torus_eigenfunction(const ZipperedRectangles& s, long k,
                                                           long branch) {
    const double lam = torus_eigenvalue(s, k, branch);
    CellwiseObservable f(s.size());
    for (int a = 0; a < s.size(); ++a) {
        double offset = s.iet().left_endpoint(a);
        double m = static_cast<double>(k) * s.lengths()[a];
        double n = lam * s.heights()[a];
        f.add_term(a, m, n, expi(static_cast<double>(k) * offset));
    }
    return f;
}

CellwiseObservable CellwiseObservable::random_zero_mean_cells(const ZipperedRectangles& s,
                                                              std::uint64_t seed) {
    Rng rng(seed, /*stream=*/0x0b5e7ull);
    const int d = s.size();
    std::vector<cplx> v(d);
    for (int a = 0; a < d; ++a) v[a] = cplx(rng.uniform(-1, 1), rng.uniform(-1, 1));
    cplx m(0, 0);
    for (int a = 0; a < d; ++a) m += v[a] * s.cell_area(a);
    m /= s.area();
    double norm2 = 0.0;
    for (int a = 0; a < d; ++a) {
        v[a] -= m;
        norm2 += std::norm(v[a]) * s.cell_area(a);
    }
    double scale = norm2 > 0 ? 1.0 / std::sqrt(norm2) : 1.0;
    for (auto& c : v) c *= scale;
    auto f = cell_values(s, std::move(v));
    f.set_zero_mean_flag(true);
    return f;
}

CellwiseObservable CellwiseObservable::random_zero_mean_harmonics(const ZipperedRectangles& s,
                                                                  std::uint64_t seed, long max_m,
                                                                  long max_n) {
    Rng rng(seed, /*stream=*/0x0b5e8ull);
    CellwiseObservable f(s.size());
    for (int j = 0; j < s.size(); ++j) {
        long m = static_cast<long>(rng.next_u64() % (2 * max_m + 1)) - max_m;
        long n = static_cast<long>(rng.next_u64() % (2 * max_n + 1)) - max_n;
        f.add_term(j, static_cast<double>(m), static_cast<double>(n),
                   cplx(rng.uniform(-1, 1), rng.uniform(-1, 1)));
    }
    auto g = minus_mean(f, s);
    return g;
}

namespace {

/// <t, u> over one cell of dimensions (len, h): closed form, real frequencies.
cplx pair_integral(const CellwiseObservable::Term& t, const CellwiseObservable::Term& u,
                   double len, double h) {
    return t.c * std::conj(u.c) * (len * h) * unit_moment(t.m - u.m) * unit_moment(t.n - u.n);
}

}  // namespace

cplx mean(const CellwiseObservable& f, const ZipperedRectangles& s) {
    cplx acc(0, 0);
    for (int j = 0; j < f.cells(); ++j) {
        const double len = s.lengths()[j], h = s.heights()[j];
        for (const auto& t : f.terms(j))
            acc += t.c * (len * h) * unit_moment(t.m) * unit_moment(t.n);
    }
    return acc;
}

CellwiseObservable minus_mean(const CellwiseObservable& f, const ZipperedRectangles& s) {
    cplx m = mean(f, s) / s.area();
    CellwiseObservable g(f.cells());
    for (int j = 0; j < f.cells(); ++j) {
        for (const auto& t : f.terms(j)) g.add_term(j, t.m, t.n, t.c);
        g.add_term(j, 0, 0, -m);
    }
    g.set_zero_mean_flag(true);
    return g;
}

cplx inner_product(const CellwiseObservable& f, const CellwiseObservable& g,
                   const ZipperedRectangles& s) {
    cplx acc(0, 0);
    for (int j = 0; j < f.cells(); ++j) {
        const double len = s.lengths()[j], h = s.heights()[j];
        for (const auto& t : f.terms(j))
            for (const auto& u : g.terms(j)) acc += pair_integral(t, u, len, h);
    }
    return acc;
}

NormReport sobolev1_proxy(const CellwiseObservable& f, const ZipperedRectangles& s) {
    NormReport rep;
    double l2sq = 0.0, dx_sq = 0.0, dy_sq = 0.0;
    for (int j = 0; j < f.cells(); ++j) {
        const double len = s.lengths()[j], h = s.heights()[j];
        double cell_sup = 0.0;
        for (const auto& t : f.terms(j)) cell_sup += std::abs(t.c);
        rep.sup_norm_bound = std::max(rep.sup_norm_bound, cell_sup);
        for (const auto& t : f.terms(j)) {
            for (const auto& u : f.terms(j)) {
                cplx base = pair_integral(t, u, len, h);
                l2sq += base.real();
                // T = d/dx multiplies by 2*pi*i*m/len, S = d/dy by 2*pi*i*n/h
                double wx = (2.0 * M_PI) * (2.0 * M_PI) * (t.m / len) * (u.m / len);
                double wy = (2.0 * M_PI) * (2.0 * M_PI) * (t.n / h) * (u.n / h);
                dx_sq += wx * base.real();
                dy_sq += wy * base.real();
            }
        }
    }
    rep.l2_norm = std::sqrt(std::max(0.0, l2sq));
    rep.sobolev1_proxy = std::sqrt(std::max(0.0, l2sq + dx_sq + dy_sq));
    return rep;
}

}  // namespace flowlab
