#include "flowlab/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include "flowlab/errors.hpp"
#include "flowlab/rng.hpp"

namespace flowlab {

namespace {

constexpr std::uint64_t kStreamL2 = 0x17e0;
constexpr std::uint64_t kStreamCorr = 0xc0bb;

/// Deterministic largest-remainder allocation of n samples to rectangles
/// proportional to area.
std::vector<long> stratified_counts(const ZipperedRectangles& s, long n) {
    const int d = s.size();
    std::vector<long> counts(d, 0);
    std::vector<std::pair<double, int>> rema(d);
    long assigned = 0;
    for (int j = 0; j < d; ++j) {
        double want = n * s.cell_area(j) / s.area();
        counts[j] = static_cast<long>(std::floor(want));
        assigned += counts[j];
        rema[j] = {want - std::floor(want), j};
    }
    std::sort(rema.begin(), rema.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });
    for (long i = 0; assigned < n; ++i, ++assigned) counts[rema[i % d].second] += 1;
    return counts;
}

SurfacePoint stratified_point(const ZipperedRectangles& s, const std::vector<long>& counts,
                              long index, Rng rng) {
    int j = 0;
    long before = 0;
    while (index >= before + counts[j]) before += counts[j++];
    double x = rng.uniform() * s.lengths()[j];
    double y = rng.uniform() * s.heights()[j];
    return SurfacePoint{j, x, y};
}

/// |trace|^2 per grid T for one start point, resampling singular starts.
std::vector<double> sample_sq_sweep(const ZipperedRectangles& s, const CellwiseObservable& f,
                                    double lambda, const std::vector<long>& counts,
                                    const std::vector<double>& T_grid, std::uint64_t seed,
                                    long index) {
    Rng base(seed, kStreamL2 + static_cast<std::uint64_t>(index));
    for (int attempt = 0; attempt < 64; ++attempt) {
        try {
            SurfacePoint pt = stratified_point(s, counts, index, base.split(attempt));
            auto traces = sweep_trace(s, f, lambda, pt, T_grid);
            std::vector<double> out(traces.size());
            for (size_t k = 0; k < traces.size(); ++k) out[k] = std::norm(traces[k].value);
            return out;
        } catch (const SingularityHit&) {
            continue;
        }
    }
    throw SingularityHit(0.0);
}

/// Per-T mean/stderr of |trace|^2 over stratified start points.  The twisted
/// phase of the L2 quantity is e^{-2 pi i lambda t}, hence frequency -lambda.
std::vector<MeanEstimate> l2_sq_sweep(const ZipperedRectangles& s, const CellwiseObservable& f,
                                      double lambda, const std::vector<double>& T_grid,
                                      long n_samples, std::uint64_t seed, Exec exec,
                                      int threads) {
    if (n_samples < 100) throw ConfigInvalid("need n_samples >= 100");
    auto counts = stratified_counts(s, n_samples);
    std::vector<std::vector<double>> rows(n_samples);
    par_for(exec, threads, n_samples, [&](std::ptrdiff_t i) {
        rows[i] = sample_sq_sweep(s, f, -lambda, counts, T_grid, seed, i);
    });
    std::vector<MeanEstimate> out(T_grid.size());
    std::vector<double> col(n_samples);
    for (size_t k = 0; k < T_grid.size(); ++k) {
        for (long i = 0; i < n_samples; ++i) col[i] = rows[i][k];
        out[k] = mean_estimate(col);
    }
    return out;
}

}  // namespace

MeanEstimate l2_twisted_sq(const ZipperedRectangles& s, const CellwiseObservable& f,
                           double lambda, double T, long n_samples, std::uint64_t seed,
                           Exec exec, int threads) {
    return l2_sq_sweep(s, f, lambda, {T}, n_samples, seed, exec, threads).front();
}

double l2_twisted_norm(const ZipperedRectangles& s, const CellwiseObservable& f, double lambda,
                       double T, long n_samples, std::uint64_t seed, Exec exec, int threads) {
    return std::sqrt(std::max(0.0, l2_twisted_sq(s, f, lambda, T, n_samples, seed, exec, threads).value));
}

SpectralEstimate spectral_mass_upper(const ZipperedRectangles& s, const CellwiseObservable& f,
                                     double lambda, double r, long n_samples, std::uint64_t seed,
                                     Exec exec, int threads) {
    if (!(r > 0.0) || r > 0.5) throw ConfigInvalid("need r in (0, 1/2]");
    const double T = 1.0 / (2.0 * r);
    MeanEstimate sq = l2_twisted_sq(s, f, lambda, T, n_samples, seed, exec, threads);
    SpectralEstimate est;
    est.lambda = lambda;
    est.r = r;
    est.l2_twisted = std::sqrt(std::max(0.0, sq.value));
    est.mass_upper = 8.0 * r * r * sq.value;
    est.stderr_ = 8.0 * r * r * sq.stderr_;
    est.n_samples = n_samples;
    est.T_used = T;
    return est;
}

LocalDimension local_dimension(const ZipperedRectangles& s, const CellwiseObservable& f,
                               double lambda, const std::vector<double>& r_grid, long n_samples,
                               std::uint64_t seed, Exec exec, int threads) {
    if (r_grid.size() < 6) throw ConfigInvalid("need >= 6 radii");
    auto [mn, mx] = std::minmax_element(r_grid.begin(), r_grid.end());
    if (*mx / *mn < 100.0) throw ConfigInvalid("radii must span >= 2 decades");

    LocalDimension out;
    out.points.resize(r_grid.size());
    // parallel over radii; samples inside each estimate stay serial so the
    // result is identical under both policies
    par_for(exec, threads, static_cast<std::ptrdiff_t>(r_grid.size()), [&](std::ptrdiff_t k) {
        out.points[k] = spectral_mass_upper(s, f, lambda, r_grid[k], n_samples,
                                            seed + 7919 * static_cast<std::uint64_t>(k),
                                            Exec::serial, 0);
    });
    bool alive = false;
    for (const auto& p : out.points)
        if (p.mass_upper >= 1e-14) alive = true;
    if (!alive) throw DegenerateData("spectral mass vanishes on the whole grid");

    std::vector<double> lx, ly;
    for (const auto& p : out.points) {
        lx.push_back(std::log(p.r));
        ly.push_back(std::log(std::max(p.mass_upper, 1e-300)));
    }
    out.fit = linear_fit(lx, ly);
    out.dimension = out.fit.slope;
    out.se = out.fit.se_slope;
    return out;
}

// ---------------------------------------------------------------------------
// Fiber-exact correlations
// ---------------------------------------------------------------------------

namespace {

struct Crossing {
    double entry;  // flow time at which the orbit enters this rectangle
    int cell;
    double x;
};

/** F(t_j) = int_0^{h0} f(Psi(x0, y + t_j)) conj(g(x0, y)) dy for one base point,
 * one orbit walk, every t in ascending order.  Exact in y; the t panel and the
 * base point are the only quadrature. */
void fiber_row(const ZipperedRectangles& s, const CellwiseObservable& f,
               const CellwiseObservable& g, double u0, const std::vector<double>& t_grid,
               cplx* out, long* crossings_budget) {
    const Iet& T = s.iet();
    const int j0 = T.letter_at(u0);
    const double x0 = u0 - T.left_endpoint(j0);
    const double h0 = s.heights()[j0];
    const double len0 = s.lengths()[j0];

    struct GTerm {
        cplx coeff;
        double freq;  // conj(g) carries e^{-2 pi i freq y}
    };
    std::vector<GTerm> gterms;
    for (const auto& u : g.terms(j0))
        gterms.push_back(GTerm{std::conj(u.c) * expi(-u.m * x0 / len0), u.n / h0});

    std::deque<Crossing> pieces;
    pieces.push_back(Crossing{0.0, j0, x0});
    SurfacePoint cur{j0, x0, 0.0};
    double elapsed = 0.0;  // entry time of the *next* crossing to be generated

    for (size_t jt = 0; jt < t_grid.size(); ++jt) {
        const double t = t_grid[jt];
        const double wend = t + h0;
        while (pieces.back().entry + s.heights()[pieces.back().cell] < wend) {
            cur = cross_top(s, cur, elapsed);
            pieces.push_back(Crossing{elapsed, cur.rectangle, cur.x});
            if (--*crossings_budget < 0)
                throw QuadratureBudgetExceeded("fiber walk exceeded the crossing budget");
        }
        while (pieces.front().entry + s.heights()[pieces.front().cell] <= t) pieces.pop_front();

        cplx acc(0.0, 0.0);
        for (const auto& pc : pieces) {
            const double hk = s.heights()[pc.cell];
            if (pc.entry >= wend) break;
            double y_lo = std::max(0.0, pc.entry - t);
            double y_hi = std::min(h0, pc.entry + hk - t);
            if (y_hi <= y_lo) continue;
            const double lenk = s.lengths()[pc.cell];
            for (const auto& tf : f.terms(pc.cell)) {
                cplx base = tf.c * expi(tf.m * pc.x / lenk + tf.n * (t - pc.entry) / hk);
                for (const auto& gt : gterms) {
                    double mu = tf.n / hk - gt.freq;
                    acc += base * gt.coeff * expi(mu * y_lo) * phase_integral(mu, y_hi - y_lo);
                }
            }
        }
        out[jt] = acc;
    }
}

/// Chunked, order-deterministic row production.  consume(i, row) runs serially
/// in sample order.
template <class Consume>
void correlation_rows(const ZipperedRectangles& s, const CellwiseObservable& f,
                      const CellwiseObservable& g, const std::vector<double>& t_grid,
                      long n_samples, std::uint64_t seed, long max_crossings, Exec exec,
                      int threads, Consume&& consume) {
    if (!std::is_sorted(t_grid.begin(), t_grid.end()))
        throw ConfigInvalid("time grid must be ascending");
    const long chunk = 32;
    std::vector<std::vector<cplx>> rows(chunk, std::vector<cplx>(t_grid.size()));
    for (long lo = 0; lo < n_samples; lo += chunk) {
        const long hi = std::min(n_samples, lo + chunk);
        par_for(exec, threads, hi - lo, [&](std::ptrdiff_t k) {
            const long i = lo + k;
            Rng base(seed, kStreamCorr + static_cast<std::uint64_t>(i));
            long budget = max_crossings;
            for (int attempt = 0;; ++attempt) {
                if (attempt >= 64) throw QuadratureBudgetExceeded("all start points singular");
                try {
                    double u0 = base.split(attempt).uniform() * s.iet().total_length();
                    fiber_row(s, f, g, u0, t_grid, rows[k].data(), &budget);
                    break;
                } catch (const SingularityHit&) {
                    continue;
                }
            }
        });
        for (long i = lo; i < hi; ++i) consume(i, rows[i - lo]);
    }
}

}  // namespace

CorrelationMoments correlation_samples(const ZipperedRectangles& s, const CellwiseObservable& f,
                                       const CellwiseObservable& g,
                                       const std::vector<double>& t_grid, long n_samples,
                                       std::uint64_t seed, Exec exec, int threads) {
    const size_t nt = t_grid.size();
    std::vector<cplx> sum(nt, cplx(0, 0));
    std::vector<double> sumsq(nt, 0.0);
    const long per_row_budget = 1L << 33;
    correlation_rows(s, f, g, t_grid, n_samples, seed, per_row_budget, exec, threads,
                     [&](long, const std::vector<cplx>& row) {
                         for (size_t j = 0; j < nt; ++j) {
                             sum[j] += row[j];
                             sumsq[j] += std::norm(row[j]);
                         }
                     });
    CorrelationMoments m;
    m.n_samples = n_samples;
    m.mean.resize(nt);
    m.var_of_mean.resize(nt);
    for (size_t j = 0; j < nt; ++j) {
        m.mean[j] = sum[j] / static_cast<double>(n_samples);
        double centered = std::max(0.0, sumsq[j] - n_samples * std::norm(m.mean[j]));
        m.var_of_mean[j] =
            n_samples > 1 ? centered / (static_cast<double>(n_samples) * (n_samples - 1)) : 0.0;
    }
    return m;
}

DecayCurve correlation_decay(const ZipperedRectangles& s, const CellwiseObservable& f,
                             const CellwiseObservable& g, const std::vector<double>& T_grid,
                             const CorrelationQuadrature& quad, std::uint64_t seed, Exec exec,
                             int threads) {
    NormReport nf = sobolev1_proxy(f, s), ng = sobolev1_proxy(g, s);
    if (std::abs(mean(f, s)) > 1e-9 * std::max(1.0, nf.l2_norm))
        throw ConfigInvalid("correlation_decay requires a zero-mean f");
    if (!std::is_sorted(T_grid.begin(), T_grid.end()) || T_grid.empty())
        throw ConfigInvalid("T grid must be ascending and nonempty");

    // stratified midpoint t-panel per grid T
    std::vector<double> ts;
    std::vector<std::vector<size_t>> panel(T_grid.size());
    std::vector<std::pair<double, size_t>> tagged;
    for (size_t k = 0; k < T_grid.size(); ++k)
        for (int j = 0; j < quad.time_samples_per_T; ++j)
            tagged.push_back({(j + 0.5) * T_grid[k] / quad.time_samples_per_T, k});
    std::sort(tagged.begin(), tagged.end());
    ts.reserve(tagged.size());
    for (size_t i = 0; i < tagged.size(); ++i) {
        ts.push_back(tagged[i].first);
        panel[tagged[i].second].push_back(i);
    }

    const double t_max = ts.empty() ? 0.0 : ts.back();
    const double min_h = s.min_height();
    double est_cross = quad.n_base_samples * (t_max / min_h + 2.0);
    if (est_cross > static_cast<double>(quad.max_fiber_evals))
        throw QuadratureBudgetExceeded("estimated crossing count exceeds the budget");

    CorrelationMoments m =
        correlation_samples(s, f, g, ts, quad.n_base_samples, seed, exec, threads);

    DecayCurve curve;
    curve.T_grid = T_grid;
    curve.values.resize(T_grid.size());
    curve.inner_product_sq = std::norm(inner_product(f, g, s));
    const double floor = 1e-12 * std::pow(nf.l2_norm * ng.l2_norm, 2) + 1e-300;
    std::vector<double> lx, ly;
    for (size_t k = 0; k < T_grid.size(); ++k) {
        double acc = 0.0;
        for (size_t idx : panel[k]) acc += std::norm(m.mean[idx]) - m.var_of_mean[idx];
        curve.values[k] = acc / panel[k].size();
        lx.push_back(std::log(T_grid[k]));
        ly.push_back(std::log(std::max(curve.values[k], floor)));
    }
    if (lx.size() >= 2) {
        LineFit fit = linear_fit(lx, ly);
        curve.exponent = fit.slope;
        curve.exponent_se = fit.se_slope;
        curve.r_squared = fit.r_squared;
    }
    return curve;
}

// ---------------------------------------------------------------------------
// Fejer-window spectral oracle
// ---------------------------------------------------------------------------

std::vector<WindowMassLower> autocorrelation_mass_lower(
    const ZipperedRectangles& s, const CellwiseObservable& f,
    const std::vector<SpectralWindow>& windows, double dt, double L_max, long n_samples,
    std::uint64_t seed, Exec exec, int threads) {
    if (!(dt > 0) || !(L_max > dt)) throw ConfigInvalid("need 0 < dt < L_max");
    const size_t nt = static_cast<size_t>(std::floor(L_max / dt)) + 1;
    std::vector<double> ts(nt);
    for (size_t j = 0; j < nt; ++j) ts[j] = j * dt;

    // distinct frequencies; windows reference them by index
    std::vector<double> lambdas;
    std::vector<std::pair<size_t, size_t>> wkey(windows.size());  // (lambda idx, cutoff J)
    for (size_t w = 0; w < windows.size(); ++w) {
        double lam = windows[w].lambda;
        size_t il = 0;
        for (; il < lambdas.size(); ++il)
            if (lambdas[il] == lam) break;
        if (il == lambdas.size()) lambdas.push_back(lam);
        double L = std::min(L_max, 8.0 / windows[w].r);
        size_t J = std::min(nt - 1, static_cast<size_t>(std::floor(L / dt)));
        if (J < 2) throw ConfigInvalid("window radius too large for the grid");
        wkey[w] = {il, J};
    }

    // per-sample window functionals E_i, then mean/stderr across samples
    std::vector<std::vector<double>> ew(windows.size(), std::vector<double>(n_samples, 0.0));
    std::vector<double> A(nt), B(nt);
    const long per_row_budget = 1L << 33;
    correlation_rows(
        s, f, f, ts, n_samples, seed, per_row_budget, exec, threads,
        [&](long i, const std::vector<cplx>& row) {
            for (size_t il = 0; il < lambdas.size(); ++il) {
                double a0 = row[0].real();
                A[0] = 0.0;
                B[0] = 0.0;
                for (size_t j = 1; j < nt; ++j) {
                    double aj = 2.0 * (expi(-lambdas[il] * ts[j]) * row[j]).real();
                    A[j] = A[j - 1] + aj;
                    B[j] = B[j - 1] + ts[j] * aj;
                }
                for (size_t w = 0; w < windows.size(); ++w) {
                    if (wkey[w].first != il) continue;
                    size_t J = wkey[w].second;
                    double L = ts[J];
                    ew[w][i] = dt * (a0 + A[J] - B[J] / L);
                }
            }
        });

    const double f_l2_sq = std::pow(sobolev1_proxy(f, s).l2_norm, 2);
    std::vector<WindowMassLower> out(windows.size());
    for (size_t w = 0; w < windows.size(); ++w) {
        MeanEstimate e = mean_estimate(ew[w]);
        double L = ts[wkey[w].second];
        WindowMassLower wm;
        wm.smoothed = e.value / L;
        wm.tail = f_l2_sq / (M_PI * M_PI * L * windows[w].r * windows[w].r);
        wm.value = std::max(0.0, (e.value - wm.tail) / L);
        wm.se = e.stderr_ / L;
        out[w] = wm;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Sandwich check: both directions of the growth/mass correspondence
// ---------------------------------------------------------------------------

SandwichReport sandwich_check(const ZipperedRectangles& s, const CellwiseObservable& f,
                              double lambda, const std::vector<double>& r_grid,
                              const std::vector<double>& T_grid, long n_samples,
                              std::uint64_t seed, Exec exec, int threads) {
    if (T_grid.size() < 4 || r_grid.size() < 4)
        throw ConfigInvalid("sandwich_check needs >= 4 grid points on each side");
    SandwichReport rep;
    rep.T_grid = T_grid;

    auto sq = l2_sq_sweep(s, f, lambda, T_grid, n_samples, seed, exec, threads);
    rep.l2_rms.resize(T_grid.size());
    std::vector<double> rms_se(T_grid.size());
    for (size_t k = 0; k < T_grid.size(); ++k) {
        rep.l2_rms[k] = std::sqrt(std::max(sq[k].value, 0.0));
        rms_se[k] = rep.l2_rms[k] > 0 ? sq[k].stderr_ / (2 * rep.l2_rms[k]) : 0.0;
    }

    rep.mass_points.resize(r_grid.size());
    par_for(exec, threads, static_cast<std::ptrdiff_t>(r_grid.size()), [&](std::ptrdiff_t k) {
        rep.mass_points[k] = spectral_mass_upper(
            s, f, lambda, r_grid[k], n_samples, seed + 104729 * static_cast<std::uint64_t>(k),
            Exec::serial, 0);
    });

    const double slack = 1.25;

    // growth envelope fit -> alpha_minus
    {
        std::vector<double> lx, ly;
        auto env = running_max(rep.l2_rms);
        for (size_t k = 0; k < T_grid.size(); ++k) {
            lx.push_back(std::log(T_grid[k]));
            ly.push_back(std::log(std::max(env[k], 1e-300)));
        }
        LineFit fit = linear_fit(lx, ly);
        rep.alpha_minus = std::clamp(1.0 - fit.slope, 0.0, 1.0);
    }
    double c_env = 0.0;
    for (size_t k = 0; k < T_grid.size(); ++k)
        c_env = std::max(c_env, rep.l2_rms[k] / std::pow(T_grid[k], 1.0 - rep.alpha_minus));

    // (i) measured growth must dominate the measured mass via the constant 8
    for (const auto& p : rep.mass_points) {
        double predicted =
            8.0 * p.r * p.r * std::pow(c_env * std::pow(p.T_used, 1.0 - rep.alpha_minus), 2.0);
        double bound = predicted * slack + 3.0 * p.stderr_;
        if (p.mass_upper > bound)
            rep.growth_to_mass.push_back(SandwichViolation{p.r, p.mass_upper, bound});
    }

    // mass fit -> beta_minus; (ii) growth within the max{T^{1-beta}, sqrt(log T)} envelope
    {
        std::vector<double> lx, ly;
        for (const auto& p : rep.mass_points) {
            lx.push_back(std::log(p.r));
            ly.push_back(std::log(std::max(p.mass_upper, 1e-300)));
        }
        LineFit fit = linear_fit(lx, ly);
        rep.beta_minus = std::clamp(fit.slope / 2.0, 0.0, 1.0);
    }
    {
        auto envelope = [&](double T) {
            return std::max(std::pow(T, 1.0 - rep.beta_minus), std::sqrt(std::max(std::log(T), 1.0)));
        };
        double c2 = 0.0;
        for (size_t k = 0; k < T_grid.size() / 2; ++k)
            c2 = std::max(c2, rep.l2_rms[k] / envelope(T_grid[k]));
        if (c2 == 0.0) c2 = 1.0;
        for (size_t k = 0; k < T_grid.size(); ++k) {
            double bound = c2 * envelope(T_grid[k]) * 1.5 + 3.0 * rms_se[k];
            if (rep.l2_rms[k] > bound)
                rep.mass_to_growth.push_back(SandwichViolation{T_grid[k], rep.l2_rms[k], bound});
        }
    }

    // conditional lower direction (reported, never failed): raw growth fit ->
    // alpha_plus, mass should not collapse below r^{2 alpha_plus/(1-alpha_plus)}
    {
        std::vector<double> lx, ly;
        for (size_t k = 0; k < T_grid.size(); ++k) {
            lx.push_back(std::log(T_grid[k]));
            ly.push_back(std::log(std::max(rep.l2_rms[k], 1e-300)));
        }
        LineFit fit = linear_fit(lx, ly);
        rep.alpha_plus = std::clamp(1.0 - fit.slope, 0.0, 0.95);
        double expo = 2.0 * rep.alpha_plus / (1.0 - rep.alpha_plus);
        double c_low = HUGE_VAL;
        size_t half = rep.mass_points.size() / 2;
        for (size_t k = 0; k < half; ++k)
            c_low = std::min(c_low, rep.mass_points[k].mass_upper /
                                        std::pow(rep.mass_points[k].r, expo));
        for (size_t k = half; k < rep.mass_points.size(); ++k) {
            const auto& p = rep.mass_points[k];
            double bound = c_low * std::pow(p.r, expo) / 1.5 - 3.0 * p.stderr_;
            if (p.mass_upper < bound)
                rep.conditional_lower.push_back(SandwichViolation{p.r, p.mass_upper, bound});
        }
    }
    return rep;
}

}  // namespace flowlab
