#include "flowlab/twisted.hpp"

#include <algorithm>
#include <cmath>

#include "flowlab/errors.hpp"

namespace flowlab {

namespace {

void check_finite(double lambda, const SurfacePoint& x0, double T) {
    if (!std::isfinite(lambda) || !std::isfinite(T) || T < 0.0 || !std::isfinite(x0.x) ||
        !std::isfinite(x0.y))
        throw NonFiniteInput();
}

/// Kahan-compensated accumulator for elapsed orbit time: at 1e4 crossings the
/// naive running sum drifts enough to move e^{2 pi i lambda s} past the 1e-9
/// agreement the two evaluation routes must keep.
struct TimeAccumulator {
    double sum = 0.0;
    double comp = 0.0;
    void add(double x) {
        double y = x - comp;
        double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
};

/// Contribution of a vertical run of length delta inside rectangle a, starting
/// at local (x, y) and global time spos.
cplx cell_run(const ZipperedRectangles& s, const CellwiseObservable& f, double lambda, int a,
              double x, double y, double delta, double spos) {
    const double len = s.lengths()[a], h = s.heights()[a];
    cplx acc(0.0, 0.0);
    for (const auto& t : f.terms(a)) {
        cplx front = t.c;
        if (t.m != 0.0 || t.n != 0.0) front *= expi(t.m * x / len + t.n * y / h);
        acc += front * phase_integral(lambda + t.n / h, delta);
    }
    return acc * expi(lambda * spos);
}

struct Walker {
    const ZipperedRectangles& s;
    SurfacePoint cur;
    TimeAccumulator clock;  // global time at cur

    double spos() const { return clock.sum; }

    /// Advance to the base point after the current rectangle; throws
    /// SingularityHit when the crossing lands within clearance of a corner.
    void cross() {
        const Iet& T = s.iet();
        double u = s.base_coordinate(cur);
        clock.add(s.heights()[cur.rectangle] - cur.y);
        double v;
        try {
            v = T.apply(u);
        } catch (const DiscontinuityHit&) {
            throw SingularityHit(spos());
        }
        int b = T.letter_at(v);
        double xloc = v - T.left_endpoint(b);
        double tol = kSingularClearance * T.total_length();
        if (xloc <= tol || T.lengths()[b] - xloc <= tol) throw SingularityHit(spos());
        cur = SurfacePoint{b, xloc, 0.0};
    }
};

}  // namespace

std::vector<TwistedTrace> sweep_trace(const ZipperedRectangles& s, const CellwiseObservable& f,
                                      double lambda, const SurfacePoint& x0,
                                      const std::vector<double>& T_grid) {
    check_finite(lambda, x0, T_grid.empty() ? 0.0 : T_grid.back());
    if (!std::is_sorted(T_grid.begin(), T_grid.end()))
        throw ConfigInvalid("T grid must be ascending");
    std::vector<TwistedTrace> out;
    out.reserve(T_grid.size());

    Walker w{s, x0, {}};
    cplx acc(0.0, 0.0);
    size_t next = 0;
    while (next < T_grid.size()) {
        const double to_top = s.heights()[w.cur.rectangle] - w.cur.y;
        // grid times inside the current rectangle crossing
        while (next < T_grid.size() && T_grid[next] <= w.spos() + to_top) {
            double delta = T_grid[next] - w.spos();
            cplx snap = acc + cell_run(s, f, lambda, w.cur.rectangle, w.cur.x, w.cur.y,
                                       std::max(0.0, delta), w.spos());
            out.push_back(TwistedTrace{snap, T_grid[next], lambda, x0, true});
            ++next;
        }
        if (next >= T_grid.size()) break;
        acc += cell_run(s, f, lambda, w.cur.rectangle, w.cur.x, w.cur.y, to_top, w.spos());
        w.cross();
    }
    return out;
}

TwistedTrace twisted_integral_direct(const ZipperedRectangles& s, const CellwiseObservable& f,
                                     double lambda, const SurfacePoint& x0, double T) {
    return sweep_trace(s, f, lambda, x0, {T}).front();
}

// ---------------------------------------------------------------------------
// Renormalized evaluation
// ---------------------------------------------------------------------------

namespace {

struct Level {
    Iet iet;                       // induced IET, original length units
    std::vector<double> fheights;  // flow return time of one tower per letter
    std::vector<cplx> v;           // twisted integral over one full tower
};

/// Apply one Rauzy move to (fheights, v): the loser's tower becomes the
/// concatenation of the two towers, in the order fixed by the move type.
void apply_move(const RauzyStep& mv, double lambda, std::vector<double>& fh,
                std::vector<cplx>& v) {
    const int w = mv.winner, l = mv.loser;
    if (mv.step_type == RauzyStep::Type::bottom) {
        // new loser tower: winner tower first, then loser tower
        v[l] = v[w] + expi(lambda * fh[w]) * v[l];
    } else {
        v[l] = v[l] + expi(lambda * fh[l]) * v[w];
    }
    fh[l] = fh[l] + fh[w];
}

std::vector<Level> build_levels(const ZipperedRectangles& s, const CellwiseObservable& f,
                                double lambda, double T) {
    std::vector<Level> levels;
    const int d = s.size();
    Level base{s.iet(), s.heights(), std::vector<cplx>(d)};
    for (int a = 0; a < d; ++a)
        base.v[a] = f.cell_value(a) * phase_integral(lambda, s.heights()[a]);
    levels.push_back(std::move(base));
    for (;;) {
        const Level& top = levels.back();
        if (*std::min_element(top.fheights.begin(), top.fheights.end()) > T) break;
        if (levels.size() > 4096) throw Error("renormalization depth overflow");
        ZorichStep z = zorich_step(top.iet);
        Level nxt{std::move(z.induced), top.fheights, top.v};
        for (const auto& mv : z.moves) apply_move(mv, lambda, nxt.fheights, nxt.v);
        levels.push_back(std::move(nxt));
    }
    return levels;
}

}  // namespace

TwistedTrace twisted_sum_renormalized(const ZipperedRectangles& s, const CellwiseObservable& f,
                                      double lambda, const SurfacePoint& x0, double T,
                                      RenormStats* stats) {
    check_finite(lambda, x0, T);
    if (!f.cellwise_constant())
        throw UnsupportedObservable("renormalized fast path needs cellwise-constant observables");

    TwistedTrace trace;
    trace.T = T;
    trace.lambda = lambda;
    trace.start = x0;

    cplx acc(0.0, 0.0);
    const double first_to_top = s.heights()[x0.rectangle] - x0.y;
    if (T <= first_to_top) {
        trace.value = f.cell_value(x0.rectangle) * phase_integral(lambda, T);
        return trace;
    }
    acc += f.cell_value(x0.rectangle) * phase_integral(lambda, first_to_top);
    Walker w{s, x0, {}};
    w.cross();
    TimeAccumulator clock = w.clock;
    double u = s.base_coordinate(w.cur);

    auto levels = build_levels(s, f, lambda, T);
    if (stats) {
        stats->levels = static_cast<int>(levels.size());
        stats->towers = 0;
    }

    for (;;) {
        const double remaining = T - clock.sum;
        // deepest level whose tower at u fits in the remaining time
        int best = -1, best_letter = -1;
        for (size_t k = 0; k < levels.size(); ++k) {
            if (u >= levels[k].iet.total_length()) break;
            int a = levels[k].iet.letter_at(u);
            if (levels[k].fheights[a] <= remaining) {
                best = static_cast<int>(k);
                best_letter = a;
            }
        }
        if (best < 0) {
            int a = s.iet().letter_at(u);
            acc += expi(lambda * clock.sum) * f.cell_value(a) * phase_integral(lambda, remaining);
            break;
        }
        acc += expi(lambda * clock.sum) * levels[best].v[best_letter];
        clock.add(levels[best].fheights[best_letter]);
        if (stats) ++stats->towers;
        try {
            u = levels[best].iet.apply(u);
        } catch (const DiscontinuityHit&) {
            throw SingularityHit(clock.sum);
        }
    }
    trace.value = acc;
    return trace;
}

// ---------------------------------------------------------------------------
// Orbit-segment decomposition at renormalization scales
// ---------------------------------------------------------------------------

ChopDecomposition chop_decompose(double T, const std::vector<double>& times) {
    if (times.empty()) throw EmptyTimes();
    if (!(T > 0.0) || !std::isfinite(T)) throw NonFiniteInput();
    if (!std::is_sorted(times.begin(), times.end()))
        throw ConfigInvalid("times must be nondecreasing");

    const int N = static_cast<int>(times.size());
    ChopDecomposition chop;
    chop.scales.resize(N);
    chop.counts.assign(N, 0);
    for (int i = 0; i < N; ++i) chop.scales[i] = std::exp(times[i]);

    int n = 0;  // largest 1-based index with scale <= T
    while (n < N && chop.scales[n] <= T) ++n;

    double R = T;
    for (int l = n; l >= 2; --l) {
        long long m = static_cast<long long>(std::floor(R / chop.scales[l - 1]));
        chop.counts[l - 1] = m;
        R -= static_cast<double>(m) * chop.scales[l - 1];
    }
    if (n >= 1 && R > chop.scales[0]) {
        // chop only the excess at the smallest scale: the remainder is allowed
        // up to e^{t_1} itself
        long long m = static_cast<long long>(std::ceil(R / chop.scales[0])) - 1;
        if (m < 0) m = 0;
        chop.counts[0] = m;
        R -= static_cast<double>(m) * chop.scales[0];
    }
    chop.remainder = R;

    double start = 0.0;
    for (int l = 1; l <= n; ++l)
        for (long long i = 0; i < chop.counts[l - 1]; ++i) {
            chop.segments.push_back(ChopSegment{start, chop.scales[l - 1], l});
            start += chop.scales[l - 1];
        }
    if (chop.remainder > 0.0)
        chop.segments.push_back(ChopSegment{start, chop.remainder, 0});
    return chop;
}

cplx product_flow_integral(const ZipperedRectangles& s,
                           const std::vector<std::pair<long, CellwiseObservable>>& modes,
                           double lambda, const SurfacePoint& x0, double theta, double T) {
    cplx acc(0.0, 0.0);
    for (const auto& [n, fn] : modes) {
        TwistedTrace tr =
            twisted_integral_direct(s, fn, static_cast<double>(n) * lambda, x0, T);
        acc += expi(static_cast<double>(n) * theta) * tr.value;
    }
    return acc;
}

ExponentFit fit_exponent(const std::vector<double>& T_grid,
                         const std::vector<double>& magnitudes, bool envelope) {
    if (T_grid.size() < 8) throw ConfigInvalid("geometric grid needs >= 8 points");
    if (T_grid.size() != magnitudes.size()) throw ConfigInvalid("grid/value size mismatch");
    double peak = 0.0;
    for (double m : magnitudes) peak = std::max(peak, m);
    if (peak < 1e-14) throw DegenerateData("all magnitudes below 1e-14");

    std::vector<double> ys = envelope ? running_max(magnitudes) : magnitudes;
    // values many orders below the peak are cancellation noise, not growth
    // information; they would dominate a log-log fit
    const double floor = 1e-12 * peak;
    std::vector<double> lx, ly;
    for (size_t i = 0; i < ys.size(); ++i) {
        if (ys[i] < floor) continue;
        lx.push_back(std::log(T_grid[i]));
        ly.push_back(std::log(ys[i]));
    }
    LineFit fit = linear_fit(lx, ly);
    ExponentFit out;
    out.exponent = fit.slope;
    out.intercept = fit.intercept;
    out.r_squared = fit.r_squared;
    out.se = fit.se_slope;
    out.T_grid = T_grid;
    return out;
}

ExponentFit sweep_and_fit(const ZipperedRectangles& s, const CellwiseObservable& f, double lambda,
                          const SurfacePoint& x0, const std::vector<double>& T_grid,
                          bool envelope) {
    auto traces = sweep_trace(s, f, lambda, x0, T_grid);
    std::vector<double> mags(traces.size());
    for (size_t i = 0; i < traces.size(); ++i) mags[i] = std::abs(traces[i].value);
    return fit_exponent(T_grid, mags, envelope);
}

}  // namespace flowlab
