// Acceptance suite: one pass/fail line per criterion, nonzero exit count on
// failure.  Tolerances and runtime limits are pinned in code.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "flowlab/cocycle.hpp"
#include "flowlab/errors.hpp"
#include "flowlab/expcli.hpp"
#include "flowlab/rng.hpp"
#include "flowlab/spectral.hpp"
#include "flowlab/twisted.hpp"

using namespace flowlab;

namespace {

int g_failures = 0;

struct Outcome {
    bool pass;
    std::string detail;
};

double now() {
    return std::chrono::duration<double>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

void report(int id, const std::string& name, const Outcome& o, double seconds,
            double limit_seconds) {
    bool pass = o.pass && (limit_seconds <= 0 || seconds < limit_seconds);
    std::printf("%s  criterion %2d  %-34s  %6.1fs  %s\n", pass ? "PASS" : "FAIL", id,
                name.c_str(), seconds, o.detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

template <class Fn>
void run(int id, const std::string& name, double limit_seconds, Fn&& fn) {
    double t0 = now();
    Outcome o{false, ""};
    try {
        o = fn();
    } catch (const std::exception& e) {
        o = Outcome{false, std::string("exception: ") + e.what()};
    }
    report(id, name, o, now() - t0, limit_seconds);
}

ZipperedRectangles square_torus() {
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    return ZipperedRectangles(Iet(Permutation::symmetric(2), {1.0 - g, g}),
                              SuspensionDatum{{1.0, -1.0}});
}

SurfacePoint interior_point(const ZipperedRectangles& s, Rng& rng) {
    for (;;) {
        SurfacePoint pt = s.base_point(rng.uniform() * 0.998 + 0.001);
        double margin = 1e-7 * s.lengths()[pt.rectangle];
        if (pt.x > margin && pt.x < s.lengths()[pt.rectangle] - margin) {
            pt.y = rng.uniform() * s.heights()[pt.rectangle];
            return pt;
        }
    }
}

std::vector<double> geometric_grid(double lo, double hi, int n) {
    std::vector<double> g(n);
    for (int i = 0; i < n; ++i)
        g[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1));
    return g;
}

// --------------------------------------------------------------------------
// 1. renormalized twisted sums equal the direct integrator
// --------------------------------------------------------------------------
Outcome criterion1() {
    double worst = 0.0;
    int done = 0;
    for (int stratum = 0; stratum < 2; ++stratum) {
        const Permutation p = Permutation::symmetric(stratum == 0 ? 4 : 5);
        std::vector<double> errs(50, 0.0);
        par_for(Exec::openmp, 0, 50, [&](std::ptrdiff_t i) {
            Rng rng(9000 + stratum, i);
            for (int attempt = 0;; ++attempt) {
                ZipperedRectangles s =
                    random_surface(p, 1000 + 100 * stratum + i + 7777 * attempt);
                CellwiseObservable f =
                    CellwiseObservable::random_zero_mean_cells(s, 2000 + i);
                Rng draw = rng.split(attempt);
                double lambda = draw.uniform(0.25, 4.0);
                double T = draw.uniform(50.0, 10000.0);  // ~T crossings at unit area
                SurfacePoint x0 = interior_point(s, draw);
                try {
                    TwistedTrace fast = twisted_sum_renormalized(s, f, lambda, x0, T);
                    TwistedTrace slow = twisted_integral_direct(s, f, lambda, x0, T);
                    errs[i] = std::abs(fast.value - slow.value) / (1.0 + std::abs(slow.value));
                    return;
                } catch (const SingularityHit&) {
                    if (attempt > 16) throw;
                }
            }
        });
        for (double e : errs) {
            worst = std::max(worst, e);
            ++done;
        }
    }
    char buf[128];
    std::snprintf(buf, sizeof buf, "%d instances, worst relative error %.2e", done, worst);
    return Outcome{done == 100 && worst <= 1e-9, buf};
}

// --------------------------------------------------------------------------
// 2. torus dichotomy in closed forms
// --------------------------------------------------------------------------
Outcome criterion2() {
    ZipperedRectangles s = square_torus();
    auto f = CellwiseObservable::torus_eigenfunction(s, 1, 0);
    const double lam = torus_eigenvalue(s, 1, 0);
    Rng rng(42, 0);
    SurfacePoint x0 = interior_point(s, rng);
    auto grid = geometric_grid(10.0, 1e4, 16);

    ExponentFit res = sweep_and_fit(s, f, -lam, x0, grid, true);
    ExponentFit off = sweep_and_fit(s, f, -lam + 0.25, x0, grid, true);

    auto r_grid = geometric_grid(0.004, 0.4, 8);
    std::reverse(r_grid.begin(), r_grid.end());
    LocalDimension dim = local_dimension(s, f, lam, r_grid, 200, 43);

    CorrelationQuadrature quad;
    quad.n_base_samples = 128;
    quad.time_samples_per_T = 64;
    DecayCurve curve = correlation_decay(s, f, f, geometric_grid(2.0, 2000.0, 8), quad, 44);

    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "resonant %.3f, off-resonant %.3f, local dim %.3f, decay %.4f",
                  res.exponent, off.exponent, dim.dimension, curve.exponent);
    bool pass = std::abs(res.exponent - 1.0) <= 0.03 && off.exponent <= 0.05 &&
                dim.dimension <= 0.05 && curve.exponent >= -0.02;
    return Outcome{pass, buf};
}

// --------------------------------------------------------------------------
// 3. Kontsevich-Zorich spectrum cross-check
// --------------------------------------------------------------------------
Outcome criterion3() {
    auto h2 = kz_exponents(Permutation::symmetric(4), 100, 5000, 2, 31, Exec::openmp);
    auto h11 = kz_exponents(Permutation::symmetric(5), 100, 5000, 2, 37, Exec::openmp);
    char buf[200];
    std::snprintf(buf, sizeof buf,
                  "H(2): %.4f+-%.4f, %.4f+-%.4f; H(1,1): %.4f+-%.4f, %.4f+-%.4f",
                  h2[0].value, h2[0].stderr_, h2[1].value, h2[1].stderr_, h11[0].value,
                  h11[0].stderr_, h11[1].value, h11[1].stderr_);
    bool pass = std::abs(h2[0].value - 1.0) <= 0.01 && std::abs(h11[0].value - 1.0) <= 0.01 &&
                std::abs(h2[1].value - 1.0 / 3.0) <= 0.02 &&
                std::abs(h11[1].value - 0.5) <= 0.02;
    return Outcome{pass, buf};
}

// --------------------------------------------------------------------------
// 4. power saving of twisted integrals in H(2)
// --------------------------------------------------------------------------
Outcome criterion4() {
    const Permutation p = Permutation::symmetric(4);
    const std::vector<double> lambdas = {0.5, 1.0, 2.0};
    auto grid = geometric_grid(1e2, 1e6, 16);
    std::vector<double> worst_exponent(20, 0.0);
    par_for(Exec::openmp, 0, 20, [&](std::ptrdiff_t i) {
        ZipperedRectangles s = random_surface(p, 100 + i);
        CellwiseObservable f = CellwiseObservable::random_zero_mean_cells(s, 300 + i);
        Rng rng(48, i);
        for (int attempt = 0;; ++attempt) {
            try {
                Rng draw = rng.split(attempt);
                SurfacePoint x0 = interior_point(s, draw);
                double w = -1.0;
                for (double lambda : lambdas)
                    w = std::max(w, sweep_and_fit(s, f, lambda, x0, grid, true).exponent);
                worst_exponent[i] = w;
                return;
            } catch (const SingularityHit&) {
                if (attempt > 16) throw;
            }
        }
    });
    int good = 0;
    double worst = -1;
    for (double w : worst_exponent) {
        if (w <= 0.95) ++good;
        worst = std::max(worst, w);
    }
    char buf[128];
    std::snprintf(buf, sizeof buf, "%d/20 surfaces with exponent <= 0.95 (worst %.3f)", good,
                  worst);
    return Outcome{good >= 18, buf};
}

// --------------------------------------------------------------------------
// 5. spectral gap of the twisted cocycle
// --------------------------------------------------------------------------
Outcome criterion5() {
    ZipperedRectangles s = random_surface(Permutation::symmetric(4), 7);
    std::vector<double> grid = geometric_grid(0.25, 4.0, 16);
    grid.insert(grid.begin(), 0.0);
    auto est = gap_sweep(s.permutation(), s.lengths(), grid, 10000, s.heights(), Exec::openmp);
    double alpha0 = est[0].alpha_hat;
    double min_alpha = HUGE_VAL;
    for (size_t i = 1; i < est.size(); ++i) min_alpha = std::min(min_alpha, est[i].alpha_hat);
    char buf[128];
    std::snprintf(buf, sizeof buf, "alpha_hat(0) = %.4f, min over [0.25,4] = %.4f", alpha0,
                  min_alpha);
    return Outcome{alpha0 <= 0.01 && min_alpha >= 0.02, buf};
}

// --------------------------------------------------------------------------
// 6. orbit-decomposition invariants and trace reconstruction
// --------------------------------------------------------------------------
Outcome criterion6() {
    ZipperedRectangles s = random_surface(Permutation::symmetric(4), 11);
    CellwiseObservable f = CellwiseObservable::random_zero_mean_cells(s, 12);
    Rng rng(13, 0);
    int bad_invariant = 0, bad_reconstruction = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        int n = 2 + static_cast<int>(rng.next_u64() % 6);
        std::vector<double> times(n);
        double t = rng.uniform(0.0, 0.5);
        for (int i = 0; i < n; ++i) {
            times[i] = t;
            t += rng.uniform(0.2, 1.2);
        }
        double T = rng.uniform(1.2, std::exp(times[n - 1]) * 3.0);
        ChopDecomposition chop = chop_decompose(T, times);

        for (int l = 0; l + 1 < n; ++l)
            if (static_cast<double>(chop.counts[l]) >
                std::exp(times[l + 1] - times[l]) * (1 + 1e-12))
                ++bad_invariant;
        if (chop.remainder > std::exp(times[0]) * (1 + 1e-12) || chop.remainder < 0)
            ++bad_invariant;
        double R = T;
        for (int l = n - 1; l >= 0; --l)
            R -= static_cast<double>(chop.counts[l]) * chop.scales[l];
        if (R != chop.remainder) ++bad_invariant;

        double lambda = rng.uniform(0.2, 2.5);
        try {
            SurfacePoint x0 = interior_point(s, rng);
            cplx total(0, 0);
            for (const auto& seg : chop.segments) {
                SurfacePoint start = flow(s, x0, seg.start);
                total += expi(lambda * seg.start) *
                         twisted_integral_direct(s, f, lambda, start, seg.duration).value;
            }
            cplx whole = twisted_integral_direct(s, f, lambda, x0, T).value;
            if (std::abs(total - whole) > 1e-10 * (1.0 + std::abs(whole)))
                ++bad_reconstruction;
        } catch (const SingularityHit&) {
            continue;
        }
    }
    char buf[128];
    std::snprintf(buf, sizeof buf, "1000 instances, %d invariant / %d reconstruction failures",
                  bad_invariant, bad_reconstruction);
    return Outcome{bad_invariant == 0 && bad_reconstruction == 0, buf};
}

// --------------------------------------------------------------------------
// 7. the spectral mass constant 8 dominates the autocorrelation oracle
// --------------------------------------------------------------------------
Outcome criterion7() {
    int violations = 0, windows_total = 0;
    for (int which = 0; which < 2; ++which) {
        ZipperedRectangles s =
            which == 0 ? square_torus() : random_surface(Permutation::symmetric(4), 21);
        CellwiseObservable f =
            which == 0 ? CellwiseObservable::torus_eigenfunction(s, 1, 0)
                       : CellwiseObservable::random_zero_mean_cells(s, 22);
        std::vector<SpectralWindow> windows;
        auto lams = geometric_grid(0.05, 1.55, 25);
        auto rads = geometric_grid(0.02, 0.25, 20);
        for (double l : lams)
            for (double r : rads) windows.push_back(SpectralWindow{l, r});
        auto lowers =
            autocorrelation_mass_lower(s, f, windows, 0.02, 400.0, 160, 23, Exec::openmp);
        std::vector<SpectralEstimate> uppers(windows.size());
        par_for(Exec::openmp, 0, static_cast<std::ptrdiff_t>(windows.size()),
                [&](std::ptrdiff_t w) {
                    uppers[w] = spectral_mass_upper(s, f, windows[w].lambda, windows[w].r, 160,
                                                    24 + static_cast<std::uint64_t>(w));
                });
        for (size_t w = 0; w < windows.size(); ++w) {
            ++windows_total;
            if (uppers[w].mass_upper <
                lowers[w].value - 3.0 * (lowers[w].se + uppers[w].stderr_))
                ++violations;
        }
    }
    char buf[128];
    std::snprintf(buf, sizeof buf, "%d windows, %d violations of the constant-8 bound",
                  windows_total, violations);
    return Outcome{windows_total == 1000 && violations == 0, buf};
}

// --------------------------------------------------------------------------
// 8. product-flow Fourier reduction vs brute-force quadrature
// --------------------------------------------------------------------------
Outcome criterion8() {
    const Permutation p = Permutation::symmetric(4);
    std::vector<double> errs(10, HUGE_VAL);
    par_for(Exec::openmp, 0, 10, [&](std::ptrdiff_t i) {
        ZipperedRectangles s = random_surface(p, 60 + i);
        auto f1 = CellwiseObservable::random_zero_mean_harmonics(s, 70 + i, 1, 1);
        auto f2 = CellwiseObservable::random_zero_mean_harmonics(s, 80 + i, 1, 1);
        Rng rng(90, i);
        const double lambda = rng.uniform(0.3, 1.2);
        const double theta = rng.uniform(0.0, 1.0);
        const double T = 10.0, dt = 1e-4;
        for (int attempt = 0;; ++attempt) {
            try {
                Rng draw = rng.split(attempt);
                SurfacePoint x0 = interior_point(s, draw);
                std::vector<std::pair<long, CellwiseObservable>> modes{{1L, f1}, {2L, f2}};
                cplx fast = product_flow_integral(s, modes, lambda, x0, theta, T);
                cplx slow(0, 0);
                SurfacePoint cur = x0;
                double t = 0;
                for (long k = 0; k < static_cast<long>(T / dt); ++k) {
                    SurfacePoint mid = flow(s, cur, dt / 2);
                    double th = theta + lambda * (t + dt / 2);
                    slow += (f1.eval(s, mid) * expi(th) + f2.eval(s, mid) * expi(2 * th)) * dt;
                    cur = flow(s, cur, dt);
                    t += dt;
                }
                errs[i] = std::abs(fast - slow);
                return;
            } catch (const SingularityHit&) {
                if (attempt > 16) throw;
            }
        }
    });
    double worst = 0;
    for (double e : errs) worst = std::max(worst, e);
    char buf[96];
    std::snprintf(buf, sizeof buf, "10 instances, worst absolute error %.2e", worst);
    return Outcome{worst <= 1e-3, buf};
}

// --------------------------------------------------------------------------
// 9. effective weak mixing in H(2), no decay on the torus
// --------------------------------------------------------------------------
Outcome criterion9() {
    auto grid = geometric_grid(1e2, 1e5, 10);
    CorrelationQuadrature quad;
    quad.n_base_samples = 256;
    quad.time_samples_per_T = 512;
    quad.max_fiber_evals = 1L << 37;

    int negative = 0;
    double worst_upper = -HUGE_VAL;
    std::vector<DecayCurve> curves(10);
    par_for(Exec::openmp, 0, 10, [&](std::ptrdiff_t i) {
        ZipperedRectangles s = random_surface(Permutation::symmetric(4), 500 + i);
        auto f = CellwiseObservable::random_zero_mean_cells(s, 600 + i);
        auto g = CellwiseObservable::random_zero_mean_cells(s, 700 + i);
        curves[i] = correlation_decay(s, f, g, grid, quad, 800 + i);
    });
    for (const auto& c : curves) {
        double upper = c.exponent + 1.645 * c.exponent_se;  // one-sided 95%
        if (upper < 0.0) ++negative;
        worst_upper = std::max(worst_upper, upper);
    }

    ZipperedRectangles torus = square_torus();
    auto e1 = CellwiseObservable::torus_eigenfunction(torus, 1, 0);
    CorrelationQuadrature tq;
    tq.n_base_samples = 64;
    tq.time_samples_per_T = 64;
    DecayCurve control = correlation_decay(torus, e1, e1, geometric_grid(1e2, 1e5, 8), tq, 55);

    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "%d/10 surfaces decay at 95%% (worst CI edge %.4f); torus control %.4f",
                  negative, worst_upper, control.exponent);
    return Outcome{negative == 10 && control.exponent >= -0.02, buf};
}

// --------------------------------------------------------------------------
// 10. byte-identical reruns at any thread count
// --------------------------------------------------------------------------
Outcome criterion10() {
    namespace fs = std::filesystem;
    const char* kinds[] = {"stratum-info", "twisted-sweep", "kz-exponents",
                           "gap-sweep",    "spectral",      "weakmix"};
    int mismatches = 0;
    for (const char* kind : kinds) {
        ExperimentConfig cfg;
        cfg.kind = kind;
        cfg.seed = 99;
        cfg.surfaces = 2;
        cfg.samples = 120;
        cfg.time_samples = 32;
        cfg.zorich_steps = 300;
        cfg.paths = 8;
        cfg.lambda_grid = {0.5, 1.5};
        cfg.T_grid = geometric_grid(4.0, 512.0, 8);
        cfg.r_grid = {0.4, 0.2, 0.1, 0.05};
        for (int threads : {1, 2, 3}) {
            cfg.threads = threads;
            cfg.out_dir = std::string("/tmp/flowlab_acc_") + kind + "_" +
                          std::to_string(threads);
            fs::remove_all(cfg.out_dir);
            RunManifest m = run_experiment(cfg);
            if (!m.all_ok) ++mismatches;
        }
        for (const auto& entry :
             fs::directory_iterator(std::string("/tmp/flowlab_acc_") + kind + "_1")) {
            std::string name = entry.path().filename().string();
            if (name == "manifest.json") continue;  // carries wall time
            std::string a = read_file(entry.path().string());
            for (int threads : {2, 3}) {
                std::string other = std::string("/tmp/flowlab_acc_") + kind + "_" +
                                    std::to_string(threads) + "/" + name;
                if (read_file(other) != a) ++mismatches;
            }
        }
    }
    char buf[96];
    std::snprintf(buf, sizeof buf, "6 kinds x 3 thread counts, %d mismatches", mismatches);
    return Outcome{mismatches == 0, buf};
}

}  // namespace

int main() {
    std::printf("flowlab acceptance suite\n");
    run(1, "renormalized = direct oracle", 60, criterion1);
    run(2, "torus dichotomy closed forms", 30, criterion2);
    run(3, "KZ spectrum cross-check", 300, criterion3);
    run(4, "power saving in H(2)", 600, criterion4);
    run(5, "twisted-cocycle spectral gap", 300, criterion5);
    run(6, "orbit decomposition", 0, criterion6);
    run(7, "spectral mass constant 8", 0, criterion7);
    run(8, "product-flow reduction", 0, criterion8);
    run(9, "effective weak mixing", 600, criterion9);
    run(10, "deterministic reruns", 0, criterion10);
    std::printf("%s: %d criterion failure(s)\n", g_failures ? "FAILURE" : "SUCCESS",
                g_failures);
    return g_failures;
}
