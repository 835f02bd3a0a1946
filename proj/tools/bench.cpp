// Serial vs OpenMP benchmark for the batch kernels, with bitwise-equality
// checks between the two execution policies.

#include <chrono>
#include <cstdio>
#include <cstring>

#include "flowlab/cocycle.hpp"
#include "flowlab/spectral.hpp"
#include "flowlab/twisted.hpp"

using namespace flowlab;

namespace {

double now() {
    using clock = std::chrono::steady_clock;
    return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

template <class Fn>
double timed(Fn&& fn) {
    double t0 = now();
    fn();
    return now() - t0;
}

void report(const char* name, double serial, double parallel, bool identical) {
    std::printf("%-28s serial %8.3fs  openmp %8.3fs  speedup %5.2fx  identical %s\n", name,
                serial, parallel, serial / parallel, identical ? "yes" : "NO");
}

}  // namespace

int main() {
    const Permutation p = Permutation::symmetric(4);
    const ZipperedRectangles s = random_surface(p, 2024);
    const CellwiseObservable f = CellwiseObservable::random_zero_mean_cells(s, 7);

    std::printf("flowlab kernel benchmark (%d hardware threads)\n\n", hardware_threads());

    {
        MeanEstimate a, b;
        double ts = timed([&] { a = l2_twisted_sq(s, f, 1.0, 400.0, 4000, 11, Exec::serial); });
        double tp = timed([&] { b = l2_twisted_sq(s, f, 1.0, 400.0, 4000, 11, Exec::openmp); });
        report("l2_twisted_sq (4000 pts)", ts, tp,
               std::memcmp(&a.value, &b.value, sizeof a.value) == 0 &&
                   std::memcmp(&a.stderr_, &b.stderr_, sizeof a.stderr_) == 0);
    }
    {
        std::vector<double> grid;
        for (int i = 0; i < 33; ++i) grid.push_back(0.25 * std::pow(16.0, i / 32.0));
        std::vector<GapEstimate> a, b;
        double ts = timed(
            [&] { a = gap_sweep(p, s.lengths(), grid, 4000, s.heights(), Exec::serial); });
        double tp = timed(
            [&] { b = gap_sweep(p, s.lengths(), grid, 4000, s.heights(), Exec::openmp); });
        bool same = true;
        for (size_t i = 0; i < a.size(); ++i)
            same = same && a[i].alpha_hat == b[i].alpha_hat;
        report("gap_sweep (33 frequencies)", ts, tp, same);
    }
    {
        std::vector<ExponentEstimate> a, b;
        double ts = timed([&] { a = kz_exponents(p, 48, 4000, 2, 5, Exec::serial); });
        double tp = timed([&] { b = kz_exponents(p, 48, 4000, 2, 5, Exec::openmp); });
        bool same = true;
        for (size_t i = 0; i < a.size(); ++i) same = same && a[i].value == b[i].value;
        report("kz_exponents (48 paths)", ts, tp, same);
    }
    {
        std::vector<double> tg;
        for (int i = 0; i < 512; ++i) tg.push_back(0.5 * (i + 1));
        CorrelationMoments a, b;
        double ts = timed([&] { a = correlation_samples(s, f, f, tg, 256, 3, Exec::serial); });
        double tp = timed([&] { b = correlation_samples(s, f, f, tg, 256, 3, Exec::openmp); });
        bool same = true;
        for (size_t i = 0; i < a.mean.size(); ++i) same = same && a.mean[i] == b.mean[i];
        report("correlation_samples", ts, tp, same);
    }
    return 0;
}
