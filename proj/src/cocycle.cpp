#include "flowlab/cocycle.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "flowlab/errors.hpp"
#include "flowlab/fit.hpp"
#include "flowlab/permutation.hpp"
#include "flowlab/rng.hpp"

namespace flowlab {

namespace {

double frac(double x) { return x - std::floor(x); }

std::vector<double> dirichlet_lengths(Rng& rng, int d) {
    std::vector<double> l(d);
    double s = 0;
    for (int a = 0; a < d; ++a) {
        l[a] = rng.exponential();
        s += l[a];
    }
    for (double& v : l) v /= s;
    return l;
}

struct CompactMove {
    bool bottom;
    int winner, loser;
};

/// Zorich path as a flat move list with per-step boundaries and times.
struct MovePath {
    int d = 0;
    std::vector<CompactMove> moves;
    std::vector<size_t> step_end;  // index into moves after step k
    std::vector<double> t_after;   // Teichmueller time after step k
};

MovePath record_path(const Permutation& p, const std::vector<double>& lengths, int n_zorich) {
    MovePath path;
    path.d = p.size();
    InductionWalker walker(p, lengths);
    for (int k = 0; k < n_zorich; ++k) {
        walker.zorich([&](bool bottom, int w, int l) {
            path.moves.push_back(CompactMove{bottom, w, l});
        });
        path.step_end.push_back(path.moves.size());
        path.t_after.push_back(walker.teich_time());
    }
    return path;
}

}  // namespace

CocyclePath build_path(const Permutation& p, const std::vector<double>& lengths, int n_zorich,
                       std::vector<double> heights0) {
    const int d = p.size();
    if (heights0.empty()) heights0.assign(d, 1.0);
    if (heights0.size() != static_cast<size_t>(d))
        throw ConfigInvalid("heights size does not match alphabet");
    CocyclePath path{p, lengths, heights0, {}};

    Iet cur = Iet(p, lengths).normalized();
    std::vector<double> h = heights0;
    double log_scale = 0.0;
    double t = 0.0;
    for (int k = 0; k < n_zorich; ++k) {
        ZorichStep z = zorich_step(cur);
        for (const auto& mv : z.moves) h[mv.loser] += h[mv.winner];
        double hmax = *std::max_element(h.begin(), h.end());
        if (hmax > 1e100) {
            for (double& v : h) v /= hmax;
            log_scale += std::log(hmax);
        }
        t += -std::log(z.induced.total_length());
        cur = z.induced.normalized();
        CocyclePath::Step step{std::move(z), t, h, log_scale};
        path.steps.push_back(std::move(step));
    }
    return path;
}

MatC twisted_matrix(const ZorichStep& step, const std::vector<double>& heights_before,
                    double lambda) {
    const int d = static_cast<int>(heights_before.size());
    std::vector<double> theta(d);
    for (int a = 0; a < d; ++a) theta[a] = frac(lambda * heights_before[a]);
    MatC P(d, std::vector<cplx>(d, cplx(0, 0)));
    for (int a = 0; a < d; ++a) P[a][a] = cplx(1, 0);
    for (const auto& mv : step.moves) {
        const int w = mv.winner, l = mv.loser;
        cplx ph = expi(mv.step_type == RauzyStep::Type::bottom ? theta[w] : theta[l]);
        if (mv.step_type == RauzyStep::Type::bottom) {
            // return word of the loser: winner tower then loser tower
            for (int r = 0; r < d; ++r) P[r][l] = P[r][w] + ph * P[r][l];
        } else {
            for (int r = 0; r < d; ++r) P[r][l] = ph * P[r][w] + P[r][l];
        }
        theta[l] = frac(theta[l] + theta[w]);
    }
    return P;
}

double operator_norm(const MatC& m) {
    const int d = static_cast<int>(m.size());
    Eigen::MatrixXcd em(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) em(i, j) = m[i][j];
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(em);
    return svd.singularValues()(0);
}

double twisted_product_log_norm(const CocyclePath& path, double lambda) {
    const int d = path.p0.size();
    std::vector<double> theta(d);
    for (int a = 0; a < d; ++a) theta[a] = frac(lambda * path.heights0[a]);
    Eigen::MatrixXcd P = Eigen::MatrixXcd::Identity(d, d);
    double logfac = 0.0;
    for (const auto& step : path.steps) {
        for (const auto& mv : step.zorich.moves) {
            const int w = mv.winner, l = mv.loser;
            bool bottom = mv.step_type == RauzyStep::Type::bottom;
            cplx ph = expi(bottom ? theta[w] : theta[l]);
            if (bottom) P.col(l) = P.col(w) + ph * P.col(l);
            else P.col(l) = ph * P.col(w) + P.col(l);
            theta[l] = frac(theta[l] + theta[w]);
        }
        double m = P.cwiseAbs().maxCoeff();
        if (m > 1e50) {
            P /= m;
            logfac += std::log(m);
        }
    }
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(P);
    return std::log(svd.singularValues()(0)) + logfac;
}

std::vector<ExponentEstimate> kz_exponents(const Permutation& p, int n_paths, int n_zorich,
                                           int k, std::uint64_t seed, Exec exec, int threads) {
    const int d = p.size();
    StratumInfo stratum = genus_and_stratum(p);
    if (k < 1 || k > 2 * stratum.genus)
        throw ConfigInvalid("need 1 <= k <= 2g Lyapunov exponents");

    std::vector<std::vector<double>> per_path(n_paths, std::vector<double>(k, 0.0));
    std::vector<char> failed(n_paths, 0);

    par_for(exec, threads, n_paths, [&](std::ptrdiff_t ip) {
        Rng rng(seed, 0x30c0 + static_cast<std::uint64_t>(ip));
        for (int attempt = 0;; ++attempt) {
            if (attempt > 64) {
                failed[ip] = 1;
                break;
            }
            try {
                Rng lr = rng.split(attempt);
                InductionWalker walker(p, dirichlet_lengths(lr, d));
                Eigen::MatrixXd M(d, k);
                for (int i = 0; i < d; ++i)
                    for (int j = 0; j < k; ++j) M(i, j) = lr.uniform(-1, 1);
                {
                    Eigen::HouseholderQR<Eigen::MatrixXd> qr(M);
                    M = qr.householderQ() * Eigen::MatrixXd::Identity(d, k);
                }
                std::vector<double> acc(k, 0.0);
                auto reortho = [&]() {
                    Eigen::HouseholderQR<Eigen::MatrixXd> qr(M);
                    Eigen::MatrixXd R =
                        qr.matrixQR().topLeftCorner(k, k).triangularView<Eigen::Upper>();
                    for (int j = 0; j < k; ++j) acc[j] += std::log(std::abs(R(j, j)));
                    M = qr.householderQ() * Eigen::MatrixXd::Identity(d, k);
                };
                for (int n = 0; n < n_zorich; ++n) {
                    walker.zorich(
                        [&](bool, int w, int l) { M.row(l) += M.row(w); });
                    if ((n + 1) % 8 == 0 || M.cwiseAbs().maxCoeff() > 1e12) reortho();
                }
                reortho();
                for (int j = 0; j < k; ++j) per_path[ip][j] = acc[j] / walker.teich_time();
                break;
            } catch (const ConnectionDetected&) {
                continue;  // resample the path
            }
        }
    });
    for (int i = 0; i < n_paths; ++i)
        if (failed[i]) throw ConnectionDetected();

    std::vector<ExponentEstimate> out(k);
    for (int j = 0; j < k; ++j) {
        std::vector<double> vals(n_paths);
        for (int i = 0; i < n_paths; ++i) vals[i] = per_path[i][j];
        MeanEstimate e = mean_estimate(vals);
        out[j] = ExponentEstimate{e.value, e.stderr_};
    }
    return out;
}

std::vector<GapEstimate> gap_sweep(const Permutation& p, const std::vector<double>& lengths,
                                   const std::vector<double>& lambda_grid, int n_zorich,
                                   std::vector<double> heights0, Exec exec, int threads) {
    const int d = p.size();
    if (heights0.empty()) heights0.assign(d, 1.0);
    if (heights0.size() != static_cast<size_t>(d))
        throw ConfigInvalid("heights size does not match alphabet");
    MovePath path = record_path(p, lengths, n_zorich);

    // checkpoint steps: powers of two up to n, plus n itself
    std::vector<long> marks;
    for (long m = 16; m < n_zorich; m *= 2) marks.push_back(m);
    marks.push_back(n_zorich);

    std::vector<GapEstimate> out(lambda_grid.size());
    par_for(exec, threads, static_cast<std::ptrdiff_t>(lambda_grid.size()),
            [&](std::ptrdiff_t il) {
                const double lambda = lambda_grid[il];
                std::vector<double> theta(d);
                for (int a = 0; a < d; ++a) theta[a] = frac(lambda * heights0[a]);
                Eigen::MatrixXcd P = Eigen::MatrixXcd::Identity(d, d);
                double logfac = 0.0;
                GapEstimate est;
                est.lambda = lambda;
                size_t mv_i = 0;
                size_t mark_i = 0;
                for (int nstep = 0; nstep < n_zorich; ++nstep) {
                    for (; mv_i < path.step_end[nstep]; ++mv_i) {
                        const CompactMove& mv = path.moves[mv_i];
                        cplx ph = expi(mv.bottom ? theta[mv.winner] : theta[mv.loser]);
                        if (mv.bottom) P.col(mv.loser) = P.col(mv.winner) + ph * P.col(mv.loser);
                        else P.col(mv.loser) = ph * P.col(mv.winner) + P.col(mv.loser);
                        theta[mv.loser] = frac(theta[mv.loser] + theta[mv.winner]);
                    }
                    double m = P.cwiseAbs().maxCoeff();
                    if (m > 1e50) {
                        P /= m;
                        logfac += std::log(m);
                    }
                    if (mark_i < marks.size() && nstep + 1 == marks[mark_i]) {
                        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(P);
                        double logn = std::log(svd.singularValues()(0)) + logfac;
                        est.checkpoints.emplace_back(nstep + 1,
                                                     1.0 - logn / path.t_after[nstep]);
                        ++mark_i;
                    }
                }
                est.n_steps = n_zorich;
                est.alpha_hat = est.checkpoints.back().second;
                if (est.checkpoints.size() >= 2) {
                    double prev = est.checkpoints[est.checkpoints.size() - 2].second;
                    est.band = std::abs(est.alpha_hat - prev);
                }
                out[il] = std::move(est);
            });
    return out;
}

}  // namespace flowlab
