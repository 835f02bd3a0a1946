#include "flowlab/surface.hpp"

#include <algorithm>
#include <cmath>

#include "flowlab/errors.hpp"
#include "flowlab/rng.hpp"

namespace flowlab {

SuspensionDatum canonical_suspension(const Permutation& p) {
    SuspensionDatum tau;
    tau.tau.resize(p.size());
    for (int a = 0; a < p.size(); ++a)
        tau.tau[a] = static_cast<double>(p.bottom_position(a) - p.top_position(a));
    return tau;
}

bool suspension_cone_holds(const Permutation& p, const SuspensionDatum& tau) {
    const int d = p.size();
    if (tau.tau.size() != static_cast<size_t>(d)) return false;
    double s = 0.0;
    for (int i = 0; i + 1 < d; ++i) {
        s += tau.tau[p.top()[i]];
        if (!(s > 0.0)) return false;
    }
    s = 0.0;
    for (int i = 0; i + 1 < d; ++i) {
        s += tau.tau[p.bottom()[i]];
        if (!(s < 0.0)) return false;
    }
    return true;
}

std::vector<double> heights_from_suspension(const Permutation& p, const SuspensionDatum& tau) {
    if (!suspension_cone_holds(p, tau))
        throw InvalidSuspension("suspension datum violates the cone");
    auto omega = p.intersection_matrix();
    const int d = p.size();
    std::vector<double> h(d, 0.0);
    for (int a = 0; a < d; ++a) {
        double acc = 0.0;
        for (int b = 0; b < d; ++b) acc += static_cast<double>(omega[a][b]) * tau.tau[b];
        if (!(acc > 0.0)) throw InvalidSuspension("nonpositive height from suspension datum");
        h[a] = acc;
    }
    return h;
}

ZipperedRectangles::ZipperedRectangles(Iet iet, SuspensionDatum tau)
    : iet_(std::move(iet)), tau_(std::move(tau)) {
    heights_ = heights_from_suspension(iet_.permutation(), tau_);
    area_ = 0.0;
    for (int a = 0; a < iet_.size(); ++a) area_ += iet_.lengths()[a] * heights_[a];
}

double ZipperedRectangles::min_height() const {
    return *std::min_element(heights_.begin(), heights_.end());
}

SurfacePoint ZipperedRectangles::base_point(double global_x) const {
    int a = iet_.letter_at(global_x);
    return SurfacePoint{a, global_x - iet_.left_endpoint(a), 0.0};
}

ZipperedRectangles ZipperedRectangles::unit_area() const {
    SuspensionDatum t = tau_;
    for (double& v : t.tau) v /= area_;
    return ZipperedRectangles(iet_, std::move(t));
}

ZipperedRectangles random_surface(const Permutation& p, std::uint64_t seed) {
    if (!p.irreducible()) throw ReduciblePermutation();
    const int d = p.size();
    Rng rng(seed, /*stream=*/0x5u);

    std::vector<double> lengths(d);
    double sum = 0.0;
    for (int a = 0; a < d; ++a) {
        lengths[a] = rng.exponential();
        sum += lengths[a];
    }
    for (double& l : lengths) l /= sum;

    SuspensionDatum tau;
    tau.tau.resize(d);
    bool ok = false;
    for (int attempt = 0; attempt < 1000 && !ok; ++attempt) {
        for (int a = 0; a < d; ++a) tau.tau[a] = rng.uniform(-1.0, 1.0);
        ok = suspension_cone_holds(p, tau);
    }
    if (!ok) {
        // contract the sample toward the canonical datum; the cone is open and
        // convex so this terminates
        SuspensionDatum canon = canonical_suspension(p);
        for (int iter = 0; iter < 64 && !ok; ++iter) {
            for (int a = 0; a < d; ++a) tau.tau[a] = 0.5 * (tau.tau[a] + canon.tau[a]);
            ok = suspension_cone_holds(p, tau);
        }
    }

    ZipperedRectangles s(Iet(p, std::move(lengths)), std::move(tau));
    return s.unit_area();
}

SurfacePoint cross_top(const ZipperedRectangles& s, const SurfacePoint& pt, double& elapsed) {
    const Iet& T = s.iet();
    const double tol = kSingularClearance * T.total_length();
    double u = s.base_coordinate(pt);
    elapsed += s.heights()[pt.rectangle] - pt.y;
    double v;
    try {
        v = T.apply(u);
    } catch (const DiscontinuityHit&) {
        throw SingularityHit(elapsed);
    }
    int b = T.letter_at(v);
    double xloc = v - T.left_endpoint(b);
    if (xloc <= tol || T.lengths()[b] - xloc <= tol) throw SingularityHit(elapsed);
    return SurfacePoint{b, xloc, 0.0};
}

SurfacePoint flow(const ZipperedRectangles& s, const SurfacePoint& pt, double t) {
    if (!(t >= 0.0) || !std::isfinite(t)) throw NonFiniteInput();
    SurfacePoint cur = pt;
    double remaining = t;
    double elapsed = 0.0;
    for (;;) {
        double to_top = s.heights()[cur.rectangle] - cur.y;
        if (remaining < to_top) {
            cur.y += remaining;
            return cur;
        }
        remaining -= to_top;
        cur = cross_top(s, cur, elapsed);
        if (remaining == 0.0) return cur;
    }
}

FirstReturn first_return(const ZipperedRectangles& s, const SurfacePoint& pt) {
    double h = s.heights()[pt.rectangle];
    SurfacePoint landed = flow(s, SurfacePoint{pt.rectangle, pt.x, 0.0}, h);
    return FirstReturn{landed, h};
}

}  // namespace flowlab
