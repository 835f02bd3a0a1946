#ifndef FLOWLAB_SURFACE_HPP
#define FLOWLAB_SURFACE_HPP

#include <cstdint>
#include <vector>

#include "flowlab/iet.hpp"

namespace flowlab {

struct SuspensionDatum {
    std::vector<double> tau;
};

/// Canonical datum tau_a = bottom_position(a) - top_position(a); lies in the
/// suspension cone for every irreducible permutation.
SuspensionDatum canonical_suspension(const Permutation& p);

/// Proper-prefix sums of tau are > 0 in top order and < 0 in bottom order.
bool suspension_cone_holds(const Permutation& p, const SuspensionDatum& tau);

/// heights = Omega_pi * tau; throws InvalidSuspension unless the cone holds
/// and every height is strictly positive.
std::vector<double> heights_from_suspension(const Permutation& p, const SuspensionDatum& tau);

struct SurfacePoint {
    int rectangle = 0;  // letter index
    double x = 0.0;     // within [0, lengths[rectangle])
    double y = 0.0;     // within [0, heights[rectangle])
};

/** Zippered rectangles over an IET: rectangle of letter a has width
 * lengths[a] (sitting over the letter's top-order slot) and height
 * heights[a]; the vertical unit-speed flow crosses a rectangle top at
 * horizontal position x and re-enters the base at apply_iet(x). */
class ZipperedRectangles {
  public:
    ZipperedRectangles(Iet iet, SuspensionDatum tau);

    const Iet& iet() const { return iet_; }
    const Permutation& permutation() const { return iet_.permutation(); }
    const SuspensionDatum& tau() const { return tau_; }
    const std::vector<double>& heights() const { return heights_; }
    const std::vector<double>& lengths() const { return iet_.lengths(); }
    double area() const { return area_; }
    int size() const { return iet_.size(); }

    double cell_area(int letter) const {
        return iet_.lengths()[letter] * heights_[letter];
    }

    double min_height() const;

    /// Global base coordinate of a point (left endpoint of its rectangle + x).
    double base_coordinate(const SurfacePoint& pt) const {
        return iet_.left_endpoint(pt.rectangle) + pt.x;
    }
    SurfacePoint base_point(double global_x) const;

    /// Rescale heights so that total area is exactly renormalized to 1.
    ZipperedRectangles unit_area() const;

  private:
    Iet iet_;
    SuspensionDatum tau_;
    std::vector<double> heights_;
    double area_;
};

/// Masur-Veech-style sample: Dirichlet(1,..,1) lengths, tau uniform on a
/// bounded slice of the cone, area normalized to 1.  Deterministic in seed.
ZipperedRectangles random_surface(const Permutation& p, std::uint64_t seed);

/// Unit-speed vertical flow for time t >= 0.
SurfacePoint flow(const ZipperedRectangles& s, const SurfacePoint& pt, double t);

/// Advance pt to the base point reached after crossing its rectangle top,
/// adding the crossing duration to elapsed.  Throws SingularityHit (with the
/// hitting time) when the landing is within clearance of a corner.
SurfacePoint cross_top(const ZipperedRectangles& s, const SurfacePoint& pt, double& elapsed);

struct FirstReturn {
    SurfacePoint point;
    double return_time;
};

/// First return to the base transversal of a point with y = 0.
FirstReturn first_return(const ZipperedRectangles& s, const SurfacePoint& pt);

}  // namespace flowlab

#endif
