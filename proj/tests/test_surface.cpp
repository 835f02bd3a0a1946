#include <doctest.h>

#include <cmath>

#include "flowlab/errors.hpp"
#include "flowlab/rng.hpp"
#include "flowlab/surface.hpp"

using namespace flowlab;

namespace {

ZipperedRectangles square_torus() {
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    return ZipperedRectangles(Iet(Permutation::symmetric(2), {1.0 - g, g}),
                              SuspensionDatum{{1.0, -1.0}});
}

}  // namespace

TEST_CASE("d=2 canonical suspension gives the square torus") {
    ZipperedRectangles s = square_torus();
    CHECK(s.heights()[0] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(s.heights()[1] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(s.area() == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("canonical suspension has positive heights on symmetric permutations") {
    for (int d = 2; d <= 7; ++d) {
        Permutation p = Permutation::symmetric(d);
        SuspensionDatum tau = canonical_suspension(p);
        auto h = heights_from_suspension(p, tau);
        for (double v : h) CHECK(v > 0.0);
    }
}

TEST_CASE("cone violation raises InvalidSuspension") {
    Permutation p = Permutation::symmetric(4);
    SuspensionDatum tau = canonical_suspension(p);
    for (double& v : tau.tau) v = -v;
    CHECK_THROWS_AS(heights_from_suspension(p, tau), InvalidSuspension);
}

TEST_CASE("heights depend linearly on tau") {
    Permutation p = Permutation::symmetric(5);
    SuspensionDatum a = canonical_suspension(p);
    SuspensionDatum b = a;
    for (double& v : b.tau) v *= 0.5;
    auto ha = heights_from_suspension(p, a);
    auto hb = heights_from_suspension(p, b);
    for (int i = 0; i < 5; ++i) CHECK(hb[i] == doctest::Approx(0.5 * ha[i]).epsilon(1e-13));
}

TEST_CASE("random surfaces are deterministic, unit area, cone-valid") {
    Permutation p = Permutation::symmetric(4);
    ZipperedRectangles a = random_surface(p, 31);
    ZipperedRectangles b = random_surface(p, 31);
    for (int i = 0; i < 4; ++i) {
        CHECK(a.lengths()[i] == b.lengths()[i]);
        CHECK(a.heights()[i] == b.heights()[i]);
    }
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        ZipperedRectangles s = random_surface(p, seed);
        CHECK(std::abs(s.area() - 1.0) < 1e-12);
        CHECK(suspension_cone_holds(p, s.tau()));
    }
}

TEST_CASE("lengths sample the Dirichlet(1,1,1,1) moments") {
    Permutation p = Permutation::symmetric(4);
    double mean0 = 0.0;
    const int n = 1000;
    for (int seed = 0; seed < n; ++seed) mean0 += random_surface(p, seed).lengths()[0];
    mean0 /= n;
    CHECK(std::abs(mean0 - 0.25) < 0.02);
}

TEST_CASE("flow: t = 0 leaves the point unchanged") {
    ZipperedRectangles s = square_torus();
    SurfacePoint pt{0, 0.2, 0.3};
    SurfacePoint q = flow(s, pt, 0.0);
    CHECK(q.rectangle == pt.rectangle);
    CHECK(q.x == pt.x);
    CHECK(q.y == pt.y);
}

TEST_CASE("flow crosses the square-torus roof exactly at t = 0.7") {
    ZipperedRectangles s = square_torus();
    SurfacePoint q = flow(s, SurfacePoint{0, 0.2, 0.3}, 0.7);
    double expect = s.iet().apply(0.2);
    CHECK(q.y == 0.0);
    CHECK(s.base_coordinate(q) == doctest::Approx(expect).epsilon(1e-14));
}

TEST_CASE("flow additivity on random orbits") {
    Permutation p = Permutation::symmetric(4);
    ZipperedRectangles s = random_surface(p, 5);
    Rng rng(17, 0);
    int checked = 0;
    for (int k = 0; k < 1000 && checked < 900; ++k) {
        SurfacePoint pt = s.base_point(rng.uniform());
        pt.y = rng.uniform() * s.heights()[pt.rectangle];
        double t1 = rng.uniform() * 3.0, t2 = rng.uniform() * 3.0;
        try {
            SurfacePoint one = flow(s, flow(s, pt, t1), t2);
            SurfacePoint two = flow(s, pt, t1 + t2);
            CHECK(one.rectangle == two.rectangle);
            CHECK(std::abs(one.x - two.x) < 1e-10);
            CHECK(std::abs(one.y - two.y) < 1e-10);
            ++checked;
        } catch (const SingularityHit&) {
            continue;
        }
    }
    CHECK(checked >= 900);
}

TEST_CASE("first return time equals the rectangle height") {
    ZipperedRectangles s = square_torus();
    FirstReturn fr = first_return(s, s.base_point(0.2));
    CHECK(fr.return_time == doctest::Approx(1.0).epsilon(1e-15));

    ZipperedRectangles h2 = random_surface(Permutation::symmetric(4), 77);
    Rng rng(3, 1);
    for (int k = 0; k < 200; ++k) {
        SurfacePoint pt = h2.base_point(rng.uniform());
        try {
            FirstReturn r = first_return(h2, pt);
            CHECK(r.return_time == doctest::Approx(h2.heights()[pt.rectangle]).epsilon(1e-15));
            double expect = h2.iet().apply(h2.base_coordinate(pt));
            CHECK(h2.base_coordinate(r.point) == doctest::Approx(expect).epsilon(1e-12));
        } catch (const SingularityHit&) {
            continue;
        } catch (const DiscontinuityHit&) {
            continue;
        }
    }
}

TEST_CASE("area preservation: empirical rectangle masses under the flow") {
    ZipperedRectangles s = random_surface(Permutation::symmetric(4), 11);
    Rng rng(23, 2);
    const int n = 20000;
    std::vector<double> mass(4, 0.0);
    int kept = 0;
    for (int k = 0; k < n; ++k) {
        SurfacePoint pt = s.base_point(rng.uniform());
        pt.y = rng.uniform() * s.heights()[pt.rectangle];
        // importance weight: sampling density is 1/(h_j) within rectangle j
        double w = s.heights()[pt.rectangle];
        double t = rng.uniform() * 10.0;
        try {
            SurfacePoint q = flow(s, pt, t);
            mass[q.rectangle] += w;
            ++kept;
        } catch (const SingularityHit&) {
        }
    }
    // chi-square-style sanity: empirical mass ratio close to cell areas
    for (int j = 0; j < 4; ++j) {
        double expect = s.cell_area(j);
        double got = mass[j] / kept;
        CHECK(std::abs(got - expect) < 6.0 * std::sqrt(expect * (1 - expect) / kept) + 0.02);
    }
}

TEST_CASE("genus consistency: rank of the intersection form") {
    for (int d = 2; d <= 6; ++d) {
        Permutation p = Permutation::symmetric(d);
        StratumInfo info = genus_and_stratum(p);
        CHECK(p.omega_rank() == 2 * info.genus);
    }
}
