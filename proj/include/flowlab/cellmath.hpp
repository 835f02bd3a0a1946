#ifndef FLOWLAB_CELLMATH_HPP
#define FLOWLAB_CELLMATH_HPP

#include <cmath>
#include <complex>

namespace flowlab {

using cplx = std::complex<double>;

inline cplx expi(double phase_turns) {  // e^{2*pi*i*phase_turns}
    double a = 2.0 * M_PI * phase_turns;
    return cplx(std::cos(a), std::sin(a));
}

/** phase_integral(mu, delta) = int_0^delta e^{2*pi*i*mu*u} du.
 *
 * Closed form (e^{2*pi*i*mu*delta}-1)/(2*pi*i*mu); below |mu|*delta = 1e-6
 * the quotient cancels catastrophically and a 3-term Taylor expansion in
 * (2*pi*i*mu*delta) is used instead.
 */
inline cplx phase_integral(double mu, double delta) {
    if (std::abs(mu) * std::abs(delta) < 1e-6) {
        cplx w(0.0, 2.0 * M_PI * mu * delta);
        return delta * (1.0 + w * (0.5 + w / 6.0));
    }
    cplx denom(0.0, 2.0 * M_PI * mu);
    return (expi(mu * delta) - 1.0) / denom;
}

/// int_0^1 e^{2*pi*i*m*s} ds; equals delta_{m,0} for integer m.
inline cplx unit_moment(double m) { return phase_integral(m, 1.0); }

}  // namespace flowlab

#endif
