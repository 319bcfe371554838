#pragma once

#include <cmath>
#include <complex>

#include "sspec/errors.hpp"
#include "sspec/numeric.hpp"

namespace sspec {

/// Energy with its branch-consistent parameter eps.
///   Schrodinger: eps = i sqrt(z), cut along the negative imaginary z-axis,
///                arg eps = pi/2 for z > 0.
///   Dirac:       eps = sqrt(m^2 - z^2) with Re eps > 0 off the cuts
///                (-inf,-m) u (m,inf); on the cuts eps = sqrt(m+z) sqrt(m-z)
///                with arg sqrt(m+z) in {0, -pi/2} and arg sqrt(m-z) in
///                {pi/2, 0} for z > m / z < -m.
struct BranchedEnergy {
    cplx z;
    cplx eps;
    cplx sqrt_m_plus;   // sqrt(m + z)
    cplx sqrt_m_minus;  // sqrt(m - z)
};

inline BranchedEnergy schrodinger_branch(cplx z) {
    // branch of sqrt with cut along the negative imaginary axis of z:
    // arg z mapped into (-pi/2, 3pi/2]
    double phi = std::arg(z);
    if (phi <= -0.5 * pi) phi += 2.0 * pi;
    cplx root = std::sqrt(std::abs(z)) * std::exp(cplx(0.0, 0.5 * phi));
    BranchedEnergy b;
    b.z = z;
    b.eps = cplx(0.0, 1.0) * root;
    b.sqrt_m_plus = root;               // m = 0: sqrt(z)
    b.sqrt_m_minus = b.eps / (root == 0.0 ? cplx(1.0) : root);
    return b;
}

inline BranchedEnergy dirac_branch(double m, cplx z) {
    if (m <= 0) throw domain_error("dirac_branch: mass must be positive");
    BranchedEnergy b;
    b.z = z;
    if (z.imag() == 0.0 && std::abs(z.real()) >= m) {
        double zr = z.real();
        if (zr >= m) {
            b.sqrt_m_plus = std::sqrt(m + zr);
            b.sqrt_m_minus = cplx(0.0, 1.0) * std::sqrt(zr - m);
        } else {
            b.sqrt_m_plus = cplx(0.0, -1.0) * std::sqrt(-m - zr);
            b.sqrt_m_minus = std::sqrt(m - zr);
        }
        b.eps = b.sqrt_m_plus * b.sqrt_m_minus;
    } else {
        cplx e = std::sqrt(cplx(m * m) - z * z);
        if (e.real() < 0.0) e = -e;
        b.eps = e;
        b.sqrt_m_plus = std::sqrt(cplx(m) + z);
        b.sqrt_m_minus = e / b.sqrt_m_plus;
    }
    return b;
}

} // namespace sspec
