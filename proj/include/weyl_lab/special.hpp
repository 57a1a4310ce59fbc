#pragma once

// Complex-argument special functions: log-gamma, digamma and the Hurwitz zeta
// function with its s-derivative. Real-argument routines come from the
// standard library; these cover the critical strip and vertical lines.

#include <complex>

namespace weyl_lab {

using cdouble = std::complex<double>;

// log Gamma(z) for z away from the poles 0, -1, -2, ...; the imaginary part is
// determined only modulo 2 pi (use through exp or differences).
cdouble lgamma(cdouble z);
cdouble gamma(cdouble z);

// psi(z) = Gamma'(z)/Gamma(z).
cdouble digamma(cdouble z);

// log sin(pi z), stable for large |Im z| (imaginary part modulo 2 pi).
cdouble log_sin_pi(cdouble z);

// (e^z - 1)/z and its z-derivative, accurate near z = 0.
cdouble expm1_ratio(cdouble z);
cdouble expm1_second(cdouble z);

struct HurwitzValue {
    cdouble value;       // zeta(s, a)
    cdouble derivative;  // d/ds zeta(s, a)
};

// Hurwitz zeta for a > 0 by Euler-Maclaurin summation. The pole at s = 1
// is rejected; use hurwitz_zeta_regular near it. order scales the number of
// correction terms (1 = default, 2 = doubled) for self-consistency checks.
HurwitzValue hurwitz_zeta(cdouble s, double a, int order = 1);

// zeta(s, a) - 1/(s - 1) and its derivative; entire in s.
HurwitzValue hurwitz_zeta_regular(cdouble s, double a, int order = 1);

}  // namespace weyl_lab
