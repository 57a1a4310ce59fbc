#include "weyl_lab/special.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <boost/math/special_functions/bernoulli.hpp>
#include <boost/math/special_functions/factorials.hpp>

namespace weyl_lab {

namespace {

constexpr double kPi = std::numbers::pi;

// B_{2k} for k = 1..10.
constexpr std::array<double, 10> kBernoulli = {
    1.0 / 6.0,       -1.0 / 30.0,          1.0 / 42.0,  -1.0 / 30.0,      5.0 / 66.0,
    -691.0 / 2730.0, 7.0 / 6.0,            -3617.0 / 510.0, 43867.0 / 798.0, -174611.0 / 330.0};

constexpr double kShift = 15.0;

bool is_pole(cdouble z) {
    return z.imag() == 0.0 && z.real() <= 0.0 && z.real() == std::floor(z.real());
}

// Stirling series for Re z >= kShift.
cdouble lgamma_stirling(cdouble z) {
    cdouble sum = (z - 0.5) * std::log(z) - z + 0.5 * std::log(2.0 * kPi);
    const cdouble z2 = 1.0 / (z * z);
    cdouble zp = 1.0 / z;
    for (std::size_t k = 1; k <= kBernoulli.size(); ++k) {
        sum += kBernoulli[k - 1] / static_cast<double>(2 * k * (2 * k - 1)) * zp;
        zp *= z2;
    }
    return sum;
}

cdouble digamma_asymptotic(cdouble z) {
    cdouble sum = std::log(z) - 0.5 / z;
    const cdouble z2 = 1.0 / (z * z);
    cdouble zp = z2;
    for (std::size_t k = 1; k <= kBernoulli.size(); ++k) {
        sum -= kBernoulli[k - 1] / static_cast<double>(2 * k) * zp;
        zp *= z2;
    }
    return sum;
}

double bernoulli_over_factorial(int j) {
    return boost::math::bernoulli_b2n<double>(j) / boost::math::factorial<double>(static_cast<unsigned>(2 * j));
}

// (e^z - 1)/z and (1 - e^z (1 - z))/z^2, accurate near z = 0.
HurwitzValue euler_maclaurin(cdouble s, double a, int order, bool regular) {
    if (!(a > 0.0)) throw std::invalid_argument("Hurwitz zeta requires a > 0");
    if (order < 1) throw std::invalid_argument("Euler-Maclaurin order must be >= 1");
    const int m = order * (static_cast<int>(std::ceil(0.5 * std::abs(s))) + 12);
    const int p = 12 * order;

    cdouble value = 0, deriv = 0;
    for (int k = 0; k < m; ++k) {
        const double lk = std::log(k + a);
        const cdouble term = std::exp(-s * lk);
        value += term;
        deriv -= lk * term;
    }

    const double x = m + a;
    const double lx = std::log(x);
    const cdouble xs = std::exp(-s * lx);  // x^{-s}
    const cdouble w = s - 1.0;
    if (regular) {
        // (x^{1-s} - 1)/(s - 1) and its derivative, entire in s.
        const cdouble z = -w * lx;
        value += -lx * expm1_ratio(z);
        deriv += lx * lx * expm1_second(z);
    } else {
        if (std::abs(w) == 0.0) throw std::domain_error("Hurwitz zeta pole at s = 1");
        const cdouble tail = x * xs / w;
        value += tail;
        deriv += -lx * tail - tail / w;
    }
    value += 0.5 * xs;
    deriv += -0.5 * lx * xs;

    // sum_j B_{2j}/(2j)! * P_j(s) * x^{-s-2j+1},  P_j(s) = s (s+1) ... (s+2j-2)
    cdouble poly = s, dpoly = 1.0;
    cdouble xp = xs / x;  // x^{-s-1}
    const double inv_x2 = 1.0 / (x * x);
    for (int j = 1; j <= p; ++j) {
        const double c = bernoulli_over_factorial(j);
        value += c * poly * xp;
        deriv += c * (dpoly - lx * poly) * xp;
        for (int i = 2 * j - 1; i <= 2 * j; ++i) {
            dpoly = dpoly * (s + static_cast<double>(i)) + poly;
            poly *= s + static_cast<double>(i);
        }
        xp *= inv_x2;
    }
    return {value, deriv};
}

}  // namespace

cdouble log_sin_pi(cdouble z) {
    const double y = z.imag();
    const cdouble ipz(-kPi * y, kPi * z.real());  // i pi z
    if (std::abs(y) < 20.0) return std::log(std::sin(kPi * z));
    if (y > 0) {
        // sin(pi z) = (i/2) e^{-i pi z} (1 - e^{2 i pi z})
        return -ipz + cdouble(std::log(0.5), 0.5 * kPi) + std::log(1.0 - std::exp(2.0 * ipz));
    }
    return ipz + cdouble(std::log(0.5), -0.5 * kPi) + std::log(1.0 - std::exp(-2.0 * ipz));
}

cdouble lgamma(cdouble z) {
    if (is_pole(z)) throw std::domain_error("log-gamma pole");
    if (z.real() < 0.5) return std::log(kPi) - log_sin_pi(z) - lgamma(1.0 - z);
    cdouble shift = 0;
    while (z.real() < kShift) {
        shift += std::log(z);
        z += 1.0;
    }
    return lgamma_stirling(z) - shift;
}

cdouble gamma(cdouble z) { return std::exp(lgamma(z)); }

cdouble digamma(cdouble z) {
    if (is_pole(z)) throw std::domain_error("digamma pole");
    if (z.real() < 0.5) {
        // psi(1 - z) - pi cot(pi z)
        const cdouble cot = std::abs(z.imag()) < 20.0
                                ? std::cos(kPi * z) / std::sin(kPi * z)
                                : cdouble(0, z.imag() > 0 ? -1.0 : 1.0);
        return digamma(1.0 - z) - kPi * cot;
    }
    cdouble shift = 0;
    while (z.real() < kShift) {
        shift += 1.0 / z;
        z += 1.0;
    }
    return digamma_asymptotic(z) - shift;
}

HurwitzValue hurwitz_zeta(cdouble s, double a, int order) { return euler_maclaurin(s, a, order, false); }

HurwitzValue hurwitz_zeta_regular(cdouble s, double a, int order) {
    return euler_maclaurin(s, a, order, true);
}

cdouble expm1_ratio(cdouble z) {
    if (std::abs(z) < 0.5) {
        cdouble sum = 0, term = 1;
        for (int k = 1; k <= 20; ++k) {
            term /= static_cast<double>(k);  // z^{k-1}/k!
            sum += term;
            term *= z;
        }
        return sum;
    }
    return (std::exp(z) - 1.0) / z;
}

cdouble expm1_second(cdouble z) {
    if (std::abs(z) < 0.5) {
        cdouble sum = 0, zp = 1;
        double fact = 2;  // (m+2)!
        for (int m = 0; m <= 20; ++m) {
            sum += static_cast<double>(m + 1) / fact * zp;
            zp *= z;
            fact *= static_cast<double>(m + 3);
        }
        return sum;
    }
    return (1.0 - std::exp(z) * (1.0 - z)) / (z * z);
}

}  // namespace weyl_lab
