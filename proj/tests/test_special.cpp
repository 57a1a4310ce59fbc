#include "doctest.h"

#include <cmath>
#include <complex>
#include <numbers>

#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/special_functions/zeta.hpp>

#include "weyl_lab/special.hpp"

using namespace weyl_lab;

namespace {

// Reference values computed with 30-digit arithmetic.
struct Ref {
    cdouble z, value;
};

bool close(cdouble a, cdouble b, double tol) { return std::abs(a - b) <= tol * std::max(1.0, std::abs(b)); }

// exp(lgamma) comparison avoids the 2 pi branch ambiguity of the imaginary part.
bool close_exp(cdouble a, cdouble b, double tol) {
    return std::abs(a.real() - b.real()) <= tol * std::max(1.0, std::abs(b.real())) &&
           std::abs(std::sin(0.5 * (a.imag() - b.imag()))) <= tol * std::max(1.0, std::abs(b));
}

}  // namespace

TEST_CASE("log-gamma matches high-precision references") {
    const Ref refs[] = {
        {{0.3, 40.0}, {-62.650686053968132692, 107.24156057988667968}},
        {{-2.5, 1.5}, {-3.7175134511917918462, -7.713065525834192526}},
        {{0.5, -7.0}, {-10.076635754359603593, -6.6273305569921392242}},
        {{12.25, 0.0}, {18.115669505710892619, 0.0}},
    };
    for (const auto& r : refs) CHECK(close_exp(lgamma(r.z), r.value, 1e-13));
}

TEST_CASE("log-gamma agrees with the real gamma function on the positive axis") {
    for (double x = 0.05; x < 60.0; x *= 1.37) {
        const double ref = boost::math::lgamma(x);
        CHECK(std::abs(lgamma(cdouble(x, 0)).real() - ref) <= 1e-13 * std::max(1.0, std::abs(ref)));
    }
}

TEST_CASE("gamma modulus identities on the imaginary axis and the half line") {
    for (double u = 0.1; u < 30.0; u += 0.7) {
        const double pi = std::numbers::pi;
        const double m1 = std::norm(gamma(cdouble(0.5, u)));
        CHECK(m1 == doctest::Approx(pi / std::cosh(pi * u)).epsilon(1e-12));
        const double m2 = std::norm(gamma(cdouble(0.0, u)));
        CHECK(m2 == doctest::Approx(pi / (u * std::sinh(pi * u))).epsilon(1e-12));
    }
}

TEST_CASE("log-gamma rejects poles") {
    CHECK_THROWS_AS(lgamma(cdouble(-3.0, 0.0)), std::domain_error);
    CHECK_THROWS_AS(lgamma(cdouble(0.0, 0.0)), std::domain_error);
}

TEST_CASE("digamma matches references and the real digamma") {
    const Ref refs[] = {
        {{0.5, 3.0}, {1.0938865316788440398, 1.5707963063355506286}},
        {{1.0, 100.0}, {4.6051785194047620034, 1.5657963267948966192}},
        {{-1.5, 0.25}, {0.71048739293941290367, 1.9382272327368980922}},
    };
    for (const auto& r : refs) CHECK(close(digamma(r.z), r.value, 1e-12));
    for (double x = 0.1; x < 40.0; x *= 1.5)
        CHECK(digamma(cdouble(x, 0)).real() == doctest::Approx(boost::math::digamma(x)).epsilon(1e-13));
    const double gamma_e = 0.57721566490153286061;
    CHECK(digamma(cdouble(0.5, 0)).real() == doctest::Approx(-gamma_e - 2.0 * std::log(2.0)).epsilon(1e-14));
}

TEST_CASE("Hurwitz zeta and its derivative match references") {
    struct HRef {
        cdouble s;
        double a;
        cdouble value, deriv;
    };
    const HRef refs[] = {
        {{1.0, 2.0}, 0.3, {-2.2993297678894705299, 1.6582144571452164585}, {-2.7742291970207711785, 2.6808073126770365208}},
        {{1.0, -300.0}, 1.0, {1.0858041761153168648, 0.21243231961027915805}, {0.38647670886462816018, 0.38423049130962523828}},
        {{0.75, 5.0}, 0.6, {-1.5265453775510225328, 0.54977477254579972575}, {-0.55940841301559849069, 0.49161463252415757164}},
        {{2.0, 0.0}, 1.0, {1.6449340668482264365, 0.0}, {-0.9375482543158437537, 0.0}},
    };
    for (const auto& r : refs) {
        const auto h = hurwitz_zeta(r.s, r.a);
        CHECK(close(h.value, r.value, 1e-12));
        CHECK(close(h.derivative, r.deriv, 1e-12));
    }
    CHECK(hurwitz_zeta(2.0, 1.0).value.real() == doctest::Approx(std::numbers::pi * std::numbers::pi / 6).epsilon(1e-14));
    CHECK(hurwitz_zeta(3.5, 1.0).value.real() == doctest::Approx(boost::math::zeta(3.5)).epsilon(1e-14));
}

TEST_CASE("Hurwitz zeta recurrence, duplication and order doubling") {
    const cdouble ss[] = {{1.3, 4.0}, {0.8, -17.0}, {2.5, 60.0}, {1.0, 250.0}};
    const double as[] = {0.15, 0.5, 0.77};
    for (auto s : ss)
        for (double a : as) {
            const auto za = hurwitz_zeta(s, a);
            CHECK(close(za.value - std::pow(a, -s), hurwitz_zeta(s, a + 1.0).value, 1e-12));
            // zeta(s, b) + zeta(s, b + 1/2) = 2^s zeta(s, 2b)
            const double b = 0.5 * a;
            CHECK(close(hurwitz_zeta(s, b).value + hurwitz_zeta(s, b + 0.5).value, std::pow(2.0, s) * za.value,
                        1e-12));
            const auto d2 = hurwitz_zeta(s, a, 2);
            CHECK(close(za.value, d2.value, 1e-12));
            CHECK(close(za.derivative, d2.derivative, 1e-12));
        }
}

TEST_CASE("regular part of Hurwitz zeta near s = 1") {
    const auto r = hurwitz_zeta_regular(cdouble(1.0, 1e-3), 0.3);
    CHECK(close(r.value, cdouble(3.5025218083022446585, 0.0039795908482477422691), 1e-12));
    // at s = 1 the regular part is -psi(a)
    const auto r1 = hurwitz_zeta_regular(1.0, 0.3);
    CHECK(r1.value.real() == doctest::Approx(-boost::math::digamma(0.3)).epsilon(1e-13));
    // consistency with the singular form away from the pole
    const cdouble s(1.0, 0.7);
    CHECK(close(hurwitz_zeta_regular(s, 0.45).value + 1.0 / (s - 1.0), hurwitz_zeta(s, 0.45).value, 1e-12));
    CHECK_THROWS_AS(hurwitz_zeta(1.0, 0.5), std::domain_error);
}
