#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <map>
#include <memory>
#include <numbers>
#include <numeric>
#include <random>
#include <set>

#include "weyl_lab/numerics.hpp"
#include "weyl_lab/sl2tf.hpp"
#include "weyl_lab/special.hpp"

using namespace weyl_lab;

namespace {

const double pi = std::numbers::pi;

long count_sl2_mod(int N) {
    long count = 0;
    for (int a = 0; a < N; ++a)
        for (int b = 0; b < N; ++b)
            for (int c = 0; c < N; ++c)
                for (int d = 0; d < N; ++d)
                    if (((a * d - b * c) % N + N) % N == 1 % N) ++count;
    return count;
}

// Cusps of Gamma(N) correspond to vectors (a, c) of order N in (Z/N)^2 up to sign.
int count_cusps(int N) {
    int count = 0;
    for (int a = 0; a < N; ++a)
        for (int c = 0; c < N; ++c)
            if (std::gcd(std::gcd(a, c), N) == 1) ++count;
    return count / 2;
}

// sum_{j >= 0} [1/(3j+1) - 1/(3j+2)] with the integral tail from J - 1/2.
double alternating_L_mod3() {
    const long J = 10000000;
    long double s = 0;
    for (long j = J - 1; j >= 0; --j) s += 1.0L / ((3.0L * j + 1) * (3.0L * j + 2));
    const long double x = J - 0.5L;
    s += std::log((3 * x + 2) / (3 * x + 1)) / 3;
    return static_cast<double>(s);
}

ScatteringData shipped(int N) { return load_scattering_data(default_constants_path(), N); }

const SelbergTraceFormula& formula(int N, double support) {
    static std::map<std::pair<int, double>, std::unique_ptr<SelbergTraceFormula>> cache;
    auto& slot = cache[{N, support}];
    if (!slot)
        slot = std::make_unique<SelbergTraceFormula>(TestFunction::autocorrelation(1, support, 1025),
                                                     group_data(N), length_spectrum(N, support), shipped(N),
                                                     450.0);
    return *slot;
}

}  // namespace

TEST_CASE("group data matches enumeration modulo N") {
    for (int N : {3, 4, 5, 6}) {
        const CongruenceGroup g = group_data(N);
        CHECK(g.sl2_index == count_sl2_mod(N));
        CHECK(g.psl2_index * 2 == g.sl2_index);
        CHECK(g.cusps == count_cusps(N));
        CHECK(g.area == doctest::Approx(g.psl2_index * pi / 3).epsilon(1e-15));
    }
    CHECK(group_data(3).sl2_index == 24);
    CHECK(group_data(3).cusps == 4);
    CHECK(group_data(4).sl2_index == 48);
    CHECK_THROWS_AS(group_data(2), std::invalid_argument);
}

TEST_CASE("trace congruence bound and the shortest hyperbolic element") {
    CHECK(trace_congruence_bound(3) == doctest::Approx(2 * std::acosh(3.5)).epsilon(1e-15));
    CHECK(trace_congruence_bound(3) == doctest::Approx(2 * std::log(3.5 + std::sqrt(11.25))).epsilon(1e-15));
    CHECK(trace_congruence_bound(4) == doctest::Approx(2 * std::acosh(7.0)).epsilon(1e-15));
    const IntMatrix g{1, -3, 3, -8};
    CHECK(g[0] * g[3] - g[1] * g[2] == 1);
    CHECK(congruent_to_identity(g, 3));
    CHECK(g[0] + g[3] == -7);
    CHECK(min_hyperbolic_trace_bruteforce(3, 50) == 7);
    CHECK(min_hyperbolic_trace_bruteforce(4, 30) == 14);
}

TEST_CASE("class counts from reduced forms equal matrix search") {
    for (long tr = 3; tr <= 12; ++tr) {
        CAPTURE(tr);
        const auto reps = sl2z_class_representatives(tr);
        CHECK(static_cast<long>(reps.size()) == sl2z_class_count_bruteforce(tr, 30));
        for (const IntMatrix& m : reps) {
            CHECK(m[0] * m[3] - m[1] * m[2] == 1);
            CHECK(m[0] + m[3] == tr);
        }
    }
    const LengthSpectrum s1 = length_spectrum(1, 2.0);
    REQUIRE(!s1.entries.empty());
    CHECK(s1.entries[0].trace == 3);
    CHECK(s1.entries[0].class_count == 1);
    CHECK(s1.entries[0].length == doctest::Approx(1.92485).epsilon(1e-5));
}

TEST_CASE("Gamma(N) length spectrum structure") {
    CHECK(length_spectrum(3, 3.84).entries.empty());
    for (int N : {3, 4, 5}) {
        const LengthSpectrum s = length_spectrum(N, 8.0);
        CAPTURE(N);
        CHECK(s.validity_radius == doctest::Approx(8.0));
        REQUIRE(!s.entries.empty());
        double prev = 0;
        for (const LengthEntry& e : s.entries) {
            CHECK(e.length >= prev);
            prev = e.length;
            CHECK(e.length <= s.validity_radius);
            CHECK(e.length == doctest::Approx(2 * std::acosh(std::abs(e.trace) / 2.0)).epsilon(1e-14));
            CHECK(((e.trace - 2) % (N * N) + N * N) % (N * N) == 0);
            const double ratio = e.length / e.primitive_length;
            CHECK(std::abs(ratio - std::round(ratio)) < 1e-9);
            CHECK(e.class_count > 0);
            if (std::abs(ratio - 1) < 1e-9) {
                // a primitive class of this trace: some SL(2,Z) representative lies in Gamma(N)
                bool found = false;
                for (const IntMatrix& m : sl2z_class_representatives(e.trace)) found = found || congruent_to_identity(m, N);
                CHECK(found);
            }
        }
        CHECK(s.entries[0].length >= trace_congruence_bound(N) - 1e-12);
    }
    CHECK(length_spectrum(3, 4.0).entries.front().trace == -7);
}

TEST_CASE("length spectrum cache round trip") {
    const auto dir = std::filesystem::temp_directory_path() / "weyl_lab_cache_test";
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    const LengthSpectrum a = length_spectrum_cached(3, 7.0, dir.string());
    CHECK(std::distance(std::filesystem::directory_iterator(dir), std::filesystem::directory_iterator()) == 1);
    const LengthSpectrum b = length_spectrum_cached(3, 7.0, dir.string());
    REQUIRE(a.entries.size() == b.entries.size());
    for (std::size_t i = 0; i < a.entries.size(); ++i) {
        CHECK(a.entries[i].trace == b.entries[i].trace);
        CHECK(a.entries[i].class_count == b.entries[i].class_count);
        CHECK(a.entries[i].primitive_length == b.entries[i].primitive_length);
    }
    const LengthSpectrum c = length_spectrum_from_json(to_json(length_spectrum(4, 9.0)));
    CHECK(c.level == 4);
    CHECK(c.entries.size() == length_spectrum(4, 9.0).entries.size());
    std::filesystem::remove_all(dir);
}

TEST_CASE("Dirichlet characters are orthogonal") {
    for (int q = 1; q <= 24; ++q) {
        CAPTURE(q);
        const auto chars = dirichlet_characters(q);
        int phi = 0;
        for (int a = 0; a < q; ++a) phi += std::gcd(a, q) == 1;
        REQUIRE(static_cast<int>(chars.size()) == phi);
        CHECK(chars[0].principal());
        for (std::size_t i = 0; i < chars.size(); ++i) {
            for (std::size_t j = 0; j < chars.size(); ++j) {
                cdouble s = 0;
                for (int a = 0; a < q; ++a) s += chars[i](a) * std::conj(chars[j](a));
                CHECK(std::abs(s - (i == j ? cdouble(phi) : cdouble(0))) < 1e-12);
            }
            for (int a = 0; a < q; ++a)
                for (int b = 0; b < q; ++b) CHECK(std::abs(chars[i](a * b) - chars[i](a) * chars[i](b)) < 1e-12);
        }
        for (int a = 0; a < q; ++a) {
            cdouble s = 0;
            for (const auto& chi : chars) s += chi(a);
            CHECK(std::abs(s - cdouble(a % q == 1 % q ? phi : 0)) < 1e-12);
        }
    }
}

TEST_CASE("Dirichlet L-values") {
    const DirichletCharacter trivial(1, {1.0});
    CHECK(std::abs(dirichlet_L(2.0, trivial) - pi * pi / 6) < 1e-12);
    const DirichletCharacter chi3(3, {0.0, 1.0, -1.0});
    const double oracle = alternating_L_mod3();
    CHECK(oracle == doctest::Approx(pi / (3 * std::sqrt(3.0))).epsilon(1e-12));
    CHECK(std::abs(dirichlet_L(1.0, chi3) - oracle) < 1e-12);
    CHECK_THROWS_AS(dirichlet_L(1.0, dirichlet_characters(3)[0]), std::domain_error);

    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> re(0.75, 3.0), im(-40.0, 40.0), aa(0.05, 3.0);
    for (int i = 0; i < 30; ++i) {
        const cdouble s(re(rng), im(rng));
        const double a = aa(rng);
        const cdouble lhs = hurwitz_zeta(s, a).value - std::pow(a, -s);
        CHECK(std::abs(lhs - hurwitz_zeta(s, a + 1).value) < 1e-12 * std::max(1.0, std::abs(lhs)));
    }
    for (int q : {5, 8, 12}) {
        for (const auto& chi : dirichlet_characters(q)) {
            for (int i = 0; i < 5; ++i) {
                const cdouble s(re(rng), im(rng));
                for (int d : {0, 1}) {
                    const cdouble v1 = dirichlet_L(s, chi, d, 1);
                    const cdouble v2 = dirichlet_L(s, chi, d, 2);
                    CHECK(std::abs(v1 - v2) < 1e-12 * std::max(1.0, std::abs(v1)));
                }
            }
        }
    }
    // the regular log-derivative removes exactly the pole term
    const DirichletCharacter chi0 = dirichlet_characters(4)[0];
    const cdouble s(1.0, 0.3);
    const cdouble ld = dirichlet_L(s, chi0, 1) / dirichlet_L(s, chi0) + 1.0 / (s - 1.0);
    CHECK(std::abs(dirichlet_log_derivative_regular(s, chi0) - ld) < 1e-12);
}

TEST_CASE("shipped scattering constants are consistent") {
    for (int N : {3, 4, 5}) {
        CAPTURE(N);
        const CongruenceGroup g = group_data(N);
        const ScatteringData d = shipped(N);
        CHECK_NOTHROW(d.validate(g.cusps));
        CHECK(std::abs(std::abs(d.determinant(0.5)) - 1) < 1e-8);
        // functional equation phi(s) phi(1 - s) = 1
        const cdouble s(0.8, 2.3);
        CHECK(std::abs(d.determinant(s) * d.determinant(1.0 - s) - 1.0) < 1e-10);
        const ScatteringData back = scattering_data_from_json(to_json(d));
        CHECK(back.characters.size() == d.characters.size());
        CHECK(std::abs(back.determinant(s) - d.determinant(s)) < 1e-12 * std::abs(d.determinant(s)));
    }
    ScatteringData bad = shipped(3);
    bad.trace_half = -2;
    CHECK_THROWS_AS(bad.validate(4), std::runtime_error);
    bad = shipped(3);
    bad.characters[1].chi = DirichletCharacter(3, {0.0, 1.0, 0.5});
    CHECK_THROWS_AS(bad.validate(4), std::runtime_error);
    bad = shipped(5);
    bad.characters[1].multiplicity = 4;
    CHECK_THROWS_AS(bad.validate(12), std::runtime_error);
    CHECK_THROWS(load_scattering_data(default_constants_path(), 7));
}

TEST_CASE("scattering phase is real, even and logarithmically bounded") {
    const ScatteringData d = shipped(3);
    for (double r : {0.1, 1.7, 23.0, 310.0}) {
        const PhaseValue p = scattering_phase(r, d);
        CHECK_FALSE(p.a_term_omitted);
        CHECK(std::abs(p.value - scattering_phase(-r, d).value) < 1e-9);
    }
    ScatteringData bare;
    bare.level = 3;
    bare.k = 4;
    const PhaseValue p0 = scattering_phase(0.0, bare);
    CHECK(p0.a_term_omitted);
    CHECK(p0.value == doctest::Approx(4 * (2 * std::numbers::egamma + 4 * std::numbers::ln2)).epsilon(1e-13));
    // the A term is a pure shift
    CHECK(scattering_phase(2.0, d).value - scattering_phase(2.0, [&] {
              ScatteringData x = d;
              x.A.reset();
              return x;
          }()).value == doctest::Approx(-2 * std::log(*d.A)).epsilon(1e-12));
    const SlopeReport rep = verify_scattering_log_bound(d, 1000.0, 120);
    CHECK(rep.pass);
    CHECK(rep.slope <= 0.02);
    CHECK(std::isfinite(rep.sup));
}

TEST_CASE("trace formula terms, evenness and spectral positivity") {
    for (auto [N, R] : {std::pair{3, 3.8}, std::pair{4, 3.8}, std::pair{5, 3.8}}) {
        CAPTURE(N);
        const SelbergTraceFormula& tf = formula(N, R);
        double worst = 1e300;
        for (double t = 0; t <= 200; t += 0.25) {
            const TraceFormulaEvaluation e = tf.evaluate(t);
            const double sum = e.identity_term + e.hyperbolic_term + e.scattering_integral + e.scattering_half +
                               e.digamma_integral + e.m_half_term + e.log2_term;
            CHECK(std::abs(e.total - sum) <= 1e-12 * e.scale());
            worst = std::min(worst, e.total / e.scale());
            if (std::fmod(t, 10.0) == 0) CHECK(std::abs(tf.evaluate(-t).total - e.total) < 1e-9);
        }
        CHECK(worst >= -1e-6);
    }
    const TraceFormulaEvaluation e = formula(3, 3.8).evaluate(12.0);
    CHECK(e.hyperbolic_term == 0.0);
}

TEST_CASE("positivity with hyperbolic terms once the constant eigenfunction is removed") {
    // With support 7.5 the hyperbolic sum is non-empty for N = 3, 4, 5 and the
    // constant-eigenfunction term makes the raw total negative near t = 1.
    for (int N : {3, 4, 5}) {
        CAPTURE(N);
        const SelbergTraceFormula& tf = formula(N, 7.5);
        CHECK(tf.evaluate(0.3).hyperbolic_term != 0.0);
        double raw = 1e300, reduced = 1e300;
        for (double t = 0; t <= 40; t += 0.1) {
            const TraceFormulaEvaluation e = tf.evaluate(t);
            raw = std::min(raw, e.total / e.scale());
            reduced = std::min(reduced, (e.total - tf.constant_eigenfunction_term(t)) / e.scale());
        }
        CHECK(raw < 0);
        CHECK(reduced >= -1e-6);
    }
    // the constant term is the transform at r = i/2, checked against the direct integral at t = 0
    const auto h = TestFunction::autocorrelation(1, 3.8, 1025);
    const double direct =
        integrate_gl([&](double x) { return 2 * h.value_iso({x}).real() * std::cosh(0.5 * x); }, -3.8, 3.8, 200);
    CHECK(formula(3, 3.8).constant_eigenfunction_term(0.0) == doctest::Approx(direct).epsilon(1e-12));
}

TEST_CASE("tabulated and direct scattering phase agree inside the trace formula") {
    const auto h = TestFunction::autocorrelation(1, 3.8, 1025);
    const CongruenceGroup g = group_data(4);
    const SelbergTraceFormula direct(h, g, length_spectrum(4, 3.8), shipped(4), 0.0);
    for (double t : {0.0, 7.3, 41.0}) {
        const auto a = formula(4, 3.8).evaluate(t);
        const auto b = direct.evaluate(t);
        CHECK(std::abs(a.scattering_integral - b.scattering_integral) < 1e-9 * std::max(1.0, std::abs(b.scattering_integral)));
        CHECK(geometric_side(h, t, g, length_spectrum(4, 3.8), shipped(4)).total == doctest::Approx(b.total).epsilon(1e-13));
    }
}

TEST_CASE("identity term grows linearly") {
    const SelbergTraceFormula& tf = formula(3, 3.8);
    const std::vector<double> t = logspace(10.0, 250.0, 25);
    std::vector<double> ratio;
    for (double x : t) ratio.push_back(tf.evaluate(x).identity_term / x);
    const std::vector<double> sup = running_max(ratio);
    CHECK(fit_loglog_tail(t, sup, 0.5).slope <= 0.02);
}

TEST_CASE("smoothed count") {
    const SelbergTraceFormula& tf = formula(3, 3.8);
    CHECK(std::abs(tf.smoothed_count(1e-4).integral) < 1e-3);
    CHECK(std::abs(tf.smoothed_count(0.0).integral) < 1e-12);
    // int over [-lambda, lambda] of evaluate(t) against the Fubini form
    const double lambda = 6.0;
    const double direct = integrate_gl([&](double t) { return tf.evaluate(t).total; }, -lambda, lambda, 48) /
                          (2 * pi * TestFunction::autocorrelation(1, 3.8, 1025).value_iso({0.0}).real());
    CHECK(tf.smoothed_count(lambda).integral == doctest::Approx(direct).epsilon(1e-8));
    const SmoothedCount c = tf.smoothed_count(200.0);
    CHECK(c.weyl_prediction == doctest::Approx(group_data(3).area / (2 * pi) * 40000).epsilon(1e-14));
    CHECK(c.residual == doctest::Approx(c.integral - c.weyl_prediction));
    const std::string csv = smoothed_count_csv({c});
    CHECK(csv.rfind("lambda,integral,weyl_prediction,residual\n", 0) == 0);
    CHECK(trace_formula_csv({tf.evaluate(1.0)}).rfind("t,identity,hyperbolic,scatter_int,scatter_half,digamma_int,m_half,log2,total\n", 0) == 0);
}

TEST_CASE("trace formula input checks") {
    const auto h = TestFunction::autocorrelation(1, 5.0, 1025);
    CHECK_THROWS_AS(SelbergTraceFormula(h, group_data(3), length_spectrum(3, 4.0), shipped(3), 0.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(SelbergTraceFormula(h, group_data(3), length_spectrum(4, 5.0), shipped(3), 0.0),
                    std::invalid_argument);
    const auto h2 = TestFunction::autocorrelation(2, 3.0, 257);
    CHECK_THROWS_AS(SelbergTraceFormula(h2, group_data(3), length_spectrum(3, 3.0), shipped(3), 0.0),
                    std::invalid_argument);
}

TEST_CASE("Selberg parameter conversion") {
    const SpectralPoint p = selberg_to_spectral(2.5);
    CHECK(p[0] == cdouble(0, 2.5));
    CHECK(p[1] == cdouble(0, -2.5));
    CHECK(selberg_dual_norm(2.5, Form(2, FormKind::trace)) == doctest::Approx(2.5 * std::sqrt(2.0)).epsilon(1e-15));
    CHECK(selberg_dual_norm(2.5, Form(2, FormKind::killing)) == doctest::Approx(2.5 / std::sqrt(2.0)).epsilon(1e-15));
    CHECK_THROWS_AS(selberg_dual_norm(1.0, Form(3)), std::invalid_argument);
}
