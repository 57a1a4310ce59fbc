#include "doctest.h"

#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "weyl_lab/numerics.hpp"
#include "weyl_lab/weyl_main.hpp"

using namespace weyl_lab;

namespace {

const double pi = std::numbers::pi;

// int_0^W v tanh v dv = W^2/2 - pi^2/24 + W log(1 + e^{-2W}) - Li2(-e^{-2W})/2.
double v_tanh_integral(double W) {
    const double q = -std::exp(-2 * W);
    double li2 = 0, term = 1;
    for (int k = 1; k < 400; ++k) {
        term *= q;
        li2 += term / (static_cast<double>(k) * k);
    }
    return 0.5 * W * W - pi * pi / 24 + W * std::log1p(std::exp(-2 * W)) - 0.5 * li2;
}

// n = 2: beta(iu, -iu) = pi u tanh(pi u) and d lambda = du / (pi sqrt(2c)); the ball of
// radius t in the dual norm is |u| <= t sqrt(c/2).
double main_term_n2_ball(double t, double c) {
    const double U = t * std::sqrt(c / 2);
    return v_tanh_integral(pi * U) / (pi * pi * std::sqrt(2 * c));
}

double beta_iso(const Form& f, const std::vector<double>& xi) {
    const Eigen::MatrixXd& B = f.chart();
    std::vector<cdouble> lam(static_cast<std::size_t>(f.n()));
    for (int i = 0; i < f.n(); ++i) {
        double v = 0;
        for (int c = 0; c < f.rank(); ++c) v += B(i, c) * xi[static_cast<std::size_t>(c)];
        lam[static_cast<std::size_t>(i)] = cdouble(0, std::sqrt(f.scale()) * v);
    }
    return PlancherelDensity(f).beta(SpectralPoint(lam));
}

// Cartesian nested Gauss-Kronrod over {(x, y) : |x| <= a, |y| <= ylim(x)} for n = 3.
template <class Lim>
double cartesian_main_n3(const Form& f, double a, Lim ylim) {
    using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
    auto outer = [&](double x) {
        const double yl = ylim(x);
        auto inner = [&](double y) { return beta_iso(f, {x, y}); };
        return GK::integrate(inner, -yl, 0.0, 15, 1e-11) + GK::integrate(inner, 0.0, yl, 15, 1e-11);
    };
    const double v = GK::integrate(outer, -a, 0.0, 15, 1e-10) + GK::integrate(outer, 0.0, a, 15, 1e-10);
    return v / (6 * 4 * pi * pi);
}

std::vector<std::vector<double>> root_directions(const Form& f) {
    std::vector<std::vector<double>> out;
    const Eigen::MatrixXd& B = f.chart();
    for (int i = 0; i < f.n(); ++i)
        for (int j = 0; j < f.n(); ++j)
            if (i != j) {
                Eigen::RowVectorXd v = B.row(i) - B.row(j);
                v.normalize();
                out.push_back({v(0), v(1)});
            }
    return out;
}

}  // namespace

TEST_CASE("domain geometry") {
    const auto ball = SpectralDomain::ball(2, 2.0);
    CHECK(ball.contains({1.0, 1.0}));
    CHECK_FALSE(ball.contains({1.5, 1.5}));
    CHECK(ball.contains({1.5, 1.5}, 2.0));
    CHECK(ball.boundary_distance({0.0, 1.0}, 1.0) == doctest::Approx(1.0));
    CHECK(ball.w_invariant());

    const auto box = SpectralDomain::box({1.0, 2.0});
    CHECK(box.radial_extent({1.0, 0.0}) == doctest::Approx(1.0));
    CHECK(box.radial_extent({std::sqrt(0.5), std::sqrt(0.5)}) == doctest::Approx(std::sqrt(2.0)));
    CHECK(box.bounding_radius() == doctest::Approx(std::sqrt(5.0)));
    CHECK(box.corner_angles().size() == 4);
    CHECK(box.boundary_distance({0.0, 0.0}, 1.0) == doctest::Approx(1.0));
    CHECK(box.boundary_distance({3.0, 0.0}, 1.0) == doctest::Approx(2.0));
    CHECK(box.boundary_distance({2.0, 3.0}, 1.0) == doctest::Approx(std::sqrt(2.0)));

    const auto seg = SpectralDomain::halfspaces({{1.0}, {-1.0}}, {2.0, 0.5});
    CHECK(seg.contains({1.9}));
    CHECK_FALSE(seg.contains({-0.6}));
    CHECK(seg.boundary_distance({0.0}, 2.0) == doctest::Approx(1.0));
    CHECK(seg.bounding_radius() == doctest::Approx(2.0));

    CHECK_THROWS_AS(SpectralDomain::halfspaces({{1.0, 0.0}, {0.0, 1.0}}, {1.0, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(SpectralDomain::halfspaces({{1.0}, {-1.0}}, {1.0, -0.5}), std::invalid_argument);
    CHECK_THROWS_AS(SpectralDomain::ball(1, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(SpectralDomain::box({1.0, -1.0}), std::invalid_argument);
}

TEST_CASE("Weyl invariance check") {
    const Form f2(2), f3(3);
    CHECK(SpectralDomain::ball(2, 1.0).check_w_invariance(f3, 2000, 1));
    CHECK(SpectralDomain::box({1.0}).check_w_invariance(f2, 2000, 1));
    CHECK_FALSE(SpectralDomain::halfspaces({{1.0}, {-1.0}}, {2.0, 0.5}).check_w_invariance(f2, 2000, 1));
    CHECK_FALSE(SpectralDomain::box({1.0, 1.0}).check_w_invariance(f3, 2000, 1));
    const auto roots = root_directions(f3);
    const auto hexagon = SpectralDomain::halfspaces(roots, std::vector<double>(roots.size(), 1.0), true);
    CHECK(hexagon.corner_angles().size() == 6);
    CHECK(hexagon.check_w_invariance(f3, 2000, 1));
}

TEST_CASE("main term n = 2 closed form") {
    for (auto kind : {FormKind::killing, FormKind::trace}) {
        const Form f(2, kind);
        for (double t : {0.5, 1.0, 10.0, 100.0, 200.0}) {
            const auto res = main_term(SpectralDomain::ball(1, 1.0), t, f, {1e-8});
            const double oracle = main_term_n2_ball(t, f.scale());
            CHECK(std::abs(res.value - oracle) <= 1e-8 * oracle);
            CHECK(res.error_estimate <= 1e-6 * oracle);
        }
    }
    // Asymmetric interval: the two halves are half-balls of different radii.
    const Form f(2);
    const auto seg = SpectralDomain::halfspaces({{1.0}, {-1.0}}, {3.0, 1.0});
    const double oracle = 0.5 * (main_term_n2_ball(3.0 * 7, f.scale()) + main_term_n2_ball(7, f.scale()));
    CHECK(main_term(seg, 7.0, f).value == doctest::Approx(oracle).epsilon(1e-7));
}

TEST_CASE("main term n = 3 against Cartesian quadrature") {
    for (auto kind : {FormKind::killing, FormKind::trace}) {
        const Form f(3, kind);
        const double T = 4.0;
        const double disk = cartesian_main_n3(f, T, [&](double x) { return std::sqrt(std::max(0.0, T * T - x * x)); });
        CHECK(main_term(SpectralDomain::ball(2, 1.0), T, f, {1e-8}).value == doctest::Approx(disk).epsilon(1e-7));
        const double box = cartesian_main_n3(f, 3.0, [](double) { return 1.5; });
        CHECK(main_term(SpectralDomain::box({1.0, 0.5}), 3.0, f, {1e-8}).value == doctest::Approx(box).epsilon(1e-7));
    }
}

TEST_CASE("main term growth and symmetrization") {
    for (int n : {2, 3}) {
        const Form f(n);
        const auto omega = SpectralDomain::ball(n - 1, 1.0);
        const double m100 = main_term(omega, 100, f).value, m200 = main_term(omega, 200, f).value;
        CHECK(std::log(m200 / m100) / std::log(2.0) == doctest::Approx(dims(n).d).epsilon(5e-3));
        double prev = 0;
        for (double t : {1.0, 2.0, 5.0, 20.0}) {
            const double m = main_term(omega, t, f).value;
            CHECK(m > prev);
            prev = m;
        }
    }
    const Form f3(3);
    const auto box = SpectralDomain::box({1.0, 0.3});
    const double plain = main_term(box, 8.0, f3, {1e-9}).value;
    const double sym = main_term(box, 8.0, f3, {1e-9, true}).value;
    CHECK(std::abs(plain - sym) <= 1e-9 * plain);
    CHECK_THROWS_AS(main_term(box, 0.0, f3), std::invalid_argument);
    CHECK_THROWS_AS(main_term(box, 1.0, Form(2)), std::invalid_argument);
}

TEST_CASE("Weyl constant") {
    CHECK(weyl_constant(2, 4 * pi) == doctest::Approx(1.0));
    // d = 5: (4 pi)^{5/2} Gamma(7/2)
    CHECK(weyl_constant(3, 1.0) == doctest::Approx(1.0 / (std::pow(4 * pi, 2.5) * 15.0 * std::sqrt(pi) / 8.0)));
    CHECK_THROWS_AS(weyl_constant(3, 0.0), std::invalid_argument);
}

TEST_CASE("boundary shell volume") {
    const auto seg = SpectralDomain::box({1.0});
    const auto v = boundary_shell_volume(seg, 10.0, 0.5, 200000, 3);
    CHECK(std::abs(v.value - 2.0) <= 5 * v.std_error);
    const auto disk = SpectralDomain::ball(2, 1.5);
    const auto a = boundary_shell_volume(disk, 4.0, 0.25, 200000, 5);
    CHECK(std::abs(a.value - 4 * pi * 6.0 * 0.25) <= 5 * a.std_error);
    CHECK(boundary_shell_volume(disk, 4.0, 0.0).value == 0.0);
    CHECK_THROWS_AS(boundary_shell_volume(disk, 4.0, -1.0), std::invalid_argument);
}

TEST_CASE("shell error rank 1 against the convolved density") {
    // E = (1/2)(2 pi)^{-1} int_{t Omega} [(beta * hhat/2pi)(x) - beta(x)] dx, using int hhat = 2 pi h(0).
    const Form f(2);
    const auto h = TestFunction::autocorrelation(f, 3.0, 1025);
    const double a = 1.0, b = 0.6, t = 6.0;
    const auto seg = SpectralDomain::halfspaces({{1.0}, {-1.0}}, {a, b});
    auto beta = [&](double xi) {
        const double u = xi * std::sqrt(f.scale() / 2);
        return pi * u * std::tanh(pi * u);
    };
    const double Y = 220.0;
    const QuadratureRule ref = gauss_legendre(16);
    std::vector<double> ys, ws;
    for (double p = -Y; p < Y - 1e-9; p += 0.25)
        for (std::size_t i = 0; i < ref.nodes.size(); ++i) {
            const double y = p + 0.125 * (ref.nodes[i] + 1);
            ys.push_back(y);
            ws.push_back(0.125 * ref.weights[i] * h.radial_fourier(std::abs(y)) / (2 * pi));
        }
    auto excess = [&](double x) {
        double s = 0;
        for (std::size_t i = 0; i < ys.size(); ++i) s += ws[i] * (beta(x + ys[i]) - beta(x));
        return s;
    };
    const double oracle = (integrate_gl(excess, -t * b, 0.0, 8) + integrate_gl(excess, 0.0, t * a, 8)) / (2 * 2 * pi);
    CHECK(shell_error(seg, h, t) == doctest::Approx(oracle).epsilon(1e-6));
}

TEST_CASE("shell error scaling") {
    const Form f3(3);
    const auto h = TestFunction::autocorrelation(f3, 3.0, 257);
    const double e1 = shell_error(SpectralDomain::ball(2, 1.0), h, 30.0);
    const double e2 = shell_error(SpectralDomain::ball(2, 2.0), h, 15.0);
    CHECK(e1 == doctest::Approx(e2).epsilon(1e-10));
    const auto rep = shell_error_experiment(SpectralDomain::ball(2, 1.0), h, {25, 50, 100});
    CHECK(rep.pass);
    CHECK(rep.threshold == doctest::Approx(4.1));
    CHECK(rep.slope < 4.1);
    CHECK(rep.main.size() == 3);
    const auto j = to_json(rep);
    CHECK(j["t"].size() == 3);

    const Form f2(2);
    const auto h2 = TestFunction::autocorrelation(f2, 3.0, 1025);
    const auto rep2 = shell_error_experiment(SpectralDomain::ball(1, 1.0), h2, {25, 50, 100, 200});
    CHECK(rep2.pass);

    CHECK_THROWS_AS(shell_error(SpectralDomain::box({1.0, 1.0}), h, 5.0), std::invalid_argument);
    const auto raw = TestFunction::autocorrelation(f3, 3.0, 257, false);
    CHECK_THROWS_AS(shell_error(SpectralDomain::ball(2, 1.0), raw, 5.0), std::invalid_argument);
}
