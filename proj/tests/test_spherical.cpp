#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "weyl_lab/spherical.hpp"

using namespace weyl_lab;

namespace {

const double pi = std::numbers::pi;

Eigen::MatrixXd random_matrix(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    Eigen::MatrixXd m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = g(rng);
    return m;
}

// H_i = (1/2) log(D_{n-i} / D_{n-i-1}) (0-based i) from trailing principal minors
// D_k of g g^T, then projected to trace zero.
std::vector<double> minors_oracle(const Eigen::MatrixXd& g) {
    const int n = static_cast<int>(g.rows());
    const Eigen::MatrixXd s = g * g.transpose();
    std::vector<double> d(static_cast<std::size_t>(n + 1), 1.0);
    for (int k = 1; k <= n; ++k) d[static_cast<std::size_t>(k)] = s.bottomRightCorner(k, k).determinant();
    std::vector<double> h(static_cast<std::size_t>(n));
    double mean = 0;
    for (int i = 0; i < n; ++i) {
        h[static_cast<std::size_t>(i)] =
            0.5 * std::log(d[static_cast<std::size_t>(n - i)] / d[static_cast<std::size_t>(n - i - 1)]);
        mean += h[static_cast<std::size_t>(i)] / n;
    }
    for (auto& x : h) x -= mean;
    return h;
}

// phi_{iu}(diag(e^s, e^-s)) = (1/2pi) int (sin^2 t e^{2s} + cos^2 t e^{-2s})^{-(1/2 + iu)} dt
cdouble phi_sl2_oracle(double u, double s) {
    using boost::math::quadrature::gauss_kronrod;
    auto part = [&](int which) {
        auto f = [&](double t) {
            const double d = std::sin(t) * std::sin(t) * std::exp(2 * s) + std::cos(t) * std::cos(t) * std::exp(-2 * s);
            const cdouble v = std::exp(-cdouble(0.5, u) * std::log(d));
            return which == 0 ? v.real() : v.imag();
        };
        return gauss_kronrod<double, 61>::integrate(f, 0.0, 2 * pi, 15, 1e-14) / (2 * pi);
    };
    return {part(0), part(1)};
}

SpectralPoint random_imag(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    std::vector<cdouble> v(static_cast<std::size_t>(n));
    cdouble mean = 0;
    for (auto& x : v) mean += (x = cdouble(0, 2 * g(rng)));
    for (auto& x : v) x -= mean / static_cast<double>(n);
    return SpectralPoint(v);
}

}  // namespace

TEST_CASE("Iwasawa projection basics") {
    const auto h0 = iwasawa_H(Eigen::MatrixXd::Identity(3, 3));
    for (int i = 0; i < 3; ++i) CHECK(std::abs(h0[i]) < 1e-15);
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(3, 3);
    a(0, 0) = std::exp(1.0);
    a(1, 1) = 1;
    a(2, 2) = std::exp(-1.0);
    const auto h = iwasawa_H(a);
    CHECK(h[0] == doctest::Approx(1.0));
    CHECK(std::abs(h[1]) < 1e-15);
    CHECK(h[2] == doctest::Approx(-1.0));
    CHECK_THROWS_AS(iwasawa_H(Eigen::MatrixXd::Zero(3, 3)), std::invalid_argument);
}

TEST_CASE("Iwasawa projection matches the trailing-minor identity") {
    std::mt19937_64 rng(8);
    for (int k = 0; k < 1000; ++k) {
        const int n = 2 + k % 3;
        const Eigen::MatrixXd g = random_matrix(n, rng);
        const auto h = iwasawa_H(g);
        const auto o = minors_oracle(g);
        for (int i = 0; i < n; ++i) CHECK(std::abs(h[i] - o[static_cast<std::size_t>(i)]) < 1e-10);
    }
}

TEST_CASE("H(a k) = log a") {
    std::mt19937_64 rng(9);
    for (int n = 2; n <= 5; ++n) {
        const HaarStream stream(n, 4);
        for (std::uint64_t s = 0; s < 50; ++s) {
            std::normal_distribution<double> g;
            std::vector<double> x(static_cast<std::size_t>(n));
            double mean = 0;
            for (auto& v : x) mean += (v = g(rng));
            for (auto& v : x) v -= mean / n;
            const CartanVector xv(x);
            const auto h = iwasawa_H(GroupPoint::from_cartan(xv).matrix() * stream.sample(s));
            for (int i = 0; i < n; ++i) CHECK(std::abs(h[i] - x[static_cast<std::size_t>(i)]) < 1e-12);
        }
    }
}

TEST_CASE("Haar samples") {
    QuadratureSpec spec;
    spec.sample_count = 20000;
    spec.seed = 3;
    for (int n = 2; n <= 4; ++n) {
        const auto ks = haar_so_n(n, spec);
        double m1 = 0, m2 = 0, m4 = 0;
        for (const auto& k : ks) {
            CHECK((k.transpose() * k - Eigen::MatrixXd::Identity(n, n)).norm() <= 1e-12);
            CHECK(k.determinant() == doctest::Approx(1.0));
            m1 += k(0, 0);
            m2 += k(0, 0) * k(0, 0);
            m4 += std::pow(k(0, 0), 4);
        }
        const double N = static_cast<double>(ks.size());
        m1 /= N;
        m2 /= N;
        m4 /= N;
        // a column of a Haar rotation is uniform on S^{n-1}: E k11 = 0, E k11^2 = 1/n
        CHECK(std::abs(m1) <= 3 * std::sqrt(1.0 / n / N));
        CHECK(std::abs(m2 - 1.0 / n) <= 3 * std::sqrt((m4 - m2 * m2) / N));
    }
    // determinism of the indexed stream
    const HaarStream s1(3, 77), s2(3, 77);
    CHECK((s1.sample(12345) - s2.sample(12345)).norm() == 0.0);
}

TEST_CASE("spherical function trivial values") {
    QuadratureSpec spec;
    spec.sample_count = 1000;
    std::mt19937_64 rng(1);
    const auto l = random_imag(3, rng);
    const GroupPoint id(Eigen::MatrixXd::Identity(3, 3));
    const auto e = spherical_phi(l, id, spec);
    CHECK(std::abs(e.value - 1.0) < 1e-12);
    // lambda = -rho: the exponent vanishes identically
    const SpectralPoint mrho({-1.0, 0.0, 1.0});
    const GroupPoint g = GroupPoint::normalized(random_matrix(3, rng));
    CHECK(std::abs(spherical_phi(mrho, g, spec).value - 1.0) < 1e-12);
}

TEST_CASE("spherical function for n = 2 matches the angular integral") {
    for (double u : {0.0, 0.7, 2.5})
        for (double s : {0.3, 1.2}) {
            std::vector<double> x{s, -s};
            const GroupPoint g = GroupPoint::from_cartan(CartanVector(x));
            const SpectralPoint l({cdouble(0, u), cdouble(0, -u)});
            const cdouble oracle = phi_sl2_oracle(u, s);
            QuadratureSpec mc;
            mc.sample_count = 40000;
            mc.seed = 21;
            const auto e = spherical_phi(l, g, mc);
            CHECK(std::abs(e.value - oracle) <= 3 * e.std_error);
            QuadratureSpec pa;
            pa.method = QuadratureMethod::product_angles;
            pa.sample_count = 400;
            const auto q = spherical_phi(l, g, pa);
            CHECK(std::abs(q.value - oracle) <= 1e-10);
        }
}

TEST_CASE("product-angle quadrature agrees with Monte Carlo for n = 3") {
    std::mt19937_64 rng(12);
    const auto l = random_imag(3, rng);
    const GroupPoint g = GroupPoint::from_cartan(CartanVector({0.6, -0.1, -0.5}));
    QuadratureSpec pa;
    pa.method = QuadratureMethod::product_angles;
    pa.sample_count = 48 * 48 * 48;
    const auto q = spherical_phi(l, g, pa);
    pa.sample_count = 64 * 64 * 64;
    CHECK(std::abs(spherical_phi(l, g, pa).value - q.value) < 1e-8);
    QuadratureSpec mc;
    mc.sample_count = 50000;
    const auto e = spherical_phi(l, g, mc);
    CHECK(std::abs(e.value - q.value) <= 4 * e.std_error);
}

TEST_CASE("Weyl invariance and boundedness") {
    std::mt19937_64 rng(31);
    QuadratureSpec mc;
    mc.sample_count = 20000;
    for (int trial = 0; trial < 10; ++trial) {
        const auto l = random_imag(3, rng);
        const GroupPoint g = GroupPoint::normalized(random_matrix(3, rng));
        mc.seed = 100 + static_cast<std::uint64_t>(trial);
        const auto w = WeylElement::random(3, rng);
        const auto d = spherical_phi_difference(w.act(l), l, g, mc);
        CHECK(std::abs(d.value) <= 6 * d.std_error);
        const auto e = spherical_phi(l, g, mc);
        const auto e0 = spherical_phi(SpectralPoint({0.0, 0.0, 0.0}), g, mc);
        CHECK(std::abs(e.value) <= e0.value.real() + 6 * e0.std_error);
        CHECK(e0.value.real() <= 1 + 3 * e0.std_error);
    }
}

TEST_CASE("Kostant convexity") {
    const CartanVector xi2({1.0, -1.0});
    const auto x0 = kostant_projection(xi2, Eigen::MatrixXd::Identity(2, 2));
    CHECK(x0 == std::vector<double>{1.0, -1.0});
    Eigen::MatrixXd r(2, 2);
    const double c = std::cos(pi / 4), s = std::sin(pi / 4);
    r << c, -s, s, c;
    const auto xm = kostant_projection(xi2, r);
    CHECK(std::abs(xm[0]) < 1e-15);
    CHECK(std::abs(xm[1]) < 1e-15);
    QuadratureSpec spec;
    spec.sample_count = 10000;
    const auto rep = kostant_check(CartanVector({1.0, 0.25, -1.25}), spec);
    CHECK(rep.pass);
    CHECK(rep.samples == 10000);
    // a point outside the permutohedron is detected
    CHECK(hull_violation({1.2, 0.0, -1.2}, {1.0, 0.25, -1.25}) > 0.1);
    CHECK(hull_violation({0.0, 0.0, 0.0}, {1.0, 0.25, -1.25}) == 0.0);
    CHECK_THROWS_AS(kostant_check(CartanVector({0.0, 0.0}), spec), std::invalid_argument);
}
