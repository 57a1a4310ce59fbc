#include "doctest.h"

#include <cmath>
#include <random>
#include <set>

#include "weyl_lab/rootsys.hpp"

using namespace weyl_lab;

namespace {

// Bell numbers by the triangle recurrence, independent of the enumerator.
std::uint64_t bell(int n) {
    std::vector<std::uint64_t> row{1};
    for (int i = 1; i <= n; ++i) {
        std::vector<std::uint64_t> next{row.back()};
        for (auto v : row) next.push_back(next.back() + v);
        row = next;
    }
    return row.front();
}

std::vector<cdouble> random_imaginary(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    std::vector<cdouble> v(static_cast<std::size_t>(n));
    cdouble mean = 0;
    for (auto& x : v) mean += (x = cdouble(0, g(rng)));
    for (auto& x : v) x -= mean / static_cast<double>(n);
    return v;
}

double form_inner(const Form& f, const SpectralPoint& a, const SpectralPoint& b) {
    cdouble s = 0;
    for (int i = 0; i < a.n(); ++i) s += a[i] * std::conj(b[i]);
    return std::abs(s) / f.scale();
}

}  // namespace

TEST_CASE("rho and dimensions") {
    CHECK(rho(2).coords() == std::vector<double>{0.5, -0.5});
    CHECK(rho(3).coords() == std::vector<double>{1.0, 0.0, -1.0});
    for (int n = 2; n <= 6; ++n) {
        const auto r = rho(n);
        for (int i = 0; i + 1 < n; ++i) CHECK(r[i] - r[i + 1] == doctest::Approx(1.0));
    }
    CHECK(dims(2).d == 2);
    CHECK(dims(2).r == 1);
    CHECK(dims(3).d == 5);
    CHECK(dims(3).r == 2);
    CHECK(dims(4).d == 9);
    CHECK(dims(4).r == 3);
    CHECK_THROWS_AS(rho(1), std::invalid_argument);
    CHECK_THROWS_AS(dims(1), std::invalid_argument);
}

TEST_CASE("forms, chart and invariants") {
    const Form k3(3), t3(3, FormKind::trace);
    CHECK(k3.scale() == 6.0);
    CHECK(t3.scale() == 1.0);
    CHECK(parse_form("trace") == FormKind::trace);
    CHECK_THROWS_AS(parse_form("euclid"), std::invalid_argument);
    const Eigen::MatrixXd& b = k3.chart();
    CHECK((b.transpose() * b - Eigen::MatrixXd::Identity(2, 2)).norm() < 1e-14);
    CHECK((b.transpose() * Eigen::VectorXd::Ones(3)).norm() < 1e-14);
    CHECK_THROWS_AS(CartanVector({1.0, 0.0, 0.0}), std::invalid_argument);
    const std::vector<double> x{1.0, -0.5, -0.5};
    CHECK(k3.norm(x) == doctest::Approx(std::sqrt(6.0 * 1.5)));
    CHECK(k3.dual_norm(x) == doctest::Approx(std::sqrt(1.5 / 6.0)));
    const CartanVector v(x);
    const auto y = v.to_chart(k3);
    const auto back = CartanVector::from_chart(k3, y);
    for (int i = 0; i < 3; ++i) CHECK(back[i] == doctest::Approx(x[static_cast<std::size_t>(i)]).epsilon(1e-14));
}

TEST_CASE("Weyl group axioms and norm invariance") {
    const auto w3 = WeylElement::enumerate(3);
    CHECK(w3.size() == 6);
    CHECK(WeylElement::enumerate(5).size() == 120);
    for (const auto& a : w3) {
        CHECK(a * a.inverse() == WeylElement::identity(3));
        for (const auto& b : w3)
            for (const auto& c : w3) CHECK((a * b) * c == a * (b * c));
    }
    std::mt19937_64 rng(11);
    const Form f(5);
    for (int k = 0; k < 1000; ++k) {
        const auto w = WeylElement::random(5, rng);
        const SpectralPoint l(random_imaginary(5, rng));
        const auto wl = w.act(l);
        CHECK(std::abs(f.dual_norm(std::span<const cdouble>(wl.coords())) -
                       f.dual_norm(std::span<const cdouble>(l.coords()))) < 1e-12);
        // action is compatible with composition
        const auto v = WeylElement::random(5, rng);
        const auto lhs = (w * v).act(l), rhs = w.act(v.act(l));
        for (int i = 0; i < 5; ++i) CHECK(lhs[i] == rhs[i]);
    }
}

TEST_CASE("levi decomposition") {
    const SpectralPoint l({cdouble(0, 2), 0.0, cdouble(0, -2)});
    const auto dec = levi_decompose(l, LeviSubgroup::standard({2, 1}));
    const std::vector<cdouble> center{cdouble(0, 1), cdouble(0, 1), cdouble(0, -2)};
    const std::vector<cdouble> upper{cdouble(0, 1), cdouble(0, -1), 0.0};
    for (int i = 0; i < 3; ++i) {
        CHECK(std::abs(dec.along_center[i] - center[static_cast<std::size_t>(i)]) < 1e-15);
        CHECK(std::abs(dec.along_levi[i] - upper[static_cast<std::size_t>(i)]) < 1e-15);
    }
    const auto m0 = levi_decompose(l, LeviSubgroup::minimal(3));
    for (int i = 0; i < 3; ++i) {
        CHECK(m0.along_center[i] == l[i]);
        CHECK(m0.along_levi[i] == 0.0);
    }
    std::mt19937_64 rng(3);
    const Form f(4);
    for (const auto& m : enumerate_levis(4))
        for (int k = 0; k < 20; ++k) {
            const SpectralPoint x(random_imaginary(4, rng));
            const auto d = levi_decompose(x, m);
            CHECK(form_inner(f, d.along_center, d.along_levi) < 1e-12);
            const auto again = levi_decompose(d.along_center, m);
            for (int i = 0; i < 4; ++i) CHECK(std::abs(again.along_levi[i]) < 1e-12);
        }
}

TEST_CASE("fixed Levi of a Weyl element and its +1 eigenspace") {
    CHECK(fixed_levi(WeylElement::identity(3)) == LeviSubgroup::minimal(3));
    CHECK(fixed_levi(WeylElement({1, 0, 2})) == LeviSubgroup::standard({2, 1}));
    CHECK(fixed_levi(WeylElement({1, 2, 0})) == LeviSubgroup::full(3));
    std::mt19937_64 rng(5);
    for (int k = 0; k < 1000; ++k) {
        const int n = 2 + static_cast<int>(rng() % 5);
        const auto w = WeylElement::random(n, rng);
        const auto m = fixed_levi(w);
        // blocks equal cycles as sets
        std::set<std::vector<int>> cyc;
        for (auto c : w.cycles()) {
            std::sort(c.begin(), c.end());
            cyc.insert(c);
        }
        CHECK(std::set<std::vector<int>>(m.blocks().begin(), m.blocks().end()) == cyc);
        if (k < 100) {
            // dim of the +1 eigenspace of the permutation matrix equals the block count
            Eigen::MatrixXd a = w.matrix() - Eigen::MatrixXd::Identity(n, n);
            Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
            int null = 0;
            for (int i = 0; i < n; ++i) null += svd.singularValues()(i) < 1e-10;
            CHECK(null == static_cast<int>(m.blocks().size()));
        }
    }
}

TEST_CASE("Levi lattice") {
    CHECK(enumerate_levis(2).size() == 2);
    CHECK(enumerate_levis(3).size() == 5);
    for (int n = 2; n <= 6; ++n) CHECK(enumerate_levis(n).size() == bell(n));
    CHECK_THROWS_AS(enumerate_levis(9), std::invalid_argument);
    const auto all = enumerate_levis(4);
    for (const auto& a : all) {
        CHECK(a.refines(a));
        CHECK(LeviSubgroup::minimal(4).refines(a));
        CHECK(a.refines(LeviSubgroup::full(4)));
        for (const auto& b : all) {
            if (a.refines(b) && b.refines(a)) CHECK(a == b);
            const auto m = a.meet(b), j = a.join(b);
            CHECK(m.refines(a));
            CHECK(m.refines(b));
            CHECK(a.refines(j));
            CHECK(b.refines(j));
            for (const auto& c : all) {
                if (c.refines(a) && c.refines(b)) CHECK(c.refines(m));
                if (a.refines(c) && b.refines(c)) CHECK(j.refines(c));
            }
        }
    }
    CHECK(maximal_levis(4).size() == 7);
    CHECK(LeviSubgroup::standard({2, 1}).to_string() == "{1,2}|{3}");
}
