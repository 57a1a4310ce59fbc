#include "weyl_lab/spherical.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <stdexcept>

#include "weyl_lab/numerics.hpp"

namespace weyl_lab {

namespace {

constexpr double kPi = std::numbers::pi;

Eigen::MatrixXd reversal(int n) {
    Eigen::MatrixXd p = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) p(i, n - 1 - i) = 1.0;
    return p;
}

Eigen::Matrix3d rot_z(double a) {
    Eigen::Matrix3d r;
    r << std::cos(a), -std::sin(a), 0, std::sin(a), std::cos(a), 0, 0, 0, 1;
    return r;
}

Eigen::Matrix3d rot_y(double b) {
    Eigen::Matrix3d r;
    r << std::cos(b), 0, std::sin(b), 0, 1, 0, -std::sin(b), 0, std::cos(b);
    return r;
}

// Weighted rotation nodes of the product-angle rule with m points per angle.
struct AngleRule {
    std::vector<Eigen::MatrixXd> k;
    std::vector<double> w;
};

AngleRule angle_rule(int n, int m) {
    AngleRule rule;
    if (n == 2) {
        for (int i = 0; i < m; ++i) {
            const double t = 2.0 * kPi * i / m;
            Eigen::MatrixXd r(2, 2);
            r << std::cos(t), -std::sin(t), std::sin(t), std::cos(t);
            rule.k.push_back(r);
            rule.w.push_back(1.0 / m);
        }
        return rule;
    }
    // ZYZ Euler angles: dk = sin(b) da db dc / (8 pi^2); Gauss-Legendre in cos(b).
    const QuadratureRule gl = gauss_legendre(m, -1.0, 1.0);
    for (int ia = 0; ia < m; ++ia)
        for (int ib = 0; ib < m; ++ib)
            for (int ic = 0; ic < m; ++ic) {
                const double a = 2.0 * kPi * ia / m, c = 2.0 * kPi * ic / m;
                const double b = std::acos(gl.nodes[static_cast<std::size_t>(ib)]);
                rule.k.push_back(Eigen::MatrixXd(rot_z(a) * rot_y(b) * rot_z(c)));
                rule.w.push_back(gl.weights[static_cast<std::size_t>(ib)] / (2.0 * m * m));
            }
    return rule;
}

// Mean of f over K with an error estimate; f returns one complex value.
SphericalEstimate integrate_K(int n, const QuadratureSpec& spec, const std::function<cdouble(const Eigen::MatrixXd&)>& f) {
    spec.validate();
    SphericalEstimate est;
    if (spec.method == QuadratureMethod::monte_carlo) {
        const HaarStream stream(n, spec.seed);
        cdouble mean = 0;
        double m2 = 0;
        for (long i = 0; i < spec.sample_count; ++i) {
            const cdouble v = f(stream.sample(static_cast<std::uint64_t>(i)));
            const cdouble delta = v - mean;
            mean += delta / static_cast<double>(i + 1);
            m2 += std::real(std::conj(delta) * (v - mean));
        }
        est.value = mean;
        est.samples = spec.sample_count;
        est.std_error = std::sqrt(m2 / static_cast<double>(spec.sample_count - 1) / static_cast<double>(spec.sample_count));
        return est;
    }
    if (n > 3) throw std::invalid_argument("product-angle quadrature is available for n <= 3");
    const int m = n == 2 ? static_cast<int>(spec.sample_count)
                         : std::max(8, static_cast<int>(std::lround(std::cbrt(static_cast<double>(spec.sample_count)))));
    auto apply = [&](const AngleRule& rule) {
        cdouble s = 0;
        for (std::size_t i = 0; i < rule.k.size(); ++i) s += rule.w[i] * f(rule.k[i]);
        return s;
    };
    const AngleRule fine = angle_rule(n, m);
    est.value = apply(fine);
    est.std_error = std::abs(est.value - apply(angle_rule(n, m / 2)));
    est.samples = static_cast<long>(fine.k.size());
    return est;
}

std::vector<double> shifted(const SpectralPoint& lambda, int part) {
    // real or imaginary part of lambda + rho
    const CartanVector r = rho(lambda.n());
    std::vector<double> out(static_cast<std::size_t>(lambda.n()));
    for (int i = 0; i < lambda.n(); ++i)
        out[static_cast<std::size_t>(i)] = part == 0 ? lambda[i].real() + r[i] : lambda[i].imag();
    return out;
}

cdouble kernel(const std::vector<double>& re, const std::vector<double>& im, const CartanVector& h) {
    double a = 0, b = 0;
    for (int i = 0; i < h.n(); ++i) {
        a += re[static_cast<std::size_t>(i)] * h[i];
        b += im[static_cast<std::size_t>(i)] * h[i];
    }
    return std::exp(cdouble(a, b));
}

}  // namespace

GroupPoint::GroupPoint(Eigen::MatrixXd m) : m_(std::move(m)) {
    if (m_.rows() != m_.cols() || m_.rows() < 2) throw std::invalid_argument("group point must be square, n >= 2");
    if (std::abs(std::abs(m_.determinant()) - 1.0) > 1e-12) throw std::invalid_argument("group point needs |det| = 1");
}

GroupPoint GroupPoint::normalized(const Eigen::MatrixXd& m) {
    const double det = m.determinant();
    if (det == 0.0 || !std::isfinite(det)) throw std::invalid_argument("singular matrix");
    const Eigen::MatrixXd scaled = m * std::pow(std::abs(det), -1.0 / static_cast<double>(m.rows()));
    // exact unit determinant up to rounding: absorb the residual into the first row
    Eigen::MatrixXd out = scaled;
    out.row(0) /= std::abs(scaled.determinant());
    return GroupPoint(out);
}

GroupPoint GroupPoint::from_cartan(const CartanVector& x) {
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(x.n(), x.n());
    for (int i = 0; i < x.n(); ++i) d(i, i) = std::exp(x[i]);
    return normalized(d);
}

void QuadratureSpec::validate() const {
    if (sample_count < 100) throw std::invalid_argument("quadrature sample_count must be >= 100");
}

CartanVector iwasawa_H(const Eigen::MatrixXd& g) {
    const int n = static_cast<int>(g.rows());
    if (g.cols() != n || n < 2) throw std::invalid_argument("iwasawa_H needs a square matrix");
    // g = R Q with R upper triangular: from g^T P = Q1 R1 we get R = P R1^T P.
    const Eigen::MatrixXd p = reversal(n);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(g.transpose() * p);
    const Eigen::MatrixXd r1 = qr.matrixQR().triangularView<Eigen::Upper>();
    std::vector<double> h(static_cast<std::size_t>(n));
    const double scale = g.cwiseAbs().maxCoeff();
    double mean = 0;
    for (int i = 0; i < n; ++i) {
        const double d = std::abs(r1(n - 1 - i, n - 1 - i));
        if (!(d > 1e-14 * scale)) throw std::invalid_argument("singular matrix in iwasawa_H");
        h[static_cast<std::size_t>(i)] = std::log(d);
        mean += h[static_cast<std::size_t>(i)];
    }
    mean /= n;
    for (auto& x : h) x -= mean;
    return CartanVector(std::move(h));
}

Eigen::MatrixXd HaarStream::sample(std::uint64_t index) const {
    std::mt19937_64 rng(stream_seed(seed_, index));
    std::normal_distribution<double> normal;
    Eigen::MatrixXd a(n_, n_);
    for (int j = 0; j < n_; ++j)
        for (int i = 0; i < n_; ++i) a(i, j) = normal(rng);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
    Eigen::MatrixXd q = qr.householderQ();
    const Eigen::MatrixXd& r = qr.matrixQR();
    for (int j = 0; j < n_; ++j)
        if (r(j, j) < 0) q.col(j) = -q.col(j);
    if (q.determinant() < 0) q.col(0) = -q.col(0);
    return q;
}

std::vector<Eigen::MatrixXd> haar_so_n(int n, const QuadratureSpec& spec) {
    spec.validate();
    const HaarStream stream(n, spec.seed);
    std::vector<Eigen::MatrixXd> out;
    out.reserve(static_cast<std::size_t>(spec.sample_count));
    for (long i = 0; i < spec.sample_count; ++i) out.push_back(stream.sample(static_cast<std::uint64_t>(i)));
    return out;
}

SphericalEstimate spherical_phi(const SpectralPoint& lambda, const GroupPoint& g, const QuadratureSpec& spec) {
    if (lambda.n() != g.n()) throw std::invalid_argument("rank mismatch");
    const auto re = shifted(lambda, 0), im = shifted(lambda, 1);
    const Eigen::MatrixXd& gm = g.matrix();
    return integrate_K(g.n(), spec, [&](const Eigen::MatrixXd& k) { return kernel(re, im, iwasawa_H(k * gm)); });
}

SphericalEstimate spherical_phi_difference(const SpectralPoint& lambda1, const SpectralPoint& lambda2,
                                           const GroupPoint& g, const QuadratureSpec& spec) {
    if (lambda1.n() != g.n() || lambda2.n() != g.n()) throw std::invalid_argument("rank mismatch");
    const auto re1 = shifted(lambda1, 0), im1 = shifted(lambda1, 1);
    const auto re2 = shifted(lambda2, 0), im2 = shifted(lambda2, 1);
    const Eigen::MatrixXd& gm = g.matrix();
    return integrate_K(g.n(), spec, [&](const Eigen::MatrixXd& k) {
        const CartanVector h = iwasawa_H(k * gm);
        return kernel(re1, im1, h) - kernel(re2, im2, h);
    });
}

std::vector<double> kostant_projection(const CartanVector& xi, const Eigen::MatrixXd& k) {
    const int n = xi.n();
    std::vector<double> x(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) x[static_cast<std::size_t>(i)] += k(j, i) * k(j, i) * xi[j];
    return x;
}

double hull_violation(const std::vector<double>& x, const std::vector<double>& xi) {
    // Rado: x in conv(S_n xi) iff equal sums and sorted partial sums of x are
    // dominated by those of xi.
    std::vector<double> a = x, b = xi;
    std::sort(a.rbegin(), a.rend());
    std::sort(b.rbegin(), b.rend());
    double sa = 0, sb = 0, worst = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        sa += a[i];
        sb += b[i];
        worst = std::max(worst, sa - sb);
    }
    return std::max(worst, std::abs(sa - sb));
}

KostantReport kostant_check(const CartanVector& xi, const QuadratureSpec& spec) {
    spec.validate();
    double norm = 0;
    for (double v : xi.coords()) norm += v * v;
    if (norm == 0.0) throw std::invalid_argument("kostant_check needs nonzero xi");
    const HaarStream stream(xi.n(), spec.seed);
    KostantReport rep;
    for (long i = 0; i < spec.sample_count; ++i) {
        const auto x = kostant_projection(xi, stream.sample(static_cast<std::uint64_t>(i)));
        rep.max_violation = std::max(rep.max_violation, hull_violation(x, xi.coords()));
    }
    rep.samples = spec.sample_count;
    rep.pass = rep.max_violation <= 1e-9;
    return rep;
}

}  // namespace weyl_lab
