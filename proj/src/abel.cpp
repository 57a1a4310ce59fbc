#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "weyl_lab/numerics.hpp"
#include "weyl_lab/testfn.hpp"

namespace weyl_lab {

namespace {

constexpr double kPi = std::numbers::pi;

// Truncation radius of |hhat| along i a*: first isometric radius beyond which the
// transform times (1 + xi)^{power} stays below tol times its running peak.
double transform_cutoff(const TestFunction& h, int power, double tol) {
    double peak = 0;
    const double step = 0.05;
    int quiet = 0;
    for (int j = 0;; ++j) {
        const double xi = j * step;
        if (xi > h.band_limit() / h.dilation())
            throw std::runtime_error("transform does not decay within the grid band limit; use a finer grid");
        const double v = std::abs(h.radial_fourier(xi)) * std::pow(1 + xi, power);
        peak = std::max(peak, v);
        quiet = v < tol * peak ? quiet + 1 : 0;
        if (quiet > 40) return xi;
    }
}

}  // namespace

double synthesis_at_identity(const TestFunction& h) {
    if (!h.form()) throw std::invalid_argument("synthesis requires a test function with a form");
    const Form& form = *h.form();
    const PlancherelDensity pd(form);
    const int r = h.rank();
    if (r > 2) throw std::invalid_argument("synthesis is implemented for rank 1 and 2");
    const int pairs = form.n() * (form.n() - 1) / 2;
    double shift = 0;
    for (double m : h.modulation()) shift += m * m;
    const double X = h.dilation() * transform_cutoff(h, pairs + r, 1e-15) + std::sqrt(shift);
    auto integrand = [&](const std::vector<double>& xi) {
        std::vector<cdouble> k(xi.size());
        for (std::size_t a = 0; a < xi.size(); ++a) k[a] = cdouble(0, xi[a]);
        return h.fourier_iso(k).real() * pd.beta(h.from_iso(k));
    };
    const QuadratureRule ref = gauss_legendre(16);
    const int panels = static_cast<int>(std::ceil(X / 0.25));
    const double w = X / panels;
    double total = 0;
    if (r == 1) {
        for (int p = -panels; p < panels; ++p)
            for (std::size_t i = 0; i < ref.nodes.size(); ++i)
                total += 0.5 * w * ref.weights[i] * integrand({p * w + 0.5 * w * (ref.nodes[i] + 1.0)});
    } else {
        const int nth = 128;
        for (int p = 0; p < panels; ++p)
            for (std::size_t i = 0; i < ref.nodes.size(); ++i) {
                const double rad = p * w + 0.5 * w * (ref.nodes[i] + 1.0);
                double ring = 0;
                for (int k = 0; k < nth; ++k) {
                    const double th = 2 * kPi * k / nth;
                    ring += integrand({rad * std::cos(th), rad * std::sin(th)});
                }
                total += 0.5 * w * ref.weights[i] * rad * ring * (2 * kPi / nth);
            }
    }
    return total * std::pow(2 * kPi, -r) / static_cast<double>(factorial(form.n()));
}

AbelReport abel_roundtrip_sl2(const TestFunction& h) {
    if (!h.form() || h.form()->n() != 2) throw std::invalid_argument("roundtrip requires an n = 2 test function");
    if (!h.even()) throw std::invalid_argument("roundtrip requires an even test function");
    const double c = h.form()->scale();
    const double iso = std::sqrt(2 * c);   // ||X|| = iso * sigma for X = (sigma, -sigma)
    const double measure = 1.0 / (kPi * iso);  // d lambda = du / (pi sqrt(2c))
    const PlancherelDensity pd(*h.form());

    // hhat at lambda = (iu, -iu) sits at isometric radius u sqrt(2/c).
    auto hhat = [&](double u) { return h.amplitude() * h.radial_fourier(u * std::sqrt(2.0 / c) / h.dilation()); };
    const double U = transform_cutoff(h, 2, 1e-15) * h.dilation() * std::sqrt(c / 2.0);
    const double du = 0.05;
    const int nu = static_cast<int>(std::ceil(U / du));
    std::vector<double> weight(static_cast<std::size_t>(nu + 1));
    for (int k = 0; k <= nu; ++k) {
        const double u = k * du;
        weight[static_cast<std::size_t>(k)] = (k == 0 ? 0.5 : 1.0) * du * hhat(u) * pd.beta(SpectralPoint::imaginary(std::vector<double>{u, -u}));
    }

    // Psi(x) = (1/2) int hhat(u) beta(u) e^{iux} d lambda(u). With D = cosh 2s - sinh 2s cos 2theta,
    // Bh(a_s) = (1/pi) int_0^pi D^{-1/2} Psi(log D) d theta; in x = log D = 2s cos phi the
    // endpoint singularities cancel and the phi integrand is smooth and periodic.
    const double sigma_support = h.support_radius() / iso;
    const double sigma_max = (h.support_radius() + 0.3) / iso;
    const double dx = 0.002;
    const int nx = static_cast<int>(std::ceil((2 * sigma_max + 0.1) / dx)) + 12;
    std::vector<double> psi(static_cast<std::size_t>(nx + 1));
    for (int j = 0; j <= nx; ++j) {
        const double x = j * dx;
        double s = 0;
        for (int k = 0; k <= nu; ++k) s += weight[static_cast<std::size_t>(k)] * std::cos(k * du * x);
        psi[static_cast<std::size_t>(j)] = measure * s;
    }
    const LagrangeTable Psi(std::move(psi), dx, 10, LagrangeTable::Beyond::zero, true);

    const int nphi = 512;
    auto ratio = [](double u) { return u == 0.0 ? 1.0 : u / std::expm1(u); };
    auto synth = [&](double sigma) {
        if (sigma == 0.0) return Psi(0.0);
        double s = 0;
        for (int k = 0; k < nphi; ++k) {
            const double phi = kPi * (k + 0.5) / nphi;
            const double c = std::cos(0.5 * phi), sn = std::sin(0.5 * phi);
            const double u1 = 4 * sigma * c * c, u2 = 4 * sigma * sn * sn;  // x + 2s, 2s - x
            const double x = 2 * sigma * std::cos(phi);
            s += Psi(x) * std::exp(0.5 * x) * std::sqrt(ratio(u1) * ratio(-u2));
        }
        return s / nphi;
    };
    const double ds = 0.002;
    const int ns = static_cast<int>(std::ceil(sigma_max / ds));
    std::vector<double> bvals(static_cast<std::size_t>(ns + 1));
    AbelReport rep;
    for (int j = 0; j <= ns; ++j) {
        const double sigma = j * ds;
        bvals[static_cast<std::size_t>(j)] = synth(sigma);
        if (iso * sigma > h.support_radius() + 0.1)
            rep.support_leak = std::max(rep.support_leak, std::abs(bvals[static_cast<std::size_t>(j)]));
    }
    const LagrangeTable Bh(std::move(bvals), ds, 10, LagrangeTable::Beyond::zero, true);

    // Abel transform A f(s) = (sqrt 2 / pi) int F(cosh 2s + v^2) dv, F(cosh 2 sigma) = f(sigma).
    const double wmax = std::cosh(2 * sigma_support + 0.02);
    const QuadratureRule ref = gauss_legendre(16);
    const int ngrid = 80;
    rep.grid_points = ngrid + 1;
    for (int j = 0; j <= ngrid; ++j) {
        const double s = (sigma_support + 0.05) * j / ngrid;
        const double base = std::cosh(2 * s);
        double a = 0;
        if (base < wmax) {
            const double V = std::sqrt(wmax - base);
            const int panels = 24;
            const double w = V / panels;
            for (int p = 0; p < panels; ++p)
                for (std::size_t i = 0; i < ref.nodes.size(); ++i) {
                    const double v = p * w + 0.5 * w * (ref.nodes[i] + 1.0);
                    a += 0.5 * w * ref.weights[i] * Bh(0.5 * std::acosh(base + v * v));
                }
            a *= 2 * std::sqrt(2.0) / kPi;
        }
        const double target = h.value_iso({iso * s}).real();
        rep.scale = std::max(rep.scale, std::abs(target));
        rep.sup_deviation = std::max(rep.sup_deviation, std::abs(a - target));
    }
    return rep;
}

}  // namespace weyl_lab
