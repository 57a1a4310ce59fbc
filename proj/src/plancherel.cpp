#include "weyl_lab/plancherel.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "weyl_lab/numerics.hpp"
#include "weyl_lab/special.hpp"

namespace weyl_lab {

namespace {

constexpr double kPi = std::numbers::pi;

bool nonpositive_integer(cdouble z) {
    return z.imag() == 0.0 && z.real() <= 0.0 && z.real() == std::floor(z.real());
}

}  // namespace

cdouble gamma_R(cdouble s) {
    if (nonpositive_integer(0.5 * s)) throw std::domain_error("Gamma_R pole");
    return std::exp(-0.5 * s * std::log(kPi) + lgamma(0.5 * s));
}

cdouble phi_ratio(cdouble s) {
    // pi^{-1/2} (s/2) Gamma((s+1)/2) / Gamma(s/2 + 1): the Gamma(s/2) pole at 0 is cancelled.
    const cdouble num = 0.5 * (s + 1.0);
    if (nonpositive_integer(num)) throw std::domain_error("phi pole at negative odd integer");
    const cdouble den = 0.5 * s + 1.0;
    if (s == 0.0 || nonpositive_integer(den)) return 0.0;
    return 0.5 * s * std::exp(lgamma(num) - lgamma(den)) / std::sqrt(kPi);
}

PlancherelDensity::PlancherelDensity(const Form& form) : form_(form) {
    double prod = 1;
    for (int i = 0; i < n(); ++i)
        for (int j = i + 1; j < n(); ++j) prod *= phi_ratio(static_cast<double>(j - i)).real();
    c_rho_inv_ = prod;
}

cdouble PlancherelDensity::c_inverse(const SpectralPoint& lambda) const {
    if (lambda.n() != n()) throw std::invalid_argument("spectral point rank mismatch");
    cdouble prod = 1;
    for (int i = 0; i < n(); ++i)
        for (int j = i + 1; j < n(); ++j) prod *= phi_ratio(lambda[i] - lambda[j]);
    return prod;
}

double PlancherelDensity::beta(const SpectralPoint& lambda) const {
    if (!lambda.is_imaginary()) throw std::invalid_argument("beta requires lambda in i a*");
    // On i a*, |phi(iy)|^2 = (y/2) tanh(pi y/2) / pi, from the reflection formulas for Gamma.
    double prod = 1;
    for (int i = 0; i < n(); ++i)
        for (int j = i + 1; j < n(); ++j) {
            const double y = (lambda[i] - lambda[j]).imag();
            prod *= 0.5 * y * std::tanh(0.5 * kPi * y) / kPi;
        }
    return prod / (c_rho_inv_ * c_rho_inv_);
}

double PlancherelDensity::beta_tilde(double t, const SpectralPoint& lambda) const {
    if (!(t > 0)) throw std::invalid_argument("beta~ requires t > 0");
    double prod = 1;
    for (int i = 0; i < lambda.n(); ++i)
        for (int j = i + 1; j < lambda.n(); ++j) prod *= t + std::abs(lambda[i] - lambda[j]);
    return prod;
}

double PlancherelDensity::beta_tilde_levi(double t, const SpectralPoint& lambda, const LeviSubgroup& levi) const {
    if (!(t > 0)) throw std::invalid_argument("beta~ requires t > 0");
    double prod = 1;
    for (const auto& block : levi.blocks())
        for (std::size_t a = 0; a < block.size(); ++a)
            for (std::size_t b = a + 1; b < block.size(); ++b) prod *= t + std::abs(lambda[block[a]] - lambda[block[b]]);
    return prod;
}

double PlancherelDensity::directional_derivative(const CartanVector& xi, const SpectralPoint& lambda,
                                                 double step) const {
    if (step < 1e-6 || step > 1e-2) throw std::invalid_argument("step must lie in [1e-6, 1e-2]");
    std::vector<cdouble> shift(static_cast<std::size_t>(n()));
    for (int i = 0; i < n(); ++i) shift[static_cast<std::size_t>(i)] = cdouble(0, step * xi[i]);
    const SpectralPoint d(std::move(shift));
    return (beta(lambda + d) - beta(lambda - d)) / (2.0 * step);
}

double PlancherelDensity::scr_ratio(const LeviSubgroup& levi, const SpectralPoint& lambda) const {
    if (levi.is_full()) throw std::invalid_argument("scr_ratio requires a proper Levi subgroup");
    const SpectralPoint upper = levi_decompose(lambda, levi).along_levi;
    const double norm = form_.dual_norm(std::span<const cdouble>(lambda.coords()));
    return beta_tilde_levi(1.0, upper, levi) * (1.0 + norm) / beta_tilde(1.0, lambda);
}

SpectralPoint random_imaginary_on_sphere(const Form& form, double radius, std::mt19937_64& rng) {
    std::normal_distribution<double> normal;
    Eigen::VectorXd y(form.rank());
    do {
        for (int i = 0; i < form.rank(); ++i) y(i) = normal(rng);
    } while (y.norm() == 0.0);
    // dual norm of a chart vector y is |y| / sqrt(scale)
    y *= radius * std::sqrt(form.scale()) / y.norm();
    return SpectralPoint::from_chart(form, Eigen::VectorXd::Zero(form.rank()), y);
}

namespace {

template <class F>
SlopeReport sweep(const std::string& name, const Form& form, const SweepSpec& spec, F&& ratio) {
    if (spec.radii < 4 || spec.samples < spec.radii || !(spec.norm_max > 1))
        throw std::invalid_argument("invalid sweep specification");
    const std::vector<double> radii = logspace(1.0, spec.norm_max, spec.radii);
    const long per = spec.samples / spec.radii;
    std::vector<double> sup(radii.size());
    for (std::size_t i = 0; i < radii.size(); ++i) {
        std::mt19937_64 rng(stream_seed(spec.seed, i));
        double m = 0;
        for (long k = 0; k < per; ++k) m = std::max(m, ratio(random_imaginary_on_sphere(form, radii[i], rng), rng));
        sup[i] = m;
    }
    const auto run = running_max(sup);
    SlopeReport r;
    r.check = name;
    r.n = form.n();
    r.samples = per * spec.radii;
    r.sup = run.back();
    r.slope = fit_loglog_tail(radii, run).slope;
    r.pass = r.slope <= r.threshold;
    return r;
}

}  // namespace

SlopeReport verify_plnchbnd(const Form& form, const SweepSpec& spec) {
    if (form.n() > 5) throw std::invalid_argument("verify_plnchbnd supports n <= 5");
    const PlancherelDensity pd(form);
    return sweep("plnchbnd", form, spec,
                 [&](const SpectralPoint& l, std::mt19937_64&) { return pd.beta(l) / pd.beta_tilde(l); });
}

SlopeReport verify_logderbnd(const Form& form, const SweepSpec& spec) {
    const PlancherelDensity pd(form);
    const Dimensions dm = dims(form.n());
    return sweep("logderbnd", form, spec, [&](const SpectralPoint& l, std::mt19937_64& rng) {
        // random unit direction xi in a*, dual norm 1
        const SpectralPoint dir = random_imaginary_on_sphere(form, 1.0, rng);
        const CartanVector xi(dir.imag_part());
        const double norm = form.dual_norm(std::span<const cdouble>(l.coords()));
        const double step = std::min(1e-2, std::max(1e-6, 1e-4 * (1.0 + norm)));
        return std::abs(pd.directional_derivative(xi, l, step)) / std::pow(1.0 + norm, dm.d - dm.r - 1);
    });
}

SlopeReport verify_scr(const Form& form, const LeviSubgroup& levi, const SweepSpec& spec) {
    const PlancherelDensity pd(form);
    return sweep("scr " + levi.to_string(), form, spec,
                 [&](const SpectralPoint& l, std::mt19937_64&) { return pd.scr_ratio(levi, l); });
}

}  // namespace weyl_lab
