#pragma once

// Gindikin-Karpelevic c-function and the Plancherel density of SL(n,R)/SO(n),
// together with the comparison densities beta~(t, .) and verifiers for the
// growth bounds they satisfy.

#include <cstdint>

#include "weyl_lab/report.hpp"
#include "weyl_lab/rootsys.hpp"

namespace weyl_lab {

// Gamma_R(s) = pi^{-s/2} Gamma(s/2); throws std::domain_error at s = 0, -2, -4, ...
cdouble gamma_R(cdouble s);

// phi(s) = Gamma_R(s+1)/Gamma_R(s) with phi(0) = 0 and phi(-2k) = 0 (limits of
// the ratio). Throws std::domain_error at the poles s = -1, -3, ...
cdouble phi_ratio(cdouble s);

class PlancherelDensity {
public:
    explicit PlancherelDensity(const Form& form);

    const Form& form() const noexcept { return form_; }
    int n() const noexcept { return form_.n(); }

    // c(rho)^{-1} = prod_{i<j} phi(j - i) > 0.
    double c_rho_inv() const noexcept { return c_rho_inv_; }

    // c(lambda)^{-1} = prod_{i<j} phi(lambda_i - lambda_j).
    cdouble c_inverse(const SpectralPoint& lambda) const;

    // beta(lambda) = |c(lambda)^{-1}|^2 / c(rho)^{-2}; lambda must lie in i a*.
    double beta(const SpectralPoint& lambda) const;

    // beta~(t, lambda) = prod_{i<j} (t + |lambda_i - lambda_j|), t > 0.
    double beta_tilde(double t, const SpectralPoint& lambda) const;
    double beta_tilde(const SpectralPoint& lambda) const { return beta_tilde(1.0, lambda); }

    // Same product restricted to pairs inside one block of M.
    double beta_tilde_levi(double t, const SpectralPoint& lambda, const LeviSubgroup& levi) const;

    // Central difference (beta(l + i h xi) - beta(l - i h xi)) / (2h), h in [1e-6, 1e-2].
    double directional_derivative(const CartanVector& xi, const SpectralPoint& lambda, double step = 1e-4) const;

    // beta~^M(lambda^M) (1 + ||lambda||) / beta~(lambda) for M != G.
    double scr_ratio(const LeviSubgroup& levi, const SpectralPoint& lambda) const;

private:
    Form form_;
    double c_rho_inv_;
};

// Uniform point of the sphere of dual radius `radius` in i a*.
SpectralPoint random_imaginary_on_sphere(const Form& form, double radius, std::mt19937_64& rng);

struct SweepSpec {
    long samples = 20000;   // total over all radii
    double norm_max = 1e4;
    int radii = 40;          // log-spaced in [1, norm_max]
    std::uint64_t seed = 1;
};

// beta / beta~ on spheres; PASS iff the running-sup slope is <= 0.02.
SlopeReport verify_plnchbnd(const Form& form, const SweepSpec& spec);

// |D_xi beta| / (1 + ||lambda||)^{d-r-1} for unit xi.
SlopeReport verify_logderbnd(const Form& form, const SweepSpec& spec);

// scr_ratio for one proper Levi.
SlopeReport verify_scr(const Form& form, const LeviSubgroup& levi, const SweepSpec& spec);

}  // namespace weyl_lab
