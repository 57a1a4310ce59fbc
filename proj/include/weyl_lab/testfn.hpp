#pragma once

// Paley-Wiener test functions on a = R^r built as autocorrelations h = g * g~ of
// a smooth radial bump g, so that hhat = |ghat|^2 >= 0 on i a*. Functions are
// stored in isometric coordinates z (|z| = ||X|| for the configured form); the
// transform is hhat(kappa) = int h(z) exp(kappa . z) dz for kappa in C^r.

#include <memory>
#include <optional>
#include <vector>

#include "json.hpp"
#include "weyl_lab/plancherel.hpp"
#include "weyl_lab/report.hpp"
#include "weyl_lab/rootsys.hpp"

namespace weyl_lab {

// Grid points per axis used by default: 1025 for rank <= 2, 129 for rank 3.
int default_grid_size(int rank);

class TestFunction {
public:
    // Autocorrelation of the bump exp(-1/(1 - (|z|/rho0)^2)), rho0 = support_radius / 2,
    // sampled on grid_size points per axis of [-R, R]^r (grid_size = 1 mod 4, at least
    // 257 for rank <= 2 and 65 for rank 3).
    // With normalize, h(0) = 1.
    static TestFunction autocorrelation(int rank, double support_radius, int grid_size, bool normalize = true);
    // Same, attached to a form so that a-coordinates and spectral points can be used.
    static TestFunction autocorrelation(const Form& form, double support_radius, int grid_size,
                                        bool normalize = true);

    int rank() const noexcept;
    double support_radius() const noexcept;  // of the transformed function: R / t
    int grid_size() const noexcept;
    double spacing() const noexcept;
    bool even() const noexcept;  // true unless modulated
    const std::optional<Form>& form() const noexcept { return form_; }

    // Samples of the untransformed function on the tensor grid, row-major with the
    // last axis fastest; grid point j has coordinate -R + j * spacing().
    const std::vector<double>& grid() const noexcept;

    // h in isometric coordinates.
    cdouble value_iso(const std::vector<double>& z) const;
    // hhat in isometric dual coordinates.
    cdouble fourier_iso(const std::vector<cdouble>& kappa) const;

    // h(X) and hhat(lambda); fourier enforces the strip guard
    // ||Re lambda|| <= 2 (1 + ||rho||).
    cdouble value(const CartanVector& x) const;
    cdouble fourier(const SpectralPoint& lambda) const;
    double strip_radius() const;

    // Isometric radius up to which the grid quadrature resolves hhat (half the
    // Nyquist frequency of the grid, scaled by the dilation).
    double band_limit() const noexcept;

    // int h, by the grid quadrature.
    double integral() const;

    // h_{t,mu}(X) = t^r h(tX) exp(-<mu, X>), so hhat_{t,mu}(lambda) = hhat((lambda - mu)/t); t >= 1.
    TestFunction scale_modulate(double t, const SpectralPoint& mu) const;
    TestFunction scale_modulate_iso(double t, const std::vector<double>& mu_imag) const;
    TestFunction scaled(double factor) const;  // factor * h

    double dilation() const noexcept { return t_; }
    const std::vector<double>& modulation() const noexcept { return mu_; }  // Im of mu, isometric coordinates
    double amplitude() const noexcept { return amp_; }

    // Base-function transform on i a* as a function of the isometric radius |xi|,
    // and on a*_C as a function of w = kappa . kappa (the bump is radial).
    double radial_fourier(double xi) const;
    cdouble radial_transform(cdouble w) const;

    // Coordinate conversions for the attached form.
    std::vector<double> to_iso(const CartanVector& x) const;
    std::vector<cdouble> to_iso(const SpectralPoint& lambda) const;
    SpectralPoint from_iso(const std::vector<cdouble>& kappa) const;

    nlohmann::json to_json() const;
    static TestFunction from_json(const nlohmann::json& j);

    struct Base;

private:
    TestFunction(std::shared_ptr<const Base> base, std::optional<Form> form);
    cdouble base_fourier(const std::vector<cdouble>& kappa) const;

    std::shared_ptr<const Base> base_;
    std::optional<Form> form_;
    double t_ = 1.0;
    std::vector<double> mu_;  // modulation, imaginary parts in isometric coordinates
    double amp_ = 1.0;
};

struct MOptions {
    double spacing = 0.05;   // coarse net spacing on the ball boundary
    double refine = 0.005;   // local net spacing around the best coarse point
};

// M(hhat)(lambda) = max |hhat| over the complex ball of radius 1 + ||rho|| about lambda.
double M_functional(const TestFunction& h, const SpectralPoint& lambda, const MOptions& opt = {});

struct NOptions {
    MOptions m;
    double grid_step = 0.05;      // isometric radial step for the tabulated M
    double truncation = 1e-14;    // relative integrand cutoff
    double max_radius = 1e3;
};

struct NResult {
    double value = 0;
    double cutoff_radius = 0;
    bool converged = false;
};

// N(h) = int_{i a*} beta~(lambda) M(hhat)(lambda) d lambda (rank 1 and 2).
NResult N_functional(const TestFunction& h, const NOptions& opt = {});

// Evaluates N(h_{t,mu}) for many mu at one t, reusing the tabulated M.
class NFamily {
public:
    NFamily(const TestFunction& base, double t, const NOptions& opt = {});
    NResult operator()(const SpectralPoint& mu) const;
    NResult operator()(const std::vector<double>& mu_iso) const;  // imaginary parts, isometric coordinates
    double t() const noexcept { return t_; }

private:
    TestFunction base_;
    double t_;      // effective dilation of the raw bump
    NOptions opt_;
    double ball_;
    double pair_bound_;  // sqrt(2 scale): |lambda_i - lambda_j| <= pair_bound_ |xi|
    std::vector<double> table_;  // M_t on the radial grid
    double step_;
    double cutoff_;
    bool converged_;
    double m_at(double xi) const;
};

// N(h_{t,mu}) / (t^r beta~(t, mu)) for t in ts and imaginary mu with isometric norms in
// mu_norms (rank 1: one direction; rank 2: an axis and the diagonal). Samples are ordered
// by t + ||mu||; PASS iff the running-sup slope is <= 0.02 and every N converged.
// The test function needs an attached form.
SlopeReport verify_smp(const TestFunction& h, const std::vector<double>& ts, const std::vector<double>& mu_norms,
                       const NOptions& opt = {});

struct AbelReport {
    double sup_deviation = 0;       // sup |A(Bh) - h^W| on the Cartan grid
    double support_leak = 0;        // sup |Bh| beyond radius R + 0.1
    double scale = 0;               // sup |h|
    int grid_points = 0;
};

// n = 2 roundtrip through the synthesis operator and the Abel transform.
AbelReport abel_roundtrip_sl2(const TestFunction& h);

// Bh(1) = (1/|W|) int hhat beta d lambda, for rank 1 and 2.
double synthesis_at_identity(const TestFunction& h);

}  // namespace weyl_lab
