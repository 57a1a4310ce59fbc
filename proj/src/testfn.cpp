#include "weyl_lab/testfn.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include <fftw3.h>

#include "weyl_lab/numerics.hpp"

namespace weyl_lab {

struct TestFunction::Base {
    int r = 1;
    double R = 1;
    int N = 0;            // grid points per axis on [-R, R]
    double delta = 0;     // grid spacing
    double rho0 = 0;      // bump radius R/2
    int K = 0;            // bump samples at k delta, |k| <= K
    bool normalize = true;
    double scale = 1;     // h = scale * (g * g)
    std::vector<std::vector<double>> bump_points;  // nonzero bump sample coordinates
    std::vector<double> bump_values;
    std::vector<double> proj;  // projection of the bump onto one axis at k dproj
    double dproj = 0;
    std::vector<double> grid;

    double bump(double radius) const {
        const double x = radius / rho0;
        if (x >= 1.0) return 0.0;
        return std::exp(-1.0 / (1.0 - x * x));
    }

    // G(w) = dproj (P_0 + 2 sum P_k cosh(sqrt(w) k dproj)); hhat = scale G(kappa . kappa)^2.
    cdouble G(cdouble w) const {
        if (w.imag() == 0.0) return G_real(w.real());
        const cdouble s = std::sqrt(w);
        const cdouble step = std::exp(s * dproj);
        cdouble e = 1.0;
        cdouble sum = proj[0];
        for (std::size_t k = 1; k < proj.size(); ++k) {
            if (k % 32 == 0) e = std::exp(s * (dproj * static_cast<double>(k)));
            else e *= step;
            sum += proj[k] * (e + 1.0 / e);
        }
        return dproj * sum;
    }

    // Real w: cos(sqrt(-w) x) on i a*, cosh(sqrt(w) x) on a*, so hhat >= 0 exactly on i a*.
    double G_real(double w) const {
        const double s = std::sqrt(std::abs(w));
        double sum = proj[0];
        for (std::size_t k = 1; k < proj.size(); ++k) {
            const double x = s * dproj * static_cast<double>(k);
            sum += 2.0 * proj[k] * (w < 0 ? std::cos(x) : std::cosh(x));
        }
        return dproj * sum;
    }

    double nyquist() const { return std::numbers::pi / dproj; }
};

namespace {

std::size_t ipow(std::size_t b, int e) {
    std::size_t out = 1;
    for (int i = 0; i < e; ++i) out *= b;
    return out;
}

}  // namespace

TestFunction::TestFunction(std::shared_ptr<const Base> base, std::optional<Form> form)
    : base_(std::move(base)), form_(std::move(form)) {}

TestFunction TestFunction::autocorrelation(int rank, double support_radius, int grid_size, bool normalize) {
    if (rank < 1 || rank > 3) throw std::invalid_argument("test functions support rank 1 to 3");
    if (!(support_radius > 0)) throw std::invalid_argument("support radius must be positive");
    if (grid_size % 4 != 1) throw std::invalid_argument("grid size must be = 1 mod 4");
    if (grid_size < (rank <= 2 ? 257 : 65)) throw std::invalid_argument("grid too coarse: need >= 257 points per axis (rank <= 2) or >= 65 (rank 3)");
    auto b = std::make_shared<Base>();
    b->r = rank;
    b->R = support_radius;
    b->N = grid_size;
    b->delta = 2.0 * support_radius / (grid_size - 1);
    b->rho0 = 0.5 * support_radius;
    b->K = (grid_size - 1) / 4;
    b->normalize = normalize;

    const int K = b->K, N = b->N, r = rank;
    const std::size_t side = static_cast<std::size_t>(2 * K + 1);
    const std::size_t count = ipow(side, r);
    const double cell = std::pow(b->delta, r);

    // Bump on its own grid, plus the padded array for the autocorrelation.
    const std::size_t total = ipow(static_cast<std::size_t>(N), r);
    std::vector<double> padded(total, 0.0);
    std::vector<int> idx(static_cast<std::size_t>(r));
    for (std::size_t lin = 0; lin < count; ++lin) {
        std::size_t rem = lin;
        double rad2 = 0;
        std::size_t pos = 0;
        for (int a = r - 1; a >= 0; --a) {
            idx[static_cast<std::size_t>(a)] = static_cast<int>(rem % side) - K;
            rem /= side;
        }
        std::vector<double> z(static_cast<std::size_t>(r));
        for (int a = 0; a < r; ++a) {
            const int k = idx[static_cast<std::size_t>(a)];
            z[static_cast<std::size_t>(a)] = k * b->delta;
            rad2 += z[static_cast<std::size_t>(a)] * z[static_cast<std::size_t>(a)];
            pos = pos * static_cast<std::size_t>(N) + static_cast<std::size_t>((k + N) % N);
        }
        const double g = b->bump(std::sqrt(rad2));
        if (g == 0.0) continue;
        padded[pos] = g;
        b->bump_points.push_back(z);
        b->bump_values.push_back(g);
    }

    // Projection of the bump onto one axis. Rank 1 uses the grid samples themselves; in
    // higher rank the projection is integrated on a 4x finer axis so that the transform
    // is resolved further out than the h grid alone would allow.
    if (r == 1) {
        b->dproj = b->delta;
        b->proj.assign(static_cast<std::size_t>(K + 1), 0.0);
        for (int k = 0; k <= K; ++k) b->proj[static_cast<std::size_t>(k)] = b->bump(k * b->delta);
    } else {
        const int Kf = 4 * K;
        b->dproj = b->delta / 4;
        b->proj.assign(static_cast<std::size_t>(Kf + 1), 0.0);
        for (int k = 0; k < Kf; ++k) {
            const double x = k * b->dproj;
            const double span = b->rho0 * b->rho0 - x * x;
            if (r == 2)
                b->proj[static_cast<std::size_t>(k)] =
                    2.0 * integrate_gl([&](double y) { return b->bump(std::sqrt(x * x + y * y)); }, 0.0, std::sqrt(span), 16);
            else
                b->proj[static_cast<std::size_t>(k)] =
                    std::numbers::pi * integrate_gl([&](double u) { return b->bump(std::sqrt(x * x + u)); }, 0.0, span, 16);
        }
    }

    // Circular autocorrelation of length N per axis: lags |m| <= 2K = (N-1)/2 cover [-R, R].
    std::vector<int> dims(static_cast<std::size_t>(r), N);
    const std::size_t half_last = static_cast<std::size_t>(N / 2 + 1);
    const std::size_t spec_size = total / static_cast<std::size_t>(N) * half_last;
    fftw_complex* spec = fftw_alloc_complex(spec_size);
    std::vector<double> work(padded);
    fftw_plan fwd = fftw_plan_dft_r2c(r, dims.data(), work.data(), spec, FFTW_ESTIMATE);
    fftw_execute(fwd);
    fftw_destroy_plan(fwd);
    for (std::size_t i = 0; i < spec_size; ++i) {
        spec[i][0] = spec[i][0] * spec[i][0] + spec[i][1] * spec[i][1];
        spec[i][1] = 0.0;
    }
    fftw_plan bwd = fftw_plan_dft_c2r(r, dims.data(), spec, work.data(), FFTW_ESTIMATE);
    fftw_execute(bwd);
    fftw_destroy_plan(bwd);
    fftw_free(spec);

    // Reorder to grid index j = m + (N-1)/2 and symmetrize under z -> -z.
    const int c0 = (N - 1) / 2;
    b->grid.assign(total, 0.0);
    for (std::size_t lin = 0; lin < total; ++lin) {
        std::size_t rem = lin, src = 0, mirror = 0;
        std::vector<int> j(static_cast<std::size_t>(r));
        for (int a = r - 1; a >= 0; --a) {
            j[static_cast<std::size_t>(a)] = static_cast<int>(rem % static_cast<std::size_t>(N));
            rem /= static_cast<std::size_t>(N);
        }
        for (int a = 0; a < r; ++a) {
            const int m = j[static_cast<std::size_t>(a)] - c0;
            src = src * static_cast<std::size_t>(N) + static_cast<std::size_t>((m + N) % N);
            mirror = mirror * static_cast<std::size_t>(N) + static_cast<std::size_t>((-m + N) % N);
        }
        b->grid[lin] = 0.5 * (work[src] + work[mirror]) * cell / static_cast<double>(total);
    }

    if (normalize) {
        std::size_t center = 0;
        for (int a = 0; a < r; ++a) center = center * static_cast<std::size_t>(N) + static_cast<std::size_t>(c0);
        const double h0 = b->grid[center];
        if (!(h0 > 0)) throw std::runtime_error("autocorrelation vanished at the origin");
        b->scale = 1.0 / h0;
        for (double& v : b->grid) v *= b->scale;
    }
    return TestFunction(std::move(b), std::nullopt);
}

TestFunction TestFunction::autocorrelation(const Form& form, double support_radius, int grid_size, bool normalize) {
    TestFunction h = autocorrelation(form.rank(), support_radius, grid_size, normalize);
    h.form_ = form;
    return h;
}

int TestFunction::rank() const noexcept { return base_->r; }
double TestFunction::support_radius() const noexcept { return base_->R / t_; }
int TestFunction::grid_size() const noexcept { return base_->N; }
double TestFunction::spacing() const noexcept { return base_->delta; }
const std::vector<double>& TestFunction::grid() const noexcept { return base_->grid; }

bool TestFunction::even() const noexcept {
    for (double m : mu_)
        if (m != 0.0) return false;
    return true;
}

cdouble TestFunction::value_iso(const std::vector<double>& z) const {
    if (static_cast<int>(z.size()) != rank()) throw std::invalid_argument("point rank mismatch");
    const Base& b = *base_;
    // h(tz) = scale delta^r sum_k g(z_k) g(z_k - tz)
    std::vector<double> tz(z.size());
    for (std::size_t a = 0; a < z.size(); ++a) tz[a] = t_ * z[a];
    double sum = 0;
    for (std::size_t p = 0; p < b.bump_values.size(); ++p) {
        double rad2 = 0;
        for (std::size_t a = 0; a < tz.size(); ++a) {
            const double d = b.bump_points[p][a] - tz[a];
            rad2 += d * d;
        }
        if (rad2 >= b.rho0 * b.rho0) continue;
        sum += b.bump_values[p] * b.bump(std::sqrt(rad2));
    }
    const double base_value = b.scale * std::pow(b.delta, b.r) * sum;
    double phase = 0;
    for (std::size_t a = 0; a < mu_.size(); ++a) phase -= mu_[a] * z[a];
    return amp_ * std::pow(t_, b.r) * base_value * std::polar(1.0, phase);
}

cdouble TestFunction::base_fourier(const std::vector<cdouble>& kappa) const {
    cdouble w = 0;
    for (const cdouble& k : kappa) w += k * k;
    const cdouble g = base_->G(w);
    return base_->scale * g * g;
}

cdouble TestFunction::fourier_iso(const std::vector<cdouble>& kappa) const {
    if (static_cast<int>(kappa.size()) != rank()) throw std::invalid_argument("point rank mismatch");
    std::vector<cdouble> arg(kappa.size());
    for (std::size_t a = 0; a < kappa.size(); ++a)
        arg[a] = (kappa[a] - cdouble(0, mu_.empty() ? 0.0 : mu_[a])) / t_;
    return amp_ * base_fourier(arg);
}

double TestFunction::radial_fourier(double xi) const {
    std::vector<cdouble> k(static_cast<std::size_t>(rank()), 0.0);
    k[0] = cdouble(0, xi);
    return base_fourier(k).real();
}

cdouble TestFunction::radial_transform(cdouble w) const {
    const cdouble g = base_->G(w);
    return base_->scale * g * g;
}

double TestFunction::band_limit() const noexcept { return 0.5 * base_->nyquist() * t_; }

int default_grid_size(int rank) { return rank <= 2 ? 1025 : 129; }

double TestFunction::strip_radius() const {
    if (!form_) throw std::logic_error("test function has no attached form");
    const CartanVector p = rho(form_->n());
    return 2.0 * (1.0 + form_->dual_norm(std::span<const double>(p.coords())));
}

std::vector<double> TestFunction::to_iso(const CartanVector& x) const {
    if (!form_) throw std::logic_error("test function has no attached form");
    const Eigen::VectorXd y = x.to_chart(*form_);
    const double s = std::sqrt(form_->scale());
    std::vector<double> z(static_cast<std::size_t>(y.size()));
    for (Eigen::Index i = 0; i < y.size(); ++i) z[static_cast<std::size_t>(i)] = s * y(i);
    return z;
}

std::vector<cdouble> TestFunction::to_iso(const SpectralPoint& lambda) const {
    if (!form_) throw std::logic_error("test function has no attached form");
    if (lambda.n() != form_->n()) throw std::invalid_argument("spectral point rank mismatch");
    const Eigen::MatrixXd& B = form_->chart();
    const double s = 1.0 / std::sqrt(form_->scale());
    std::vector<cdouble> k(static_cast<std::size_t>(B.cols()), 0.0);
    for (Eigen::Index c = 0; c < B.cols(); ++c)
        for (Eigen::Index i = 0; i < B.rows(); ++i) k[static_cast<std::size_t>(c)] += B(i, c) * lambda[static_cast<int>(i)];
    for (auto& v : k) v *= s;
    return k;
}

SpectralPoint TestFunction::from_iso(const std::vector<cdouble>& kappa) const {
    if (!form_) throw std::logic_error("test function has no attached form");
    const Eigen::MatrixXd& B = form_->chart();
    const double s = std::sqrt(form_->scale());
    std::vector<cdouble> lam(static_cast<std::size_t>(B.rows()), 0.0);
    for (Eigen::Index i = 0; i < B.rows(); ++i)
        for (Eigen::Index c = 0; c < B.cols(); ++c) lam[static_cast<std::size_t>(i)] += B(i, c) * s * kappa[static_cast<std::size_t>(c)];
    return SpectralPoint(std::move(lam));
}

cdouble TestFunction::value(const CartanVector& x) const { return value_iso(to_iso(x)); }

cdouble TestFunction::fourier(const SpectralPoint& lambda) const {
    const std::vector<cdouble> k = to_iso(lambda);
    double re2 = 0;
    for (std::size_t a = 0; a < k.size(); ++a) re2 += k[a].real() * k[a].real();
    if (std::sqrt(re2) / t_ > strip_radius())
        throw std::domain_error("spectral point outside the transform strip");
    return fourier_iso(k);
}

double TestFunction::integral() const {
    double sum = 0;
    for (double v : base_->grid) sum += v;
    // int h_{t,mu} = hhat_{t,mu}(0) = hhat(-mu/t); equal to the grid sum only when unmodulated.
    if (!even()) {
        std::vector<cdouble> zero(static_cast<std::size_t>(rank()), 0.0);
        return fourier_iso(zero).real();
    }
    return amp_ * sum * std::pow(base_->delta, base_->r);
}

TestFunction TestFunction::scale_modulate_iso(double t, const std::vector<double>& mu_imag) const {
    if (!(t >= 1)) throw std::invalid_argument("dilation must be >= 1");
    if (static_cast<int>(mu_imag.size()) != rank()) throw std::invalid_argument("modulation rank mismatch");
    TestFunction out = *this;
    out.t_ = t * t_;
    out.mu_.assign(mu_imag.size(), 0.0);
    for (std::size_t a = 0; a < mu_imag.size(); ++a)
        out.mu_[a] = mu_imag[a] + t * (mu_.empty() ? 0.0 : mu_[a]);
    return out;
}

TestFunction TestFunction::scale_modulate(double t, const SpectralPoint& mu) const {
    if (!mu.is_imaginary()) throw std::invalid_argument("modulation must lie in i a*");
    const std::vector<cdouble> k = to_iso(mu);
    std::vector<double> im(k.size());
    for (std::size_t a = 0; a < k.size(); ++a) im[a] = k[a].imag();
    return scale_modulate_iso(t, im);
}

TestFunction TestFunction::scaled(double factor) const {
    TestFunction out = *this;
    out.amp_ *= factor;
    return out;
}

nlohmann::json TestFunction::to_json() const {
    nlohmann::json j;
    j["schema_version"] = 1;
    j["radius"] = base_->R;
    j["grid_shape"] = std::vector<int>(static_cast<std::size_t>(base_->r), base_->N);
    j["samples"] = base_->grid;
    j["normalized"] = base_->normalize;
    j["parity"] = even() ? "even" : "none";
    j["dilation"] = t_;
    j["modulation"] = mu_;
    j["amplitude"] = amp_;
    if (form_) j["form"] = {{"n", form_->n()}, {"kind", to_string(form_->kind())}};
    return j;
}

TestFunction TestFunction::from_json(const nlohmann::json& j) {
    if (j.value("schema_version", 0) != 1) throw std::invalid_argument("unsupported test function schema");
    const auto shape = j.at("grid_shape").get<std::vector<int>>();
    if (shape.empty()) throw std::invalid_argument("empty grid shape");
    for (int s : shape)
        if (s != shape[0]) throw std::invalid_argument("grid must be cubic");
    const double R = j.at("radius").get<double>();
    const bool normalized = j.value("normalized", true);
    TestFunction h = autocorrelation(static_cast<int>(shape.size()), R, shape[0], normalized);
    const auto samples = j.at("samples").get<std::vector<double>>();
    if (samples.size() != h.grid().size()) throw std::invalid_argument("sample count does not match grid shape");
    for (std::size_t i = 0; i < samples.size(); ++i)
        if (std::abs(samples[i] - h.grid()[i]) > 1e-12) throw std::invalid_argument("samples are not an autocorrelation bump");
    if (j.contains("form")) h.form_ = Form(j["form"].at("n").get<int>(), parse_form(j["form"].at("kind").get<std::string>()));
    h.t_ = j.value("dilation", 1.0);
    h.mu_ = j.value("modulation", std::vector<double>{});
    h.amp_ = j.value("amplitude", 1.0);
    return h;
}

}  // namespace weyl_lab
