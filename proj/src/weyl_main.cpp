#include "weyl_lab/weyl_main.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "weyl_lab/numerics.hpp"

namespace weyl_lab {

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<std::vector<double>> polygon_vertices(const std::vector<std::vector<double>>& normals,
                                                  const std::vector<double>& offsets) {
    std::vector<std::vector<double>> verts;
    for (std::size_t i = 0; i < normals.size(); ++i)
        for (std::size_t j = i + 1; j < normals.size(); ++j) {
            const double a = normals[i][0], b = normals[i][1], c = normals[j][0], d = normals[j][1];
            const double det = a * d - b * c;
            if (std::abs(det) < 1e-14) continue;
            const std::vector<double> p{(offsets[i] * d - b * offsets[j]) / det, (a * offsets[j] - c * offsets[i]) / det};
            bool inside = true;
            for (std::size_t k = 0; k < normals.size(); ++k)
                if (normals[k][0] * p[0] + normals[k][1] * p[1] > offsets[k] + 1e-12 * (1 + std::abs(offsets[k]))) inside = false;
            if (!inside) continue;
            bool dup = false;
            for (const auto& v : verts)
                if (std::hypot(v[0] - p[0], v[1] - p[1]) < 1e-12) dup = true;
            if (!dup) verts.push_back(p);
        }
    std::sort(verts.begin(), verts.end(), [](const auto& u, const auto& v) { return std::atan2(u[1], u[0]) < std::atan2(v[1], v[0]); });
    return verts;
}

double segment_distance(const std::vector<double>& p, const std::vector<double>& a, const std::vector<double>& b) {
    const double dx = b[0] - a[0], dy = b[1] - a[1];
    const double len2 = dx * dx + dy * dy;
    double s = len2 > 0 ? ((p[0] - a[0]) * dx + (p[1] - a[1]) * dy) / len2 : 0.0;
    s = std::clamp(s, 0.0, 1.0);
    return std::hypot(p[0] - a[0] - s * dx, p[1] - a[1] - s * dy);
}

// lambda in i a* from isometric coordinates xi: lambda = i sqrt(c) B xi.
SpectralPoint spectral_from_iso(const Form& form, const std::vector<double>& xi) {
    const Eigen::MatrixXd& B = form.chart();
    const double s = std::sqrt(form.scale());
    std::vector<cdouble> lam(static_cast<std::size_t>(B.rows()), 0.0);
    for (Eigen::Index i = 0; i < B.rows(); ++i) {
        double v = 0;
        for (Eigen::Index c = 0; c < B.cols(); ++c) v += B(i, c) * xi[static_cast<std::size_t>(c)];
        lam[static_cast<std::size_t>(i)] = cdouble(0, s * v);
    }
    return SpectralPoint(std::move(lam));
}

std::vector<double> iso_from_real(const Form& form, const std::vector<double>& lam) {
    const Eigen::MatrixXd& B = form.chart();
    const double s = 1.0 / std::sqrt(form.scale());
    std::vector<double> xi(static_cast<std::size_t>(B.cols()), 0.0);
    for (Eigen::Index c = 0; c < B.cols(); ++c)
        for (Eigen::Index i = 0; i < B.rows(); ++i) xi[static_cast<std::size_t>(c)] += s * B(i, c) * lam[static_cast<std::size_t>(i)];
    return xi;
}

class BetaIso {
public:
    BetaIso(const Form& form, bool symmetrize) : form_(form), pd_(form), symmetrize_(symmetrize) {
        if (symmetrize) weyl_ = WeylElement::enumerate(form.n());
    }
    double operator()(const std::vector<double>& xi) const {
        const SpectralPoint lam = spectral_from_iso(form_, xi);
        if (!symmetrize_) return pd_.beta(lam);
        double s = 0;
        for (const auto& w : weyl_) s += pd_.beta(w.act(lam));
        return s / static_cast<double>(weyl_.size());
    }

private:
    Form form_;
    PlancherelDensity pd_;
    bool symmetrize_;
    std::vector<WeylElement> weyl_;
};

// Angles (in isometric coordinates) of the rays along which some root vanishes.
std::vector<double> wall_angles(const Form& form) {
    std::vector<double> out;
    const Eigen::MatrixXd& B = form.chart();
    for (Eigen::Index i = 0; i < B.rows(); ++i)
        for (Eigen::Index j = i + 1; j < B.rows(); ++j) {
            const Eigen::RowVectorXd v = B.row(i) - B.row(j);
            const double a = std::atan2(v(1), v(0)) + kPi / 2;
            out.push_back(a);
            out.push_back(a + kPi);
        }
    return out;
}

// Integral of f over [0, 2 pi), adaptive between consecutive walls and corners. When the
// integrand is W-invariant only one chamber (an angle pi/3 between adjacent walls) is integrated.
template <class F>
double angular_integral(const Form& form, F&& f, const std::vector<double>& corners, double tol, bool w_invariant) {
    std::vector<double> walls = wall_angles(form);
    for (double& c : walls) c = std::remainder(c, 2 * kPi);
    std::sort(walls.begin(), walls.end());
    std::vector<double> cuts;
    double lo = walls.front(), hi = walls.front() + 2 * kPi, factor = 1.0;
    if (w_invariant) {
        hi = walls[1];
        factor = static_cast<double>(walls.size());
    }
    cuts.push_back(lo);
    for (double c : corners)
        for (double a : {std::remainder(c, 2 * kPi), std::remainder(c, 2 * kPi) + 2 * kPi})
            if (a > lo + 1e-14 && a < hi - 1e-14) cuts.push_back(a);
    if (!w_invariant)
        for (double a : walls)
            if (a > lo + 1e-14) cuts.push_back(a);
    cuts.push_back(hi);
    std::sort(cuts.begin(), cuts.end());
    double s = 0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        if (cuts[i + 1] - cuts[i] < 1e-14) continue;
        double err = 0;
        s += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, cuts[i], cuts[i + 1], 20, tol, &err);
    }
    return factor * s;
}

// Panel edges 0, 1, 2, 4, ... up to `end`, each split into 2^level pieces.
std::vector<double> graded_edges(double end, int level) {
    std::vector<double> coarse{0.0};
    for (double e = 1.0; e < end; e *= 2) coarse.push_back(e);
    coarse.push_back(end);
    std::vector<double> edges{0.0};
    const int split = 1 << level;
    for (std::size_t i = 0; i + 1 < coarse.size(); ++i)
        for (int k = 1; k <= split; ++k) edges.push_back(coarse[i] + (coarse[i + 1] - coarse[i]) * k / split);
    return edges;
}

template <class F>
double gl_over_edges(const std::vector<double>& edges, const QuadratureRule& ref, F&& f) {
    double total = 0;
    for (std::size_t p = 0; p + 1 < edges.size(); ++p) {
        const double lo = edges[p], w = edges[p + 1] - edges[p];
        if (w <= 0) continue;
        for (std::size_t i = 0; i < ref.nodes.size(); ++i) total += 0.5 * w * ref.weights[i] * f(lo + 0.5 * w * (ref.nodes[i] + 1.0));
    }
    return total;
}

// Uniform panels of width <= step covering [a, b].
std::vector<double> uniform_edges(double a, double b, double step) {
    const int n = std::max(1, static_cast<int>(std::ceil((b - a) / step)));
    std::vector<double> e(static_cast<std::size_t>(n + 1));
    for (int i = 0; i <= n; ++i) e[static_cast<std::size_t>(i)] = a + (b - a) * i / n;
    return e;
}

}  // namespace

SpectralDomain SpectralDomain::ball(int rank, double radius) {
    if (rank < 1) throw std::invalid_argument("rank must be positive");
    if (!(radius > 0) || !std::isfinite(radius)) throw std::invalid_argument("ball radius must be positive and finite");
    SpectralDomain d;
    d.kind_ = DomainKind::ball;
    d.rank_ = rank;
    d.radius_ = radius;
    d.w_invariant_ = true;
    return d;
}

SpectralDomain SpectralDomain::box(std::vector<double> half_widths) {
    if (half_widths.empty()) throw std::invalid_argument("box needs at least one axis");
    for (double w : half_widths)
        if (!(w > 0) || !std::isfinite(w)) throw std::invalid_argument("box half-widths must be positive and finite");
    SpectralDomain d;
    d.kind_ = DomainKind::box;
    d.rank_ = static_cast<int>(half_widths.size());
    d.half_widths_ = std::move(half_widths);
    d.w_invariant_ = d.rank_ == 1;  // a symmetric interval is invariant under xi -> -xi
    if (d.rank_ == 2) {
        const double a = d.half_widths_[0], b = d.half_widths_[1];
        d.normals_ = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
        d.offsets_ = {a, a, b, b};
    }
    return d;
}

SpectralDomain SpectralDomain::halfspaces(std::vector<std::vector<double>> normals, std::vector<double> offsets,
                                          bool w_invariant) {
    if (normals.empty() || normals.size() != offsets.size()) throw std::invalid_argument("need one offset per normal");
    const std::size_t r = normals[0].size();
    if (r < 1 || r > 2) throw std::invalid_argument("half-space domains are supported in rank 1 and 2");
    for (std::size_t j = 0; j < normals.size(); ++j) {
        if (normals[j].size() != r) throw std::invalid_argument("normals must share one dimension");
        if (!(offsets[j] > 0)) throw std::invalid_argument("the origin must lie strictly inside the domain");
    }
    SpectralDomain d;
    d.kind_ = DomainKind::halfspaces;
    d.rank_ = static_cast<int>(r);
    d.normals_ = std::move(normals);
    d.offsets_ = std::move(offsets);
    d.w_invariant_ = w_invariant;
    // Bounded iff every direction meets a constraint.
    const int dirs = r == 1 ? 2 : 3600;
    for (int k = 0; k < dirs; ++k) {
        std::vector<double> dir = r == 1 ? std::vector<double>{k == 0 ? 1.0 : -1.0}
                                         : std::vector<double>{std::cos(2 * kPi * k / dirs), std::sin(2 * kPi * k / dirs)};
        if (!std::isfinite(d.radial_extent(dir))) throw std::invalid_argument("half-space domain is unbounded");
    }
    return d;
}

std::string SpectralDomain::name() const {
    switch (kind_) {
        case DomainKind::ball: return "ball";
        case DomainKind::box: return "box";
        case DomainKind::halfspaces: return "halfspaces";
    }
    return "unknown";
}

bool SpectralDomain::contains(const std::vector<double>& xi, double t) const {
    if (static_cast<int>(xi.size()) != rank_) throw std::invalid_argument("point rank mismatch");
    switch (kind_) {
        case DomainKind::ball: {
            double s = 0;
            for (double x : xi) s += x * x;
            return std::sqrt(s) <= t * radius_;
        }
        case DomainKind::box:
            for (std::size_t a = 0; a < xi.size(); ++a)
                if (std::abs(xi[a]) > t * half_widths_[a]) return false;
            return true;
        case DomainKind::halfspaces:
            for (std::size_t j = 0; j < normals_.size(); ++j) {
                double v = 0;
                for (std::size_t a = 0; a < xi.size(); ++a) v += normals_[j][a] * xi[a];
                if (v > t * offsets_[j]) return false;
            }
            return true;
    }
    return false;
}

double SpectralDomain::radial_extent(const std::vector<double>& dir) const {
    if (kind_ == DomainKind::ball) return radius_;
    double best = std::numeric_limits<double>::infinity();
    if (kind_ == DomainKind::box) {
        for (std::size_t a = 0; a < dir.size(); ++a)
            if (dir[a] != 0.0) best = std::min(best, half_widths_[a] / std::abs(dir[a]));
        return best;
    }
    for (std::size_t j = 0; j < normals_.size(); ++j) {
        double v = 0;
        for (std::size_t a = 0; a < dir.size(); ++a) v += normals_[j][a] * dir[a];
        if (v > 1e-15) best = std::min(best, offsets_[j] / v);
    }
    return best;
}

double SpectralDomain::bounding_radius() const {
    if (kind_ == DomainKind::ball) return radius_;
    if (rank_ == 1) return std::max(radial_extent({1.0}), radial_extent({-1.0}));
    double best = 0;
    for (const auto& v : polygon_vertices(normals_, offsets_)) best = std::max(best, std::hypot(v[0], v[1]));
    return best;
}

std::vector<double> SpectralDomain::corner_angles() const {
    std::vector<double> out;
    if (kind_ == DomainKind::ball || rank_ != 2) return out;
    for (const auto& v : polygon_vertices(normals_, offsets_)) out.push_back(std::atan2(v[1], v[0]));
    return out;
}

double SpectralDomain::boundary_distance(const std::vector<double>& xi, double t) const {
    if (static_cast<int>(xi.size()) != rank_) throw std::invalid_argument("point rank mismatch");
    if (kind_ == DomainKind::ball) {
        double s = 0;
        for (double x : xi) s += x * x;
        return std::abs(std::sqrt(s) - t * radius_);
    }
    if (rank_ == 1) {
        const double hi = t * radial_extent({1.0}), lo = -t * radial_extent({-1.0});
        return std::min(std::abs(xi[0] - hi), std::abs(xi[0] - lo));
    }
    if (rank_ != 2) throw std::invalid_argument("boundary distance is implemented for rank <= 2");
    auto verts = polygon_vertices(normals_, offsets_);
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < verts.size(); ++i) {
        std::vector<double> a{t * verts[i][0], t * verts[i][1]};
        const auto& nb = verts[(i + 1) % verts.size()];
        std::vector<double> b{t * nb[0], t * nb[1]};
        best = std::min(best, segment_distance(xi, a, b));
    }
    return best;
}

bool SpectralDomain::check_w_invariance(const Form& form, int samples, std::uint64_t seed) const {
    if (form.rank() != rank_) throw std::invalid_argument("form rank does not match the domain");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ud(-1.2 * bounding_radius(), 1.2 * bounding_radius());
    const auto weyl = WeylElement::enumerate(form.n());
    const Eigen::MatrixXd& B = form.chart();
    const double sc = std::sqrt(form.scale());
    for (int i = 0; i < samples; ++i) {
        std::vector<double> xi(static_cast<std::size_t>(rank_));
        for (double& x : xi) x = ud(rng);
        if (boundary_distance(xi, 1.0) < 1e-9) continue;
        std::vector<double> lam(static_cast<std::size_t>(form.n()), 0.0);
        for (Eigen::Index r = 0; r < B.rows(); ++r)
            for (Eigen::Index c = 0; c < B.cols(); ++c) lam[static_cast<std::size_t>(r)] += sc * B(r, c) * xi[static_cast<std::size_t>(c)];
        const bool in = contains(xi);
        for (const auto& w : weyl)
            if (contains(iso_from_real(form, w.act(lam))) != in) return false;
    }
    return true;
}

MainTermResult main_term(const SpectralDomain& omega, double t, const Form& form, const MainTermOptions& opt) {
    if (!(t > 0)) throw std::invalid_argument("main term requires t > 0");
    if (omega.rank() != form.rank()) throw std::invalid_argument("form rank does not match the domain");
    if (form.rank() > 2) throw std::invalid_argument("main term is implemented for n = 2 and n = 3");
    const BetaIso beta(form, opt.symmetrize);
    const QuadratureRule ref = gauss_legendre(16);
    const double prefactor = std::pow(2 * kPi, -form.rank()) / static_cast<double>(factorial(form.n()));
    const std::vector<double> corners = omega.corner_angles();

    auto evaluate = [&](int level) {
        if (form.rank() == 1) {
            double total = 0;
            for (double sgn : {1.0, -1.0}) {
                const double end = t * omega.radial_extent({sgn});
                total += gl_over_edges(graded_edges(end, level), ref, [&](double x) { return beta({sgn * x}); });
            }
            return total;
        }
        auto radial = [&](double th) {
            const std::vector<double> dir{std::cos(th), std::sin(th)};
            const double end = t * omega.radial_extent(dir);
            return gl_over_edges(graded_edges(end, level), ref, [&](double rho) { return rho * beta({rho * dir[0], rho * dir[1]}); });
        };
        // Adaptive in angle: the integrand has sharp but analytic features of width ~1/t
        // along the root walls, and kinks at polygon corners.
        return angular_integral(form, radial, corners, 0.01 * opt.rel_tol, omega.w_invariant());
    };

    double prev = prefactor * evaluate(0);
    for (int level = 1; level <= opt.max_levels; ++level) {
        const double cur = prefactor * evaluate(level);
        const double diff = std::abs(cur - prev);
        if (diff <= 0.1 * opt.rel_tol * std::abs(cur)) return {cur, diff, level};
        prev = cur;
    }
    throw std::runtime_error("main term quadrature did not converge");
}

double weyl_constant(int n, double volume) {
    if (n < 2) throw std::invalid_argument("n must be at least 2");
    if (!(volume > 0) || !std::isfinite(volume)) throw std::invalid_argument("volume must be positive");
    const double d = dims(n).d;
    return volume / (std::pow(4 * kPi, d / 2) * std::tgamma(d / 2 + 1));
}

namespace {

// Radius beyond which hhat (radial, isometric) stays below tol * hhat(0).
double mass_cutoff(const TestFunction& h, double tol) {
    const double top = h.radial_fourier(0.0);
    int quiet = 0;
    for (double y = 0;; y += 0.05) {
        if (y > h.band_limit()) throw std::runtime_error("test-function transform is not resolved by its grid");
        quiet = std::abs(h.radial_fourier(y)) * (1 + y) * (1 + y) < tol * top ? quiet + 1 : 0;
        if (quiet > 40) return y;
    }
}

}  // namespace

double shell_error(const SpectralDomain& omega, const TestFunction& h, double t) {
    if (!h.form()) throw std::invalid_argument("shell experiment needs a test function with a form");
    const Form& form = *h.form();
    if (form.rank() != omega.rank()) throw std::invalid_argument("form rank does not match the domain");
    if (!h.even()) throw std::invalid_argument("shell experiment needs an even test function");
    const int r = form.rank();
    const std::vector<double> origin(static_cast<std::size_t>(r), 0.0);
    if (std::abs(h.value_iso(origin).real() - 1.0) > 1e-8) throw std::invalid_argument("shell experiment needs h(0) = 1");
    if (r == 2 && omega.kind() != DomainKind::ball) throw std::invalid_argument("rank-2 shell experiment supports balls");
    if (r > 2) throw std::invalid_argument("shell experiment is implemented for rank 1 and 2");

    const BetaIso beta(form, false);
    const QuadratureRule ref = gauss_legendre(16);
    const double X = mass_cutoff(h, 1e-13);
    const double dx = 0.01;
    const int nx = static_cast<int>(std::ceil(X / dx)) + 6;
    const double prefactor = std::pow(2 * kPi, -r) / static_cast<double>(factorial(form.n()));
    const QuadratureRule small = gauss_legendre(8);

    if (r == 1) {
        // C(x) = (1/2pi) int_0^x hhat, odd, C(inf) = 1/2.
        std::vector<double> c(static_cast<std::size_t>(nx + 1), 0.0);
        for (int j = 1; j <= nx; ++j) {
            double s = 0;
            for (std::size_t i = 0; i < small.nodes.size(); ++i)
                s += small.weights[i] * h.radial_fourier((j - 1 + 0.5 * (small.nodes[i] + 1)) * dx);
            c[static_cast<std::size_t>(j)] = c[static_cast<std::size_t>(j - 1)] + 0.5 * dx * s / (2 * kPi);
        }
        const LagrangeTable C(std::move(c), dx);
        auto cum = [&](double x) { return x >= 0 ? C(x) : -C(-x); };
        const double hi = t * omega.radial_extent({1.0}), lo = -t * omega.radial_extent({-1.0});
        std::vector<double> cuts{lo - X, lo, 0.0, hi, hi + X};
        double total = 0;
        for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
            total += gl_over_edges(uniform_edges(cuts[i], cuts[i + 1], 0.25), ref, [&](double x) {
                const double K = cum(x - lo) - cum(x - hi);
                const double ind = (x >= lo && x <= hi) ? 1.0 : 0.0;
                return beta({x}) * (K - ind);
            });
        return prefactor * total;
    }

    // Rank 2 ball of radius T: K(s) = Q(T - s) + (2pi)^{-2} int hhat(rho) rho A(s, rho) d rho
    // over the annulus where the circle |nu - xi| = rho crosses the boundary, with A the
    // angle of that circle inside the ball and Q(x) = (1/2pi) int_0^x hhat(rho) rho d rho.
    const double T = t * omega.radial_extent({1.0, 0.0});
    std::vector<double> hv(static_cast<std::size_t>(nx + 1)), q(static_cast<std::size_t>(nx + 1), 0.0);
    for (int j = 0; j <= nx; ++j) hv[static_cast<std::size_t>(j)] = h.radial_fourier(j * dx);
    const LagrangeTable H(std::move(hv), dx);
    for (int j = 1; j <= nx; ++j) {
        double s = 0;
        for (std::size_t i = 0; i < small.nodes.size(); ++i) {
            const double rho = (j - 1 + 0.5 * (small.nodes[i] + 1)) * dx;
            s += small.weights[i] * H(rho) * rho;
        }
        q[static_cast<std::size_t>(j)] = q[static_cast<std::size_t>(j - 1)] + 0.5 * dx * s / (2 * kPi);
    }
    const LagrangeTable Q(std::move(q), dx);
    auto hhat = [&](double rho) { return rho >= X ? 0.0 : H(rho); };

    auto crossing = [&](double s) {
        const double lo = std::abs(T - s), hi = std::min(T + s, X);
        if (lo >= hi) return 0.0;
        auto f = [&](double rho) {
            const double arg = std::clamp((s * s + rho * rho - T * T) / (2 * s * rho), -1.0, 1.0);
            return hhat(rho) * rho * 2 * std::acos(arg);
        };
        // cos substitution on the end panels absorbs the square-root behaviour of A
        const std::vector<double> edges = uniform_edges(lo, hi, 0.5);
        double total = 0;
        for (std::size_t p = 0; p + 1 < edges.size(); ++p) {
            const double a = edges[p], b = edges[p + 1];
            for (std::size_t i = 0; i < ref.nodes.size(); ++i) {
                const double phi = 0.5 * kPi * (ref.nodes[i] + 1);
                const double rho = a + 0.5 * (b - a) * (1 - std::cos(phi));
                total += 0.5 * kPi * ref.weights[i] * 0.5 * (b - a) * std::sin(phi) * f(rho);
            }
        }
        return total / (4 * kPi * kPi);
    };
    auto ring = [&](double s) {
        return angular_integral(form, [&](double th) { return beta({s * std::cos(th), s * std::sin(th)}); }, {}, 1e-10,
                                true);
    };
    // B(s) is analytic in s; tabulate it on the shell and interpolate.
    const double s_lo = std::max(0.0, T - X), ds = 0.05;
    std::vector<double> bv(static_cast<std::size_t>(std::ceil((T + X - s_lo) / ds)) + 7);
    for (std::size_t j = 0; j < bv.size(); ++j) bv[j] = ring(s_lo + static_cast<double>(j) * ds);
    const LagrangeTable Bs(std::move(bv), ds);
    std::vector<double> cuts{s_lo, T, T + X};
    double total = 0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
        total += gl_over_edges(uniform_edges(cuts[i], cuts[i + 1], 0.5), ref, [&](double s) {
            const double inner = s < T ? Q(std::min(T - s, X)) - 1.0 : 0.0;
            return s * Bs(s - s_lo) * (inner + crossing(s));
        });
    return prefactor * total;
}

ShellReport shell_error_experiment(const SpectralDomain& omega, const TestFunction& h, const std::vector<double>& t_list) {
    if (t_list.size() < 2) throw std::invalid_argument("need at least two dilations");
    ShellReport rep;
    const Form& form = *h.form();
    rep.threshold = dims(form.n()).d - 1 + 0.1;
    std::vector<double> logt, loge;
    for (double t : t_list) {
        const double e = shell_error(omega, h, t);
        rep.t.push_back(t);
        rep.error.push_back(e);
        rep.main.push_back(main_term(omega, t, form).value);
        logt.push_back(t);
        loge.push_back(std::max(std::abs(e), 1e-300));
    }
    const LineFit fit = fit_loglog(logt, loge);
    rep.slope = fit.slope;
    rep.intercept = fit.intercept;
    rep.pass = rep.slope <= rep.threshold;
    return rep;
}

VolumeEstimate boundary_shell_volume(const SpectralDomain& omega, double t, double kappa, long samples,
                                     std::uint64_t seed) {
    if (!(kappa >= 0)) throw std::invalid_argument("kappa must be nonnegative");
    if (!(t > 0)) throw std::invalid_argument("t must be positive");
    if (samples < 1) throw std::invalid_argument("sample count must be positive");
    VolumeEstimate est;
    est.samples = samples;
    if (kappa == 0.0) return est;
    const int r = omega.rank();
    const double half = t * omega.bounding_radius() + kappa;
    const double box = std::pow(2 * half, r);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ud(-half, half);
    long hits = 0;
    std::vector<double> xi(static_cast<std::size_t>(r));
    for (long i = 0; i < samples; ++i) {
        for (double& x : xi) x = ud(rng);
        if (omega.boundary_distance(xi, t) <= kappa) ++hits;
    }
    const double p = static_cast<double>(hits) / static_cast<double>(samples);
    est.value = box * p;
    est.std_error = box * std::sqrt(p * (1 - p) / static_cast<double>(samples));
    return est;
}

nlohmann::json to_json(const ShellReport& r) {
    return {{"t", r.t},
            {"error", r.error},
            {"main_term", r.main},
            {"slope", r.slope},
            {"intercept", r.intercept},
            {"threshold", r.threshold},
            {"pass", r.pass},
            {"log_factor_resolved", r.log_factor_resolved}};
}

}  // namespace weyl_lab
