#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "weyl_lab/numerics.hpp"
#include "weyl_lab/testfn.hpp"

namespace weyl_lab {

namespace {

constexpr double kPi = std::numbers::pi;

// Rank 1: max of |hhat(c + rho e^{i theta})| over the circle.
double circle_max(const TestFunction& h, cdouble center, double radius, const MOptions& opt) {
    auto f = [&](double th) { return std::abs(h.radial_transform(std::pow(center + std::polar(radius, th), 2))); };
    if (radius == 0.0) return f(0.0);
    const int n = std::max(8, static_cast<int>(std::ceil(2 * kPi * radius / opt.spacing)));
    const double dth = 2 * kPi / n;
    std::vector<double> vals(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) vals[static_cast<std::size_t>(j)] = f(j * dth);

    // Refine around the three largest local maxima of the coarse net.
    std::vector<int> peaks;
    for (int j = 0; j < n; ++j) {
        const double v = vals[static_cast<std::size_t>(j)];
        if (v >= vals[static_cast<std::size_t>((j + n - 1) % n)] && v >= vals[static_cast<std::size_t>((j + 1) % n)])
            peaks.push_back(j);
    }
    std::sort(peaks.begin(), peaks.end(), [&](int a, int b) { return vals[static_cast<std::size_t>(a)] > vals[static_cast<std::size_t>(b)]; });
    if (peaks.size() > 3) peaks.resize(3);
    double best = *std::max_element(vals.begin(), vals.end());
    const double fine = std::min(opt.refine / radius, dth / 2);
    const int steps = static_cast<int>(std::ceil(dth / fine));
    for (int pk : peaks) {
        double arg = pk * dth, top = vals[static_cast<std::size_t>(pk)];
        for (int k = -steps; k <= steps; ++k) {
            const double th = pk * dth + k * fine;
            const double v = f(th);
            if (v > top) top = v, arg = th;
        }
        // One parabolic step through the fine neighbours.
        const double fm = f(arg - fine), fp = f(arg + fine);
        const double den = fm - 2 * top + fp;
        if (den < 0) top = std::max(top, f(arg + 0.5 * fine * (fm - fp) / den));
        best = std::max(best, top);
    }
    return best;
}

double ball_radius(const TestFunction& h) { return 0.5 * h.strip_radius(); }

double base_ball_max(const TestFunction& h, const std::vector<cdouble>& center, double radius, const MOptions& opt) {
    if (h.rank() == 1) return circle_max(h, center[0], radius, opt);
    // In rank >= 2 the transform depends only on kappa . kappa, and for a center i xi the
    // maximum is taken on the complex line through it, so the search reduces to the
    // circle about i |xi|.
    double s2 = 0;
    for (const cdouble& c : center) {
        if (std::abs(c.real()) > 1e-12) throw std::invalid_argument("rank >= 2 M requires a center in i a*");
        s2 += c.imag() * c.imag();
    }
    return circle_max(h, cdouble(0, std::sqrt(s2)), radius, opt);
}

}  // namespace

double M_functional(const TestFunction& h, const SpectralPoint& lambda, const MOptions& opt) {
    if (!(opt.spacing > 0) || !(opt.refine > 0) || opt.refine > opt.spacing)
        throw std::invalid_argument("net spacings must satisfy 0 < refine <= spacing");
    const std::vector<cdouble> k = h.to_iso(lambda);
    std::vector<cdouble> center(k.size());
    const auto& mu = h.modulation();
    for (std::size_t a = 0; a < k.size(); ++a)
        center[a] = (k[a] - cdouble(0, mu.empty() ? 0.0 : mu[a])) / h.dilation();
    return h.amplitude() * base_ball_max(h, center, ball_radius(h) / h.dilation(), opt);
}

NFamily::NFamily(const TestFunction& base, double t, const NOptions& opt) : base_(base), opt_(opt) {
    if (!base.form()) throw std::invalid_argument("N requires a test function with a form");
    if (base.rank() > 2) throw std::invalid_argument("N is implemented for rank 1 and 2");
    if (!(t > 0)) throw std::invalid_argument("dilation must be positive");
    t_ = t * base.dilation();
    ball_ = ball_radius(base);
    pair_bound_ = std::sqrt(2.0 * base.form()->scale());
    step_ = opt.grid_step;
    const int pairs = base.form()->n() * (base.form()->n() - 1) / 2;
    const int r = base.rank();
    const MOptions mopt = opt.m;

    // Tabulate M_T(xi) = max over the ball of radius ball/T about i xi until the tail
    // weight drops below the truncation level for two consecutive units of radius.
    double qmax = 0;
    int quiet = 0;
    const int needed = static_cast<int>(std::ceil(2.0 / step_));
    converged_ = false;
    for (int j = 0;; ++j) {
        const double xi = j * step_;
        if (xi > opt.max_radius || xi > base.band_limit() / base.dilation()) break;
        std::vector<cdouble> center(static_cast<std::size_t>(r), 0.0);
        center[0] = cdouble(0, xi);
        const double m = base_ball_max(base, center, ball_ / t_, mopt);
        table_.push_back(m);
        const double q = m * std::pow(1 + t_ * pair_bound_ * xi, pairs) * std::pow(std::max(xi, 1.0), r - 1);
        qmax = std::max(qmax, q);
        quiet = q < opt.truncation * qmax ? quiet + 1 : 0;
        if (quiet >= needed) {
            converged_ = true;
            break;
        }
    }
    cutoff_ = step_ * static_cast<double>(table_.size() - 1);
}

double NFamily::m_at(double xi) const {
    xi = std::abs(xi);
    if (xi >= cutoff_) return 0.0;
    const double u = xi / step_;
    const long j = static_cast<long>(std::floor(u));
    const double f = u - static_cast<double>(j);
    const long last = static_cast<long>(table_.size()) - 1;
    auto at = [&](long i) {
        i = std::abs(i);
        return table_[static_cast<std::size_t>(std::min(i, last))];
    };
    // Cubic Lagrange through j-1..j+2, with the even reflection at 0.
    const double y0 = at(j - 1), y1 = at(j), y2 = at(j + 1), y3 = at(j + 2);
    return y1 + 0.5 * f * (y2 - y0 + f * (2 * y0 - 5 * y1 + 4 * y2 - y3 + f * (3 * (y1 - y2) + y3 - y0)));
}

NResult NFamily::operator()(const SpectralPoint& mu) const {
    if (!mu.is_imaginary()) throw std::invalid_argument("modulation must lie in i a*");
    const std::vector<cdouble> k = base_.to_iso(mu);
    std::vector<double> im(k.size());
    for (std::size_t a = 0; a < k.size(); ++a) im[a] = k[a].imag();
    return (*this)(im);
}

NResult NFamily::operator()(const std::vector<double>& mu_iso) const {
    const int r = base_.rank();
    if (static_cast<int>(mu_iso.size()) != r) throw std::invalid_argument("modulation rank mismatch");
    const auto& form = *base_.form();
    const PlancherelDensity pd(form);
    // Effective modulation of the raw bump: mu + t mu_base.
    const double t = t_ / base_.dilation();
    std::vector<double> M(mu_iso);
    for (std::size_t a = 0; a < M.size(); ++a)
        M[a] += t * (base_.modulation().empty() ? 0.0 : base_.modulation()[a]);
    auto bt = [&](const std::vector<double>& xi) {
        std::vector<cdouble> kk(xi.size());
        for (std::size_t a = 0; a < xi.size(); ++a) kk[a] = cdouble(0, xi[a]);
        return pd.beta_tilde(1.0, base_.from_iso(kk));
    };

    const QuadratureRule ref = gauss_legendre(16);
    double total = 0;
    if (r == 1) {
        // lambda = M + T kappa; beta~ has a kink at kappa = -M/T, M_T is even.
        std::vector<double> cuts{-cutoff_, 0.0, cutoff_};
        const double kink = -M[0] / t_;
        if (std::abs(kink) < cutoff_) cuts.push_back(kink);
        std::sort(cuts.begin(), cuts.end());
        for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
            const double lo = cuts[c], hi = cuts[c + 1];
            if (hi <= lo) continue;
            const int panels = std::max(1, static_cast<int>(std::ceil((hi - lo) / 0.25)));
            const double w = (hi - lo) / panels;
            for (int p = 0; p < panels; ++p) {
                const double a = lo + p * w;
                for (std::size_t i = 0; i < ref.nodes.size(); ++i) {
                    const double kap = a + 0.5 * w * (ref.nodes[i] + 1.0);
                    total += 0.5 * w * ref.weights[i] * bt({M[0] + t_ * kap}) * m_at(kap);
                }
            }
        }
    } else {
        const int nth = 256;
        const int panels = std::max(1, static_cast<int>(std::ceil(cutoff_ / 0.25)));
        const double w = cutoff_ / panels;
        for (int p = 0; p < panels; ++p) {
            for (std::size_t i = 0; i < ref.nodes.size(); ++i) {
                const double rad = p * w + 0.5 * w * (ref.nodes[i] + 1.0);
                double ring = 0;
                for (int k = 0; k < nth; ++k) {
                    const double th = 2 * kPi * k / nth;
                    ring += bt({M[0] + t_ * rad * std::cos(th), M[1] + t_ * rad * std::sin(th)});
                }
                total += 0.5 * w * ref.weights[i] * rad * m_at(rad) * ring * (2 * kPi / nth);
            }
        }
    }
    NResult res;
    res.value = base_.amplitude() * std::pow(t_, r) * std::pow(2 * kPi, -r) * total;
    res.cutoff_radius = cutoff_;
    res.converged = converged_;
    return res;
}

NResult N_functional(const TestFunction& h, const NOptions& opt) {
    const NFamily fam(h, 1.0, opt);
    return fam(std::vector<double>(static_cast<std::size_t>(h.rank()), 0.0));
}

SlopeReport verify_smp(const TestFunction& h, const std::vector<double>& ts, const std::vector<double>& mu_norms,
                       const NOptions& opt) {
    if (!h.form()) throw std::invalid_argument("verify_smp needs a test function with a form");
    const int r = h.rank();
    if (r > 2) throw std::invalid_argument("verify_smp supports rank 1 and 2");
    if (ts.empty() || mu_norms.empty()) throw std::invalid_argument("verify_smp needs non-empty grids");
    std::vector<std::vector<double>> dirs = {{1.0}};
    if (r == 2) dirs = {{1.0, 0.0}, {std::sqrt(0.5), std::sqrt(0.5)}};
    const PlancherelDensity pd(*h.form());
    std::vector<std::pair<double, double>> samples;
    bool converged = true;
    for (double t : ts) {
        if (!(t >= 1)) throw std::invalid_argument("dilations must be >= 1");
        const NFamily fam(h, t, opt);
        for (double m : mu_norms) {
            if (!(m >= 0)) throw std::invalid_argument("mu norms must be non-negative");
            for (const auto& d : m == 0 ? std::vector<std::vector<double>>{dirs[0]} : dirs) {
                std::vector<double> mu(d.size());
                std::vector<cdouble> kappa(d.size());
                for (std::size_t i = 0; i < d.size(); ++i) {
                    mu[i] = m * d[i];
                    kappa[i] = cdouble(0, mu[i]);
                }
                const NResult n = fam(mu);
                converged = converged && n.converged;
                const double ratio = n.value / (std::pow(t, r) * pd.beta_tilde(t, h.from_iso(kappa)));
                samples.emplace_back(t + m, ratio);
            }
        }
    }
    std::stable_sort(samples.begin(), samples.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<double> x, y;
    for (const auto& [a, b] : samples) {
        x.push_back(a);
        y.push_back(b);
    }
    const std::vector<double> sup = running_max(y);
    SlopeReport rep;
    rep.check = "smp";
    rep.n = h.form()->n();
    rep.samples = static_cast<long>(samples.size());
    rep.sup = sup.back();
    rep.slope = fit_loglog_tail(x, sup, 0.5).slope;
    rep.pass = rep.slope <= rep.threshold && converged;
    return rep;
}

}  // namespace weyl_lab
