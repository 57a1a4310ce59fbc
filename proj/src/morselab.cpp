#include "weyl_lab/morselab.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <unsupported/Eigen/MatrixFunctions>

#include "weyl_lab/numerics.hpp"
#include "weyl_lab/spherical.hpp"

namespace weyl_lab {

namespace {

double richardson_central(const std::function<double(double)>& g, double h) {
    const double d1 = (g(h) - g(-h)) / (2 * h);
    const double d2 = (g(0.5 * h) - g(-0.5 * h)) / h;
    return (4 * d2 - d1) / 3;
}

double richardson_mixed(const std::function<double(double, double)>& g, double h) {
    auto mixed = [&](double s) { return (g(s, s) - g(s, -s) - g(-s, s) + g(-s, -s)) / (4 * s * s); };
    return (4 * mixed(0.5 * h) - mixed(h)) / 3;
}

// exp of a nilpotent matrix by its finite series.
Eigen::MatrixXd exp_nilpotent(const Eigen::MatrixXd& a) {
    const auto n = a.rows();
    Eigen::MatrixXd out = Eigen::MatrixXd::Identity(n, n);
    Eigen::MatrixXd term = Eigen::MatrixXd::Identity(n, n);
    for (int k = 1; k < n; ++k) {
        term = term * a / static_cast<double>(k);
        out += term;
    }
    return out;
}

}  // namespace

// ---------------------------------------------------------------- configuration

PhaseConfiguration::PhaseConfiguration(const Form& form, std::vector<int> blocks, CartanVector xi)
    : form_(form), blocks_(std::move(blocks)), levi_(LeviSubgroup::standard(blocks_)), xi_(std::move(xi)) {
    if (xi_.n() != form_.n()) throw std::invalid_argument("xi has the wrong size");
    if (blocks_.size() < 2) throw std::invalid_argument("the parabolic must be proper");
    for (int i = 0; i < n(); ++i)
        for (int j = i + 1; j < n(); ++j)
            if (std::abs(xi_[i] - xi_[j]) < 1e-6) throw std::invalid_argument("xi must be regular");
    const double c = form_.scale();
    for (int i = 0; i < n(); ++i) {
        for (int j = i + 1; j < n(); ++j) {
            if (levi_.block_of(i) == levi_.block_of(j)) continue;
            pairs_.emplace_back(i, j);
            Eigen::MatrixXd x = Eigen::MatrixXd::Zero(n(), n());
            x(i, j) = 1.0 / std::sqrt(2 * c);
            x(j, i) = -1.0 / std::sqrt(2 * c);
            kdirs_.push_back(x);
            Eigen::MatrixXd y = Eigen::MatrixXd::Zero(n(), n());
            y(i, j) = 1.0 / std::sqrt(c);
            ndirs_.push_back(y);
        }
    }
}

PhaseConfiguration::PhaseConfiguration(const Form& form, std::vector<int> blocks)
    : PhaseConfiguration(form, std::move(blocks), default_xi(form)) {}

CartanVector PhaseConfiguration::default_xi(const Form& form) {
    const int n = form.n();
    std::vector<double> v(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = 0.5 * (n - 1 - 2 * i);
    const double norm = form.norm(std::span<const double>(v));
    for (auto& x : v) x /= norm;
    return CartanVector(v);
}

double PhaseConfiguration::xi_norm() const { return form_.norm(std::span<const double>(xi_.coords())); }

double PhaseConfiguration::chart_residual() const {
    const double c = form_.scale();
    auto ip = [&](const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) { return c * (a.transpose() * b).trace(); };
    double worst = 0;
    for (std::size_t a = 0; a < kdirs_.size(); ++a) {
        for (std::size_t b = 0; b < kdirs_.size(); ++b) {
            const double delta = a == b ? 1.0 : 0.0;
            worst = std::max(worst, std::abs(ip(kdirs_[a], kdirs_[b]) - delta));
            worst = std::max(worst, std::abs(ip(ndirs_[a], ndirs_[b]) - delta));
        }
    }
    // k_L: skew matrices supported inside the blocks
    for (int i = 0; i < n(); ++i) {
        for (int j = i + 1; j < n(); ++j) {
            if (levi_.block_of(i) != levi_.block_of(j)) continue;
            Eigen::MatrixXd z = Eigen::MatrixXd::Zero(n(), n());
            z(i, j) = 1;
            z(j, i) = -1;
            for (const auto& x : kdirs_) worst = std::max(worst, std::abs(ip(x, z)));
        }
    }
    return worst;
}

bool PhaseConfiguration::in_unipotent_radical(const Eigen::MatrixXd& x, double tol) const {
    if (x.rows() != n() || x.cols() != n()) return false;
    for (int i = 0; i < n(); ++i) {
        for (int j = 0; j < n(); ++j) {
            const double expected = i == j ? 1.0 : 0.0;
            const bool free = levi_.block_of(i) < levi_.block_of(j);
            if (!free && std::abs(x(i, j) - expected) > tol) return false;
        }
    }
    return true;
}

double PhaseConfiguration::chart_value(const Eigen::MatrixXd& k, const Eigen::MatrixXd& x,
                                       const std::vector<double>& theta, const std::vector<double>& y) const {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n(), n());
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(n(), n());
    for (std::size_t i = 0; i < pairs_.size(); ++i) {
        a += theta[i] * kdirs_[i];
        b += y[i] * ndirs_[i];
    }
    const Eigen::MatrixXd g = k * a.exp() * x * exp_nilpotent(b);
    const CartanVector h = iwasawa_H(g);
    return form_.inner(std::span<const double>(xi_.coords()), std::span<const double>(h.coords()));
}

double phase_value(const PhaseConfiguration& cfg, const Eigen::MatrixXd& k, const Eigen::MatrixXd& x) {
    if (!cfg.in_unipotent_radical(x)) throw std::invalid_argument("x is not in the unipotent radical of Q");
    const CartanVector h = iwasawa_H(k * x);
    return cfg.form().inner(std::span<const double>(cfg.xi().coords()), std::span<const double>(h.coords()));
}

Eigen::VectorXd phase_gradient(const PhaseConfiguration& cfg, const Eigen::MatrixXd& k, const Eigen::MatrixXd& x) {
    const int m = cfg.dimension();
    Eigen::VectorXd grad(2 * m);
    const std::vector<double> zero(static_cast<std::size_t>(m), 0.0);
    for (int a = 0; a < 2 * m; ++a) {
        auto g = [&](double s) {
            std::vector<double> th = zero, y = zero;
            (a < m ? th : y)[static_cast<std::size_t>(a % m)] = s;
            return cfg.chart_value(k, x, th, y);
        };
        grad(a) = richardson_central(g, 1e-5);
    }
    return grad;
}

Eigen::MatrixXd weyl_rotation(const WeylElement& w) {
    Eigen::MatrixXd p = w.matrix();
    if (w.sign() < 0) p.col(0) *= -1;
    return p;
}

double critical_residual(const PhaseConfiguration& cfg, const WeylElement& w) {
    return critical_residual(cfg, w, Eigen::MatrixXd::Identity(cfg.n(), cfg.n()));
}

double critical_residual(const PhaseConfiguration& cfg, const WeylElement& w, const Eigen::MatrixXd& m) {
    if (w.n() != cfg.n()) throw std::invalid_argument("Weyl element of the wrong size");
    return phase_gradient(cfg, weyl_rotation(w) * m, Eigen::MatrixXd::Identity(cfg.n(), cfg.n())).norm();
}

Eigen::MatrixXd random_rotation(int n, std::mt19937_64& rng) {
    const HaarStream stream(n, rng());
    return stream.sample(0);
}

Eigen::MatrixXd random_levi_rotation(const PhaseConfiguration& cfg, std::mt19937_64& rng) {
    const int n = cfg.n();
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    int start = 0;
    for (int s : cfg.blocks()) {
        if (s == 1) {
            m(start, start) = (rng() & 1) ? 1.0 : -1.0;
        } else {
            Eigen::MatrixXd b = random_rotation(s, rng);
            if (rng() & 1) b.col(0) *= -1;
            m.block(start, start, s, s) = b;
        }
        start += s;
    }
    if (m.determinant() < 0) m.col(0) *= -1;
    return m;
}

Eigen::MatrixXd random_unipotent(const PhaseConfiguration& cfg, std::mt19937_64& rng) {
    std::normal_distribution<double> normal;
    Eigen::MatrixXd x = Eigen::MatrixXd::Identity(cfg.n(), cfg.n());
    for (const auto& [i, j] : cfg.root_pairs()) x(i, j) = normal(rng);
    return x;
}

double invariance_defect(const PhaseConfiguration& cfg, const Eigen::MatrixXd& k, const Eigen::MatrixXd& x,
                         const Eigen::MatrixXd& m) {
    const Eigen::MatrixXd mi = m.transpose();
    return std::abs(phase_value(cfg, k * mi, m * x * mi) - phase_value(cfg, k, x));
}

HessianPairing hessian_pairing(const PhaseConfiguration& cfg, const WeylElement& w) {
    const int n = cfg.n();
    const int m = cfg.dimension();
    const double c = cfg.form().scale();
    const Eigen::MatrixXd W = weyl_rotation(w);
    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) D(i, i) = cfg.xi()[i];
    const Eigen::MatrixXd Dw = W.transpose() * D * W;  // Ad(w)^{-1} xi

    HessianPairing out;
    out.closed_form.resize(m, m);
    out.finite_difference.resize(m, m);
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
    const std::vector<double> zero(static_cast<std::size_t>(m), 0.0);
    for (int a = 0; a < m; ++a) {
        for (int b = 0; b < m; ++b) {
            const Eigen::MatrixXd& X = cfg.k_directions()[static_cast<std::size_t>(a)];
            const Eigen::MatrixXd& Y = cfg.n_directions()[static_cast<std::size_t>(b)];
            out.closed_form(a, b) = c * (X.transpose() * (Dw * Y - Y * Dw)).trace();
            auto g = [&](double s, double t) {
                std::vector<double> th = zero, y = zero;
                th[static_cast<std::size_t>(a)] = s;
                y[static_cast<std::size_t>(b)] = t;
                return cfg.chart_value(W, I, th, y);
            };
            out.finite_difference(a, b) = richardson_mixed(g, 1e-3);
        }
    }
    const double scale = out.closed_form.cwiseAbs().maxCoeff();
    out.relative_error = (out.closed_form - out.finite_difference).cwiseAbs().maxCoeff() / scale;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(out.closed_form);
    out.singular_values = svd.singularValues();
    out.min_singular_value = out.singular_values(m - 1);
    out.root_bound = 1e300;
    for (const auto& [i, j] : cfg.root_pairs())
        out.root_bound = std::min(out.root_bound, std::abs(Dw(i, i) - Dw(j, j)) / std::sqrt(2.0));
    return out;
}

// ---------------------------------------------------------------- sublevel sets

double Box::volume() const {
    if (lo.size() != hi.size()) throw std::invalid_argument("box corners differ in dimension");
    double v = 1;
    for (std::size_t a = 0; a < lo.size(); ++a) v *= hi[a] - lo[a];
    return v;
}

MorseModel slab_model(int dim) {
    if (dim < 1) throw std::invalid_argument("dimension must be positive");
    return {"slab", dim, [](const std::vector<double>& x) { return x[0]; }};
}

MorseModel quadratic_model(int p, int q) {
    if (p < 0 || q < 0 || p + q < 1) throw std::invalid_argument("quadratic model needs p + q >= 1");
    return {"quadratic_p" + std::to_string(p) + "_q" + std::to_string(q), p + q,
            [p, q](const std::vector<double>& x) {
                double s = 0;
                for (int i = 0; i < p; ++i) s += x[static_cast<std::size_t>(i)] * x[static_cast<std::size_t>(i)];
                for (int i = p; i < p + q; ++i)
                    s -= x[static_cast<std::size_t>(i)] * x[static_cast<std::size_t>(i)];
                return s;
            }};
}

MorseModel phase_model(const PhaseConfiguration& cfg, const WeylElement& w) {
    const int m = cfg.dimension();
    const Eigen::MatrixXd W = weyl_rotation(w);
    return {"phase", 2 * m, [cfg, W, m](const std::vector<double>& z) {
                const std::vector<double> th(z.begin(), z.begin() + m), y(z.begin() + m, z.end());
                return cfg.chart_value(W, Eigen::MatrixXd::Identity(cfg.n(), cfg.n()), th, y);
            }};
}

void McSpec::validate() const {
    if (samples < 1) throw std::invalid_argument("sample count must be positive");
    if (cells_per_axis < 0) throw std::invalid_argument("cells per axis must be non-negative");
    if (pilot_per_cell < 1 || min_per_cell < 2) throw std::invalid_argument("need at least 1 pilot and 2 main samples per cell");
}

namespace {

McEstimate stratified(const MorseModel& model, double delta, const Box& box, const McSpec& mc, bool reciprocal) {
    mc.validate();
    if (!(delta > 0 && delta < 0.5)) throw std::invalid_argument("delta must lie in (0, 1/2)");
    const int d = box.dim();
    if (d != model.dim) throw std::invalid_argument("region dimension does not match the model");
    const int M = mc.cells_per_axis > 0 ? mc.cells_per_axis
                                        : std::max(2, static_cast<int>(std::floor(std::pow(4096.0, 1.0 / d) + 1e-9)));
    long cells = 1;
    for (int a = 0; a < d; ++a) cells *= M;
    std::vector<double> width(static_cast<std::size_t>(d));
    double cell_volume = 1;
    for (int a = 0; a < d; ++a) {
        width[static_cast<std::size_t>(a)] = (box.hi[static_cast<std::size_t>(a)] - box.lo[static_cast<std::size_t>(a)]) / M;
        cell_volume *= width[static_cast<std::size_t>(a)];
    }
    auto integrand = [&](double f) {
        const double af = std::abs(f);
        if (reciprocal) return af >= delta ? 1.0 / af : 0.0;
        return af < delta ? 1.0 : 0.0;
    };
    auto cell_origin = [&](long c, std::vector<double>& o) {
        for (int a = 0; a < d; ++a) {
            const long idx = c % M;
            c /= M;
            o[static_cast<std::size_t>(a)] = box.lo[static_cast<std::size_t>(a)] + static_cast<double>(idx) * width[static_cast<std::size_t>(a)];
        }
    };
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<double> origin(static_cast<std::size_t>(d)), x(static_cast<std::size_t>(d));

    // pilot: allocation weights
    std::vector<double> weight(static_cast<std::size_t>(cells));
    double total_weight = 0;
    for (long c = 0; c < cells; ++c) {
        cell_origin(c, origin);
        double fmin = 1e300, fmax = -1e300, amin = 1e300, sum = 0, sum2 = 0;
        auto visit = [&](double f) {
            fmin = std::min(fmin, f);
            fmax = std::max(fmax, f);
            amin = std::min(amin, std::abs(f));
        };
        for (long corner = 0; corner < (1L << d); ++corner) {
            for (int a = 0; a < d; ++a)
                x[static_cast<std::size_t>(a)] = origin[static_cast<std::size_t>(a)] + ((corner >> a) & 1) * width[static_cast<std::size_t>(a)];
            visit(model.f(x));
        }
        std::mt19937_64 rng(stream_seed(mc.seed, 2 * static_cast<std::uint64_t>(c)));
        for (int i = 0; i < mc.pilot_per_cell; ++i) {
            for (int a = 0; a < d; ++a)
                x[static_cast<std::size_t>(a)] = origin[static_cast<std::size_t>(a)] + unit(rng) * width[static_cast<std::size_t>(a)];
            const double f = model.f(x);
            visit(f);
            const double g = integrand(f);
            sum += g;
            sum2 += g * g;
        }
        const double mean = sum / mc.pilot_per_cell;
        double sd = std::sqrt(std::max(0.0, sum2 / mc.pilot_per_cell - mean * mean));
        const double range = std::max(fmax - fmin, 1e-300);
        if (amin <= range) {
            // f plausibly reaches 0 in the cell: linear model of f across the cell
            if (reciprocal) {
                sd = std::max(sd, std::sqrt(1.0 / (delta * range)));
            } else {
                const double p = std::min(0.5, 2 * delta / range);
                sd = std::max(sd, std::sqrt(p * (1 - p)));
            }
        }
        weight[static_cast<std::size_t>(c)] = sd;
        total_weight += sd;
    }

    const long budget = std::max(0L, mc.samples - cells * (mc.pilot_per_cell + mc.min_per_cell));
    McEstimate out;
    double var = 0;
    for (long c = 0; c < cells; ++c) {
        cell_origin(c, origin);
        long nc = mc.min_per_cell;
        if (total_weight > 0)
            nc += static_cast<long>(std::floor(static_cast<double>(budget) * weight[static_cast<std::size_t>(c)] / total_weight));
        std::mt19937_64 rng(stream_seed(mc.seed, 2 * static_cast<std::uint64_t>(c) + 1));
        double sum = 0, sum2 = 0;
        for (long i = 0; i < nc; ++i) {
            for (int a = 0; a < d; ++a)
                x[static_cast<std::size_t>(a)] = origin[static_cast<std::size_t>(a)] + unit(rng) * width[static_cast<std::size_t>(a)];
            const double g = integrand(model.f(x));
            sum += g;
            sum2 += g * g;
        }
        const double mean = sum / static_cast<double>(nc);
        const double s2 = std::max(0.0, (sum2 - static_cast<double>(nc) * mean * mean) / static_cast<double>(nc - 1));
        out.value += cell_volume * mean;
        var += cell_volume * cell_volume * s2 / static_cast<double>(nc);
        out.samples += nc;
    }
    out.std_error = std::sqrt(var);
    return out;
}

Box symmetric_box(int d, double half) {
    return {std::vector<double>(static_cast<std::size_t>(d), -half), std::vector<double>(static_cast<std::size_t>(d), half)};
}

}  // namespace

McEstimate sublevel_volume(const MorseModel& f, double delta, const Box& region, const McSpec& mc) {
    return stratified(f, delta, region, mc, false);
}

McEstimate reciprocal_integral(const MorseModel& f, double delta, const Box& region, const McSpec& mc) {
    return stratified(f, delta, region, mc, true);
}

MorseFitReport morse_experiment(MorseCase kind, const std::string& quantity, const std::vector<double>& deltas,
                                const McSpec& mc, int p, int q) {
    if (quantity != "volume" && quantity != "reciprocal") throw std::invalid_argument("quantity must be volume or reciprocal");
    if (deltas.size() < 3) throw std::invalid_argument("the fit needs at least three delta values");
    const bool volume = quantity == "volume";
    MorseFitReport rep;
    rep.quantity = quantity;
    rep.deltas = deltas;
    MorseModel model;
    Box region;
    switch (kind) {
        case MorseCase::slab:
            rep.case_name = "slab";
            model = slab_model(2);
            region = {{-1.0, -0.5}, {1.0, 0.5}};
            break;
        case MorseCase::saddle:
            rep.case_name = "saddle_p1_q1";
            model = quadratic_model(1, 1);
            region = symmetric_box(2, 1.0);
            break;
        case MorseCase::higher:
            if (p + q < 3 || p < 1 || q < 1) throw std::invalid_argument("the higher case needs p, q >= 1 and p + q >= 3");
            rep.case_name = "quadratic_p" + std::to_string(p) + "_q" + std::to_string(q);
            model = quadratic_model(p, q);
            region = symmetric_box(p + q, 1.0);
            break;
    }
    std::vector<double> logd, logl, logv;
    for (std::size_t i = 0; i < deltas.size(); ++i) {
        McSpec spec = mc;
        spec.seed = stream_seed(mc.seed, i);
        const McEstimate e = volume ? sublevel_volume(model, deltas[i], region, spec)
                                    : reciprocal_integral(model, deltas[i], region, spec);
        rep.estimates.push_back(e);
        if (!(e.value > 0)) throw std::runtime_error("Monte Carlo estimate is not positive; increase the sample count");
        logd.push_back(std::log(deltas[i]));
        logl.push_back(std::log(-std::log(deltas[i])));
        logv.push_back(std::log(e.value));
    }
    if (kind == MorseCase::slab) {
        double worst = 0;
        for (std::size_t i = 0; i < deltas.size(); ++i) {
            const double ref = volume ? 2 * deltas[i] : 2 * std::log(1 / deltas[i]);
            rep.reference.push_back(ref);
            const double dev = std::abs(rep.estimates[i].value - ref);
            const double sigma = rep.estimates[i].std_error;
            worst = std::max(worst, dev <= 1e-12 * ref ? 0.0 : dev / std::max(sigma, 1e-300));
        }
        rep.fit = worst;  // largest deviation in standard errors
        rep.window_lo = 0;
        rep.window_hi = 3;
    } else if (volume && kind == MorseCase::saddle) {
        Eigen::MatrixXd A(static_cast<Eigen::Index>(deltas.size()), 3);
        Eigen::VectorXd b(static_cast<Eigen::Index>(deltas.size()));
        for (std::size_t i = 0; i < deltas.size(); ++i) {
            A(static_cast<Eigen::Index>(i), 0) = logd[i];
            A(static_cast<Eigen::Index>(i), 1) = logl[i];
            A(static_cast<Eigen::Index>(i), 2) = 1;
            b(static_cast<Eigen::Index>(i)) = logv[i];
        }
        rep.fit = A.colPivHouseholderQr().solve(b)(0);
        rep.window_lo = 0.9;
        rep.window_hi = 1.0;
    } else if (volume) {
        rep.fit = fit_line(logd, logv).slope;
        rep.window_lo = 0.98;
        rep.window_hi = 1e300;
    } else {
        rep.fit = fit_line(logl, logv).slope;
        const double target = kind == MorseCase::saddle ? 2.0 : 1.0;
        rep.window_lo = target - 0.1;
        rep.window_hi = target + 0.1;
    }
    rep.pass = rep.fit >= rep.window_lo && rep.fit <= rep.window_hi;
    return rep;
}

nlohmann::json to_json(const McEstimate& e) {
    return {{"value", e.value}, {"stderr", e.std_error}, {"samples", e.samples}};
}

nlohmann::json to_json(const MorseFitReport& r) {
    nlohmann::json est = nlohmann::json::array();
    for (const auto& e : r.estimates) est.push_back(to_json(e));
    nlohmann::json j = {{"case", r.case_name}, {"quantity", r.quantity}, {"deltas", r.deltas},
                        {"estimates", est},     {"fit", r.fit},           {"window", {r.window_lo, r.window_hi}},
                        {"pass", r.pass}};
    if (!r.reference.empty()) j["reference"] = r.reference;
    if (r.window_hi > 1e299) j["window"] = {r.window_lo, nullptr};
    return j;
}

}  // namespace weyl_lab
