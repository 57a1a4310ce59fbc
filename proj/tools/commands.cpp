#include "commands.hpp"

#include <cmath>
#include <cstdlib>
#include <numbers>
#include <random>
#include <sstream>

#include "weyl_lab/morselab.hpp"
#include "weyl_lab/numerics.hpp"
#include "weyl_lab/plancherel.hpp"
#include "weyl_lab/sl2tf.hpp"
#include "weyl_lab/spherical.hpp"
#include "weyl_lab/testfn.hpp"
#include "weyl_lab/weyl_main.hpp"

namespace weyl_lab::cli {

namespace {

void require(bool ok, const std::string& message) {
    if (!ok) throw UsageError(message);
}

std::string join(const std::vector<int>& v, const char* sep) {
    std::ostringstream os;
    for (std::size_t i = 0; i < v.size(); ++i) os << (i ? sep : "") << v[i];
    return os.str();
}

}  // namespace

// ---------------------------------------------------------------- plancherel

int run_plancherel(const PlancherelOptions& o, const RunConfig& cfg) {
    require(o.n >= 2 && o.n <= 8, "--n must lie in [2, 8]");
    const Form form(o.n, cfg.form_kind());
    const PlancherelDensity density(form);
    Report report;
    report.command = "plancherel";
    if (o.sweep) {
        require(o.sweep_samples >= 100 && o.sweep_norm_max > 10, "sweep needs at least 100 samples and norm max > 10");
        SweepSpec spec;
        spec.samples = o.sweep_samples;
        spec.norm_max = o.sweep_norm_max;
        spec.seed = cfg.seed;
        report.parameters = {{"n", o.n}, {"sweep", true}, {"samples", o.sweep_samples}, {"norm_max", o.sweep_norm_max}};
        std::vector<std::function<SlopeReport()>> jobs = {[&] { return verify_plnchbnd(form, spec); },
                                                          [&] { return verify_logderbnd(form, spec); }};
        for (const auto& levi : maximal_levis(o.n)) jobs.push_back([&, levi] { return verify_scr(form, levi, spec); });
        const auto reports = parallel_map<SlopeReport>(jobs.size(), cfg.threads, [&](std::size_t i) { return jobs[i](); });
        Table t{"sweep", {"check", "samples", "sup", "slope", "threshold", "pass"}, {}};
        for (const auto& r : reports) t.add({r.check, r.samples, r.sup, r.slope, r.threshold, r.pass});
        report.tables.push_back(t);
        emit(report, cfg);
        return kExitOk;
    }
    const std::vector<double> u = uniform_grid(o.u_max, o.step);
    report.parameters = {{"n", o.n}, {"u_max", o.u_max}, {"step", o.step},
                         {"ray", "lambda = i u (e_1 - e_n)"}};
    Table t{"plancherel", {"u", "norm", "beta", "beta_tilde", "ratio"}, {}};
    const auto rows = parallel_map<std::vector<nlohmann::json>>(u.size(), cfg.threads, [&](std::size_t i) {
        std::vector<double> x(static_cast<std::size_t>(o.n), 0.0);
        x.front() = u[i];
        x.back() = -u[i];
        const SpectralPoint lambda = SpectralPoint::imaginary(x);
        const double b = density.beta(lambda), bt = density.beta_tilde(lambda);
        return std::vector<nlohmann::json>{u[i], form.dual_norm(std::span<const double>(x)), b, bt, b / bt};
    });
    for (const auto& r : rows) t.add(r);
    report.tables.push_back(t);
    emit(report, cfg);
    return kExitOk;
}

// ---------------------------------------------------------------- main-term

int run_main_term(const MainTermOptionsCli& o, const RunConfig& cfg) {
    require(o.n == 2 || o.n == 3, "main-term supports --n 2 and 3");
    require(!o.t_list.empty(), "--t must list at least one dilation");
    const std::vector<double> ts = parse_real_list(o.t_list);
    require(!ts.empty(), "--t must list at least one dilation");
    for (double t : ts) require(t > 0, "dilations must be positive");
    const int rank = o.n - 1;
    SpectralDomain omega = SpectralDomain::ball(rank, 1.0);
    if (o.domain == "box") omega = SpectralDomain::box(std::vector<double>(static_cast<std::size_t>(rank), 1.0));
    else require(o.domain == "ball", "--domain must be ball or box");
    const Form form(o.n, cfg.form_kind());
    MainTermOptions opt;
    opt.symmetrize = o.symmetrize;
    opt.rel_tol = o.rel_tol;

    const auto results = parallel_map<MainTermResult>(ts.size(), cfg.threads, [&](std::size_t i) {
        return main_term(omega, ts[i], form, opt);
    });
    Report report;
    report.command = "main-term";
    report.parameters = {{"n", o.n}, {"domain", omega.name()}, {"t", ts}, {"symmetrize", o.symmetrize}};
    std::vector<std::string> cols = {"t", "main_term", "error_estimate", "slope"};
    double constant = 0;
    if (!o.volume.empty()) {
        const double v = parse_real(o.volume);
        require(v > 0, "--volume must be positive");
        constant = weyl_constant(o.n, v);
        cols.push_back("weyl_constant");
        report.parameters["volume"] = v;
    }
    Table t{"main_term", cols, {}};
    for (std::size_t i = 0; i < ts.size(); ++i) {
        nlohmann::json slope = nullptr;
        if (ts.size() > 1) {
            const std::size_t a = i == 0 ? 0 : i - 1, b = i == 0 ? 1 : i;
            slope = std::log(results[b].value / results[a].value) / std::log(ts[b] / ts[a]);
        }
        std::vector<nlohmann::json> row = {ts[i], results[i].value, results[i].error_estimate, slope};
        if (!o.volume.empty()) row.push_back(constant);
        t.add(row);
    }
    report.tables.push_back(t);
    report.summary = {{"dimension", dims(o.n).d}};
    if (ts.size() > 1) {
        std::vector<double> v;
        for (const auto& r : results) v.push_back(r.value);
        report.summary["fitted_exponent"] = fit_loglog(ts, v).slope;
    }
    emit(report, cfg);
    return kExitOk;
}

// ---------------------------------------------------------------- spherical

int run_spherical(const SphericalOptions& o, const RunConfig& cfg) {
    require(o.n >= 2 && o.n <= 6, "--n must lie in [2, 6]");
    require(o.samples >= 2, "--samples must be at least 2");
    QuadratureSpec spec;
    spec.sample_count = o.samples;
    spec.seed = cfg.seed;
    if (o.method == "product") spec.method = QuadratureMethod::product_angles;
    else require(o.method == "mc", "--method must be mc or product");
    const Form form(o.n, cfg.form_kind());

    std::vector<SpectralPoint> lambdas;
    std::vector<GroupPoint> points;
    if (o.random > 0) {
        std::mt19937_64 rng(cfg.seed);
        std::normal_distribution<double> normal;
        for (int i = 0; i < o.random; ++i) {
            lambdas.push_back(random_imaginary_on_sphere(form, o.lambda_radius, rng));
            Eigen::VectorXd y(o.n - 1);
            for (int a = 0; a < o.n - 1; ++a) y(a) = normal(rng);
            y *= o.g_radius / (y.norm() * std::sqrt(form.scale()));
            points.push_back(GroupPoint::from_cartan(CartanVector::from_chart(form, y)));
        }
    } else {
        std::vector<double> im = o.lambda.empty() ? std::vector<double>(static_cast<std::size_t>(o.n), 0.0)
                                                  : parse_real_list(o.lambda);
        std::vector<double> h = o.cartan.empty() ? std::vector<double>(static_cast<std::size_t>(o.n), 0.0)
                                                 : parse_real_list(o.cartan);
        require(static_cast<int>(im.size()) == o.n && static_cast<int>(h.size()) == o.n,
                "--lambda and --cartan need n entries");
        double si = 0, sh = 0;
        for (int i = 0; i < o.n; ++i) {
            si += im[static_cast<std::size_t>(i)];
            sh += h[static_cast<std::size_t>(i)];
        }
        require(std::abs(si) < 1e-12 && std::abs(sh) < 1e-12, "--lambda and --cartan must sum to zero");
        lambdas.push_back(SpectralPoint::imaginary(im));
        points.push_back(GroupPoint::from_cartan(CartanVector(h)));
    }
    const auto est = parallel_map<SphericalEstimate>(lambdas.size(), cfg.threads, [&](std::size_t i) {
        QuadratureSpec s = spec;
        s.seed = stream_seed(cfg.seed, i);
        return spherical_phi(lambdas[i], points[i], s);
    });
    Report report;
    report.command = "spherical";
    report.parameters = {{"n", o.n}, {"samples", o.samples}, {"method", o.method}, {"random", o.random}};
    Table t{"spherical", {"index", "lambda_norm", "re", "im", "abs", "std_error", "samples"}, {}};
    for (std::size_t i = 0; i < est.size(); ++i)
        t.add({static_cast<long>(i), form.dual_norm(std::span<const cdouble>(lambdas[i].coords())), est[i].value.real(),
               est[i].value.imag(), std::abs(est[i].value), est[i].std_error, est[i].samples});
    report.tables.push_back(t);
    emit(report, cfg);
    return kExitOk;
}

// ---------------------------------------------------------------- testfn

int run_testfn(const TestfnOptions& o, const RunConfig& cfg) {
    require(o.n >= 2 && o.n <= 4, "--n must lie in [2, 4]");
    require(o.support > 0, "--support must be positive");
    const Form form(o.n, cfg.form_kind());
    const int rank = o.n - 1;
    const int grid = o.grid > 0 ? o.grid : default_grid_size(rank);
    const TestFunction h = TestFunction::autocorrelation(form, o.support, grid);
    const std::vector<double> xi = uniform_grid(o.xi_max, o.step);
    std::vector<std::string> cols = {"xi", "h", "hhat"};
    if (o.with_m) cols.push_back("M");
    const auto rows = parallel_map<std::vector<nlohmann::json>>(xi.size(), cfg.threads, [&](std::size_t i) {
        std::vector<double> z(static_cast<std::size_t>(rank), 0.0);
        std::vector<cdouble> kappa(static_cast<std::size_t>(rank), 0.0);
        z[0] = xi[i];
        kappa[0] = cdouble(0, xi[i]);
        std::vector<nlohmann::json> row = {xi[i], h.value_iso(z).real(), h.fourier_iso(kappa).real()};
        if (o.with_m) row.push_back(M_functional(h, h.from_iso(kappa)));
        return row;
    });
    Report report;
    report.command = "testfn";
    report.parameters = {{"n", o.n}, {"support", o.support}, {"grid", grid}, {"xi_max", o.xi_max}, {"step", o.step}};
    Table t{"testfn", cols, {}};
    for (const auto& r : rows) t.add(r);
    report.tables.push_back(t);
    report.summary = {{"band_limit", h.band_limit()}, {"integral", h.integral()}};
    if (!o.save.empty()) write_file_atomic(o.save, h.to_json().dump() + "\n");
    emit(report, cfg);
    return kExitOk;
}

// ---------------------------------------------------------------- sl2

int run_sl2(const Sl2Options& o, const RunConfig& cfg) {
    require(o.level >= 3 && o.level <= 1000, "--level must be at least 3");
    require(o.h_radius > 0, "--h-radius must be positive");
    require(o.t_max >= 0 || o.lambda_max > 0, "give --t-max and/or --lambda-max");
    std::string cache = o.cache;
    if (cache.empty()) {
        if (const char* env = std::getenv("WEYL_LAB_CACHE")) cache = env;
    }
    const double bound = trace_congruence_bound(o.level);
    if (cache.empty() && o.h_radius > bound)
        throw SupportViolation("support radius exceeds the hyperbolic-free window " + format_double(bound) +
                               " of Gamma(" + std::to_string(o.level) + "); supply a length-spectrum cache");
    if (2 * std::cosh(o.h_radius / 2) > 200)
        throw SupportViolation("support radius beyond the range of the length-spectrum enumeration");

    const std::string constants = cfg.constants.empty() ? default_constants_path() : cfg.constants;
    const ScatteringData scattering = load_scattering_data(constants, o.level);
    const LengthSpectrum spectrum =
        cache.empty() ? length_spectrum(o.level, o.h_radius) : length_spectrum_cached(o.level, o.h_radius, cache);
    if (spectrum.validity_radius < o.h_radius)
        throw SupportViolation("length spectrum is complete only up to " + format_double(spectrum.validity_radius));
    const CongruenceGroup group = group_data(o.level);
    const SelbergTraceFormula formula(TestFunction::autocorrelation(1, o.h_radius, o.grid), group, spectrum, scattering);

    Report report;
    report.command = "sl2";
    report.parameters = {{"level", o.level}, {"h_radius", o.h_radius}, {"grid", o.grid}, {"constants", constants}};
    report.summary = {{"area", group.area}, {"cusps", group.cusps}, {"weyl_coefficient", group.area / (2 * std::numbers::pi)},
                      {"hyperbolic_classes", static_cast<long>(spectrum.entries.size())}};
    if (o.t_max >= 0) {
        const std::vector<double> ts = uniform_grid(o.t_max, o.t_step);
        const auto rows = parallel_map<TraceFormulaEvaluation>(ts.size(), cfg.threads,
                                                               [&](std::size_t i) { return formula.evaluate(ts[i]); });
        Table t{"terms",
                {"t", "identity", "hyperbolic", "scatter_int", "scatter_half", "digamma_int", "m_half", "log2", "total",
                 "constant_eigenfunction"},
                {}};
        double worst = 1e300;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            const auto& e = rows[i];
            t.add({e.t, e.identity_term, e.hyperbolic_term, e.scattering_integral, e.scattering_half,
                   e.digamma_integral, e.m_half_term, e.log2_term, e.total, formula.constant_eigenfunction_term(e.t)});
            worst = std::min(worst, e.total / e.scale());
        }
        report.tables.push_back(t);
        report.summary["min_relative_total"] = worst;
    }
    if (o.lambda_max > 0) {
        const std::vector<double> lambdas = {o.lambda_max / 8, o.lambda_max / 4, o.lambda_max / 2, o.lambda_max};
        const auto counts = parallel_map<SmoothedCount>(lambdas.size(), cfg.threads,
                                                        [&](std::size_t i) { return formula.smoothed_count(lambdas[i]); });
        Table t{"count", {"lambda", "integral", "weyl_prediction", "residual", "ratio"}, {}};
        std::vector<double> res;
        for (const auto& c : counts) {
            t.add({c.lambda, c.integral, c.weyl_prediction, c.residual, c.integral / c.weyl_prediction});
            res.push_back(std::abs(c.residual));
        }
        report.tables.push_back(t);
        report.summary["ratio_at_lambda_max"] = counts.back().integral / counts.back().weyl_prediction;
        report.summary["residual_exponent"] = fit_loglog(lambdas, res).slope;
    }
    emit(report, cfg);
    return kExitOk;
}

// ---------------------------------------------------------------- morse

int run_morse(const MorseOptions& o, const RunConfig& cfg) {
    Report report;
    report.command = "morse";
    if (o.critical) {
        require(o.n >= 2 && o.n <= 6, "--n must lie in [2, 6]");
        const std::vector<int> blocks = parse_int_list(o.blocks);
        int total = 0;
        for (int b : blocks) {
            require(b >= 1, "block sizes must be positive");
            total += b;
        }
        require(total == o.n && blocks.size() >= 2, "--blocks must be a composition of n with at least two parts");
        const PhaseConfiguration phase(Form(o.n, cfg.form_kind()), blocks);
        const auto ws = WeylElement::enumerate(o.n);
        struct Row {
            double residual;
            HessianPairing h;
        };
        const auto rows = parallel_map<Row>(ws.size(), cfg.threads, [&](std::size_t i) {
            return Row{critical_residual(phase, ws[i]), hessian_pairing(phase, ws[i])};
        });
        Table t{"critical", {"w", "residual", "hessian_rel_error", "min_singular_value", "root_bound"}, {}};
        for (std::size_t i = 0; i < ws.size(); ++i)
            t.add({join(ws[i].perm(), " "), rows[i].residual, rows[i].h.relative_error, rows[i].h.min_singular_value,
                   rows[i].h.root_bound});
        report.parameters = {{"n", o.n}, {"blocks", blocks}, {"xi", phase.xi().coords()}};
        report.summary = {{"chart_residual", phase.chart_residual()}, {"xi_norm", phase.xi_norm()}};
        report.tables.push_back(t);
        emit(report, cfg);
        return kExitOk;
    }
    std::vector<std::pair<MorseCase, std::string>> cases;
    for (auto [kind, name] : {std::pair{MorseCase::slab, "slab"}, std::pair{MorseCase::saddle, "saddle"},
                              std::pair{MorseCase::higher, "higher"}})
        if (o.morse_case == "all" || o.morse_case == name) cases.emplace_back(kind, name);
    require(!cases.empty(), "--case must be slab, saddle, higher or all");
    std::vector<std::string> quantities;
    if (o.quantity == "both") quantities = {"volume", "reciprocal"};
    else quantities = {o.quantity};
    require(o.quantity == "both" || o.quantity == "volume" || o.quantity == "reciprocal",
            "--quantity must be volume, reciprocal or both");
    require(o.deltas >= 3 && o.deltas <= 50, "--deltas must lie in [3, 50]");
    require(o.samples >= 10000, "--samples must be at least 10000");
    McSpec mc;
    mc.samples = o.samples;
    mc.seed = cfg.seed;
    const std::vector<double> deltas = logspace(1e-4, 1e-2, o.deltas);
    std::vector<std::pair<MorseCase, std::string>> jobs;
    for (const auto& c : cases)
        for (const auto& q : quantities) jobs.emplace_back(c.first, q);
    const auto reps = parallel_map<MorseFitReport>(jobs.size(), cfg.threads, [&](std::size_t i) {
        McSpec s = mc;
        s.seed = stream_seed(cfg.seed, i);
        return morse_experiment(jobs[i].first, jobs[i].second, deltas, s, o.p, o.q);
    });
    Table t{"morse", {"case", "quantity", "delta", "estimate", "std_error", "samples", "fit", "window_lo", "window_hi", "pass"}, {}};
    nlohmann::json all = nlohmann::json::array();
    for (const auto& r : reps) {
        for (std::size_t i = 0; i < r.deltas.size(); ++i) {
            const nlohmann::json hi = r.window_hi > 1e299 ? nlohmann::json(nullptr) : nlohmann::json(r.window_hi);
            t.add({r.case_name, r.quantity, r.deltas[i], r.estimates[i].value, r.estimates[i].std_error,
                   r.estimates[i].samples, r.fit, r.window_lo, hi, r.pass});
        }
        all.push_back(to_json(r));
    }
    report.parameters = {{"samples", o.samples}, {"deltas", deltas}, {"p", o.p}, {"q", o.q}};
    report.summary = {{"reports", all}};
    report.tables.push_back(t);
    emit(report, cfg);
    return kExitOk;
}

}  // namespace weyl_lab::cli
