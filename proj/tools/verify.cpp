#include <cmath>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>

#include "commands.hpp"
#include "weyl_lab/morselab.hpp"
#include "weyl_lab/numerics.hpp"
#include "weyl_lab/plancherel.hpp"
#include "weyl_lab/sl2tf.hpp"
#include "weyl_lab/spherical.hpp"
#include "weyl_lab/testfn.hpp"
#include "weyl_lab/weyl_main.hpp"

namespace weyl_lab::cli {

namespace {

const double pi = std::numbers::pi;

struct Check {
    std::string suite;
    std::string name;
    double value = 0;
    double threshold = 0;
    bool pass = false;
};

// value <= threshold
Check at_most(std::string suite, std::string name, double value, double threshold) {
    return {std::move(suite), std::move(name), value, threshold, value <= threshold};
}

using Suite = std::function<std::vector<Check>(std::uint64_t seed, int threads)>;

std::vector<Check> plancherel_suite(std::uint64_t seed, int threads) {
    std::vector<Check> out;
    const PlancherelDensity d2(Form(2));
    double worst = 0;
    for (int i = 0; i <= 5000; ++i) {
        const double u = 0.01 * i;
        const double b = d2.beta(SpectralPoint::imaginary(std::vector<double>{u, -u}));
        worst = std::max(worst, std::abs(b - pi * u * std::tanh(pi * u)) / (1 + u * u));
    }
    out.push_back(at_most("plancherel", "n2_closed_form", worst, 1e-10));

    SweepSpec spec;
    spec.samples = 4000;
    spec.seed = seed;
    std::vector<std::function<SlopeReport()>> jobs = {
        [&] { return verify_plnchbnd(Form(2), spec); }, [&] { return verify_plnchbnd(Form(3), spec); },
        [&] { return verify_logderbnd(Form(3), spec); }};
    for (int n : {3, 4})
        for (const auto& levi : maximal_levis(n)) jobs.push_back([&, n, levi] { return verify_scr(Form(n), levi, spec); });
    for (const auto& r : parallel_map<SlopeReport>(jobs.size(), threads, [&](std::size_t i) { return jobs[i](); }))
        out.push_back(at_most("plancherel", r.check + "_n" + std::to_string(r.n), r.slope, r.threshold));

    const PlancherelDensity d3(Form(3));
    std::mt19937_64 rng(seed);
    double defect = 0;
    for (int i = 0; i < 200; ++i) {
        const SpectralPoint l = random_imaginary_on_sphere(Form(3), 1 + 20.0 * i / 200, rng);
        const WeylElement w = WeylElement::random(3, rng);
        defect = std::max(defect, std::abs(d3.beta(w.act(l)) - d3.beta(l)) / d3.beta(l));
    }
    out.push_back(at_most("plancherel", "beta_weyl_invariance_n3", defect, 1e-12));
    return out;
}

std::vector<Check> spherical_suite(std::uint64_t seed, int threads) {
    std::vector<Check> out;
    const Form form(3);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    struct Case {
        SpectralPoint lambda;
        WeylElement w;
        GroupPoint g;
    };
    std::vector<Case> cases;
    for (int i = 0; i < 20; ++i) {
        const SpectralPoint l = random_imaginary_on_sphere(form, 0.5 + 5.0 * i / 20, rng);
        const WeylElement w = WeylElement::random(3, rng);
        Eigen::MatrixXd m(3, 3);
        for (int a = 0; a < 9; ++a) m(a / 3, a % 3) = normal(rng);
        if (m.determinant() < 0) m.col(0) *= -1;
        cases.push_back({l, w, GroupPoint::normalized(m)});
    }
    struct Result {
        double bound_excess;
        double invariance_z;
    };
    const auto results = parallel_map<Result>(cases.size(), threads, [&](std::size_t i) {
        QuadratureSpec mc;
        mc.sample_count = 20000;
        mc.seed = stream_seed(seed, i);
        const auto e = spherical_phi(cases[i].lambda, cases[i].g, mc);
        const auto d = spherical_phi_difference(cases[i].w.act(cases[i].lambda), cases[i].lambda, cases[i].g, mc);
        return Result{std::abs(e.value) - 1 - 3 * e.std_error, std::abs(d.value) / std::max(d.std_error, 1e-300)};
    });
    double excess = -1e300, z = 0;
    for (const auto& r : results) {
        excess = std::max(excess, r.bound_excess);
        z = std::max(z, r.invariance_z);
    }
    out.push_back(at_most("spherical", "abs_phi_minus_1_minus_3sigma", excess, 0.0));
    out.push_back(at_most("spherical", "weyl_invariance_sigmas", z, 6.0));

    QuadratureSpec spec;
    spec.sample_count = 20000;
    spec.seed = seed;
    const auto at_one = spherical_phi(SpectralPoint::imaginary(std::vector<double>{1.3, -0.2, -1.1}),
                                      GroupPoint(Eigen::MatrixXd::Identity(3, 3)), spec);
    out.push_back(at_most("spherical", "phi_at_identity", std::abs(at_one.value - 1.0), 1e-12));
    out.push_back(at_most("spherical", "kostant_violation", kostant_check(CartanVector({1.0, 0.25, -1.25}), spec).max_violation, 1e-12));
    const HaarStream haar(4, seed);
    double h_on_k = 0;
    for (std::uint64_t i = 0; i < 200; ++i) {
        const CartanVector h = iwasawa_H(haar.sample(i));
        for (double x : h.coords()) h_on_k = std::max(h_on_k, std::abs(x));
    }
    out.push_back(at_most("spherical", "iwasawa_vanishes_on_K", h_on_k, 1e-12));
    return out;
}

std::vector<Check> testfn_suite(std::uint64_t, int threads) {
    std::vector<Check> out;
    const std::vector<double> radii = {1.5, 2.5, 3.5};
    const auto abel = parallel_map<AbelReport>(radii.size(), threads, [&](std::size_t i) {
        return abel_roundtrip_sl2(TestFunction::autocorrelation(Form(2), radii[i], 1025));
    });
    double dev = 0, leak = 0;
    for (const auto& r : abel) {
        dev = std::max(dev, r.sup_deviation);
        leak = std::max(leak, r.support_leak);
    }
    out.push_back(at_most("testfn", "abel_roundtrip_n2", dev, 1e-6));
    out.push_back(at_most("testfn", "abel_support_leak_n2", leak, 1e-8));

    const TestFunction h1 = TestFunction::autocorrelation(Form(2), 2.0, 1025);
    const TestFunction h2 = TestFunction::autocorrelation(Form(3), 2.0, 257);
    double negative = 0;
    for (int i = 0; i <= 200; ++i) {
        const double xi = 0.1 * i;
        negative = std::max(negative, -h1.fourier_iso({cdouble(0, xi)}).real());
        negative = std::max(negative, -h2.fourier_iso({cdouble(0, xi * 0.6), cdouble(0, xi * 0.8)}).real());
    }
    out.push_back(at_most("testfn", "hhat_nonnegative", negative, 0.0));

    double dominance = -1e300;
    for (double xi : {0.0, 1.0, 4.0, 9.0}) {
        const std::vector<cdouble> kappa = {cdouble(0, xi)};
        dominance = std::max(dominance, std::abs(h1.fourier_iso(kappa)) - M_functional(h1, h1.from_iso(kappa)));
    }
    out.push_back(at_most("testfn", "M_dominates_center", dominance, 0.0));
    const NResult n = N_functional(h1);
    out.push_back(at_most("testfn", "N_converged", n.converged ? 0.0 : 1.0, 0.0));
    out.push_back(at_most("testfn", "h_at_zero_normalized", std::abs(h1.value_iso({0.0}).real() - 1.0), 1e-12));
    return out;
}

std::vector<Check> weyl_suite(std::uint64_t seed, int threads) {
    std::vector<Check> out;
    double arith = 0;
    for (double v : {1.0, 4 * pi, 17.25}) arith = std::max(arith, std::abs(weyl_constant(2, v) - v / (4 * pi)));
    out.push_back(at_most("weyl", "weyl_constant_n2", arith, 0.0));
    const std::vector<double> ts = {50, 100, 200};
    for (int n : {2, 3}) {
        const Form form(n);
        const SpectralDomain ball = SpectralDomain::ball(n - 1, 1.0);
        const auto vals = parallel_map<double>(ts.size(), threads, [&](std::size_t i) {
            return main_term(ball, ts[i], form).value;
        });
        const double d = dims(n).d;
        out.push_back(at_most("weyl", "main_term_exponent_n" + std::to_string(n),
                              std::abs(fit_loglog(ts, vals).slope - d) / d, 0.005));
    }
    out.push_back(at_most("weyl", "ball_weyl_invariant", SpectralDomain::ball(2, 1.0).check_w_invariance(Form(3), 2000, seed) ? 0 : 1, 0));
    return out;
}

std::vector<Check> sl2_suite(std::uint64_t, int threads) {
    std::vector<Check> out;
    long mismatches = 0;
    for (long tr = 3; tr <= 12; ++tr)
        if (static_cast<long>(sl2z_class_representatives(tr).size()) != sl2z_class_count_bruteforce(tr, 30)) ++mismatches;
    out.push_back(at_most("sl2", "class_counts_vs_bruteforce", static_cast<double>(mismatches), 0));
    const long min_trace = min_hyperbolic_trace_bruteforce(3, 50);
    out.push_back(at_most("sl2", "gamma3_shortest_length_gap",
                          std::abs(2 * std::acosh(min_trace / 2.0) - trace_congruence_bound(3)), 1e-12));
    double invalid = 0;
    for (int N : {3, 4, 5}) {
        try {
            load_scattering_data(default_constants_path(), N).validate(group_data(N).cusps);
        } catch (const std::exception&) {
            invalid += 1;
        }
    }
    out.push_back(at_most("sl2", "shipped_constants_valid", invalid, 0));
    const SlopeReport logb = verify_scattering_log_bound(load_scattering_data(default_constants_path(), 3), 1000.0, 120);
    out.push_back(at_most("sl2", "scattering_log_bound_n3", logb.slope, logb.threshold));

    const SelbergTraceFormula tf(TestFunction::autocorrelation(1, 3.8, 1025), group_data(3), length_spectrum(3, 3.8),
                                 load_scattering_data(default_constants_path(), 3));
    const std::vector<double> ts = uniform_grid(200.0, 1.0);
    const auto rows = parallel_map<std::pair<double, double>>(ts.size(), threads, [&](std::size_t i) {
        const auto e = tf.evaluate(ts[i]);
        return std::pair{e.total / e.scale(), std::abs(tf.evaluate(-ts[i]).total - e.total)};
    });
    double worst = 1e300, odd = 0;
    for (const auto& [rel, diff] : rows) {
        worst = std::min(worst, rel);
        odd = std::max(odd, diff);
    }
    out.push_back(at_most("sl2", "gamma3_positivity_deficit", -worst, 1e-6));
    out.push_back(at_most("sl2", "gamma3_evenness", odd, 1e-9));
    return out;
}

std::vector<Check> morse_suite(std::uint64_t seed, int threads) {
    std::vector<Check> out;
    double residual = 0, fd = 0, invariance = 0, min_sv = 1e300;
    std::mt19937_64 rng(seed);
    for (auto blocks : std::vector<std::vector<int>>{{2, 1}, {1, 2}}) {
        const PhaseConfiguration cfg(Form(3), blocks);
        for (const auto& w : WeylElement::enumerate(3)) {
            residual = std::max(residual, critical_residual(cfg, w, random_levi_rotation(cfg, rng)) / cfg.xi_norm());
            const HessianPairing h = hessian_pairing(cfg, w);
            fd = std::max(fd, h.relative_error);
            min_sv = std::min(min_sv, h.min_singular_value);
        }
        for (int i = 0; i < 20; ++i)
            invariance = std::max(invariance, invariance_defect(cfg, random_rotation(3, rng), random_unipotent(cfg, rng),
                                                                random_levi_rotation(cfg, rng)));
    }
    out.push_back(at_most("morse", "critical_residual_over_xi_norm", residual, 1e-8));
    out.push_back(at_most("morse", "hessian_fd_relative_error", fd, 1e-6));
    out.push_back({"morse", "hessian_min_singular_value", min_sv, 0.0, min_sv > 0});
    out.push_back(at_most("morse", "k_l_invariance", invariance, 1e-10));

    const std::vector<double> deltas = logspace(1e-4, 1e-2, 5);
    const std::vector<std::pair<MorseCase, std::string>> jobs = {
        {MorseCase::slab, "volume"},   {MorseCase::slab, "reciprocal"},   {MorseCase::saddle, "volume"},
        {MorseCase::saddle, "reciprocal"}, {MorseCase::higher, "volume"}, {MorseCase::higher, "reciprocal"}};
    const auto reps = parallel_map<MorseFitReport>(jobs.size(), threads, [&](std::size_t i) {
        McSpec mc;
        mc.seed = stream_seed(seed, i);
        return morse_experiment(jobs[i].first, jobs[i].second, deltas, mc);
    });
    for (const auto& r : reps)
        out.push_back({"morse", r.case_name + "_" + r.quantity + "_fit", r.fit, r.window_hi > 1e299 ? r.window_lo : r.window_hi, r.pass});
    return out;
}

}  // namespace

int run_verify(const VerifyOptions& o, const RunConfig& cfg) {
    const std::vector<std::pair<std::string, Suite>> suites = {
        {"plancherel", plancherel_suite}, {"spherical", spherical_suite}, {"testfn", testfn_suite},
        {"weyl", weyl_suite},             {"sl2", sl2_suite},             {"morse", morse_suite}};
    bool known = o.suite == "all";
    for (const auto& s : suites) known = known || s.first == o.suite;
    if (!known) throw UsageError("unknown suite: " + o.suite);

    std::vector<Check> checks;
    for (const auto& [name, suite] : suites) {
        if (o.suite != "all" && o.suite != name) continue;
        for (auto& c : suite(cfg.seed, cfg.threads)) {
            std::cout << (c.pass ? "PASS " : "FAIL ") << c.suite << "/" << c.name << " value=" << format_double(c.value)
                      << " threshold=" << format_double(c.threshold) << "\n";
            checks.push_back(std::move(c));
        }
    }
    long failed = 0;
    for (const auto& c : checks) failed += c.pass ? 0 : 1;
    std::cout << (failed ? "FAIL" : "PASS") << " " << checks.size() - static_cast<std::size_t>(failed) << "/" << checks.size()
              << " checks passed\n";
    std::cout.flush();
    if (!cfg.out.empty()) {
        Report report;
        report.command = "verify";
        report.parameters = {{"suite", o.suite}};
        Table t{"verify", {"suite", "check", "value", "threshold", "pass"}, {}};
        for (const auto& c : checks) t.add({c.suite, c.name, c.value, c.threshold, c.pass});
        report.tables.push_back(t);
        report.summary = {{"checks", checks.size()}, {"failed", failed}};
        emit(report, cfg);
    }
    return failed ? kExitVerifyFailed : kExitOk;
}

}  // namespace weyl_lab::cli
