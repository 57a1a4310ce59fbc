#include <exception>
#include <iostream>
#include <stdexcept>

#include "CLI11.hpp"
#include "commands.hpp"

using namespace weyl_lab::cli;

int main(int argc, char** argv) {
    CLI::App app{"weyl-lab: Plancherel densities, spherical functions, test functions, Weyl-law main terms, "
                 "the SL(2) trace formula and Morse sublevel estimates"};
    app.require_subcommand(1);
    RunConfig cfg;
    app.add_option("--seed", cfg.seed, "base seed of every random stream")->capture_default_str();
    app.add_option("--threads", cfg.threads, "worker threads (results do not depend on it)")
        ->check(CLI::Range(1, 256))
        ->capture_default_str();
    app.add_option("--form", cfg.form, "quadratic form on a")
        ->check(CLI::IsMember({"killing", "trace"}))
        ->capture_default_str();
    app.add_option("--format", cfg.format, "output format")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
    app.add_option("--out", cfg.out, "output file (written atomically); standard output if omitted");
    app.add_option("--constants", cfg.constants, "scattering constants file (default: shipped file)");

    PlancherelOptions pl;
    auto* plc = app.add_subcommand("plancherel", "beta and beta~ along the ray i u (e_1 - e_n), or growth-bound sweeps");
    plc->add_option("--n", pl.n, "rank + 1")->capture_default_str();
    plc->add_option("--u-max", pl.u_max, "largest u")->capture_default_str();
    plc->add_option("--step", pl.step, "u step")->capture_default_str();
    plc->add_flag("--sweep", pl.sweep, "run the growth-bound sweeps on random spheres");
    plc->add_option("--sweep-samples", pl.sweep_samples)->capture_default_str();
    plc->add_option("--sweep-norm-max", pl.sweep_norm_max)->capture_default_str();

    MainTermOptionsCli mt;
    auto* mtc = app.add_subcommand("main-term", "(1/|W|) int over t Omega of beta");
    mtc->add_option("--n", mt.n)->capture_default_str();
    mtc->add_option("--domain", mt.domain, "ball or box (unit size)")->capture_default_str();
    mtc->add_option("--t", mt.t_list, "comma-separated dilations")->required();
    mtc->add_option("--volume", mt.volume, "volume of the locally symmetric space, e.g. 4pi");
    mtc->add_flag("--symmetrize", mt.symmetrize, "average beta over W");
    mtc->add_option("--rel-tol", mt.rel_tol)->capture_default_str();

    SphericalOptions sp;
    auto* spc = app.add_subcommand("spherical", "Harish-Chandra spherical function phi_lambda(exp H)");
    spc->add_option("--n", sp.n)->capture_default_str();
    spc->add_option("--lambda", sp.lambda, "imaginary parts of lambda, n entries summing to 0");
    spc->add_option("--cartan", sp.cartan, "H, n entries summing to 0");
    spc->add_option("--random", sp.random, "number of random (lambda, g) pairs")->capture_default_str();
    spc->add_option("--lambda-radius", sp.lambda_radius)->capture_default_str();
    spc->add_option("--g-radius", sp.g_radius)->capture_default_str();
    spc->add_option("--samples", sp.samples)->capture_default_str();
    spc->add_option("--method", sp.method, "mc or product")->capture_default_str();

    TestfnOptions tf;
    auto* tfc = app.add_subcommand("testfn", "autocorrelation test function h and its transform");
    tfc->add_option("--n", tf.n)->capture_default_str();
    tfc->add_option("--support", tf.support, "support radius of h")->capture_default_str();
    tfc->add_option("--grid", tf.grid, "grid points per axis (0: default)")->capture_default_str();
    tfc->add_option("--xi-max", tf.xi_max)->capture_default_str();
    tfc->add_option("--step", tf.step)->capture_default_str();
    tfc->add_flag("--with-m", tf.with_m, "add the M functional column");
    tfc->add_option("--save", tf.save, "write the test function as JSON");

    Sl2Options sl;
    auto* slc = app.add_subcommand("sl2", "geometric side of the trace formula for Gamma(N)");
    slc->add_option("--level", sl.level, "N >= 3")->capture_default_str();
    slc->add_option("--h-radius", sl.h_radius, "support radius of h")->capture_default_str();
    slc->add_option("--t-max", sl.t_max, "per-t term table on [0, t-max]");
    slc->add_option("--t-step", sl.t_step)->capture_default_str();
    slc->add_option("--lambda-max", sl.lambda_max, "smoothed count at lambda-max / 8, / 4, / 2, lambda-max");
    slc->add_option("--grid", sl.grid)->capture_default_str();
    slc->add_option("--cache", sl.cache, "length-spectrum cache directory (default: $WEYL_LAB_CACHE)");

    MorseOptions mo;
    auto* moc = app.add_subcommand("morse", "Morse sublevel experiments, or critical points of the phase");
    moc->add_option("--case", mo.morse_case, "slab, saddle, higher or all")->capture_default_str();
    moc->add_option("--quantity", mo.quantity, "volume, reciprocal or both")->capture_default_str();
    moc->add_option("--samples", mo.samples)->capture_default_str();
    moc->add_option("--deltas", mo.deltas, "number of log-spaced delta values in [1e-4, 1e-2]")->capture_default_str();
    moc->add_option("--p", mo.p)->capture_default_str();
    moc->add_option("--q", mo.q)->capture_default_str();
    moc->add_flag("--critical", mo.critical, "critical residuals and Hessian pairings instead");
    moc->add_option("--n", mo.n)->capture_default_str();
    moc->add_option("--blocks", mo.blocks, "composition of n defining Q")->capture_default_str();

    VerifyOptions vo;
    auto* voc = app.add_subcommand("verify", "run invariant suites and print PASS/FAIL per check");
    voc->add_option("--suite", vo.suite, "all, plancherel, spherical, testfn, weyl, sl2 or morse")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (*plc) return run_plancherel(pl, cfg);
        if (*mtc) return run_main_term(mt, cfg);
        if (*spc) return run_spherical(sp, cfg);
        if (*tfc) return run_testfn(tf, cfg);
        if (*slc) return run_sl2(sl, cfg);
        if (*moc) return run_morse(mo, cfg);
        if (*voc) return run_verify(vo, cfg);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const SupportViolation& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitSupport;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return kExitNumeric;
    }
    return kExitUsage;
}
