#pragma once

// Subcommands of the weyl-lab tool. Each returns a process exit code and
// throws UsageError, SupportViolation or a numeric exception on failure.

#include <string>

#include "cli_support.hpp"

namespace weyl_lab::cli {

struct PlancherelOptions {
    int n = 2;
    double u_max = 50;
    double step = 0.5;
    bool sweep = false;      // growth-bound reports instead of the ray table
    long sweep_samples = 20000;
    double sweep_norm_max = 1e4;
};

struct MainTermOptionsCli {
    int n = 2;
    std::string domain = "ball";
    std::string t_list;
    std::string volume;  // optional
    bool symmetrize = false;
    double rel_tol = 1e-6;
};

struct SphericalOptions {
    int n = 2;
    std::string lambda;   // imaginary parts, comma separated
    std::string cartan;   // g = exp(H)
    int random = 0;       // > 0: random (lambda, g) pairs instead
    double lambda_radius = 5;
    double g_radius = 1;
    long samples = 100000;
    std::string method = "mc";
};

struct TestfnOptions {
    int n = 2;
    double support = 3.8;
    int grid = 0;  // 0: default for the rank
    double xi_max = 20;
    double step = 0.5;
    bool with_m = false;
    std::string save;  // optional JSON dump of the test function
};

struct Sl2Options {
    int level = 3;
    double h_radius = 3.8;
    double t_max = -1;
    double t_step = 0.25;
    double lambda_max = -1;
    int grid = 1025;
    std::string cache;
};

struct MorseOptions {
    std::string morse_case = "all";
    std::string quantity = "both";
    long samples = 4000000;
    int deltas = 5;
    int p = 2;
    int q = 1;
    bool critical = false;
    int n = 3;
    std::string blocks = "2,1";
};

struct VerifyOptions {
    std::string suite = "all";
};

int run_plancherel(const PlancherelOptions& o, const RunConfig& cfg);
int run_main_term(const MainTermOptionsCli& o, const RunConfig& cfg);
int run_spherical(const SphericalOptions& o, const RunConfig& cfg);
int run_testfn(const TestfnOptions& o, const RunConfig& cfg);
int run_sl2(const Sl2Options& o, const RunConfig& cfg);
int run_morse(const MorseOptions& o, const RunConfig& cfg);
int run_verify(const VerifyOptions& o, const RunConfig& cfg);

}  // namespace weyl_lab::cli
