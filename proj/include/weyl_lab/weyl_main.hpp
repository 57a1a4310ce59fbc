#pragma once

// Weyl-law main terms: integrals of the Plancherel density over dilated spectral
// domains, the Weyl constant, the shell-decomposition error experiment and
// boundary-shell volumes. Domains live in i a* and are described in isometric
// coordinates xi (lambda = i xi in the orthonormal chart scaled by the form, so
// ||lambda|| = |xi|).

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "weyl_lab/plancherel.hpp"
#include "weyl_lab/testfn.hpp"

namespace weyl_lab {

enum class DomainKind { ball, box, halfspaces };

class SpectralDomain {
public:
    static SpectralDomain ball(int rank, double radius);
    static SpectralDomain box(std::vector<double> half_widths);
    // {xi : normals[j] . xi <= offsets[j]}; must be bounded with the origin inside.
    static SpectralDomain halfspaces(std::vector<std::vector<double>> normals, std::vector<double> offsets,
                                     bool w_invariant = false);

    DomainKind kind() const noexcept { return kind_; }
    int rank() const noexcept { return rank_; }
    bool w_invariant() const noexcept { return w_invariant_; }
    std::string name() const;

    bool contains(const std::vector<double>& xi, double t = 1.0) const;
    // Distance from the origin to the boundary along the unit direction dir.
    double radial_extent(const std::vector<double>& dir) const;
    double bounding_radius() const;
    // Distance from xi to the boundary of t * Omega (rank <= 2).
    double boundary_distance(const std::vector<double>& xi, double t) const;
    // Polar angles of the corners (rank 2 polygons); empty for the ball.
    std::vector<double> corner_angles() const;

    // Checks on random samples that membership is unchanged under W (acting through the form).
    bool check_w_invariance(const Form& form, int samples, std::uint64_t seed) const;

private:
    DomainKind kind_ = DomainKind::ball;
    int rank_ = 1;
    bool w_invariant_ = false;
    double radius_ = 0;
    std::vector<double> half_widths_;
    std::vector<std::vector<double>> normals_;
    std::vector<double> offsets_;
};

struct MainTermOptions {
    double rel_tol = 1e-5;
    bool symmetrize = false;  // replace beta by its average over W
    int max_levels = 9;
};

struct MainTermResult {
    double value = 0;
    double error_estimate = 0;  // difference between the last two refinement levels
    int levels = 0;
};

// (1/|W|) int_{t Omega} beta(lambda) d lambda for rank 1 and 2 (n = 2, 3).
// Throws std::runtime_error if self-refinement does not reach rel_tol.
MainTermResult main_term(const SpectralDomain& omega, double t, const Form& form, const MainTermOptions& opt = {});

// vol / ((4 pi)^{d/2} Gamma(d/2 + 1)).
double weyl_constant(int n, double volume);

struct ShellReport {
    std::vector<double> t;
    std::vector<double> error;   // E(t)
    std::vector<double> main;    // (1/|W|) int_{t Omega} beta
    double slope = 0;
    double intercept = 0;
    double threshold = 0;        // d - 1 + 0.1
    bool pass = false;
    // Power-law fit only: a (log t)^k factor on top of t^{d-1} is not resolved.
    bool log_factor_resolved = false;
};

// E(t) = (1/|W|) int beta(lambda) [ (1_{t Omega} * hhat)(lambda) - 1_{t Omega}(lambda) ] d lambda,
// with hhat normalized by h(0) = 1 so that hhat has unit mass. Balls in rank 1 and 2,
// boxes in rank 1.
double shell_error(const SpectralDomain& omega, const TestFunction& h, double t);
ShellReport shell_error_experiment(const SpectralDomain& omega, const TestFunction& h, const std::vector<double>& t_list);

struct VolumeEstimate {
    double value = 0;
    double std_error = 0;
    long samples = 0;
};

// Monte Carlo volume of {nu : dist(nu, t dOmega) <= kappa} (rank 1 and 2).
VolumeEstimate boundary_shell_volume(const SpectralDomain& omega, double t, double kappa, long samples = 200000,
                                     std::uint64_t seed = 1);

nlohmann::json to_json(const ShellReport& r);

}  // namespace weyl_lab
