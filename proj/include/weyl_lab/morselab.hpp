#pragma once

// The phase F(k, x) = <xi, H(kx)> on K x N_Q, its critical points (w, 1),
// the Hessian pairing there, and Monte Carlo estimates of sublevel volumes
// vol{|f| < delta} and of int_{|f| >= delta} 1/|f| for Morse model functions.

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"
#include "weyl_lab/rootsys.hpp"

namespace weyl_lab {

// Parabolic Q given by a composition of n, with a regular xi in a.
// The chart at a point (k, x) is (theta, y) -> (k exp(sum theta_a X_a), x exp(sum y_a Y_a))
// with Y_a = E_ij / sqrt(c) and X_a = (E_ij - E_ji) / sqrt(2c) for the pairs
// i < j in different blocks; these are orthonormal for c tr(A^T B) and
// orthogonal to k_L, the Lie algebra of K_L = K cap L.
class PhaseConfiguration {
public:
    PhaseConfiguration(const Form& form, std::vector<int> blocks, CartanVector xi);
    // xi proportional to ((n-1)/2, (n-3)/2, ..., -(n-1)/2), of norm 1 for the form.
    PhaseConfiguration(const Form& form, std::vector<int> blocks);

    static CartanVector default_xi(const Form& form);

    const Form& form() const noexcept { return form_; }
    int n() const noexcept { return form_.n(); }
    const std::vector<int>& blocks() const noexcept { return blocks_; }
    const LeviSubgroup& levi() const noexcept { return levi_; }
    const CartanVector& xi() const noexcept { return xi_; }
    double xi_norm() const;

    int dimension() const noexcept { return static_cast<int>(pairs_.size()); }  // dim n_Q
    const std::vector<std::pair<int, int>>& root_pairs() const noexcept { return pairs_; }
    const std::vector<Eigen::MatrixXd>& k_directions() const noexcept { return kdirs_; }
    const std::vector<Eigen::MatrixXd>& n_directions() const noexcept { return ndirs_; }

    // Largest deviation of the chart Gram matrices from the identity, including
    // the inner products of the k-directions with a basis of k_L.
    double chart_residual() const;

    // Upper block-triangular unipotent for the blocks of Q.
    bool in_unipotent_radical(const Eigen::MatrixXd& x, double tol = 1e-12) const;

    // F at (k exp(sum theta X), x exp(sum y Y)).
    double chart_value(const Eigen::MatrixXd& k, const Eigen::MatrixXd& x, const std::vector<double>& theta,
                       const std::vector<double>& y) const;

private:
    Form form_;
    std::vector<int> blocks_;
    LeviSubgroup levi_;
    CartanVector xi_;
    std::vector<std::pair<int, int>> pairs_;
    std::vector<Eigen::MatrixXd> kdirs_;
    std::vector<Eigen::MatrixXd> ndirs_;
};

// <xi, H(k x)> for the configured form. Throws std::invalid_argument if x is not in N_Q.
double phase_value(const PhaseConfiguration& cfg, const Eigen::MatrixXd& k, const Eigen::MatrixXd& x);

// Chart gradient at (k, x) by Richardson-refined central differences (step 1e-5),
// theta components first.
Eigen::VectorXd phase_gradient(const PhaseConfiguration& cfg, const Eigen::MatrixXd& k, const Eigen::MatrixXd& x);

// Norm of the chart gradient at (w m, 1) for m in K_L (identity by default).
double critical_residual(const PhaseConfiguration& cfg, const WeylElement& w);
double critical_residual(const PhaseConfiguration& cfg, const WeylElement& w, const Eigen::MatrixXd& m);

// Permutation matrix of w with one column negated if needed so that det = 1.
Eigen::MatrixXd weyl_rotation(const WeylElement& w);

// Haar-random element of K_L (block-diagonal, det 1) and of K = SO(n).
Eigen::MatrixXd random_levi_rotation(const PhaseConfiguration& cfg, std::mt19937_64& rng);
Eigen::MatrixXd random_rotation(int n, std::mt19937_64& rng);
// Unipotent element of N_Q with standard normal entries above the blocks.
Eigen::MatrixXd random_unipotent(const PhaseConfiguration& cfg, std::mt19937_64& rng);

// |F(k m^{-1}, m x m^{-1}) - F(k, x)|.
double invariance_defect(const PhaseConfiguration& cfg, const Eigen::MatrixXd& k, const Eigen::MatrixXd& x,
                         const Eigen::MatrixXd& m);

struct HessianPairing {
    Eigen::MatrixXd closed_form;        // P_ab = c tr(X_a^T [Ad(w)^{-1} xi, Y_b])
    Eigen::MatrixXd finite_difference;  // mixed second derivatives d^2 F / d theta_a d y_b
    Eigen::VectorXd singular_values;    // of closed_form, descending
    double relative_error = 0;          // max |closed - fd| / max |closed|
    double min_singular_value = 0;
    double root_bound = 0;              // min over roots in n_Q of |<Ad(w)^{-1} xi, alpha>| / sqrt 2
};

// Mixed Hessian at (w, 1); the finite-difference block uses step 1e-3 with one Richardson step.
HessianPairing hessian_pairing(const PhaseConfiguration& cfg, const WeylElement& w);

// ---------------------------------------------------------------- sublevel sets

struct Box {
    std::vector<double> lo;
    std::vector<double> hi;

    int dim() const noexcept { return static_cast<int>(lo.size()); }
    double volume() const;
};

struct MorseModel {
    std::string id;
    int dim = 0;
    std::function<double(const std::vector<double>&)> f;
};

MorseModel slab_model(int dim);          // f = x_1
MorseModel quadratic_model(int p, int q);  // x_1^2 + ... + x_p^2 - x_{p+1}^2 - ... - x_{p+q}^2
// F in chart coordinates (theta, y) around (w, 1).
MorseModel phase_model(const PhaseConfiguration& cfg, const WeylElement& w);

// Stratified Monte Carlo: the box is cut into cells; a pilot stage (corners
// plus pilot points) flags the cells where f comes close to 0 and sets a
// Neyman allocation of the main budget; the estimate uses only main-stage
// samples, at least min_per_cell per cell, so it is unbiased for any allocation.
struct McSpec {
    long samples = 4000000;  // the fit experiments need ~4e6 per delta for a fit spread below 0.01
    std::uint64_t seed = 1;
    int cells_per_axis = 0;  // 0: about 4096 cells in total
    int pilot_per_cell = 8;
    int min_per_cell = 4;

    void validate() const;
};

struct McEstimate {
    double value = 0;
    double std_error = 0;
    long samples = 0;
};

// vol{x in region : |f(x)| < delta}, delta in (0, 1/2).
McEstimate sublevel_volume(const MorseModel& f, double delta, const Box& region, const McSpec& mc);
// int over {x in region : |f(x)| >= delta} of 1/|f|, delta in (0, 1/2).
McEstimate reciprocal_integral(const MorseModel& f, double delta, const Box& region, const McSpec& mc);

enum class MorseCase { slab, saddle, higher };  // linear; p = q = 1; p + q >= 3

struct MorseFitReport {
    std::string case_name;
    std::string quantity;  // "volume" or "reciprocal"
    std::vector<double> deltas;
    std::vector<McEstimate> estimates;
    std::vector<double> reference;  // exact values where known (slab), else empty
    double fit = 0;
    double window_lo = 0;
    double window_hi = 0;
    bool pass = false;
};

// Runs the volume or reciprocal experiment for a model case on its default
// region: slab on [-1,1] x [-1/2,1/2]^{d-1} (unit cross-section), quadratic
// forms on [-1,1]^{p+q}. Fits and windows:
//   slab:   every estimate within 3 standard errors of 2 delta, resp. 2 log(1/delta)
//   saddle: volume, coefficient of log delta in log vol ~ a log delta + b log(-log delta) + c, in [0.9, 1.0];
//           reciprocal, slope of log value against log(-log delta), in [1.9, 2.1]
//   higher: volume, slope of log vol against log delta, >= 0.98;
//           reciprocal, slope of log value against log(-log delta), in [0.9, 1.1]
MorseFitReport morse_experiment(MorseCase kind, const std::string& quantity, const std::vector<double>& deltas,
                                const McSpec& mc, int p = 2, int q = 1);

nlohmann::json to_json(const McEstimate& e);
nlohmann::json to_json(const MorseFitReport& r);

}  // namespace weyl_lab
