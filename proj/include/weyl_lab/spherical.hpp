#pragma once

// Iwasawa projection, Haar sampling on SO(n) and Harish-Chandra spherical
// functions phi_lambda(g) = int_K exp<lambda + rho, H(kg)> dk, plus the
// Kostant convexity check for diagonals of conjugated Cartan elements.

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "weyl_lab/rootsys.hpp"

namespace weyl_lab {

// Real n x n matrix with |det| = 1.
class GroupPoint {
public:
    explicit GroupPoint(Eigen::MatrixXd m);
    // Rescales an invertible matrix to |det| = 1.
    static GroupPoint normalized(const Eigen::MatrixXd& m);
    // exp(X) for X in a.
    static GroupPoint from_cartan(const CartanVector& x);

    int n() const noexcept { return static_cast<int>(m_.rows()); }
    const Eigen::MatrixXd& matrix() const noexcept { return m_; }

private:
    Eigen::MatrixXd m_;
};

enum class QuadratureMethod { monte_carlo, product_angles };

struct QuadratureSpec {
    QuadratureMethod method = QuadratureMethod::monte_carlo;
    long sample_count = 100000;
    std::uint64_t seed = 1;

    void validate() const;
};

// H(g) with g = exp(H) n k, n upper triangular unipotent, k orthogonal. Works
// for any invertible g; the result is projected to trace zero.
CartanVector iwasawa_H(const Eigen::MatrixXd& g);
inline CartanVector iwasawa_H(const GroupPoint& g) { return iwasawa_H(g.matrix()); }

// Counter-based stream of Haar-distributed rotations: sample(i) depends only on
// (seed, i), so a stream can be split across workers without changing results.
class HaarStream {
public:
    HaarStream(int n, std::uint64_t seed) : n_(n), seed_(seed) {}
    Eigen::MatrixXd sample(std::uint64_t index) const;
    int n() const noexcept { return n_; }

private:
    int n_;
    std::uint64_t seed_;
};

std::vector<Eigen::MatrixXd> haar_so_n(int n, const QuadratureSpec& spec);

struct SphericalEstimate {
    cdouble value;
    double std_error = 0;  // Monte Carlo standard error, or quadrature error estimate
    long samples = 0;
};

SphericalEstimate spherical_phi(const SpectralPoint& lambda, const GroupPoint& g, const QuadratureSpec& spec);

// phi_{lambda1}(g) - phi_{lambda2}(g) estimated on one shared k-stream, so its
// standard error reflects the paired differences.
SphericalEstimate spherical_phi_difference(const SpectralPoint& lambda1, const SpectralPoint& lambda2,
                                           const GroupPoint& g, const QuadratureSpec& spec);

// diag(k^T diag(xi) k).
std::vector<double> kostant_projection(const CartanVector& xi, const Eigen::MatrixXd& k);

// Amount by which x fails to lie in conv(W xi), measured through majorization:
// max over partial sums of the sorted vectors (0 when inside).
double hull_violation(const std::vector<double>& x, const std::vector<double>& xi);

struct KostantReport {
    long samples = 0;
    double max_violation = 0;
    bool pass = false;
};

KostantReport kostant_check(const CartanVector& xi, const QuadratureSpec& spec);

}  // namespace weyl_lab
