#pragma once

// Type A_{n-1} root data for GL(n): the Cartan space a (trace-zero diagonal
// matrices), its complexified dual, the Weyl group S_n and the lattice of
// semi-standard Levi subgroups (set partitions of {0..n-1}).

#include <complex>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace weyl_lab {

using cdouble = std::complex<double>;

enum class FormKind { killing, trace };

FormKind parse_form(const std::string& name);
std::string to_string(FormKind kind);

// Quadratic form on a. killing: <X,Y> = 2n sum x_i y_i, trace: sum x_i y_i.
// The dual form on a* is the inverse, so ||lambda||^2 = sum |lambda_i|^2 / scale.
class Form {
public:
    Form(int n, FormKind kind = FormKind::killing);

    int n() const noexcept { return n_; }
    int rank() const noexcept { return n_ - 1; }
    FormKind kind() const noexcept { return kind_; }
    double scale() const noexcept { return scale_; }

    double inner(std::span<const double> x, std::span<const double> y) const;
    double norm(std::span<const double> x) const;
    double dual_inner(std::span<const double> x, std::span<const double> y) const;
    double dual_norm(std::span<const double> x) const;
    double dual_norm(std::span<const cdouble> x) const;

    // Orthonormal (standard Euclidean) basis of the trace-zero hyperplane,
    // n x (n-1). Chart coordinates y of a vector v are B^T v.
    const Eigen::MatrixXd& chart() const noexcept { return chart_; }

    // Jacobians of the chart: dX = volume_factor() dy on a, and the dual Haar
    // measure on i a* is dual_volume_factor() dy (includes (2 pi)^{-r}).
    double volume_factor() const;
    double dual_volume_factor() const;

private:
    int n_;
    FormKind kind_;
    double scale_;
    Eigen::MatrixXd chart_;
};

class CartanVector {
public:
    CartanVector() = default;
    explicit CartanVector(std::vector<double> coords);

    int n() const noexcept { return static_cast<int>(coords_.size()); }
    const std::vector<double>& coords() const noexcept { return coords_; }
    double operator[](int i) const { return coords_[static_cast<std::size_t>(i)]; }

    double pairing(const CartanVector& other) const;

    static CartanVector from_chart(const Form& form, const Eigen::VectorXd& y);
    Eigen::VectorXd to_chart(const Form& form) const;

private:
    std::vector<double> coords_;
};

class SpectralPoint {
public:
    SpectralPoint() = default;
    explicit SpectralPoint(std::vector<cdouble> coords);

    // i * x for a real dual vector x.
    static SpectralPoint imaginary(std::span<const double> x);
    static SpectralPoint real(std::span<const double> x);
    static SpectralPoint from_chart(const Form& form, const Eigen::VectorXd& re,
                                    const Eigen::VectorXd& im);

    int n() const noexcept { return static_cast<int>(coords_.size()); }
    const std::vector<cdouble>& coords() const noexcept { return coords_; }
    cdouble operator[](int i) const { return coords_[static_cast<std::size_t>(i)]; }

    std::vector<double> real_part() const;
    std::vector<double> imag_part() const;
    bool is_imaginary(double tol = 1e-12) const;

    // sum_i lambda_i x_i
    cdouble pairing(const CartanVector& x) const;

    SpectralPoint operator+(const SpectralPoint& o) const;
    SpectralPoint operator-(const SpectralPoint& o) const;
    SpectralPoint operator*(cdouble s) const;
    SpectralPoint operator-() const;

private:
    std::vector<cdouble> coords_;
};

// A permutation w of {0..n-1}; acts on coordinates by (w.v)_{w(i)} = v_i.
class WeylElement {
public:
    explicit WeylElement(std::vector<int> perm);
    static WeylElement identity(int n);
    static WeylElement random(int n, std::mt19937_64& rng);
    static std::vector<WeylElement> enumerate(int n);

    int n() const noexcept { return static_cast<int>(perm_.size()); }
    const std::vector<int>& perm() const noexcept { return perm_; }
    int operator()(int i) const { return perm_[static_cast<std::size_t>(i)]; }

    WeylElement operator*(const WeylElement& o) const;  // (this o o)(i)
    WeylElement inverse() const;
    bool operator==(const WeylElement& o) const = default;

    std::vector<std::vector<int>> cycles() const;
    Eigen::MatrixXd matrix() const;  // permutation matrix P with P e_i = e_{w(i)}
    int sign() const;

    template <class T>
    std::vector<T> act(const std::vector<T>& v) const {
        std::vector<T> out(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) out[static_cast<std::size_t>(perm_[i])] = v[i];
        return out;
    }
    CartanVector act(const CartanVector& v) const { return CartanVector(act(v.coords())); }
    SpectralPoint act(const SpectralPoint& v) const { return SpectralPoint(act(v.coords())); }

private:
    std::vector<int> perm_;
};

// Set partition of {0..n-1}; blocks sorted internally and ordered by least element.
class LeviSubgroup {
public:
    explicit LeviSubgroup(std::vector<std::vector<int>> blocks);
    static LeviSubgroup minimal(int n);  // M_0, all singletons
    static LeviSubgroup full(int n);     // G
    // Standard Levi of a composition, e.g. (2,1) -> {0,1}|{2}.
    static LeviSubgroup standard(const std::vector<int>& sizes);

    int n() const noexcept { return n_; }
    const std::vector<std::vector<int>>& blocks() const noexcept { return blocks_; }
    bool is_full() const noexcept { return blocks_.size() == 1; }
    bool is_minimal() const noexcept { return static_cast<int>(blocks_.size()) == n_; }
    int block_of(int i) const;

    // this <= other in the refinement order (every block of this inside a block of other).
    bool refines(const LeviSubgroup& other) const;
    LeviSubgroup meet(const LeviSubgroup& other) const;
    LeviSubgroup join(const LeviSubgroup& other) const;

    bool operator==(const LeviSubgroup& o) const { return blocks_ == o.blocks_; }
    std::string to_string() const;

private:
    int n_ = 0;
    std::vector<std::vector<int>> blocks_;
};

CartanVector rho(int n);

struct Dimensions {
    int d;  // dimension of SL(n,R)/SO(n)
    int r;  // dim a
};
Dimensions dims(int n);

struct LeviDecomposition {
    SpectralPoint along_center;   // lambda_M, constant on blocks
    SpectralPoint along_levi;     // lambda^M, zero sum on each block
};
LeviDecomposition levi_decompose(const SpectralPoint& lambda, const LeviSubgroup& levi);

LeviSubgroup fixed_levi(const WeylElement& w);

constexpr int kMaxLeviRank = 8;
std::vector<LeviSubgroup> enumerate_levis(int n);
std::vector<LeviSubgroup> maximal_levis(int n);

std::uint64_t factorial(int n);

}  // namespace weyl_lab
