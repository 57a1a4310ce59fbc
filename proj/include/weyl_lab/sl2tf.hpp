#pragma once

// Numerical evaluation of the Selberg trace formula for the principal
// congruence subgroups Gamma(N) of SL(2, Z), N >= 3: group invariants, the
// hyperbolic length spectrum, Dirichlet L-functions, the scattering
// determinant and every term of the geometric side for a test function
// h with transform hhat(z) = int h(x) e^{ixz} dx.

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "weyl_lab/numerics.hpp"
#include "weyl_lab/report.hpp"
#include "weyl_lab/rootsys.hpp"
#include "weyl_lab/testfn.hpp"

namespace weyl_lab {

struct CongruenceGroup {
    int level = 0;
    long sl2_index = 0;   // [SL(2,Z) : Gamma(N)]
    long psl2_index = 0;  // index in PSL(2,Z); -I is not in Gamma(N)
    double area = 0;      // hyperbolic area of Gamma(N)\H
    int cusps = 0;
};

CongruenceGroup group_data(int N);

// 2 arccosh((N^2 - 2)/2): no hyperbolic element of Gamma(N) is shorter.
double trace_congruence_bound(int N);

// Integer 2x2 matrix [[a, b], [c, d]] stored as {a, b, c, d}.
using IntMatrix = std::array<long long, 4>;

IntMatrix multiply(const IntMatrix& x, const IntMatrix& y);
bool congruent_to_identity(const IntMatrix& g, int N);

struct LengthEntry {
    long trace = 0;
    double length = 0;            // 2 arccosh(|trace|/2)
    double primitive_length = 0;  // length of the primitive element in Gamma(N)
    long class_count = 0;         // number of Gamma(N)-conjugacy classes
};

struct LengthSpectrum {
    int level = 0;
    double validity_radius = 0;  // complete for lengths <= validity_radius
    bool truncated = false;      // validity radius was reduced below the request
    std::vector<LengthEntry> entries;
};

nlohmann::json to_json(const LengthSpectrum& s);
LengthSpectrum length_spectrum_from_json(const nlohmann::json& j);

// Hyperbolic conjugacy classes of Gamma(N) with length <= L (N = 1 gives the
// SL(2,Z) classes, counted once per class modulo sign). Classes are found
// from reduced indefinite binary quadratic forms of discriminant trace^2 - 4.
// Requires 2 cosh(L/2) <= 200.
LengthSpectrum length_spectrum(int N, double L);

// As length_spectrum, reusing a JSON file keyed by (N, L) in cache_dir
// (default: $WEYL_LAB_CACHE, no caching if unset or empty).
LengthSpectrum length_spectrum_cached(int N, double L, const std::string& cache_dir = "");

// SL(2,Z)-conjugacy classes of a given trace, |trace| >= 3, one representative each.
std::vector<IntMatrix> sl2z_class_representatives(long trace);

// Class count of the given trace by union-find over matrices with entries
// bounded by entry_bound, joined by conjugation with S, T and T^{-1}.
long sl2z_class_count_bruteforce(long trace, long entry_bound);

// Smallest |trace| > 2 over matrices of Gamma(N) with entries bounded by entry_bound.
long min_hyperbolic_trace_bruteforce(int N, long entry_bound);

class DirichletCharacter {
public:
    DirichletCharacter(int modulus, std::vector<cdouble> values);

    int modulus() const noexcept { return modulus_; }
    const std::vector<cdouble>& values() const noexcept { return values_; }
    cdouble operator()(long n) const;
    bool principal() const;
    bool real() const;
    DirichletCharacter conj() const;
    bool operator==(const DirichletCharacter& o) const;

private:
    int modulus_;
    std::vector<cdouble> values_;
};

// All phi(q) characters modulo q, built from generators of the prime-power
// factors through the Chinese remainder theorem. Index 0 is principal.
std::vector<DirichletCharacter> dirichlet_characters(int q);

// L(s, chi) = q^{-s} sum_a chi(a) zeta(s, a/q) and its s-derivative
// (derivative_order 0 or 1). Throws std::domain_error at s = 1 for principal chi.
cdouble dirichlet_L(cdouble s, const DirichletCharacter& chi, int derivative_order = 0, int order = 1);

// (s - 1) L(s, chi) for principal chi, L(s, chi) otherwise; entire in s.
cdouble dirichlet_L_regularized(cdouble s, const DirichletCharacter& chi);

// L'/L(s, chi) + 1/(s - 1) for principal chi, L'/L(s, chi) otherwise; finite at s = 1.
cdouble dirichlet_log_derivative_regular(cdouble s, const DirichletCharacter& chi);

struct CharacterFactor {
    DirichletCharacter chi;
    int multiplicity = 1;
};

// Constants of phi(s) = (-1)^l A^{1-2s} (Gamma(1-s)/Gamma(s))^k prod L(2-2s, conj chi)/L(2s, chi),
// plus the trace of the scattering matrix at s = 1/2.
struct ScatteringData {
    int level = 0;
    int k = 0;
    int l = 0;
    std::optional<double> A;
    std::vector<CharacterFactor> characters;
    int trace_half = 0;
    std::string note;

    // phi(s), regularized through the poles of the principal L-factors.
    cdouble determinant(cdouble s) const;

    // Throws std::runtime_error if the constants are inconsistent: characters
    // must be Dirichlet characters closed under conjugation, |phi(1/2)| = 1,
    // phi(1/2) = (-1)^{(m - trace_half)/2}, |phi(1/2 + ir)| = 1 on a test grid.
    void validate(int cusps) const;
};

nlohmann::json to_json(const ScatteringData& d);
ScatteringData scattering_data_from_json(const nlohmann::json& j);

// Reads the constants file (an array of entries or one entry) and returns level N.
ScatteringData load_scattering_data(const std::string& path, int N);

// Path of the constants file shipped with the sources.
std::string default_constants_path();

struct PhaseValue {
    double value = 0;
    bool a_term_omitted = false;
};

// phi'/phi(1/2 + ir) = -2 log A - k [psi(1/2 - ir) + psi(1/2 + ir)]
//                      - 2 sum_chi [L'/L(1 - 2ir, conj chi) + L'/L(1 + 2ir, chi)].
PhaseValue scattering_phase(double r, const ScatteringData& data);

// Running supremum of |phi'/phi(1/2 + ir)| / log(2 + r) on log-spaced r in [1, r_max].
SlopeReport verify_scattering_log_bound(const ScatteringData& data, double r_max, int samples);

struct TraceFormulaEvaluation {
    double t = 0;
    double identity_term = 0;
    double hyperbolic_term = 0;
    double scattering_integral = 0;
    double scattering_half = 0;
    double digamma_integral = 0;
    double m_half_term = 0;
    double log2_term = 0;
    double total = 0;

    double scale() const;  // largest absolute value among the terms
};

struct SmoothedCount {
    double lambda = 0;
    double integral = 0;  // int_{-lambda}^{lambda} total dt / (2 pi h(0))
    double weyl_prediction = 0;
    double residual = 0;
};

struct SmoothedCountReport {
    std::vector<SmoothedCount> rows;
    double exponent = 0;  // log-log slope of |residual| against lambda
    double threshold = 1.15;
    bool pass = false;
};

// Geometric side of the trace formula applied to hhat(t - z) + hhat(t + z).
// The test function is rank one, even, and in the length variable; its
// support must lie inside the validity radius of the length spectrum.
class SelbergTraceFormula {
public:
    // phi'/phi(1/2 + ir) and Re psi(1 + ir) are tabulated for |r| <= table_radius and
    // evaluated directly beyond.
    SelbergTraceFormula(TestFunction h, CongruenceGroup group, LengthSpectrum spectrum, ScatteringData scattering,
                        double table_radius = 450.0);

    TraceFormulaEvaluation evaluate(double t) const;

    // Spectral-side contribution of the constant eigenfunction (eigenvalue 0, r = i/2):
    // hhat(t - i/2) + hhat(t + i/2) = 2 int h(x) cosh(x/2) cos(tx) dx. It is the only
    // term of the spectral side that can be negative when hhat >= 0 on the real line.
    double constant_eigenfunction_term(double t) const;

    // Integral of the geometric side over [-lambda, lambda], exchanging the
    // t-integral with the r-integrals.
    SmoothedCount smoothed_count(double lambda) const;
    SmoothedCountReport smoothed_count_experiment(const std::vector<double>& lambdas) const;

    const CongruenceGroup& group() const noexcept { return group_; }
    double transform_cutoff() const noexcept { return cutoff_; }

private:
    double phase(double r) const;         // phi'/phi(1/2 + ir)
    double digamma_real(double r) const;  // Re psi(1 + ir)
    // int f(r) p(r) dr over [lo, hi] for p = r tanh(pi r), phi'/phi and Re psi(1 + ir).
    std::array<double, 3> weighted_integrals(const std::function<double(double)>& f, double lo, double hi) const;

    TestFunction h_;
    CongruenceGroup group_;
    LengthSpectrum spectrum_;
    ScatteringData scattering_;
    double cutoff_ = 0;
    double h0_ = 0;
    LagrangeTable hhat_;  // hhat on [0, cutoff], even
    LagrangeTable mass_;  // (1/2 pi) int_0^x hhat, held constant beyond the cutoff
    LagrangeTable phase_;
    LagrangeTable digamma_;
    double table_radius_ = 0;
};

TraceFormulaEvaluation geometric_side(const TestFunction& h, double t, const CongruenceGroup& group,
                                      const LengthSpectrum& spectrum, const ScatteringData& scattering);

// CSV with columns t, identity, hyperbolic, scatter_int, scatter_half, digamma_int, m_half, log2, total.
std::string trace_formula_csv(const std::vector<TraceFormulaEvaluation>& rows);
// CSV with columns lambda, integral, weyl_prediction, residual.
std::string smoothed_count_csv(const std::vector<SmoothedCount>& rows);

// The classical spectral parameter r (Laplace eigenvalue 1/4 + r^2) is the
// point lambda = (ir, -ir) of i a* for n = 2; its dual norm depends on the form.
SpectralPoint selberg_to_spectral(double r);
double selberg_dual_norm(double r, const Form& form);

}  // namespace weyl_lab
