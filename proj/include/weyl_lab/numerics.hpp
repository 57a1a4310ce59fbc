#pragma once

// Small numerical utilities shared by the modules: Gauss-Legendre rules,
// least-squares line fits, counter-based seeding and atomic file output.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace weyl_lab {

struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

// n-point Gauss-Legendre rule on [a, b].
QuadratureRule gauss_legendre(int n, double a = -1.0, double b = 1.0);

// Composite Gauss-Legendre: m panels of an n-point rule on [a, b].
double integrate_gl(const std::function<double(double)>& f, double a, double b, int panels, int order = 16);

struct LineFit {
    double slope = 0;
    double intercept = 0;
};

// Ordinary least squares y = slope * x + intercept.
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

// Fit of log y against log x (all entries must be positive).
LineFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y);

// Running maximum of a sequence.
std::vector<double> running_max(const std::vector<double>& v);

// n values log-spaced on [lo, hi].
std::vector<double> logspace(double lo, double hi, int n);

// Mixes a base seed and a stream index into an independent 64-bit seed.
std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t index);

// Writes content to path via a temporary file and rename, so readers never see
// a partially written file.
void write_file_atomic(const std::string& path, const std::string& content);

// Formats a double with 17 significant digits.
std::string format_double(double x);

}  // namespace weyl_lab

namespace weyl_lab {

// Log-log slope of y against x restricted to the points whose log x lies in
// the upper `fraction` of the log range.
LineFit fit_loglog_tail(const std::vector<double>& x, const std::vector<double>& y, double fraction = 0.5);

}  // namespace weyl_lab

namespace weyl_lab {

// Samples v_j = f(j dx), j >= 0, of a smooth function, evaluated by Lagrange
// interpolation on `points` consecutive nodes. With even, f(-x) = f(x) and the
// stencil reflects across 0; otherwise the stencil is clamped into the table.
// Beyond the last sample the table returns 0 (Beyond::zero) or the last value.
class LagrangeTable {
public:
    enum class Beyond { zero, hold };

    LagrangeTable() = default;
    LagrangeTable(std::vector<double> values, double dx, int points = 6, Beyond beyond = Beyond::hold,
                  bool even = false);

    double operator()(double x) const;
    double spacing() const noexcept { return dx_; }
    double extent() const noexcept { return dx_ * static_cast<double>(v_.size() - 1); }

private:
    std::vector<double> v_;
    double dx_ = 1;
    int points_ = 6;
    Beyond beyond_ = Beyond::hold;
    bool even_ = false;
};

}  // namespace weyl_lab
