#include "weyl_lab/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <stdexcept>

namespace weyl_lab {

QuadratureRule gauss_legendre(int n, double a, double b) {
    if (n < 1) throw std::invalid_argument("Gauss-Legendre order must be positive");
    QuadratureRule rule;
    rule.nodes.resize(static_cast<std::size_t>(n));
    rule.weights.resize(static_cast<std::size_t>(n));
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        // recompute derivative at the converged node
        double p0 = 1, p1 = x;
        for (int k = 2; k <= n; ++k) {
            const double p2 = ((2.0 * k - 1) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        const auto lo = static_cast<std::size_t>(i), hi = static_cast<std::size_t>(n - 1 - i);
        rule.nodes[lo] = mid - half * x;
        rule.nodes[hi] = mid + half * x;
        rule.weights[lo] = half * w;
        rule.weights[hi] = half * w;
    }
    return rule;
}

double integrate_gl(const std::function<double(double)>& f, double a, double b, int panels, int order) {
    const QuadratureRule ref = gauss_legendre(order);
    const double h = (b - a) / panels;
    double total = 0;
    for (int p = 0; p < panels; ++p) {
        const double lo = a + p * h;
        double s = 0;
        for (std::size_t i = 0; i < ref.nodes.size(); ++i)
            s += ref.weights[i] * f(lo + 0.5 * h * (ref.nodes[i] + 1.0));
        total += 0.5 * h * s;
    }
    return total;
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("line fit needs >= 2 points");
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0) throw std::invalid_argument("line fit with degenerate abscissae");
    LineFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    return fit;
}

LineFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y) {
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0) || !(y[i] > 0)) throw std::invalid_argument("log-log fit needs positive data");
        lx.push_back(std::log(x[i]));
        ly.push_back(std::log(y[i]));
    }
    return fit_line(lx, ly);
}

std::vector<double> running_max(const std::vector<double>& v) {
    std::vector<double> out(v.size());
    double m = -INFINITY;
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = m = std::max(m, v[i]);
    return out;
}

std::vector<double> logspace(double lo, double hi, int n) {
    if (n < 2 || !(lo > 0) || !(hi > lo)) throw std::invalid_argument("bad logspace range");
    std::vector<double> out(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        out[static_cast<std::size_t>(i)] = lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1));
    return out;
}

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t index) {
    // splitmix64 finalizer applied to a combined counter
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

void write_file_atomic(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        out << content;
        out.flush();
        if (!out) {
            out.close();
            fs::remove(tmp);
            throw std::runtime_error("write failed for " + tmp.string());
        }
    }
    fs::rename(tmp, target);
}

std::string format_double(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

}  // namespace weyl_lab

namespace weyl_lab {

LineFit fit_loglog_tail(const std::vector<double>& x, const std::vector<double>& y, double fraction) {
    if (x.empty()) throw std::invalid_argument("empty fit data");
    const double lo = std::log(x.front()), hi = std::log(x.back());
    const double cut = hi - fraction * (hi - lo);
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < x.size(); ++i)
        if (std::log(x[i]) >= cut - 1e-12) {
            xs.push_back(x[i]);
            ys.push_back(y[i]);
        }
    return fit_loglog(xs, ys);
}

}  // namespace weyl_lab

namespace weyl_lab {

LagrangeTable::LagrangeTable(std::vector<double> values, double dx, int points, Beyond beyond, bool even)
    : v_(std::move(values)), dx_(dx), points_(points), beyond_(beyond), even_(even) {
    if (!(dx > 0)) throw std::invalid_argument("table spacing must be positive");
    if (points < 2 || static_cast<int>(v_.size()) < points) throw std::invalid_argument("table too short for the stencil");
}

double LagrangeTable::operator()(double x) const {
    if (even_) x = std::abs(x);
    const double u = x / dx_;
    const long last = static_cast<long>(v_.size()) - 1;
    if (u > static_cast<double>(last)) return beyond_ == Beyond::zero ? 0.0 : v_.back();
    long j0 = static_cast<long>(std::floor(u)) - (points_ - 1) / 2;
    if (!even_) j0 = std::clamp(j0, 0L, last - points_ + 1);
    double out = 0;
    for (long a = 0; a < points_; ++a) {
        double w = 1;
        for (long b = 0; b < points_; ++b)
            if (b != a) w *= (u - static_cast<double>(j0 + b)) / static_cast<double>(a - b);
        const long i = std::min(std::abs(j0 + a), last);
        out += w * v_[static_cast<std::size_t>(i)];
    }
    return out;
}

}  // namespace weyl_lab
