#include "weyl_lab/rootsys.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace weyl_lab {

FormKind parse_form(const std::string& name) {
    if (name == "killing") return FormKind::killing;
    if (name == "trace") return FormKind::trace;
    throw std::invalid_argument("unknown quadratic form '" + name + "' (expected killing|trace)");
}

std::string to_string(FormKind kind) { return kind == FormKind::killing ? "killing" : "trace"; }

namespace {

// Helmert basis of {sum v_i = 0}: column k is (1,..,1,-k,0,..)/sqrt(k(k+1)).
Eigen::MatrixXd helmert(int n) {
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(n, n - 1);
    for (int k = 1; k < n; ++k) {
        const double s = 1.0 / std::sqrt(static_cast<double>(k) * (k + 1));
        for (int i = 0; i < k; ++i) b(i, k - 1) = s;
        b(k, k - 1) = -k * s;
    }
    return b;
}

void check_rank(int n) {
    if (n < 2) throw std::invalid_argument("rank parameter n must be >= 2");
}

}  // namespace

Form::Form(int n, FormKind kind) : n_(n), kind_(kind) {
    check_rank(n);
    scale_ = kind == FormKind::killing ? 2.0 * n : 1.0;
    chart_ = helmert(n);
}

double Form::inner(std::span<const double> x, std::span<const double> y) const {
    double s = 0;
    for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
    return scale_ * s;
}

double Form::norm(std::span<const double> x) const { return std::sqrt(inner(x, x)); }

double Form::dual_inner(std::span<const double> x, std::span<const double> y) const {
    double s = 0;
    for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
    return s / scale_;
}

double Form::dual_norm(std::span<const double> x) const { return std::sqrt(dual_inner(x, x)); }

double Form::dual_norm(std::span<const cdouble> x) const {
    double s = 0;
    for (auto v : x) s += std::norm(v);
    return std::sqrt(s / scale_);
}

double Form::volume_factor() const { return std::pow(scale_, 0.5 * rank()); }

double Form::dual_volume_factor() const {
    return std::pow(2.0 * std::numbers::pi, -rank()) * std::pow(scale_, -0.5 * rank());
}

// ---------------------------------------------------------------------------

CartanVector::CartanVector(std::vector<double> coords) : coords_(std::move(coords)) {
    double sum = 0, norm = 0;
    for (double c : coords_) {
        sum += c;
        norm += c * c;
    }
    if (std::abs(sum) > 1e-12 * std::max(1.0, std::sqrt(norm)))
        throw std::invalid_argument("CartanVector coordinates must sum to zero");
}

double CartanVector::pairing(const CartanVector& other) const {
    double s = 0;
    for (std::size_t i = 0; i < coords_.size(); ++i) s += coords_[i] * other.coords_[i];
    return s;
}

CartanVector CartanVector::from_chart(const Form& form, const Eigen::VectorXd& y) {
    Eigen::VectorXd v = form.chart() * y;
    std::vector<double> c(v.data(), v.data() + v.size());
    // remove rounding drift so the invariant holds exactly
    const double mean = std::accumulate(c.begin(), c.end(), 0.0) / static_cast<double>(c.size());
    for (double& x : c) x -= mean;
    return CartanVector(std::move(c));
}

Eigen::VectorXd CartanVector::to_chart(const Form& form) const {
    Eigen::Map<const Eigen::VectorXd> v(coords_.data(), static_cast<Eigen::Index>(coords_.size()));
    return form.chart().transpose() * v;
}

// ---------------------------------------------------------------------------

SpectralPoint::SpectralPoint(std::vector<cdouble> coords) : coords_(std::move(coords)) {
    cdouble sum = 0;
    double norm = 0;
    for (auto c : coords_) {
        sum += c;
        norm += std::norm(c);
    }
    if (std::abs(sum) > 1e-12 * std::max(1.0, std::sqrt(norm)))
        throw std::invalid_argument("SpectralPoint coordinates must sum to zero");
}

SpectralPoint SpectralPoint::imaginary(std::span<const double> x) {
    std::vector<cdouble> c(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) c[i] = cdouble(0, x[i]);
    return SpectralPoint(std::move(c));
}

SpectralPoint SpectralPoint::real(std::span<const double> x) {
    std::vector<cdouble> c(x.begin(), x.end());
    return SpectralPoint(std::move(c));
}

SpectralPoint SpectralPoint::from_chart(const Form& form, const Eigen::VectorXd& re,
                                        const Eigen::VectorXd& im) {
    Eigen::VectorXd a = form.chart() * re;
    Eigen::VectorXd b = form.chart() * im;
    std::vector<cdouble> c(static_cast<std::size_t>(a.size()));
    cdouble mean = 0;
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        c[static_cast<std::size_t>(i)] = cdouble(a(i), b(i));
        mean += c[static_cast<std::size_t>(i)];
    }
    mean /= static_cast<double>(c.size());
    for (auto& v : c) v -= mean;
    return SpectralPoint(std::move(c));
}

std::vector<double> SpectralPoint::real_part() const {
    std::vector<double> out;
    for (auto c : coords_) out.push_back(c.real());
    return out;
}

std::vector<double> SpectralPoint::imag_part() const {
    std::vector<double> out;
    for (auto c : coords_) out.push_back(c.imag());
    return out;
}

bool SpectralPoint::is_imaginary(double tol) const {
    double re = 0, all = 0;
    for (auto c : coords_) {
        re += c.real() * c.real();
        all += std::norm(c);
    }
    return std::sqrt(re) <= tol * std::max(1.0, std::sqrt(all));
}

cdouble SpectralPoint::pairing(const CartanVector& x) const {
    cdouble s = 0;
    for (int i = 0; i < n(); ++i) s += coords_[static_cast<std::size_t>(i)] * x[i];
    return s;
}

SpectralPoint SpectralPoint::operator+(const SpectralPoint& o) const {
    std::vector<cdouble> c(coords_);
    for (std::size_t i = 0; i < c.size(); ++i) c[i] += o.coords_[i];
    return SpectralPoint(std::move(c));
}

SpectralPoint SpectralPoint::operator-(const SpectralPoint& o) const {
    std::vector<cdouble> c(coords_);
    for (std::size_t i = 0; i < c.size(); ++i) c[i] -= o.coords_[i];
    return SpectralPoint(std::move(c));
}

SpectralPoint SpectralPoint::operator*(cdouble s) const {
    std::vector<cdouble> c(coords_);
    for (auto& v : c) v *= s;
    return SpectralPoint(std::move(c));
}

SpectralPoint SpectralPoint::operator-() const { return *this * cdouble(-1.0); }

// ---------------------------------------------------------------------------

WeylElement::WeylElement(std::vector<int> perm) : perm_(std::move(perm)) {
    std::vector<int> sorted = perm_;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < sorted.size(); ++i)
        if (sorted[i] != static_cast<int>(i)) throw std::invalid_argument("not a permutation");
}

WeylElement WeylElement::identity(int n) {
    std::vector<int> p(static_cast<std::size_t>(n));
    std::iota(p.begin(), p.end(), 0);
    return WeylElement(std::move(p));
}

WeylElement WeylElement::random(int n, std::mt19937_64& rng) {
    std::vector<int> p(static_cast<std::size_t>(n));
    std::iota(p.begin(), p.end(), 0);
    std::shuffle(p.begin(), p.end(), rng);
    return WeylElement(std::move(p));
}

std::vector<WeylElement> WeylElement::enumerate(int n) {
    if (n > kMaxLeviRank) throw std::invalid_argument("Weyl group enumeration capped at n = 8");
    std::vector<int> p(static_cast<std::size_t>(n));
    std::iota(p.begin(), p.end(), 0);
    std::vector<WeylElement> out;
    do {
        out.emplace_back(p);
    } while (std::next_permutation(p.begin(), p.end()));
    return out;
}

WeylElement WeylElement::operator*(const WeylElement& o) const {
    std::vector<int> p(perm_.size());
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = perm_[static_cast<std::size_t>(o.perm_[i])];
    return WeylElement(std::move(p));
}

WeylElement WeylElement::inverse() const {
    std::vector<int> p(perm_.size());
    for (std::size_t i = 0; i < p.size(); ++i) p[static_cast<std::size_t>(perm_[i])] = static_cast<int>(i);
    return WeylElement(std::move(p));
}

std::vector<std::vector<int>> WeylElement::cycles() const {
    std::vector<std::vector<int>> out;
    std::vector<bool> seen(perm_.size(), false);
    for (std::size_t i = 0; i < perm_.size(); ++i) {
        if (seen[i]) continue;
        std::vector<int> cyc;
        for (int j = static_cast<int>(i); !seen[static_cast<std::size_t>(j)]; j = perm_[static_cast<std::size_t>(j)]) {
            seen[static_cast<std::size_t>(j)] = true;
            cyc.push_back(j);
        }
        out.push_back(std::move(cyc));
    }
    return out;
}

Eigen::MatrixXd WeylElement::matrix() const {
    const int n = this->n();
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) m(perm_[static_cast<std::size_t>(i)], i) = 1.0;
    return m;
}

int WeylElement::sign() const {
    int s = 1;
    for (const auto& c : cycles())
        if (c.size() % 2 == 0) s = -s;
    return s;
}

// ---------------------------------------------------------------------------

namespace {

std::vector<std::vector<int>> canonical(std::vector<std::vector<int>> blocks) {
    for (auto& b : blocks) std::sort(b.begin(), b.end());
    blocks.erase(std::remove_if(blocks.begin(), blocks.end(), [](const auto& b) { return b.empty(); }),
                 blocks.end());
    std::sort(blocks.begin(), blocks.end(), [](const auto& a, const auto& b) { return a.front() < b.front(); });
    return blocks;
}

}  // namespace

LeviSubgroup::LeviSubgroup(std::vector<std::vector<int>> blocks) : blocks_(canonical(std::move(blocks))) {
    int count = 0;
    for (const auto& b : blocks_) count += static_cast<int>(b.size());
    n_ = count;
    std::vector<bool> seen(static_cast<std::size_t>(n_), false);
    for (const auto& b : blocks_)
        for (int i : b) {
            if (i < 0 || i >= n_ || seen[static_cast<std::size_t>(i)])
                throw std::invalid_argument("Levi blocks must partition {0..n-1}");
            seen[static_cast<std::size_t>(i)] = true;
        }
}

LeviSubgroup LeviSubgroup::minimal(int n) {
    std::vector<std::vector<int>> b;
    for (int i = 0; i < n; ++i) b.push_back({i});
    return LeviSubgroup(std::move(b));
}

LeviSubgroup LeviSubgroup::full(int n) {
    std::vector<int> all(static_cast<std::size_t>(n));
    std::iota(all.begin(), all.end(), 0);
    return LeviSubgroup({all});
}

LeviSubgroup LeviSubgroup::standard(const std::vector<int>& sizes) {
    std::vector<std::vector<int>> b;
    int next = 0;
    for (int s : sizes) {
        if (s <= 0) throw std::invalid_argument("composition parts must be positive");
        std::vector<int> block;
        for (int k = 0; k < s; ++k) block.push_back(next++);
        b.push_back(std::move(block));
    }
    return LeviSubgroup(std::move(b));
}

int LeviSubgroup::block_of(int i) const {
    for (std::size_t k = 0; k < blocks_.size(); ++k)
        if (std::find(blocks_[k].begin(), blocks_[k].end(), i) != blocks_[k].end()) return static_cast<int>(k);
    throw std::out_of_range("index outside partition");
}

bool LeviSubgroup::refines(const LeviSubgroup& other) const {
    for (const auto& b : blocks_) {
        const int target = other.block_of(b.front());
        for (int i : b)
            if (other.block_of(i) != target) return false;
    }
    return true;
}

LeviSubgroup LeviSubgroup::meet(const LeviSubgroup& other) const {
    std::vector<std::vector<int>> out;
    for (const auto& a : blocks_)
        for (const auto& b : other.blocks_) {
            std::vector<int> c;
            std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(c));
            if (!c.empty()) out.push_back(std::move(c));
        }
    return LeviSubgroup(std::move(out));
}

LeviSubgroup LeviSubgroup::join(const LeviSubgroup& other) const {
    std::vector<int> parent(static_cast<std::size_t>(n_));
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
        while (parent[static_cast<std::size_t>(x)] != x) x = parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
        return x;
    };
    for (const auto* p : {this, &other})
        for (const auto& b : p->blocks_)
            for (int i : b) parent[static_cast<std::size_t>(find(i))] = find(b.front());
    std::vector<std::vector<int>> groups(static_cast<std::size_t>(n_));
    for (int i = 0; i < n_; ++i) groups[static_cast<std::size_t>(find(i))].push_back(i);
    return LeviSubgroup(std::move(groups));
}

std::string LeviSubgroup::to_string() const {
    std::ostringstream os;
    for (std::size_t k = 0; k < blocks_.size(); ++k) {
        if (k) os << '|';
        os << '{';
        for (std::size_t j = 0; j < blocks_[k].size(); ++j) os << (j ? "," : "") << blocks_[k][j] + 1;
        os << '}';
    }
    return os.str();
}

// ---------------------------------------------------------------------------

CartanVector rho(int n) {
    check_rank(n);
    std::vector<double> c(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) c[static_cast<std::size_t>(i)] = 0.5 * (n - 1 - 2 * i);
    return CartanVector(std::move(c));
}

Dimensions dims(int n) {
    check_rank(n);
    return {n * (n + 1) / 2 - 1, n - 1};
}

LeviDecomposition levi_decompose(const SpectralPoint& lambda, const LeviSubgroup& levi) {
    if (levi.n() != lambda.n()) throw std::invalid_argument("Levi and spectral point rank mismatch");
    std::vector<cdouble> center(static_cast<std::size_t>(lambda.n()));
    for (const auto& b : levi.blocks()) {
        cdouble mean = 0;
        for (int i : b) mean += lambda[i];
        mean /= static_cast<double>(b.size());
        for (int i : b) center[static_cast<std::size_t>(i)] = mean;
    }
    // re-center so the zero-sum invariants hold to rounding relative to each part
    cdouble total = 0;
    for (auto c : center) total += c;
    for (auto& c : center) c -= total / static_cast<double>(center.size());
    std::vector<cdouble> rest(static_cast<std::size_t>(lambda.n()));
    for (int i = 0; i < lambda.n(); ++i) rest[static_cast<std::size_t>(i)] = lambda[i] - center[static_cast<std::size_t>(i)];
    for (const auto& b : levi.blocks()) {
        cdouble mean = 0;
        for (int i : b) mean += rest[static_cast<std::size_t>(i)];
        mean /= static_cast<double>(b.size());
        for (int i : b) rest[static_cast<std::size_t>(i)] -= mean;
    }
    return {SpectralPoint(std::move(center)), SpectralPoint(std::move(rest))};
}

LeviSubgroup fixed_levi(const WeylElement& w) { return LeviSubgroup(w.cycles()); }

std::vector<LeviSubgroup> enumerate_levis(int n) {
    check_rank(n);
    if (n > kMaxLeviRank) throw std::invalid_argument("Levi enumeration capped at n = 8");
    // restricted growth strings
    std::vector<LeviSubgroup> out;
    std::vector<int> a(static_cast<std::size_t>(n), 0);
    while (true) {
        int blocks = *std::max_element(a.begin(), a.end()) + 1;
        std::vector<std::vector<int>> b(static_cast<std::size_t>(blocks));
        for (int i = 0; i < n; ++i) b[static_cast<std::size_t>(a[static_cast<std::size_t>(i)])].push_back(i);
        out.emplace_back(std::move(b));
        int i = n - 1;
        for (; i > 0; --i) {
            int prefix_max = *std::max_element(a.begin(), a.begin() + i);
            if (a[static_cast<std::size_t>(i)] <= prefix_max) {
                ++a[static_cast<std::size_t>(i)];
                std::fill(a.begin() + i + 1, a.end(), 0);
                break;
            }
        }
        if (i == 0) break;
    }
    return out;
}

std::vector<LeviSubgroup> maximal_levis(int n) {
    std::vector<LeviSubgroup> out;
    for (auto& m : enumerate_levis(n))
        if (m.blocks().size() == 2) out.push_back(std::move(m));
    return out;
}

std::uint64_t factorial(int n) {
    std::uint64_t f = 1;
    for (int k = 2; k <= n; ++k) f *= static_cast<std::uint64_t>(k);
    return f;
}

}  // namespace weyl_lab
