#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "weyl_lab/numerics.hpp"
#include "weyl_lab/sl2tf.hpp"
#include "weyl_lab/special.hpp"

namespace weyl_lab {

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<std::pair<int, int>> factorize(int q) {
    std::vector<std::pair<int, int>> out;
    for (int p = 2; p * p <= q; ++p)
        if (q % p == 0) {
            int e = 0;
            while (q % p == 0) {
                q /= p;
                ++e;
            }
            out.emplace_back(p, e);
        }
    if (q > 1) out.emplace_back(q, 1);
    return out;
}

long long mod(long long a, long long m) {
    const long long r = a % m;
    return r < 0 ? r + m : r;
}

// Largest integer whose square is at most x.
long long isqrt(long long x) {
    long long r = static_cast<long long>(std::sqrt(static_cast<double>(x)));
    while (r * r > x) --r;
    while ((r + 1) * (r + 1) <= x) ++r;
    return r;
}

bool is_square(long long x) {
    if (x < 0) return false;
    const long long r = isqrt(x);
    return r * r == x;
}

double hyperbolic_length(long long trace) { return 2.0 * std::acosh(std::abs(static_cast<double>(trace)) / 2.0); }

struct QuadForm {
    long long a, b, c;
    bool operator<(const QuadForm& o) const { return std::tie(a, b, c) < std::tie(o.a, o.b, o.c); }
    bool operator==(const QuadForm& o) const { return a == o.a && b == o.b && c == o.c; }
};

// x < sqrt(D) for non-square D > 0.
bool below_root(long long x, long long D) { return x < 0 || x * x < D; }
// sqrt(D) < y for non-square D > 0.
bool above_root(long long y, long long D) { return y > 0 && y * y > D; }

bool is_reduced(const QuadForm& f, long long D) {
    const long long A = std::abs(f.a);
    return f.b > 0 && below_root(f.b, D) && below_root(2 * A - f.b, D) && above_root(2 * A + f.b, D);
}

// Reduced forms (a, b, c) of discriminant D: |sqrt D - 2|a|| < b < sqrt D.
std::vector<QuadForm> reduced_forms(long long D) {
    std::vector<QuadForm> out;
    for (long long b = 1; below_root(b, D); ++b) {
        if (mod(b - D, 2) != 0) continue;
        const long long ac = (b * b - D) / 4;  // negative
        const long long m = -ac;
        for (long long a = 1; a <= m; ++a) {
            if (m % a != 0) continue;
            for (long long sa : {a, -a}) {
                const QuadForm f{sa, b, ac / sa};
                if (is_reduced(f, D)) out.push_back(f);
            }
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

// Reduction step rho(a, b, c) = (c, b', (b'^2 - D)/(4c)) with b' = -b mod 2|c| in the reduced window.
QuadForm rho_step(const QuadForm& f, long long D) {
    const long long c = f.c, two_c = 2 * std::abs(c);
    long long bp = mod(-f.b, two_c);
    // choose bp = -b mod 2|c| with sqrt D - 2|c| < bp < sqrt D
    long long k = isqrt(D);
    long long hi = k - mod(k - bp, two_c);  // largest value <= floor(sqrt D) in the residue class
    if (hi * hi == D) hi -= two_c;
    bp = hi;
    return QuadForm{c, bp, (bp * bp - D) / (4 * c)};
}

IntMatrix form_to_matrix(const QuadForm& f, long long trace) {
    return {(trace - f.b) / 2, -f.c, f.a, (trace + f.b) / 2};
}

IntMatrix mul_mod(const IntMatrix& x, const IntMatrix& y, long long N) {
    return {mod(x[0] * y[0] + x[1] * y[2], N), mod(x[0] * y[1] + x[1] * y[3], N), mod(x[2] * y[0] + x[3] * y[2], N),
            mod(x[2] * y[1] + x[3] * y[3], N)};
}

struct ClassData {
    IntMatrix rep;
    long long trace;
    long long unit_power;  // gamma = +-eps^j
    double unit_length;    // length of the fundamental eps of the centralizer
    IntMatrix unit;
};

// Fundamental hyperbolic element eps of the centralizer of the matrix of form f (content g).
ClassData class_data(const QuadForm& f, long long trace) {
    ClassData cd;
    cd.trace = trace;
    cd.rep = form_to_matrix(f, trace);
    const long long g = std::gcd(std::gcd(std::abs(f.a), std::abs(f.b)), std::abs(f.c));
    const long long D = trace * trace - 4;
    const long long D0 = D / (g * g);
    const QuadForm f0{f.a / g, f.b / g, f.c / g};
    // gamma itself corresponds to (T, U) = (|trace|, g), so the fundamental U divides into g steps
    for (long long U = 1; U <= g; ++U) {
        const long long T2 = D0 * U * U + 4;
        if (!is_square(T2)) continue;
        const long long T = isqrt(T2);
        cd.unit = {(T - f0.b * U) / 2, -f0.c * U, f0.a * U, (T + f0.b * U) / 2};
        cd.unit_length = hyperbolic_length(T);
        cd.unit_power = std::llround(hyperbolic_length(trace) / cd.unit_length);
        return cd;
    }
    throw std::logic_error("no fundamental unit found");
}

}  // namespace

CongruenceGroup group_data(int N) {
    if (N < 3) throw std::invalid_argument("level N must be at least 3");
    double idx = std::pow(static_cast<double>(N), 3);
    for (auto [p, e] : factorize(N)) idx *= 1.0 - 1.0 / (static_cast<double>(p) * p);
    CongruenceGroup g;
    g.level = N;
    g.sl2_index = std::lround(idx);
    g.psl2_index = g.sl2_index / 2;
    g.area = static_cast<double>(g.psl2_index) * kPi / 3.0;
    g.cusps = static_cast<int>(g.psl2_index / N);
    return g;
}

double trace_congruence_bound(int N) {
    if (N < 3) throw std::invalid_argument("level N must be at least 3");
    return 2.0 * std::acosh((static_cast<double>(N) * N - 2.0) / 2.0);
}

IntMatrix multiply(const IntMatrix& x, const IntMatrix& y) {
    return {x[0] * y[0] + x[1] * y[2], x[0] * y[1] + x[1] * y[3], x[2] * y[0] + x[3] * y[2], x[2] * y[1] + x[3] * y[3]};
}

bool congruent_to_identity(const IntMatrix& g, int N) {
    return mod(g[0] - 1, N) == 0 && mod(g[1], N) == 0 && mod(g[2], N) == 0 && mod(g[3] - 1, N) == 0;
}

std::vector<IntMatrix> sl2z_class_representatives(long trace) {
    if (std::abs(trace) < 3) throw std::invalid_argument("hyperbolic classes need |trace| >= 3");
    const long long D = static_cast<long long>(trace) * trace - 4;
    const std::vector<QuadForm> forms = reduced_forms(D);
    std::map<QuadForm, bool> seen;
    std::vector<IntMatrix> reps;
    for (const QuadForm& f : forms) {
        if (seen[f]) continue;
        // walk the cycle of f
        QuadForm g = f;
        do {
            seen[g] = true;
            g = rho_step(g, D);
            if (!is_reduced(g, D)) throw std::logic_error("reduction cycle left the reduced set");
        } while (!(g == f));
        reps.push_back(form_to_matrix(f, trace));
    }
    return reps;
}

long sl2z_class_count_bruteforce(long trace, long entry_bound) {
    const long long B = entry_bound;
    std::map<IntMatrix, std::size_t> index;
    std::vector<IntMatrix> mats;
    for (long long a = -B; a <= B; ++a) {
        const long long d = trace - a;
        if (std::abs(d) > B) continue;
        const long long bc = a * d - 1;
        for (long long b = -B; b <= B; ++b) {
            if (b == 0 || bc % b != 0) continue;  // b = 0 forces trace +-2
            const long long c = bc / b;
            if (std::abs(c) > B) continue;
            const IntMatrix m{a, b, c, d};
            index.emplace(m, mats.size());
            mats.push_back(m);
        }
    }
    std::vector<std::size_t> parent(mats.size());
    std::iota(parent.begin(), parent.end(), 0);
    std::function<std::size_t(std::size_t)> find = [&](std::size_t i) {
        while (parent[i] != i) i = parent[i] = parent[parent[i]];
        return i;
    };
    const IntMatrix S{0, -1, 1, 0}, Si{0, 1, -1, 0}, T{1, 1, 0, 1}, Ti{1, -1, 0, 1};
    for (std::size_t i = 0; i < mats.size(); ++i)
        for (const auto& [g, gi] : {std::pair{S, Si}, std::pair{T, Ti}, std::pair{Ti, T}}) {
            const IntMatrix m = multiply(multiply(g, mats[i]), gi);
            auto it = index.find(m);
            if (it != index.end()) parent[find(i)] = find(it->second);
        }
    long comps = 0;
    for (std::size_t i = 0; i < mats.size(); ++i)
        if (find(i) == i) ++comps;
    return comps;
}

long min_hyperbolic_trace_bruteforce(int N, long entry_bound) {
    long best = 0;
    const long long B = entry_bound;
    for (long long a = -B; a <= B; ++a) {
        if (mod(a - 1, N) != 0) continue;
        for (long long d = -B; d <= B; ++d) {
            if (mod(d - 1, N) != 0) continue;
            const long long t = a + d;
            if (std::abs(t) <= 2 || (best != 0 && std::abs(t) >= best)) continue;
            const long long bc = a * d - 1;
            for (long long b = -B; b <= B; ++b) {
                if (b == 0 || mod(b, N) != 0 || bc % b != 0) continue;
                const long long c = bc / b;
                if (std::abs(c) <= B && mod(c, N) == 0) {
                    best = static_cast<long>(std::abs(t));
                    break;
                }
            }
        }
    }
    return best;
}

LengthSpectrum length_spectrum(int N, double L) {
    if (N != 1 && N < 3) throw std::invalid_argument("length spectrum needs N = 1 or N >= 3");
    if (!(L >= 0)) throw std::invalid_argument("length bound must be nonnegative");
    const double max_trace = 2.0 * std::cosh(L / 2.0);
    if (max_trace > 200.0 + 1e-9) throw std::invalid_argument("length bound exceeds trace 200");
    LengthSpectrum spec;
    spec.level = N;
    spec.validity_radius = L;
    const long psl_index = N == 1 ? 1 : group_data(N).psl2_index;
    // keyed by trace and primitive length in units of 1e-9
    std::map<std::pair<long, long long>, std::pair<double, long>> grouped;
    for (long t = 3; t <= static_cast<long>(max_trace); ++t)
        for (long trace : {t, -t}) {
            if (N > 1 && mod(trace - 2, static_cast<long long>(N) * N) != 0) continue;
            if (hyperbolic_length(trace) > L) continue;
            const long long D = static_cast<long long>(trace) * trace - 4;
            const std::vector<QuadForm> forms = reduced_forms(D);
            std::map<QuadForm, bool> seen;
            for (const QuadForm& f : forms) {
                if (seen[f]) continue;
                QuadForm g = f;
                do {
                    seen[g] = true;
                    g = rho_step(g, D);
                } while (!(g == f));
                const ClassData cd = class_data(f, trace);
                if (N == 1) {
                    // classes of SL(2,Z) modulo sign: count the positive-trace representative
                    if (trace < 0) continue;
                    auto& slot = grouped[{trace, std::llround(cd.unit_length * 1e9)}];
                    slot.first = cd.unit_length;
                    slot.second += 1;
                    continue;
                }
                if (!congruent_to_identity(cd.rep, N)) continue;
                // smallest k with eps^k = +-I mod N
                IntMatrix p = {mod(cd.unit[0], N), mod(cd.unit[1], N), mod(cd.unit[2], N), mod(cd.unit[3], N)};
                const IntMatrix e = p;
                long k0 = 1;
                auto plus_minus_identity = [&](const IntMatrix& m) {
                    return (m[1] == 0 && m[2] == 0) && ((m[0] == 1 % N && m[3] == 1 % N) || (m[0] == N - 1 && m[3] == N - 1));
                };
                while (!plus_minus_identity(p)) {
                    p = mul_mod(p, e, N);
                    ++k0;
                }
                if (cd.unit_power % k0 != 0) throw std::logic_error("class power incompatible with primitive element");
                auto& slot = grouped[{trace, std::llround(k0 * cd.unit_length * 1e9)}];
                slot.first = static_cast<double>(k0) * cd.unit_length;
                slot.second += psl_index / k0;
            }
        }
    for (const auto& [key, value] : grouped) {
        LengthEntry e;
        e.trace = key.first;
        e.length = hyperbolic_length(key.first);
        e.primitive_length = value.first;
        e.class_count = value.second;
        spec.entries.push_back(e);
    }
    std::stable_sort(spec.entries.begin(), spec.entries.end(),
                     [](const LengthEntry& x, const LengthEntry& y) { return x.length < y.length; });
    return spec;
}

nlohmann::json to_json(const LengthSpectrum& s) {
    nlohmann::json entries = nlohmann::json::array();
    for (const auto& e : s.entries)
        entries.push_back({{"trace", e.trace}, {"length", e.length}, {"primitive_length", e.primitive_length},
                           {"class_count", e.class_count}});
    return {{"schema_version", 1}, {"N", s.level}, {"validity_radius", s.validity_radius},
            {"truncated", s.truncated}, {"entries", entries}};
}

LengthSpectrum length_spectrum_from_json(const nlohmann::json& j) {
    if (j.value("schema_version", 0) != 1) throw std::runtime_error("unsupported length-spectrum schema");
    LengthSpectrum s;
    s.level = j.at("N").get<int>();
    s.validity_radius = j.at("validity_radius").get<double>();
    s.truncated = j.value("truncated", false);
    for (const auto& e : j.at("entries")) {
        LengthEntry x;
        x.trace = e.at("trace").get<long>();
        x.length = e.at("length").get<double>();
        x.primitive_length = e.at("primitive_length").get<double>();
        x.class_count = e.at("class_count").get<long>();
        if (std::abs(x.length - hyperbolic_length(x.trace)) > 1e-12) throw std::runtime_error("inconsistent cached length");
        s.entries.push_back(x);
    }
    return s;
}

LengthSpectrum length_spectrum_cached(int N, double L, const std::string& cache_dir) {
    std::string dir = cache_dir;
    if (dir.empty())
        if (const char* env = std::getenv("WEYL_LAB_CACHE")) dir = env;
    if (dir.empty()) return length_spectrum(N, L);
    const std::string key = "N=" + std::to_string(N) + ";L=" + format_double(L);
    std::ostringstream name;
    name << "length_spectrum_" << std::hex << std::hash<std::string>{}(key) << ".json";
    const std::filesystem::path path = std::filesystem::path(dir) / name.str();
    if (std::filesystem::exists(path)) {
        std::ifstream in(path);
        const nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
        if (!j.is_discarded() && j.value("key", std::string()) == key) return length_spectrum_from_json(j);
    }
    const LengthSpectrum s = length_spectrum(N, L);
    std::filesystem::create_directories(dir);
    nlohmann::json j = to_json(s);
    j["key"] = key;
    write_file_atomic(path.string(), j.dump(2));
    return s;
}

// ---------------------------------------------------------------- characters

DirichletCharacter::DirichletCharacter(int modulus, std::vector<cdouble> values)
    : modulus_(modulus), values_(std::move(values)) {
    if (modulus < 1 || static_cast<int>(values_.size()) != modulus)
        throw std::invalid_argument("character needs one value per residue");
}

cdouble DirichletCharacter::operator()(long n) const { return values_[static_cast<std::size_t>(mod(n, modulus_))]; }

bool DirichletCharacter::principal() const {
    for (int a = 0; a < modulus_; ++a) {
        const bool unit = std::gcd(a, modulus_) == 1;
        if (std::abs(values_[static_cast<std::size_t>(a)] - cdouble(unit ? 1.0 : 0.0)) > 1e-12) return false;
    }
    return true;
}

bool DirichletCharacter::real() const {
    for (const auto& v : values_)
        if (std::abs(v.imag()) > 1e-12) return false;
    return true;
}

DirichletCharacter DirichletCharacter::conj() const {
    std::vector<cdouble> v(values_);
    for (auto& x : v) x = std::conj(x);
    return DirichletCharacter(modulus_, v);
}

bool DirichletCharacter::operator==(const DirichletCharacter& o) const {
    if (modulus_ != o.modulus_) return false;
    for (int a = 0; a < modulus_; ++a)
        if (std::abs(values_[static_cast<std::size_t>(a)] - o.values_[static_cast<std::size_t>(a)]) > 1e-9) return false;
    return true;
}

std::vector<DirichletCharacter> dirichlet_characters(int q) {
    if (q < 1) throw std::invalid_argument("modulus must be positive");
    // Each local factor: list of characters of (Z/p^e)^x as functions on residues mod p^e.
    struct Local {
        int m;
        std::vector<std::vector<cdouble>> chars;
    };
    std::vector<Local> locals;
    for (auto [p, e] : factorize(q)) {
        int m = 1;
        for (int i = 0; i < e; ++i) m *= p;
        Local loc{m, {}};
        auto unit = [&](int x) { return std::gcd(x, m) == 1; };
        if (p == 2 && e >= 3) {
            // x = (-1)^a 5^b, a mod 2, b mod 2^{e-2}
            const int h = m / 4;
            std::vector<int> la(static_cast<std::size_t>(m), -1), lb(static_cast<std::size_t>(m), -1);
            long long pw = 1;
            for (int b = 0; b < h; ++b) {
                la[static_cast<std::size_t>(pw)] = 0;
                lb[static_cast<std::size_t>(pw)] = b;
                la[static_cast<std::size_t>(mod(-pw, m))] = 1;
                lb[static_cast<std::size_t>(mod(-pw, m))] = b;
                pw = pw * 5 % m;
            }
            for (int ja = 0; ja < 2; ++ja)
                for (int jb = 0; jb < h; ++jb) {
                    std::vector<cdouble> v(static_cast<std::size_t>(m), 0.0);
                    for (int x = 0; x < m; ++x)
                        if (unit(x))
                            v[static_cast<std::size_t>(x)] =
                                std::polar(1.0, kPi * ja * la[static_cast<std::size_t>(x)] +
                                                    2 * kPi * jb * lb[static_cast<std::size_t>(x)] / h);
                    loc.chars.push_back(v);
                }
        } else {
            // cyclic: find a generator
            int phi = 0;
            for (int x = 1; x < m; ++x) phi += unit(x);
            if (m == 2) phi = 1;
            int gen = 1;
            for (int g = 1; g < m || m <= 2; ++g) {
                if (!unit(g)) continue;
                long long pw = 1;
                int ord = 0;
                do {
                    pw = pw * g % m;
                    ++ord;
                } while (pw != 1 % m);
                if (ord == phi) {
                    gen = g;
                    break;
                }
                if (m <= 2) break;
            }
            std::vector<int> lg(static_cast<std::size_t>(m), -1);
            long long pw = 1 % m;
            for (int k = 0; k < phi; ++k) {
                lg[static_cast<std::size_t>(pw)] = k;
                pw = pw * gen % m;
            }
            for (int j = 0; j < phi; ++j) {
                std::vector<cdouble> v(static_cast<std::size_t>(m), 0.0);
                for (int x = 0; x < m; ++x)
                    if (unit(x)) v[static_cast<std::size_t>(x)] = std::polar(1.0, 2 * kPi * j * lg[static_cast<std::size_t>(x)] / phi);
                loc.chars.push_back(v);
            }
        }
        locals.push_back(std::move(loc));
    }
    std::vector<DirichletCharacter> out;
    std::vector<std::size_t> idx(locals.size(), 0);
    while (true) {
        std::vector<cdouble> v(static_cast<std::size_t>(q), 1.0);
        for (int n = 0; n < q; ++n)
            for (std::size_t f = 0; f < locals.size(); ++f)
                v[static_cast<std::size_t>(n)] *= locals[f].chars[idx[f]][static_cast<std::size_t>(n % locals[f].m)];
        if (q == 1) v[0] = 1.0;
        for (auto& x : v) {
            if (std::abs(x.real()) < 1e-15) x.real(0);
            if (std::abs(x.imag()) < 1e-15) x.imag(0);
        }
        out.emplace_back(q, v);
        std::size_t f = locals.size();
        while (f > 0) {
            --f;
            if (++idx[f] < locals[f].chars.size()) break;
            idx[f] = 0;
            if (f == 0) return out;
        }
        if (locals.empty()) return out;
    }
}

namespace {

struct RegularL {
    cdouble eta;   // L(s) - R/(s-1) (R = 0 for non-principal)
    cdouble deta;  // derivative of eta
    double R;
};

RegularL regular_L(cdouble s, const DirichletCharacter& chi, int order) {
    const int q = chi.modulus();
    const double lq = std::log(static_cast<double>(q));
    const cdouble qs = std::exp(-s * lq);
    cdouble sum = 0, dsum = 0;
    double phi = 0;
    const bool principal = chi.principal();
    for (int a = 1; a <= q; ++a) {
        const cdouble c = chi(a);
        if (c == 0.0) continue;
        phi += 1.0;
        // the 1/(s-1) parts sum to phi(q)/(s-1) for principal chi and cancel otherwise
        const HurwitzValue z = hurwitz_zeta_regular(s, static_cast<double>(a) / q, order);
        sum += c * z.value;
        dsum += c * z.derivative;
    }
    RegularL out{qs * sum, -lq * qs * sum + qs * dsum, 0.0};
    if (principal) {
        // q^{-s}/(s-1) = q^{-1} [1/(s-1) + (q^{1-s} - 1)/(s-1)]
        const double R = phi / q;
        const cdouble x = -(s - 1.0) * lq;
        out.R = R;
        out.eta += R * (-lq) * expm1_ratio(x);
        out.deta += R * lq * lq * expm1_second(x);
    }
    return out;
}

}  // namespace

cdouble dirichlet_L(cdouble s, const DirichletCharacter& chi, int derivative_order, int order) {
    if (derivative_order != 0 && derivative_order != 1) throw std::invalid_argument("derivative order must be 0 or 1");
    const RegularL r = regular_L(s, chi, order);
    if (r.R != 0.0) {
        const cdouble w = s - 1.0;
        if (std::abs(w) == 0.0) throw std::domain_error("L(s, chi) has a pole at s = 1 for principal chi");
        return derivative_order == 0 ? r.R / w + r.eta : -r.R / (w * w) + r.deta;
    }
    return derivative_order == 0 ? r.eta : r.deta;
}

cdouble dirichlet_L_regularized(cdouble s, const DirichletCharacter& chi) {
    const RegularL r = regular_L(s, chi, 1);
    return r.R == 0.0 ? r.eta : r.R + (s - 1.0) * r.eta;
}

cdouble dirichlet_log_derivative_regular(cdouble s, const DirichletCharacter& chi) {
    const RegularL r = regular_L(s, chi, 1);
    if (r.R == 0.0) return r.deta / r.eta;
    const cdouble w = s - 1.0;
    return (w * r.deta + r.eta) / (r.R + w * r.eta);
}

}  // namespace weyl_lab
