#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>
#include <stdexcept>

#include "weyl_lab/numerics.hpp"
#include "weyl_lab/sl2tf.hpp"
#include "weyl_lab/special.hpp"

#ifndef WEYL_LAB_DATA_DIR
#define WEYL_LAB_DATA_DIR "data"
#endif

namespace weyl_lab {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kLn2 = std::numbers::ln2;
constexpr double kPanelWidth = 0.5;  // Gauss-Legendre 16 panels for the r-integrals

nlohmann::json character_values_to_json(const DirichletCharacter& chi) {
    nlohmann::json out = nlohmann::json::array();
    for (const cdouble& v : chi.values()) {
        if (v.imag() == 0.0)
            out.push_back(v.real());
        else
            out.push_back({v.real(), v.imag()});
    }
    return out;
}

DirichletCharacter character_from_json(const nlohmann::json& j) {
    const int q = j.at("modulus").get<int>();
    std::vector<cdouble> values;
    for (const auto& v : j.at("values")) {
        if (v.is_array())
            values.emplace_back(v.at(0).get<double>(), v.at(1).get<double>());
        else
            values.emplace_back(v.get<double>(), 0.0);
    }
    return DirichletCharacter(q, values);
}

double fourier_1d(const TestFunction& h, double z) { return h.fourier_iso({cdouble(0.0, z)}).real(); }

// Smallest X beyond which |hhat(z)| (1 + z)^2 stays below tol * hhat(0) for 40 steps of 0.05.
double transform_cutoff_of(const TestFunction& h, double tol) {
    const double top = fourier_1d(h, 0.0);
    int quiet = 0;
    for (double z = 0;; z += 0.05) {
        if (z > h.band_limit()) throw std::runtime_error("test-function transform is not resolved by its grid");
        quiet = std::abs(fourier_1d(h, z)) * (1 + z) * (1 + z) < tol * top ? quiet + 1 : 0;
        if (quiet > 40) return z;
    }
}

}  // namespace

// ---------------------------------------------------------------- scattering determinant

cdouble ScatteringData::determinant(cdouble s) const {
    cdouble val = (l % 2 == 0) ? 1.0 : -1.0;
    if (A) val *= std::exp((1.0 - 2.0 * s) * std::log(*A));
    val *= std::exp(static_cast<double>(k) * (lgamma(1.0 - s) - lgamma(s)));
    for (const CharacterFactor& f : characters) {
        cdouble ratio;
        if (f.chi.principal()) {
            // L(w) = F(w)/(w - 1) with F regular, so L(2-2s)/L(2s) = -F(2-2s)/F(2s).
            ratio = -dirichlet_L_regularized(2.0 - 2.0 * s, f.chi.conj()) / dirichlet_L_regularized(2.0 * s, f.chi);
        } else {
            ratio = dirichlet_L(2.0 - 2.0 * s, f.chi.conj()) / dirichlet_L(2.0 * s, f.chi);
        }
        val *= std::pow(ratio, f.multiplicity);
    }
    return val;
}

void ScatteringData::validate(int cusps) const {
    auto fail = [&](const std::string& what) {
        throw std::runtime_error("scattering constants for N = " + std::to_string(level) + ": " + what);
    };
    if (k < 0) fail("k must be non-negative");
    if (A && !(*A > 0)) fail("A must be positive");
    for (const CharacterFactor& f : characters) {
        if (f.multiplicity < 1) fail("character multiplicities must be positive");
        if (level > 0 && level % f.chi.modulus() != 0) fail("character modulus must divide N");
        const auto all = dirichlet_characters(f.chi.modulus());
        if (std::none_of(all.begin(), all.end(), [&](const DirichletCharacter& c) { return c == f.chi; }))
            fail("listed values are not a Dirichlet character modulo " + std::to_string(f.chi.modulus()));
    }
    for (const CharacterFactor& f : characters) {
        const DirichletCharacter bar = f.chi.conj();
        int mult = 0, mult_bar = 0;
        for (const CharacterFactor& g : characters) {
            if (g.chi == f.chi) mult += g.multiplicity;
            if (g.chi == bar) mult_bar += g.multiplicity;
        }
        if (mult != mult_bar) fail("characters are not closed under conjugation");
    }
    if (std::abs(trace_half) > cusps || (cusps - trace_half) % 2 != 0)
        fail("trace_half is not the trace of a symmetric involution of size m");
    const cdouble half = determinant(0.5);
    if (std::abs(std::abs(half) - 1.0) > 1e-8) fail("|phi(1/2)| differs from 1");
    const double sign = ((cusps - trace_half) / 2) % 2 == 0 ? 1.0 : -1.0;
    if (std::abs(half - sign) > 1e-8) fail("phi(1/2) does not match the determinant implied by trace_half");
    for (double r : {0.37, 2.9, 11.3}) {
        if (std::abs(std::abs(determinant(cdouble(0.5, r))) - 1.0) > 1e-8) fail("phi is not unitary on Re s = 1/2");
    }
    const double a = scattering_phase(0.73, *this).value;
    const double b = scattering_phase(-0.73, *this).value;
    if (std::abs(a - b) > 1e-9 * std::max(1.0, std::abs(a))) fail("phi'/phi(1/2 + ir) is not even in r");
}

nlohmann::json to_json(const ScatteringData& d) {
    nlohmann::json chars = nlohmann::json::array();
    for (const CharacterFactor& f : d.characters)
        chars.push_back(
            {{"modulus", f.chi.modulus()}, {"values", character_values_to_json(f.chi)}, {"multiplicity", f.multiplicity}});
    nlohmann::json j = {{"N", d.level},           {"k", d.k},
                        {"l", d.l},               {"characters", chars},
                        {"trace_half", d.trace_half}, {"note", d.note}};
    j["A"] = d.A ? nlohmann::json(*d.A) : nlohmann::json(nullptr);
    return j;
}

ScatteringData scattering_data_from_json(const nlohmann::json& j) {
    ScatteringData d;
    d.level = j.at("N").get<int>();
    d.k = j.at("k").get<int>();
    d.l = j.at("l").get<int>();
    if (j.contains("A") && !j.at("A").is_null()) d.A = j.at("A").get<double>();
    for (const auto& c : j.at("characters"))
        d.characters.push_back({character_from_json(c), c.value("multiplicity", 1)});
    d.trace_half = j.at("trace_half").get<int>();
    d.note = j.value("note", std::string());
    return d;
}

ScatteringData load_scattering_data(const std::string& path, int N) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open constants file " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("malformed constants file " + path + ": " + e.what());
    }
    const nlohmann::json list = j.is_array() ? j : nlohmann::json::array({j});
    for (const auto& entry : list)
        if (entry.at("N").get<int>() == N) return scattering_data_from_json(entry);
    throw std::runtime_error("constants file " + path + " has no entry for N = " + std::to_string(N));
}

std::string default_constants_path() { return std::string(WEYL_LAB_DATA_DIR) + "/huxley_constants.json"; }

PhaseValue scattering_phase(double r, const ScatteringData& data) {
    const cdouble ir(0.0, r);
    cdouble v = -static_cast<double>(data.k) * (digamma(0.5 - ir) + digamma(0.5 + ir));
    // The 1/(s - 1) poles of the two principal factors cancel on Re s = 1/2.
    for (const CharacterFactor& f : data.characters)
        v -= 2.0 * static_cast<double>(f.multiplicity) *
             (dirichlet_log_derivative_regular(1.0 - 2.0 * ir, f.chi.conj()) +
              dirichlet_log_derivative_regular(1.0 + 2.0 * ir, f.chi));
    PhaseValue out;
    if (data.A)
        v -= 2.0 * std::log(*data.A);
    else
        out.a_term_omitted = true;
    if (std::abs(v.imag()) > 1e-9 * std::max(1.0, std::abs(v.real())))
        throw std::runtime_error("phi'/phi(1/2 + ir) is not real");
    out.value = v.real();
    return out;
}

SlopeReport verify_scattering_log_bound(const ScatteringData& data, double r_max, int samples) {
    if (!(r_max > 1) || samples < 4) throw std::invalid_argument("log bound needs r_max > 1 and at least 4 samples");
    const std::vector<double> r = logspace(1.0, r_max, samples);
    std::vector<double> ratio(r.size());
    for (std::size_t i = 0; i < r.size(); ++i)
        ratio[i] = std::abs(scattering_phase(r[i], data).value) / std::log(2.0 + r[i]);
    const std::vector<double> sup = running_max(ratio);
    SlopeReport rep;
    rep.check = "scattering_log_bound";
    rep.n = 2;
    rep.samples = samples;
    rep.sup = sup.back();
    rep.slope = fit_loglog_tail(r, sup, 0.5).slope;
    rep.pass = rep.slope <= rep.threshold;
    return rep;
}

// ---------------------------------------------------------------- trace formula

double TraceFormulaEvaluation::scale() const {
    return std::max({std::abs(identity_term), std::abs(hyperbolic_term), std::abs(scattering_integral),
                     std::abs(scattering_half), std::abs(digamma_integral), std::abs(m_half_term),
                     std::abs(log2_term)});
}

SelbergTraceFormula::SelbergTraceFormula(TestFunction h, CongruenceGroup group, LengthSpectrum spectrum,
                                         ScatteringData scattering, double table_radius)
    : h_(std::move(h)), group_(group), spectrum_(std::move(spectrum)), scattering_(std::move(scattering)) {
    if (h_.rank() != 1) throw std::invalid_argument("the SL(2) trace formula needs a rank-one test function");
    if (!h_.even()) throw std::invalid_argument("the SL(2) trace formula needs an even test function");
    if (spectrum_.level != group_.level || scattering_.level != group_.level)
        throw std::invalid_argument("group, length spectrum and scattering data are for different levels");
    if (h_.support_radius() > spectrum_.validity_radius + 1e-12)
        throw std::invalid_argument("test-function support exceeds the range where the length spectrum is complete");
    scattering_.validate(group_.cusps);

    h0_ = h_.value_iso({0.0}).real();
    cutoff_ = transform_cutoff_of(h_, 1e-15);

    const double dx = 0.01;
    const int nx = static_cast<int>(std::ceil(cutoff_ / dx)) + 1;
    std::vector<double> hv(static_cast<std::size_t>(nx + 1)), cv(static_cast<std::size_t>(nx + 1), 0.0);
    for (int j = 0; j <= nx; ++j) hv[static_cast<std::size_t>(j)] = fourier_1d(h_, j * dx);
    const QuadratureRule small = gauss_legendre(8);
    for (int j = 1; j <= nx; ++j) {
        double s = 0;
        for (std::size_t i = 0; i < small.nodes.size(); ++i)
            s += small.weights[i] * fourier_1d(h_, (j - 1 + 0.5 * (small.nodes[i] + 1)) * dx);
        cv[static_cast<std::size_t>(j)] = cv[static_cast<std::size_t>(j - 1)] + 0.5 * dx * s / (2 * kPi);
    }
    hhat_ = LagrangeTable(hv, dx, 6, LagrangeTable::Beyond::zero, true);
    mass_ = LagrangeTable(cv, dx, 6, LagrangeTable::Beyond::hold, false);

    if (table_radius > 0) {
        const double dr = 0.01;
        const int nr = static_cast<int>(std::ceil(table_radius / dr)) + 1;
        std::vector<double> pv(static_cast<std::size_t>(nr + 1)), dv(static_cast<std::size_t>(nr + 1));
        for (int j = 0; j <= nr; ++j) {
            pv[static_cast<std::size_t>(j)] = scattering_phase(j * dr, scattering_).value;
            dv[static_cast<std::size_t>(j)] = digamma(cdouble(1.0, j * dr)).real();
        }
        phase_ = LagrangeTable(pv, dr, 10, LagrangeTable::Beyond::zero, true);
        digamma_ = LagrangeTable(dv, dr, 10, LagrangeTable::Beyond::zero, true);
        table_radius_ = table_radius;
    }
}

double SelbergTraceFormula::phase(double r) const {
    const double a = std::abs(r);
    if (a <= table_radius_) return phase_(a);
    return scattering_phase(a, scattering_).value;
}

double SelbergTraceFormula::digamma_real(double r) const {
    const double a = std::abs(r);
    if (a <= table_radius_) return digamma_(a);
    return digamma(cdouble(1.0, a)).real();
}

std::array<double, 3> SelbergTraceFormula::weighted_integrals(const std::function<double(double)>& f, double lo,
                                                              double hi) const {
    static const QuadratureRule ref = gauss_legendre(16);
    const double width = kPanelWidth;
    const int panels = std::max(1, static_cast<int>(std::ceil((hi - lo) / width)));
    const double w = (hi - lo) / panels;
    std::array<double, 3> acc{0, 0, 0};
    for (int p = 0; p < panels; ++p) {
        const double a = lo + p * w;
        for (std::size_t i = 0; i < ref.nodes.size(); ++i) {
            const double r = a + 0.5 * w * (ref.nodes[i] + 1);
            const double fw = 0.5 * w * ref.weights[i] * f(r);
            if (fw == 0.0) continue;
            acc[0] += fw * r * std::tanh(kPi * r);
            acc[1] += fw * phase(r);
            acc[2] += fw * digamma_real(r);
        }
    }
    return acc;
}

TraceFormulaEvaluation SelbergTraceFormula::evaluate(double t) const {
    const double X = cutoff_;
    const double m = group_.cusps;
    const auto ints = weighted_integrals([&](double r) { return hhat_(t - r); }, t - X, t + X);
    TraceFormulaEvaluation e;
    e.t = t;
    e.identity_term = group_.area / (2 * kPi) * ints[0];
    for (const LengthEntry& le : spectrum_.entries) {
        const double hv = h_.value_iso({le.length}).real();
        if (hv == 0.0) continue;
        e.hyperbolic_term += static_cast<double>(le.class_count) * le.primitive_length / std::sinh(0.5 * le.length) *
                             hv * std::cos(t * le.length);
    }
    e.scattering_integral = ints[1] / (2 * kPi);
    const double ht = hhat_(t);
    e.scattering_half = -0.5 * scattering_.trace_half * ht;
    e.digamma_integral = -m / kPi * ints[2];
    e.m_half_term = 0.5 * m * ht;
    e.log2_term = -2.0 * m * kLn2 * h0_;
    e.total = e.identity_term + e.hyperbolic_term + e.scattering_integral + e.scattering_half + e.digamma_integral +
              e.m_half_term + e.log2_term;
    return e;
}

double SelbergTraceFormula::constant_eigenfunction_term(double t) const {
    const double R = h_.support_radius();
    const int panels = std::max(8, static_cast<int>(std::ceil(8 * R)));
    return 4 * integrate_gl([&](double x) { return h_.value_iso({x}).real() * std::cosh(0.5 * x) * std::cos(t * x); },
                            0.0, R, panels);
}

SmoothedCount SelbergTraceFormula::smoothed_count(double lambda) const {
    if (!(lambda >= 0)) throw std::invalid_argument("lambda must be non-negative");
    const double X = cutoff_;
    const double m = group_.cusps;
    // C(x) = (1/2pi) int_0^x hhat is odd, so int_{-lambda}^{lambda} hhat(t - r) dt = 2 pi [C(lambda - r) + C(lambda + r)].
    auto C = [&](double x) { return x >= 0 ? mass_(x) : -mass_(-x); };
    auto W = [&](double r) { return 2 * kPi * (C(lambda - r) + C(lambda + r)); };
    // All three weights and W are even in r.
    const auto ints = weighted_integrals(W, 0.0, lambda + X);
    double raw = group_.area / (2 * kPi) * 2 * ints[0];
    raw += 2 * ints[1] / (2 * kPi);
    raw -= m / kPi * 2 * ints[2];
    raw += (0.5 * m - 0.5 * scattering_.trace_half) * 2 * kPi * 2 * C(lambda);
    for (const LengthEntry& le : spectrum_.entries) {
        const double hv = h_.value_iso({le.length}).real();
        if (hv == 0.0) continue;
        raw += static_cast<double>(le.class_count) * le.primitive_length / std::sinh(0.5 * le.length) * hv * 2 *
               std::sin(lambda * le.length) / le.length;
    }
    raw -= 2.0 * m * kLn2 * h0_ * 2 * lambda;

    SmoothedCount out;
    out.lambda = lambda;
    out.integral = raw / (2 * kPi * h0_);
    out.weyl_prediction = group_.area / (2 * kPi) * lambda * lambda;
    out.residual = out.integral - out.weyl_prediction;
    return out;
}

SmoothedCountReport SelbergTraceFormula::smoothed_count_experiment(const std::vector<double>& lambdas) const {
    if (lambdas.size() < 2) throw std::invalid_argument("the growth fit needs at least two lambda values");
    SmoothedCountReport rep;
    std::vector<double> x, y;
    for (double l : lambdas) {
        rep.rows.push_back(smoothed_count(l));
        x.push_back(l);
        y.push_back(std::abs(rep.rows.back().residual));
    }
    rep.exponent = fit_loglog(x, y).slope;
    rep.pass = rep.exponent <= rep.threshold;
    return rep;
}

TraceFormulaEvaluation geometric_side(const TestFunction& h, double t, const CongruenceGroup& group,
                                      const LengthSpectrum& spectrum, const ScatteringData& scattering) {
    const SelbergTraceFormula tf(h, group, spectrum, scattering, 0.0);
    return tf.evaluate(t);
}

std::string trace_formula_csv(const std::vector<TraceFormulaEvaluation>& rows) {
    std::ostringstream os;
    os << "t,identity,hyperbolic,scatter_int,scatter_half,digamma_int,m_half,log2,total\n";
    for (const auto& e : rows)
        os << format_double(e.t) << ',' << format_double(e.identity_term) << ',' << format_double(e.hyperbolic_term)
           << ',' << format_double(e.scattering_integral) << ',' << format_double(e.scattering_half) << ','
           << format_double(e.digamma_integral) << ',' << format_double(e.m_half_term) << ','
           << format_double(e.log2_term) << ',' << format_double(e.total) << '\n';
    return os.str();
}

std::string smoothed_count_csv(const std::vector<SmoothedCount>& rows) {
    std::ostringstream os;
    os << "lambda,integral,weyl_prediction,residual\n";
    for (const auto& c : rows)
        os << format_double(c.lambda) << ',' << format_double(c.integral) << ',' << format_double(c.weyl_prediction)
           << ',' << format_double(c.residual) << '\n';
    return os.str();
}

SpectralPoint selberg_to_spectral(double r) { return SpectralPoint({cdouble(0.0, r), cdouble(0.0, -r)}); }

double selberg_dual_norm(double r, const Form& form) {
    if (form.n() != 2) throw std::invalid_argument("the Selberg parameter lives on the n = 2 dual space");
    const SpectralPoint p = selberg_to_spectral(r);
    return form.dual_norm(std::span<const cdouble>(p.coords()));
}

}  // namespace weyl_lab
