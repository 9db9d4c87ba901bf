#include "qes/basis.hpp"
#include "qes/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace qes {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

LaurentSum L(std::vector<Monomial> t) { return normalize(std::move(t)); }

bool near(double a, double b) { return std::abs(a - b) <= kPowerTol; }
} // namespace

double CoordinateMap::y_of_x(double x) const {
    switch (kind) {
    case MapKind::Identity: return x;
    case MapKind::Exp: return std::exp(-x);
    case MapKind::ShiftedExp: return 1.0 - 2.0 * std::exp(-x);
    case MapKind::Sech: return 1.0 / std::cosh(x);
    }
    return 0.0;
}

double CoordinateMap::x_of_y(double y) const {
    switch (kind) {
    case MapKind::Identity: return y;
    case MapKind::Exp: return -std::log(y);
    case MapKind::ShiftedExp: return -std::log((1.0 - y) / 2.0);
    case MapKind::Sech: return std::acosh(1.0 / y);
    }
    return 0.0;
}

double CoordinateMap::dydx(double x) const {
    switch (kind) {
    case MapKind::Identity: return 1.0;
    case MapKind::Exp: return -std::exp(-x);
    case MapKind::ShiftedExp: return 2.0 * std::exp(-x);
    case MapKind::Sech: return -std::tanh(x) / std::cosh(x);
    }
    return 0.0;
}

CoordinateMap CoordinateMap::identity() {
    return {MapKind::Identity, "identity", {0.0, kInf}, {0.0, kInf}, L({{1, 0}}), {}};
}

CoordinateMap CoordinateMap::exponential() {
    return {MapKind::Exp, "exp", {-kInf, kInf}, {0.0, kInf}, L({{1, 2}}), L({{1, 1}})};
}

CoordinateMap CoordinateMap::shifted_exp() {
    // y' = 1 - y, y'' = y - 1
    return {MapKind::ShiftedExp, "shifted_exp", {std::log(2.0), kInf}, {0.0, 1.0},
            L({{1, 0}, {-2, 1}, {1, 2}}), L({{-1, 0}, {1, 1}})};
}

CoordinateMap CoordinateMap::sech() {
    return {MapKind::Sech, "sech", {0.0, kInf}, {0.0, 1.0}, L({{1, 2}, {-1, 4}}), L({{1, 1}, {-2, 3}})};
}

double WeightFamily::log_omega(double y) const {
    switch (kind) {
    case WeightKind::PowerExp: return gamma * std::log(y) - alpha * std::pow(y, beta);
    case WeightKind::BetaI: return gamma * std::log(y) + alpha * std::log1p(-y);
    case WeightKind::BetaII: return gamma * std::log(y) + 0.5 * alpha * std::log1p(-y * y);
    }
    return 0.0;
}

double WeightFamily::omega(double y) const { return std::exp(log_omega(y)); }

namespace {
Rational second_log(const Rational& dlog) { return add(multiply(dlog, dlog), derivative_in_y(dlog)); }
} // namespace

WeightFamily WeightFamily::power_exp(double g, double a, double b) {
    const Rational d = Rational::of(L({{g, -1}, {-a * b, b - 1}}));
    return {WeightKind::PowerExp, "power_exp", g, a, b, d, second_log(d)};
}

WeightFamily WeightFamily::beta_one(double g, double a) {
    // g/y - a/(1-y) = (g y^{-1} - (g + a)) / (1 - y)
    const Rational d{L({{g, -1}, {-(g + a), 0}}), L({{1, 0}, {-1, 1}}), 1};
    return {WeightKind::BetaI, "beta_one", g, a, 0.0, d, second_log(d)};
}

WeightFamily WeightFamily::beta_two(double g, double a) {
    // g/y - a y/(1-y^2) = (g y^{-1} - (g + a) y) / (1 - y^2)
    const Rational d{L({{g, -1}, {-(g + a), 1}}), L({{1, 0}, {-1, 2}}), 1};
    return {WeightKind::BetaII, "beta_two", g, a, 0.0, d, second_log(d)};
}

AbcFunctions compute_abc(const CoordinateMap& map, const WeightFamily& w) {
    const LaurentSum yinv = LaurentSum::monomial(1.0, -1.0);
    AbcFunctions r;
    r.A = multiply(map.yprime_sq, LaurentSum::monomial(1.0, -2.0));

    const Rational bnum = add(Rational::of(map.ydoubleprime), multiply(map.yprime_sq.scaled(2.0), w.dlog));
    const SplitRational bs = split(multiply(yinv, bnum));
    if (bs.has_pole()) throw StructuralError("compute_abc: B is not a Laurent sum for " + map.name + "/" + w.name);
    r.B = bs.laurent;

    const Rational c = add(multiply(map.yprime_sq, w.d2log), multiply(map.ydoubleprime, w.dlog));
    const SplitRational cs = split(c);
    r.C = cs.laurent;
    r.C_pole = cs.pole;
    return r;
}

std::string to_string(RecursionClass c) {
    switch (c) {
    case RecursionClass::Diagonal: return "diagonal";
    case RecursionClass::OffDiagonalPlus: return "off_diagonal_plus";
    case RecursionClass::OffDiagonalMinus: return "off_diagonal_minus";
    case RecursionClass::Inadmissible: return "inadmissible";
    }
    return "?";
}

RecursionClass classify(double sigma, double mu) {
    if (near(sigma, 0.0)) return RecursionClass::Diagonal;
    if (mu > 0 && near(sigma, mu)) return RecursionClass::OffDiagonalPlus;
    if (mu > 0 && near(sigma, -mu)) return RecursionClass::OffDiagonalMinus;
    return RecursionClass::Inadmissible;
}

bool supported_on(const LaurentSum& l, const StructureChoice& s, double tol) {
    const double scale = std::max(1.0, l.max_abs_coeff());
    for (const auto& t : l.terms()) {
        const bool in = near(t.power, s.sigma) || near(t.power, s.sigma - s.mu) || near(t.power, s.sigma + s.mu);
        if (!in && std::abs(t.coeff) > tol * scale) return false;
    }
    return true;
}

std::vector<StructureChoice> enumerate_structures(const AbcFunctions& abc) {
    std::vector<double> p;
    for (const auto* l : {&abc.A, &abc.B})
        for (const auto& t : l->terms())
            if (std::none_of(p.begin(), p.end(), [&](double q) { return near(q, t.power); })) p.push_back(t.power);
    std::sort(p.begin(), p.end());

    std::vector<StructureChoice> out;
    if (p.empty()) return out;
    if (p.size() == 1) {
        out.push_back({p[0], 0.0, near(p[0], 0.0) ? RecursionClass::Diagonal : RecursionClass::Inadmissible, true});
        return out;
    }

    std::vector<double> mus, sigmas = p;
    for (std::size_t i = 0; i < p.size(); ++i)
        for (std::size_t j = i + 1; j < p.size(); ++j) {
            const double g = p[j] - p[i];
            mus.push_back(g);
            mus.push_back(g / 2);
            sigmas.push_back((p[i] + p[j]) / 2);
        }
    for (double mu : mus)
        for (double sg : sigmas) {
            const bool covers = std::all_of(p.begin(), p.end(), [&](double q) {
                return near(q, sg) || near(q, sg - mu) || near(q, sg + mu);
            });
            if (!covers) continue;
            const bool dup = std::any_of(out.begin(), out.end(),
                                         [&](const StructureChoice& c) { return near(c.sigma, sg) && near(c.mu, mu); });
            if (!dup) out.push_back({sg, mu, classify(sg, mu)});
        }
    std::sort(out.begin(), out.end(), [](const StructureChoice& a, const StructureChoice& b) {
        if (!near(a.mu, b.mu)) return a.mu > b.mu;
        return a.sigma < b.sigma;
    });
    return out;
}

PotentialFamily derive_potential_family(const AbcFunctions& abc, const StructureChoice& s) {
    PotentialFamily f;
    f.free_powers = {s.sigma - s.mu, s.sigma, s.sigma + s.mu};
    std::vector<Monomial> forced;
    for (const auto& t : abc.C.terms()) {
        const bool in = std::any_of(f.free_powers.begin(), f.free_powers.end(), [&](double q) { return near(q, t.power); });
        if (!in) forced.push_back(t);
    }
    f.forced = normalize(std::move(forced));
    f.forced_pole = abc.C_pole;
    return f;
}

LaurentSum c_minus_v(const AbcFunctions& abc, const PotentialFamily& fam, const std::array<double, 3>& v) {
    std::vector<Monomial> t;
    for (int i = 0; i < 3; ++i) t.push_back({-v[i], fam.free_powers[i]});
    return normalize(std::move(t), 0.0) + (abc.C - fam.forced);
}

} // namespace qes
