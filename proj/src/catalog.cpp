#include "qes/catalog.hpp"
#include "qes/errors.hpp"

#include <algorithm>
#include <cmath>

namespace qes {

std::string to_string(ConstraintKind k) {
    switch (k) {
    case ConstraintKind::DiagA: return "diag_a";
    case ConstraintKind::DiagB: return "diag_b";
    case ConstraintKind::OffMinusParam: return "offminus_param";
    case ConstraintKind::OffMinusEnergy: return "offminus_energy";
    case ConstraintKind::OffPlusParam: return "offplus_param";
    case ConstraintKind::OffPlusEnergy: return "offplus_energy";
    }
    return "?";
}

std::optional<ConstraintKind> constraint_from_string(const std::string& s) {
    for (auto k : {ConstraintKind::DiagA, ConstraintKind::DiagB, ConstraintKind::OffMinusParam,
                   ConstraintKind::OffMinusEnergy, ConstraintKind::OffPlusParam, ConstraintKind::OffPlusEnergy})
        if (to_string(k) == s) return k;
    return std::nullopt;
}

bool is_energy_kind(ConstraintKind k) {
    return k == ConstraintKind::OffMinusEnergy || k == ConstraintKind::OffPlusEnergy;
}

RecursionClass class_of(ConstraintKind k) {
    switch (k) {
    case ConstraintKind::DiagA:
    case ConstraintKind::DiagB: return RecursionClass::Diagonal;
    case ConstraintKind::OffMinusParam:
    case ConstraintKind::OffMinusEnergy: return RecursionClass::OffDiagonalMinus;
    default: return RecursionClass::OffDiagonalPlus;
    }
}

std::array<double, 3> ProblemDefinition::v_values() const {
    return {v[0].value_or(0.0), v[1].value_or(0.0), v[2].value_or(0.0)};
}

int ProblemDefinition::constant_slot() const {
    for (int i = 0; i < 3; ++i)
        if (std::abs(family.free_powers[i]) <= kPowerTol) return i;
    return -1;
}

RecursionCoefficients ProblemDefinition::recursion() const {
    return RecursionCoefficients(abc_coefficients(abc, family, structure, v_values()), energy_offset);
}

LaurentSum ProblemDefinition::potential_laurent() const {
    std::vector<Monomial> t(family.forced.terms());
    const int c = constant_slot();
    for (int i = 0; i < 3; ++i)
        if (i != c && v[i]) t.push_back({*v[i], family.free_powers[i]});
    return normalize(std::move(t), 0.0);
}

std::vector<std::string> catalog_names() {
    return {"bender_dunne",     "sextic_partner",  "morse_rising_exp", "oscillator_inverse_quartic",
            "coulomb_plus_oscillator", "morse_half_power", "hulthen_like_I1", "hyperbolic_II1",
            "sech_II2",          "sech4_II3"};
}

namespace {

using K = ConstraintKind;

struct Builder {
    const ParamMap& in;
    ProblemDefinition d;

    double need(const std::string& k) const {
        auto it = in.find(k);
        if (it == in.end()) throw ConfigError("missing parameter: " + k);
        return it->second;
    }
    std::optional<double> opt(const std::string& k) const {
        auto it = in.find(k);
        if (it == in.end()) return std::nullopt;
        return it->second;
    }
    bool has(const std::string& k) const { return in.count(k) > 0; }
    // either the direct coefficient or a reparametrization through another key
    double either(const std::string& k, const std::string& alt, auto&& from_alt) const {
        if (has(k) && has(alt)) throw ConfigError("give only one of " + k + ", " + alt);
        if (has(k)) return need(k);
        if (has(alt)) return from_alt(need(alt));
        throw ConfigError("missing parameter: " + k + " (or " + alt + ")");
    }
    std::optional<double> maybe(const std::string& k, const std::string& alt, auto&& from_alt) const {
        if (!has(k) && !has(alt)) return std::nullopt;
        return either(k, alt, from_alt);
    }
    void solved(Slot s, std::initializer_list<const char*> keys) {
        for (const char* k : keys)
            if (has(k))
                throw ConfigError("parameter " + std::string(k) + " is fixed by the constraint " +
                                  to_string(*d.constraint));
        d.v[static_cast<int>(s)].reset();
    }
    void spectral(Slot s, const std::string& name, double scale, std::initializer_list<const char*> keys) {
        solved(s, keys);
        d.spectral_slot = s;
        d.spectral_name = name;
        d.spectral_scale = scale;
    }
    void set(Slot s, std::optional<double> x) { d.v[static_cast<int>(s)] = x; }
    bool is(K k) const { return d.constraint && *d.constraint == k; }

    void setup(const std::string& name, CoordinateMap map, WeightFamily w, double sigma, double mu,
               std::array<std::string, 3> names, std::vector<K> allowed) {
        d.name = name;
        d.map = std::move(map);
        d.weight = std::move(w);
        d.abc = compute_abc(d.map, d.weight);
        const auto st = enumerate_structures(d.abc);
        auto it = std::find_if(st.begin(), st.end(), [&](const StructureChoice& c) {
            return std::abs(c.sigma - sigma) <= kPowerTol && std::abs(c.mu - mu) <= kPowerTol;
        });
        if (it == st.end()) throw StructuralError(name + ": declared structure not admissible");
        d.structure = *it;
        d.family = derive_potential_family(d.abc, d.structure);
        d.v_names = std::move(names);
        d.allowed = std::move(allowed);
        if (d.constraint && std::find(d.allowed.begin(), d.allowed.end(), *d.constraint) == d.allowed.end())
            throw ConfigError("constraint " + to_string(*d.constraint) + " is not available for " + name);
    }
};

void bender_dunne(Builder& b) {
    const double a = b.need("alpha"), g = b.need("gamma");
    b.setup("bender_dunne", CoordinateMap::identity(), WeightFamily::power_exp(g, a, 4), 0, 2, {"v1", "v3", "v2"},
            {K::DiagA});
    b.set(Slot::Minus, b.opt("v1").value_or(g * (g - 1)));
    b.set(Slot::Center, b.opt("v3").value_or(0.0));
    if (b.is(K::DiagA)) b.solved(Slot::Plus, {"v2", "xi"});
    else b.set(Slot::Plus, b.opt("v2"));
}

void sextic_partner(Builder& b) {
    const double a = b.need("alpha"), g = b.need("gamma");
    b.setup("sextic_partner", CoordinateMap::identity(), WeightFamily::power_exp(g, a, 4), 0, 2, {"v1", "v3", "v2"},
            {K::DiagB});
    b.set(Slot::Center, b.opt("v3").value_or(0.0));
    const auto xi = [&](double x) { return -4 * a * (2 * g + 3) + 16 * a * x; };
    if (b.is(K::DiagB)) {
        b.solved(Slot::Minus, {"v1"});
        b.set(Slot::Plus, b.either("v2", "xi", xi));
    } else {
        b.set(Slot::Minus, b.opt("v1"));
        b.set(Slot::Plus, b.maybe("v2", "xi", xi));
    }
}

void morse_rising_exp(Builder& b) {
    const double a = b.need("alpha"), g = b.need("gamma"), beta = b.opt("beta").value_or(1.0);
    b.setup("morse_rising_exp", CoordinateMap::exponential(), WeightFamily::power_exp(g, a, beta), 0, beta,
            {"v2", "v3", "v1"}, {K::DiagA, K::DiagB});
    b.d.exact_models[K::DiagB] = "Morse";
    b.set(Slot::Center, b.opt("v3").value_or(0.0));
    const auto xi = [](double x) { return -x; };
    if (b.is(K::DiagA)) {
        b.set(Slot::Minus, b.either("v2", "xi", xi));
        b.solved(Slot::Plus, {"v1"});
    } else if (b.is(K::DiagB)) {
        b.solved(Slot::Minus, {"v2", "xi"});
        b.set(Slot::Plus, b.need("v1"));
    } else {
        b.set(Slot::Minus, b.maybe("v2", "xi", xi));
        b.set(Slot::Plus, b.opt("v1"));
    }
}

void oscillator_inverse_quartic(Builder& b) {
    const double a = b.need("alpha"), g = b.need("gamma");
    b.setup("oscillator_inverse_quartic", CoordinateMap::identity(), WeightFamily::power_exp(g, a, 2), -2, 2,
            {"v3", "v1", "v0"}, {K::OffMinusEnergy, K::OffMinusParam});
    b.d.exact_models[K::OffMinusParam] = "harmonic oscillator";
    b.set(Slot::Center, b.either("v1", "ell", [](double l) { return l * (l + 1); }));
    b.set(Slot::Plus, 0.0);
    const auto xi = [&](double x) { return -2 * a * x * x; };
    if (b.is(K::OffMinusEnergy)) {
        b.spectral(Slot::Minus, "xi", 1.0 / std::sqrt(2 * a), {"v3", "xi"});
        b.d.spectral_u_sign = -1.0;   // v3 = -2 alpha xi^2
    }
    else if (b.is(K::OffMinusParam)) b.solved(Slot::Minus, {"v3", "xi"});
    else b.set(Slot::Minus, b.maybe("v3", "xi", xi));
}

void coulomb_plus_oscillator(Builder& b) {
    const double a = b.need("alpha"), g = b.need("gamma");
    b.setup("coulomb_plus_oscillator", CoordinateMap::identity(), WeightFamily::power_exp(g, a, 2), -1, 1,
            {"v1", "v3", "v0"}, {K::OffMinusParam, K::OffMinusEnergy});
    b.set(Slot::Plus, 0.0);
    const auto ell = [](double l) { return l * (l + 1); };
    if (b.is(K::OffMinusParam)) {
        b.solved(Slot::Minus, {"v1", "ell"});
        b.set(Slot::Center, b.need("v3"));
    } else if (b.is(K::OffMinusEnergy)) {
        b.set(Slot::Minus, b.either("v1", "ell", ell));
        b.spectral(Slot::Center, "v3", 1.0, {"v3"});
    } else {
        b.set(Slot::Minus, b.maybe("v1", "ell", ell));
        b.set(Slot::Center, b.opt("v3"));
    }
}

void morse_half_power(Builder& b) {
    const double a = b.need("alpha"), g = b.need("gamma");
    b.setup("morse_half_power", CoordinateMap::exponential(), WeightFamily::power_exp(g, a, 1), 0.5, 0.5,
            {"v0", "v2", "v1"}, {K::OffPlusParam, K::OffPlusEnergy});
    b.set(Slot::Minus, 0.0);
    const auto xi = [&](double x) { return -a * (2 * g + 1) + a * x; };
    if (b.is(K::OffPlusParam)) {
        b.solved(Slot::Plus, {"v1", "xi"});
        b.set(Slot::Center, b.need("v2"));
    } else if (b.is(K::OffPlusEnergy)) {
        b.set(Slot::Plus, b.either("v1", "xi", xi));
        b.spectral(Slot::Center, "v2", 1.0, {"v2"});
    } else {
        b.set(Slot::Plus, b.maybe("v1", "xi", xi));
        b.set(Slot::Center, b.opt("v2"));
    }
}

void hulthen_like_I1(Builder& b) {
    const double a = b.need("alpha"), g = b.need("gamma");
    b.setup("hulthen_like_I1", CoordinateMap::shifted_exp(), WeightFamily::beta_one(g, a), -1, 1, {"v2", "v1", "v0"},
            {K::OffMinusParam, K::OffMinusEnergy});
    b.set(Slot::Plus, 0.0);
    const int N = b.d.N;
    const auto xi = [&](double x) {
        if (N < 1) throw ConfigError("xi needs N");
        return (N + g) * (N + g - 1) + x * x;
    };
    if (b.is(K::OffMinusParam)) {
        b.solved(Slot::Minus, {"v2", "xi"});
        b.set(Slot::Center, b.need("v1"));
    } else if (b.is(K::OffMinusEnergy)) {
        b.set(Slot::Minus, b.either("v2", "xi", xi));
        b.spectral(Slot::Center, "v1", 1.0, {"v1"});
    } else {
        b.set(Slot::Minus, b.maybe("v2", "xi", xi));
        b.set(Slot::Center, b.opt("v1"));
    }
}

void hyperbolic_II1(Builder& b) {
    const double a = b.need("alpha"), g = b.need("gamma");
    b.setup("hyperbolic_II1", CoordinateMap::sech(), WeightFamily::beta_two(g, a), 0, 2, {"v2", "v0", "v1"},
            {K::DiagA, K::DiagB});
    b.d.exact_models[K::DiagB] = "Poschl-Teller";
    b.set(Slot::Center, 0.0);
    if (b.is(K::DiagA)) {
        b.set(Slot::Minus, b.need("v2"));
        b.solved(Slot::Plus, {"v1"});
    } else if (b.is(K::DiagB)) {
        b.solved(Slot::Minus, {"v2"});
        b.set(Slot::Plus, b.need("v1"));
    } else {
        b.set(Slot::Minus, b.opt("v2"));
        b.set(Slot::Plus, b.opt("v1"));
    }
}

void sech_II2(Builder& b) {
    const double a = b.need("alpha"), g = b.need("gamma");
    b.setup("sech_II2", CoordinateMap::sech(), WeightFamily::beta_two(g, a), 1, 1, {"v0", "v2", "v1"},
            {K::OffPlusParam, K::OffPlusEnergy});
    b.set(Slot::Minus, 0.0);
    const auto xi = [&](double x) { return -(g + a) * (g + a + 1) + x * x; };
    if (b.is(K::OffPlusParam)) {
        b.solved(Slot::Plus, {"v1", "xi"});
        b.set(Slot::Center, b.need("v2"));
    } else if (b.is(K::OffPlusEnergy)) {
        b.set(Slot::Plus, b.either("v1", "xi", xi));
        b.spectral(Slot::Center, "v2", 1.0, {"v2"});
    } else {
        b.set(Slot::Plus, b.maybe("v1", "xi", xi));
        b.set(Slot::Center, b.opt("v2"));
    }
}

void sech4_II3(Builder& b) {
    const double a = b.need("alpha"), g = b.need("gamma");
    b.setup("sech4_II3", CoordinateMap::sech(), WeightFamily::beta_two(g, a), 2, 2, {"v0", "v1", "v2"},
            {K::OffPlusParam, K::OffPlusEnergy});
    b.d.exact_models[K::OffPlusParam] = "Poschl-Teller";
    b.set(Slot::Minus, 0.0);
    if (b.is(K::OffPlusParam)) {
        b.solved(Slot::Plus, {"v2"});
        b.set(Slot::Center, b.need("v1"));
    } else if (b.is(K::OffPlusEnergy)) {
        b.set(Slot::Plus, b.need("v2"));
        b.spectral(Slot::Center, "v1", 1.0, {"v1"});
    } else {
        b.set(Slot::Plus, b.opt("v2"));
        b.set(Slot::Center, b.opt("v1"));
    }
}

} // namespace

ProblemDefinition make_problem(const std::string& name, const ParamMap& params, int N,
                               std::optional<ConstraintKind> constraint) {
    if (constraint && N < 1) throw ConfigError("N must be a positive integer");
    Builder b{params, {}};
    b.d.params = params;
    b.d.N = N;
    b.d.constraint = constraint;
    if (name == "bender_dunne") bender_dunne(b);
    else if (name == "sextic_partner") sextic_partner(b);
    else if (name == "morse_rising_exp") morse_rising_exp(b);
    else if (name == "oscillator_inverse_quartic") oscillator_inverse_quartic(b);
    else if (name == "coulomb_plus_oscillator") coulomb_plus_oscillator(b);
    else if (name == "morse_half_power") morse_half_power(b);
    else if (name == "hulthen_like_I1") hulthen_like_I1(b);
    else if (name == "hyperbolic_II1") hyperbolic_II1(b);
    else if (name == "sech_II2") sech_II2(b);
    else if (name == "sech4_II3") sech4_II3(b);
    else throw ConfigError("unknown problem: " + name);

    // a free coefficient at power 0 is an energy shift
    const int c = b.d.constant_slot();
    if (c >= 0 && b.d.v[c]) {
        b.d.energy_offset = *b.d.v[c];
        b.d.v[c] = 0.0;
    }
    return b.d;
}

} // namespace qes
