#pragma once

#include "qes/basis.hpp"
#include "qes/recursion.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace qes {

enum class ConstraintKind { DiagA, DiagB, OffMinusParam, OffMinusEnergy, OffPlusParam, OffPlusEnergy };

std::string to_string(ConstraintKind k);
std::optional<ConstraintKind> constraint_from_string(const std::string& s);
bool is_energy_kind(ConstraintKind k);   // fixes eps_N, yields a parameter spectrum
RecursionClass class_of(ConstraintKind k);

using ParamMap = std::map<std::string, double>;

struct ProblemDefinition {
    std::string name;
    CoordinateMap map;
    WeightFamily weight;
    StructureChoice structure;
    AbcFunctions abc;
    PotentialFamily family;
    // free coefficients at sigma - mu, sigma, sigma + mu; unset = solved by a constraint or unknown
    std::array<std::optional<double>, 3> v;
    std::array<std::string, 3> v_names;
    double energy_offset = 0.0;
    ParamMap params;
    int N = 0;
    std::optional<ConstraintKind> constraint;
    std::vector<ConstraintKind> allowed;
    std::map<ConstraintKind, std::string> exact_models;
    // parameter spectrum bookkeeping
    std::optional<Slot> spectral_slot;
    std::string spectral_name;
    double spectral_scale = 1.0;   // off-diagonal-scaling shape: user value = +-sqrt|u| * scale
    double spectral_u_sign = 1.0;  // ... real only when u has this sign

    std::array<double, 3> v_values() const;   // unset -> 0
    RecursionCoefficients recursion() const;
    LaurentSum potential_laurent() const;      // forced + free terms, constant slot excluded
    Rational potential_pole() const { return family.forced_pole; }
    int constant_slot() const;                 // slot at power 0, or -1
};

std::vector<std::string> catalog_names();

// Builds a catalog entry. N and constraint may be absent (classification only). Throws
// ConfigError naming the field when a required parameter is missing or conflicts.
ProblemDefinition make_problem(const std::string& name, const ParamMap& params, int N = 0,
                               std::optional<ConstraintKind> constraint = std::nullopt);

} // namespace qes
