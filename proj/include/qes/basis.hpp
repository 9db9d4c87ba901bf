#pragma once

#include "qes/laurent.hpp"

#include <array>
#include <string>
#include <vector>

namespace qes {

struct Interval {
    double lo;
    double hi;
};

enum class MapKind { Identity, Exp, ShiftedExp, Sech };

struct CoordinateMap {
    MapKind kind;
    std::string name;
    Interval x_domain;
    Interval y_domain;
    LaurentSum yprime_sq;
    LaurentSum ydoubleprime;

    double y_of_x(double x) const;
    double x_of_y(double y) const;
    double dydx(double x) const;

    static CoordinateMap identity();
    static CoordinateMap exponential();   // y = e^{-x}
    static CoordinateMap shifted_exp();   // y = 1 - 2e^{-x}
    static CoordinateMap sech();          // y = sech x
};

enum class WeightKind { PowerExp, BetaI, BetaII };

// PowerExp: y^g e^{-a y^b};  BetaI: y^g (1-y)^a;  BetaII: y^g (1-y^2)^{a/2}
struct WeightFamily {
    WeightKind kind;
    std::string name;
    double gamma;
    double alpha;
    double beta;
    Rational dlog;   // omega'/omega
    Rational d2log;  // omega''/omega

    double log_omega(double y) const;
    double omega(double y) const;

    static WeightFamily power_exp(double gamma, double alpha, double beta);
    static WeightFamily beta_one(double gamma, double alpha);
    static WeightFamily beta_two(double gamma, double alpha);
};

struct AbcFunctions {
    LaurentSum A;
    LaurentSum B;
    LaurentSum C;      // Laurent part of C
    Rational C_pole;   // pole part of C (empty numerator when C is Laurent)
};

AbcFunctions compute_abc(const CoordinateMap& map, const WeightFamily& weight);

enum class RecursionClass { Diagonal, OffDiagonalPlus, OffDiagonalMinus, Inadmissible };

std::string to_string(RecursionClass c);
RecursionClass classify(double sigma, double mu);

struct StructureChoice {
    double sigma;
    double mu;
    RecursionClass cls;
    bool underdetermined = false;
};

// All (sigma, mu) covering the A/B support with {sigma - mu, sigma, sigma + mu}.
// Entries whose sigma is not in {0, +mu, -mu} are kept and tagged Inadmissible.
std::vector<StructureChoice> enumerate_structures(const AbcFunctions& abc);

// index 0, 1, 2 <-> powers sigma - mu, sigma, sigma + mu
enum class Slot { Minus = 0, Center = 1, Plus = 2 };

struct PotentialFamily {
    LaurentSum forced;
    Rational forced_pole;
    std::array<double, 3> free_powers;
};

PotentialFamily derive_potential_family(const AbcFunctions& abc, const StructureChoice& s);

// C - v for the given free coefficients, Laurent part only (the pole part of C is forced into v)
LaurentSum c_minus_v(const AbcFunctions& abc, const PotentialFamily& fam, const std::array<double, 3>& v);

// true when every power of l lies in {sigma - mu, sigma, sigma + mu}
bool supported_on(const LaurentSum& l, const StructureChoice& s, double tol = kStructuralTol);

} // namespace qes
