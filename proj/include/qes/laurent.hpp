#pragma once

#include <string>
#include <vector>

namespace qes {

inline constexpr double kPowerTol = 1e-9;
inline constexpr double kCombineTol = 1e-12;
inline constexpr double kStructuralTol = 1e-9;

struct Monomial {
    double coeff;
    double power;
};

// Finite sum of c*y^p with real p. Terms sorted by strictly increasing power.
class LaurentSum {
public:
    LaurentSum() = default;

    static LaurentSum constant(double c);
    static LaurentSum monomial(double c, double p);

    const std::vector<Monomial>& terms() const { return terms_; }
    bool empty() const { return terms_.empty(); }
    std::size_t size() const { return terms_.size(); }

    double coeff_at(double power) const;
    double max_abs_coeff() const;
    double min_power() const;
    double max_power() const;
    bool integer_powers() const;

    double operator()(double y) const;

    LaurentSum operator-() const;
    LaurentSum scaled(double s) const;
    LaurentSum shifted(double dp) const; // multiply by y^dp

    std::string str() const;

    friend LaurentSum normalize(std::vector<Monomial> terms, double tol, double scale);

private:
    std::vector<Monomial> terms_;
};

// drop threshold is tol*max(scale, largest input |coeff|)
LaurentSum normalize(std::vector<Monomial> terms, double tol = kCombineTol, double scale = 0.0);

LaurentSum add(const LaurentSum& a, const LaurentSum& b);
LaurentSum multiply(const LaurentSum& a, const LaurentSum& b);
LaurentSum derivative_in_y(const LaurentSum& a);
double evaluate(const LaurentSum& a, double y);
LaurentSum power(const LaurentSum& a, int k);

inline LaurentSum operator+(const LaurentSum& a, const LaurentSum& b) { return add(a, b); }
inline LaurentSum operator-(const LaurentSum& a, const LaurentSum& b) { return add(a, -b); }
inline LaurentSum operator*(const LaurentSum& a, const LaurentSum& b) { return multiply(a, b); }
inline LaurentSum operator*(double s, const LaurentSum& a) { return a.scaled(s); }

// num / base^k, with base a polynomial (nonnegative integer powers) and base(0) != 0.
// Only ratios over a single base are needed by the catalog weights.
struct Rational {
    LaurentSum num;
    LaurentSum base = LaurentSum::constant(1.0);
    int k = 0;

    static Rational of(const LaurentSum& l) { return {l, LaurentSum::constant(1.0), 0}; }
    double operator()(double y) const;
};

Rational add(const Rational& a, const Rational& b);
Rational multiply(const Rational& a, const Rational& b);
Rational multiply(const LaurentSum& a, const Rational& b);
Rational derivative_in_y(const Rational& a);

// Split r into a Laurent part and a proper pole part pole.num/pole.base^pole.k
// (pole.num has degree < deg(base^k)). When base = 1 - y^m and the pole is c/base,
// it is rewritten as c + c*y^m/base so that the pole part vanishes at y = 0
// (the csch^2 = y^2/(1-y^2) convention).
struct SplitRational {
    LaurentSum laurent;
    Rational pole;
    bool has_pole() const { return !pole.num.empty(); }
};
SplitRational split(const Rational& r, double scale = 0.0);

} // namespace qes
