#pragma once

#include <vector>

namespace qes {

// dense real polynomial, ascending powers
struct Polynomial {
    std::vector<double> c;

    Polynomial() = default;
    explicit Polynomial(std::vector<double> coeffs) : c(std::move(coeffs)) {}
    static Polynomial constant(double a) { return Polynomial({a}); }
    static Polynomial linear(double a0, double a1) { return Polynomial({a0, a1}); }

    int degree() const;   // -1 for the zero polynomial
    double operator()(double x) const;
    double abs_scale(double x) const;   // sum |c_k| |x|^k, the rounding scale of p(x)
    Polynomial derivative() const;
};

Polynomial operator+(const Polynomial& a, const Polynomial& b);
Polynomial operator-(const Polynomial& a, const Polynomial& b);
Polynomial operator*(const Polynomial& a, const Polynomial& b);
Polynomial operator*(double s, const Polynomial& a);

// determinant of a tridiagonal matrix given its diagonal and the products of opposite
// off-diagonal pairs: D_k = diag_k D_{k-1} - prod_{k-1} D_{k-2}
Polynomial continuant(const std::vector<Polynomial>& diag, const std::vector<Polynomial>& products);

struct RealRoot {
    double x;
    int multiplicity;
};

// low-order coefficients that vanish relative to the polynomial's size
int zero_root_multiplicity(const Polynomial& p, double rel_tol = 1e-10);

// all real roots, ascending, with multiplicity (double roots detected at critical points)
std::vector<RealRoot> real_roots(const Polynomial& p, double rel_tol = 1e-10);

} // namespace qes
