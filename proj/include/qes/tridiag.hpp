#pragma once

#include <vector>

namespace qes {

struct SymTridiag {
    std::vector<double> diag;
    std::vector<double> offdiag;

    int size() const { return static_cast<int>(diag.size()); }
    double norm_inf() const;
    void validate() const;   // throws InvalidInput
};

// number of eigenvalues strictly below x
int sturm_count(const SymTridiag& m, double x);

// Gershgorin interval
void gershgorin(const SymTridiag& m, double& lo, double& hi);

std::vector<double> eigenvalues(const SymTridiag& m, double tol = 1e-12);

// det(m - xI) = mantissa * 2^exponent; rescaled every 8 steps
struct ScaledValue {
    double mantissa = 0.0;
    int exponent = 0;
    double value() const;
    int sign() const { return (mantissa > 0) - (mantissa < 0); }
};
ScaledValue charpoly_scaled(const SymTridiag& m, double x);
double charpoly(const SymTridiag& m, double x);

// unit eigenvector for an eigenvalue, first component made nonnegative
std::vector<double> eigenvector(const SymTridiag& m, double lambda);

struct EigenDecomposition {
    std::vector<double> values;
    std::vector<std::vector<double>> vectors;
};
EigenDecomposition eigen_decomposition(const SymTridiag& m, double tol = 1e-12);

std::vector<double> multiply(const SymTridiag& m, const std::vector<double>& v);

} // namespace qes
