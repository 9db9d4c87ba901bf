#pragma once

#include "qes/constraints.hpp"
#include "qes/polynomial.hpp"
#include "qes/tridiag.hpp"

#include <optional>
#include <string>
#include <vector>

namespace qes {

// Symmetrized N x N block: energy block (diagonal class) or the Jacobi matrix of the
// parameter recurrence at eps (off-diagonal classes). Throws RealityViolation when a
// product b_n^2 (c_n^2) is negative.
SymTridiag block_matrix(const ConstrainedProblem& cp, double eps = 0.0);

// roots of det(m - xI) bracketed by sign changes on a uniform grid over the Gershgorin interval
std::vector<double> charpoly_roots(const SymTridiag& m);

// zeros of p_N isolated by bisection on the sign pattern of the forward sequence p_0..p_N
std::vector<double> roots_of_pN(const ConstrainedProblem& cp);

// |det(block - x)| over its rounding scale, x = eps (diagonal class) or C0v (off-diagonal)
double determinant_residual(const ConstrainedProblem& cp, double eps = 0.0);

struct SpectrumReport {
    std::vector<double> eigenvalues;   // recursion convention, ascending
    std::vector<double> physical;      // physical energies, same order
    std::vector<double> matrix;
    std::vector<double> charpoly;
    std::vector<double> pN;
    bool pN_applicable = true;
    double cross_residual = 0.0;       // max pairwise deviation between methods
    double spectral_radius = 0.0;
    std::vector<double> rejected;      // determinant roots outside the admissible range
    std::vector<double> det_residual;  // off-diagonal class: |det| / rounding scale at each root
    RealityBound bound;
    double cross_residual_rel() const { return cross_residual / std::max(1.0, spectral_radius); }
};

SpectrumReport energy_spectrum(const ConstrainedProblem& cp);

// determinant of the parameter-recurrence block as a polynomial in eps (off-diagonal classes)
Polynomial energy_determinant(const ConstrainedProblem& cp);

struct ParameterValue {
    double value;         // user units (the spectral parameter)
    int multiplicity;
    double coefficient;   // the free coefficient in its slot
};

struct ParameterSpectrum {
    std::string parameter;
    Slot slot = Slot::Center;
    std::string shape;                  // "diagonal" or "off-diagonal-scaling"
    double eps_N = 0.0;                 // recursion convention
    double physical_energy = 0.0;
    std::vector<ParameterValue> values; // ascending
    bool real = true;                   // Jacobi form was real symmetric
    std::vector<double> rejected;       // roots violating reality (coefficient units)
    std::string diagnostic;

    std::vector<double> flat() const;   // values repeated by multiplicity
};

ParameterSpectrum parameter_spectrum(const ConstrainedProblem& cp);

// problem with the spectral slot set to the coefficient of a parameter-spectrum value
ConstrainedProblem at_parameter(const ConstrainedProblem& cp, const ParameterSpectrum& ps, const ParameterValue& v);

} // namespace qes
