#pragma once

#include "qes/constraints.hpp"

#include <vector>

namespace qes {

struct ClosedFormWavefunction {
    CoordinateMap map;
    WeightFamily weight;
    double sigma = 0.0;
    double mu = 1.0;
    std::vector<double> p;      // p_0 .. p_{N-1}
    double eps = 0.0;           // recursion convention
    double energy = 0.0;        // physical, including the offset
    LaurentSum potential;       // Laurent part of v, constant slot excluded
    Rational potential_pole;
    double energy_offset = 0.0;
    double edge_lower = 0.0;    // equation m = -1 left unsatisfied by the truncation
    double edge_upper = 0.0;    // equation m = N
    bool upper_claimed = false; // the constraint itself makes equation m = N vanish

    double psi(double x) const;
    double psi_dd(double x) const;        // analytic second derivative
    double psi_majorant(double x) const;  // omega sum |p_n| y^{mu n}
    double potential_at(double x) const;  // v(x) including the constant slot
    double residual(double x) const;      // psi'' - (v - E) psi
    double edge_residual(double x) const; // part of the residual predicted by the unclaimed edge equations
    bool pointwise_exact(double rel_tol = 1e-10) const;
};

// pre: eps on the spectrum (energy-spectrum constraints) or eps_N (energy-fixing ones).
// On the spectrum the table comes from the block eigenvector (same values as the recursion, without
// its forward instability); off the spectrum from the recursion itself.
// Throws SingularEvaluation when the coefficient recursion degenerates.
ClosedFormWavefunction assemble(const ConstrainedProblem& cp, double eps);

struct GridSpec {
    int points = 200;
    double margin = 1e-3;
    double cutoff = 1e-8;   // grid covers |psi| >= cutoff * max |psi|
};

struct ResidualReport {
    double raw = 0.0;        // max_x |psi'' - (v-E) psi| / local scale (see schrodinger_residual)
    double interior = 0.0;   // same after removing the predicted edge part
    double x_lo = 0.0, x_hi = 0.0;
    int points = 0;
    bool pointwise_exact = false;
};

std::vector<double> residual_grid(const ClosedFormWavefunction& psi, const GridSpec& g = {});
ResidualReport schrodinger_residual(const ClosedFormWavefunction& psi, const GridSpec& g = {});

// central differences with one Richardson step
double fd_second_derivative(const ClosedFormWavefunction& psi, double x, double h = 1e-4);

// integral of psi^2 over the x-domain; DivergenceError when psi fails to vanish at a finite
// endpoint or to decay at infinity
double l2_norm(const ClosedFormWavefunction& psi);

} // namespace qes
