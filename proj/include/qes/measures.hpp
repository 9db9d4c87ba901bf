#pragma once

#include "qes/spectra.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace qes {

struct DiscreteMeasure {
    std::vector<double> support;
    std::vector<double> weights;
    bool signed_weights = false;   // built from a recurrence with negative products
    double total() const;
};

// support = eigenvalues, weight = squared first eigenvector component
DiscreteMeasure discrete_measure(const SymTridiag& m);

// h_n = prod_{m<n} lower_{m+1} / upper_m (p_0 = 1)
std::vector<double> recurrence_norms(const Recurrence& r, int N);

// Christoffel weights 1 / sum_n p_n(x_k)^2 / h_n at given real support points; valid for
// recurrences whose products may be negative (signed measure)
DiscreteMeasure christoffel_measure(const Recurrence& r, int N, const std::vector<double>& support);

// p_0..p_{N-1} at x by the forward recursion
std::vector<double> polynomial_values(const Recurrence& r, int N, double x);

// Gamma(num...) / Gamma(den...). Returns 0 when a denominator argument is a nonpositive
// integer; throws PoleError when a numerator argument is.
double gamma_ratio(const std::vector<double>& num, const std::vector<double>& den);

enum class NormKind { Finite, Zero, Pole, Indeterminate };
std::string to_string(NormKind k);

struct NormValue {
    NormKind kind = NormKind::Finite;
    double value = 0.0;
};

struct GammaTerms {
    double prefactor = 1.0;
    std::vector<double> num;
    std::vector<double> den;
};

struct NormFormula {
    std::string name;
    std::string variable;           // "eps" or the parameter the measure lives on
    std::function<GammaTerms(int n)> terms;
    bool reference = true;          // false for printed forms known to disagree with the recurrence
    NormValue operator()(int n) const;
};

// closed-form norms known for a constrained problem; "published" and "corrected" variants
// where the two differ
std::vector<NormFormula> norm_formulas(const ConstrainedProblem& cp);

// measure and recurrence for a problem whose polynomials admit one: the energy block for the
// diagonal class, the parameter recurrence at eps_N for energy-fixing constraints
struct MeasureSetup {
    Recurrence recurrence;
    DiscreteMeasure measure;   // support in the recursion variable
    std::string variable;
};
MeasureSetup measure_for(const ConstrainedProblem& cp);

struct OrthogonalityReport {
    double max_deviation = 0.0;   // relative, over n, m <= N-1
    int worst_n = -1, worst_m = -1;
    std::vector<double> measured_norms;
    std::vector<double> formula_norms;
};
OrthogonalityReport verify_orthogonality(const MeasureSetup& ms, const NormFormula& norm, int N);
// against the recurrence's own norms
OrthogonalityReport verify_orthogonality(const MeasureSetup& ms, int N);

struct ZeroNormReport {
    std::vector<int> n;
    std::vector<NormKind> kind;
    bool all_zero() const;
};
ZeroNormReport zero_norm_check(const NormFormula& norm, int N, int nmax);

// max over spectrum points and j <= jmax of |p_{N+j}(eps_k)| relative to max_{n<N} |p_n(eps_k)|
double factorization_check(const ConstrainedProblem& cp, const std::vector<double>& spectrum, int jmax);

} // namespace qes
