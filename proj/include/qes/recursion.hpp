#pragma once

#include "qes/basis.hpp"

#include <optional>
#include <vector>

namespace qes {

struct AbcCoefficients {
    double sigma = 0, mu = 1;
    double A0 = 0, Aplus = 0, Aminus = 0;
    double B0 = 0, Bplus = 0, Bminus = 0;
    double C0v = 0, Cplusv = 0, Cminusv = 0;
};

// Read the nine coefficients off A, B and C - v. Throws StructuralError when A, B or C - v
// leave the support {sigma - mu, sigma, sigma + mu}.
AbcCoefficients abc_coefficients(const AbcFunctions& abc, const PotentialFamily& fam, const StructureChoice& s,
                                 const std::array<double, 3>& v);

// For off-diagonal classes the recursion variable eps follows the sign convention of the
// off-diagonal recursions, which is minus the physical energy.
class RecursionCoefficients {
public:
    RecursionCoefficients() = default;
    explicit RecursionCoefficients(const AbcCoefficients& abc, double energy_offset = 0.0);

    RecursionClass cls() const { return cls_; }
    const AbcCoefficients& abc() const { return abc_; }
    double energy_offset() const { return offset_; }
    double c0v() const { return abc_.C0v; }

    double a(int n) const;
    double a_tilde(int n) const { return a(n) + abc_.C0v; }
    double dplus(int n) const;
    double dminus(int n) const;

    int delta_plus() const { return cls_ == RecursionClass::OffDiagonalPlus ? 1 : 0; }
    int delta_minus() const { return cls_ == RecursionClass::OffDiagonalMinus ? 1 : 0; }

    double physical_energy(double eps) const;
    double recursion_energy(double physical) const;

private:
    AbcCoefficients abc_;
    RecursionClass cls_ = RecursionClass::Diagonal;
    double offset_ = 0.0;
};

// x p_n = diag_n p_n + lower_n p_{n-1} + upper_n p_{n+1}; lower_0 is never read.
struct Recurrence {
    std::vector<double> diag, lower, upper;
    int rows() const { return static_cast<int>(diag.size()); }
};

// diagonal class, x = eps
Recurrence energy_recurrence(const RecursionCoefficients& rc, int rows);
// off-diagonal class at fixed eps, x = C0v (the free coefficient at power sigma enters here)
Recurrence parameter_recurrence(const RecursionCoefficients& rc, double eps, int rows);

struct Offdiag {
    std::vector<double> value;    // +sqrt(product), 0 where complex
    std::vector<double> squared;  // products upper_n * lower_{n+1}
    std::vector<int> complex_at;
    bool real() const { return complex_at.empty(); }
};

Offdiag symmetrize(const Recurrence& r, int N);
Offdiag symmetrize_diagonal(const RecursionCoefficients& rc, int N);
Offdiag symmetrize_offdiagonal(const RecursionCoefficients& rc, double eps, int N);

std::vector<double> omega_products(const RecursionCoefficients& rc, std::optional<double> eps, int nmax);

enum class Normalization { FirstIsOne, LastIsOne };

struct PolynomialTable {
    std::vector<double> p;
    Normalization norm = Normalization::FirstIsOne;
    double value = 0.0;
    // backward evaluation: residual of the one relation not used to build the table
    double consistency = 0.0;
};

PolynomialTable forward(const Recurrence& r, double x, int nmax);
// p_{N-1} = 1, p_N = 0, built downward; p_0 from the n = 0 relation, relation n = 1 left as consistency
PolynomialTable backward(const Recurrence& r, double x, int N);

// Newton polish, in extended precision, of a zero of det(x - J_N) for the N-block of r. nullopt when x0 is
// not within rel_tol of a simple zero.
std::optional<long double> polish_block_root(const Recurrence& r, int N, double x0, double rel_tol = 1e-8);

// p_0..p_{N-1} (p_0 = 1) at a zero x of the N-block: forward sweep from p_0, backward sweep from
// p_N = 0, joined at the row where the seam relation is best satisfied. Componentwise accurate where the
// plain forward sweep loses the decaying solution. Throws SingularEvaluation on a vanishing divisor.
std::vector<double> twisted_block_vector(const Recurrence& r, int N, long double x);

// diagonal: value = eps. off-diagonal: value = eps (energy variable, C0v fixed) unless
// eps_fixed is given, in which case value = C0v and eps = *eps_fixed.
PolynomialTable evaluate_p_forward(const RecursionCoefficients& rc, double value, int nmax,
                                   std::optional<double> eps_fixed = std::nullopt);
PolynomialTable evaluate_p_backward(const RecursionCoefficients& rc, double eps, int N);

// Residual of the equation at power y^{sigma + mu m} for m in [mlo, mhi], with p_n = 0
// outside the table. Summing y^{sigma + mu m} E_m times omega gives psi'' - (v - E)psi.
std::vector<double> equation_residuals(const RecursionCoefficients& rc, double eps, const std::vector<double>& p,
                                       int mlo, int mhi);

} // namespace qes
