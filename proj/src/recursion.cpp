#include "qes/recursion.hpp"
#include "qes/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace qes {

AbcCoefficients abc_coefficients(const AbcFunctions& abc, const PotentialFamily& fam, const StructureChoice& s,
                                 const std::array<double, 3>& v) {
    if (!supported_on(abc.A, s) || !supported_on(abc.B, s))
        throw StructuralError("A or B is not supported on {sigma, sigma +- mu}");
    const LaurentSum cv = c_minus_v(abc, fam, v);
    if (!supported_on(cv, s)) throw StructuralError("C - v is not supported on {sigma, sigma +- mu}");
    AbcCoefficients r;
    r.sigma = s.sigma;
    r.mu = s.mu;
    r.A0 = abc.A.coeff_at(s.sigma);
    r.Aplus = abc.A.coeff_at(s.sigma + s.mu);
    r.Aminus = abc.A.coeff_at(s.sigma - s.mu);
    r.B0 = abc.B.coeff_at(s.sigma);
    r.Bplus = abc.B.coeff_at(s.sigma + s.mu);
    r.Bminus = abc.B.coeff_at(s.sigma - s.mu);
    r.C0v = cv.coeff_at(s.sigma);
    r.Cplusv = cv.coeff_at(s.sigma + s.mu);
    r.Cminusv = cv.coeff_at(s.sigma - s.mu);
    return r;
}

RecursionCoefficients::RecursionCoefficients(const AbcCoefficients& abc, double energy_offset)
    : abc_(abc), cls_(classify(abc.sigma, abc.mu)), offset_(energy_offset) {
    if (cls_ == RecursionClass::Inadmissible)
        throw ClassificationError("sigma must be 0, +mu or -mu for a three-term recursion in the energy");
}

double RecursionCoefficients::a(int n) const {
    const double m = abc_.mu * n;
    return -(m * ((m - 1) * abc_.A0 + abc_.B0) + abc_.C0v);
}

double RecursionCoefficients::dplus(int n) const {
    const double mu = abc_.mu;
    return -(mu * (n + 1) * ((mu * n + mu - 1) * abc_.Aminus + abc_.Bminus) + abc_.Cminusv);
}

double RecursionCoefficients::dminus(int n) const {
    const double mu = abc_.mu;
    return -(mu * (n - 1) * ((mu * n - mu - 1) * abc_.Aplus + abc_.Bplus) + abc_.Cplusv);
}

double RecursionCoefficients::physical_energy(double eps) const {
    return (cls_ == RecursionClass::Diagonal ? eps : -eps) + offset_;
}

double RecursionCoefficients::recursion_energy(double physical) const {
    const double e = physical - offset_;
    return cls_ == RecursionClass::Diagonal ? e : -e;
}

Recurrence energy_recurrence(const RecursionCoefficients& rc, int rows) {
    if (rc.cls() != RecursionClass::Diagonal) throw ClassificationError("energy recurrence needs the diagonal class");
    Recurrence r;
    for (int n = 0; n < rows; ++n) {
        r.diag.push_back(rc.a(n));
        r.lower.push_back(rc.dminus(n));
        r.upper.push_back(rc.dplus(n));
    }
    return r;
}

Recurrence parameter_recurrence(const RecursionCoefficients& rc, double eps, int rows) {
    if (rc.cls() == RecursionClass::Diagonal) throw ClassificationError("parameter recurrence needs an off-diagonal class");
    Recurrence r;
    for (int n = 0; n < rows; ++n) {
        r.diag.push_back(rc.a_tilde(n));
        r.lower.push_back(rc.dminus(n) + rc.delta_minus() * eps);
        r.upper.push_back(rc.dplus(n) + rc.delta_plus() * eps);
    }
    return r;
}

Offdiag symmetrize(const Recurrence& r, int N) {
    Offdiag o;
    for (int n = 0; n + 1 < N; ++n) {
        const double s = r.upper[n] * r.lower[n + 1];
        o.squared.push_back(s);
        if (s < 0) {
            o.complex_at.push_back(n);
            o.value.push_back(0.0);
        } else {
            o.value.push_back(std::sqrt(s));
        }
    }
    return o;
}

Offdiag symmetrize_diagonal(const RecursionCoefficients& rc, int N) { return symmetrize(energy_recurrence(rc, N), N); }

Offdiag symmetrize_offdiagonal(const RecursionCoefficients& rc, double eps, int N) {
    return symmetrize(parameter_recurrence(rc, eps, N), N);
}

std::vector<double> omega_products(const RecursionCoefficients& rc, std::optional<double> eps, int nmax) {
    const Recurrence r = rc.cls() == RecursionClass::Diagonal ? energy_recurrence(rc, nmax + 1)
                                                              : parameter_recurrence(rc, eps.value_or(0.0), nmax + 1);
    std::vector<double> om{1.0};
    for (int m = 0; m < nmax; ++m) {
        const double den = r.lower[m + 1];
        if (den == 0.0) throw SingularEvaluation("omega_products: zero denominator", m);
        const double ratio = r.upper[m] / den;
        if (ratio < 0) throw DomainError("omega_products: negative ratio at index " + std::to_string(m));
        om.push_back(om.back() * std::sqrt(ratio));
    }
    return om;
}

namespace {
bool tiny(double d, double x) { return std::abs(d) <= 1e-12 * std::max(1.0, std::abs(x)); }
} // namespace

PolynomialTable forward(const Recurrence& r, double x, int nmax) {
    PolynomialTable t;
    t.value = x;
    t.p.assign(nmax + 1, 0.0);
    t.p[0] = 1.0;
    // extended precision: the sequence cancels heavily wherever p_n decays
    long double pm = 0.0L, p = 1.0L;
    for (int n = 0; n < nmax; ++n) {
        if (n >= r.rows()) throw InvalidInput("forward: recurrence too short");
        if (tiny(r.upper[n], x)) throw SingularEvaluation("forward: vanishing leading divisor", n);
        const long double prev = n > 0 ? static_cast<long double>(r.lower[n]) * pm : 0.0L;
        const long double next = ((static_cast<long double>(x) - r.diag[n]) * p - prev) / r.upper[n];
        pm = p;
        p = next;
        t.p[n + 1] = static_cast<double>(next);
    }
    return t;
}

std::optional<long double> polish_block_root(const Recurrence& r, int N, double x0, double rel_tol) {
    using ld = long double;
    if (N < 1 || N > r.rows()) throw InvalidInput("polish_block_root: bad N");
    ld x = x0;
    for (int it = 0; it < 6; ++it) {
        ld dm = 0, d = 1, em = 0, e = 0;
        for (int k = 0; k < N; ++k) {
            const ld b = k > 0 ? static_cast<ld>(r.upper[k - 1]) * r.lower[k] : 0;
            const ld dn = (x - r.diag[k]) * d - b * dm;
            const ld en = d + (x - r.diag[k]) * e - b * em;
            dm = d;
            d = dn;
            em = e;
            e = en;
        }
        if (d == 0) break;
        if (e == 0 || !std::isfinite(static_cast<double>(d / e))) return std::nullopt;
        const ld step = d / e;
        x -= step;
        if (std::abs(step) <= 1e-19L * std::max<ld>(1, std::abs(x))) break;
    }
    if (std::abs(x - x0) > rel_tol * std::max(1.0, std::abs(x0))) return std::nullopt;
    return x;
}

namespace {

// Null vector of the block at x by inverse iteration (dense, partial pivoting). Used when an upper
// coefficient vanishes inside the block: the block is reducible and the eigenvector may start with zeros.
std::vector<double> reducible_null_vector(const Recurrence& r, int N, long double x) {
    using ld = long double;
    const ld shift = x + 1e-13L * std::max<ld>(1, std::abs(x));
    std::vector<std::vector<ld>> A(N, std::vector<ld>(N, 0));
    for (int n = 0; n < N; ++n) {
        A[n][n] = r.diag[n] - shift;
        if (n > 0) A[n][n - 1] = r.lower[n];
        if (n + 1 < N) A[n][n + 1] = r.upper[n];
    }
    std::vector<int> piv(N);
    for (int c = 0; c < N; ++c) {
        int m = c;
        for (int i = c + 1; i < N; ++i)
            if (std::abs(A[i][c]) > std::abs(A[m][c])) m = i;
        std::swap(A[c], A[m]);
        piv[c] = m;
        if (A[c][c] == 0) A[c][c] = std::numeric_limits<ld>::epsilon();
        for (int i = c + 1; i < N; ++i) {
            A[i][c] /= A[c][c];
            for (int j = c + 1; j < N; ++j) A[i][j] -= A[i][c] * A[c][j];
        }
    }
    std::vector<ld> v(N, 1);
    for (int it = 0; it < 3; ++it) {
        for (int c = 0; c < N; ++c) {
            std::swap(v[c], v[piv[c]]);
            for (int i = c + 1; i < N; ++i) v[i] -= A[i][c] * v[c];
        }
        for (int c = N - 1; c >= 0; --c) {
            for (int j = c + 1; j < N; ++j) v[c] -= A[c][j] * v[j];
            v[c] /= A[c][c];
        }
        ld mx = 0;
        for (ld t : v) mx = std::max(mx, std::abs(t));
        for (ld& t : v) t /= mx;
    }
    ld mx = 0;
    int lead = 0;
    for (int n = 0; n < N; ++n)
        if (std::abs(v[n]) > mx) mx = std::abs(v[n]), lead = n;
    // p_0 = 1 when the vector reaches row 0, otherwise unit largest component
    const ld norm = std::abs(v[0]) > 1e-12L * mx ? v[0] : v[lead];
    std::vector<double> p(N);
    for (int n = 0; n < N; ++n) {
        const ld t = v[n] / norm;
        p[n] = std::abs(t) > 1e-15L ? static_cast<double>(t) : 0.0;
    }
    return p;
}

} // namespace

std::vector<double> twisted_block_vector(const Recurrence& r, int N, long double x) {
    using ld = long double;
    if (N < 1 || N > r.rows()) throw InvalidInput("twisted_block_vector: bad N");
    for (int n = 0; n + 1 < N; ++n)
        if (r.upper[n] == 0.0) return reducible_null_vector(r, N, x);
    std::vector<ld> f(N + 1, 0), b(N + 1, 0);
    f[0] = 1;
    for (int n = 0; n + 1 < N; ++n) {
        f[n + 1] = ((x - r.diag[n]) * f[n] - (n > 0 ? r.lower[n] * f[n - 1] : 0)) / r.upper[n];
    }
    int k = N - 1;   // plain forward sweep, kept only when no seam is available
    bool down = true;
    for (int n = 1; n < N; ++n) down = down && r.lower[n] != 0.0;
    if (down && N > 1) {
        b[N - 1] = 1;
        for (int n = N - 1; n >= 1; --n) b[n - 1] = ((x - r.diag[n]) * b[n] - r.upper[n] * b[n + 1]) / r.lower[n];
        // seam mismatch at row k, relative to the terms of that row
        auto gamma = [&](int j) -> ld {
            if (f[j] == 0 || b[j] == 0) return std::numeric_limits<ld>::infinity();
            const ld lo = j > 0 ? r.lower[j] * f[j - 1] / f[j] : 0;
            const ld up = r.upper[j] * b[j + 1] / b[j];
            const ld scale = std::abs(x - r.diag[j]) + std::abs(lo) + std::abs(up) + std::abs(r.upper[j] * f[j + 1] / f[j]);
            return scale > 0 ? std::abs(r.upper[j] * (f[j + 1] / f[j] - b[j + 1] / b[j])) / scale
                             : std::numeric_limits<ld>::infinity();
        };
        ld best = std::numeric_limits<ld>::infinity();
        for (int j = 0; j + 1 < N; ++j)
            if (const ld g = gamma(j); g < best) {
                best = g;
                k = j;
            }
    }
    std::vector<double> p(N);
    for (int n = 0; n <= k; ++n) p[n] = static_cast<double>(f[n]);
    for (int n = k + 1; n < N; ++n) p[n] = static_cast<double>(b[n] * (f[k] / b[k]));
    return p;
}

PolynomialTable backward(const Recurrence& r, double x, int N) {
    if (N < 1 || N > r.rows()) throw InvalidInput("backward: bad N");
    PolynomialTable t;
    t.norm = Normalization::LastIsOne;
    t.value = x;
    t.p.assign(N + 1, 0.0);
    t.p[N - 1] = 1.0;
    if (N == 1) {
        t.consistency = x - r.diag[0];
        t.p.resize(N);
        return t;
    }
    for (int n = N - 2; n >= 1; --n) {
        const double den = r.lower[n + 1];
        if (den == 0.0) throw SingularEvaluation("backward: vanishing divisor", n + 1);
        t.p[n] = ((x - r.diag[n + 1]) * t.p[n + 1] - r.upper[n + 1] * t.p[n + 2]) / den;
    }
    const double den0 = x - r.diag[0];
    if (den0 == 0.0) throw SingularEvaluation("backward: vanishing a_0", 0);
    t.p[0] = r.upper[0] * t.p[1] / den0;
    t.consistency = (x - r.diag[1]) * t.p[1] - r.lower[1] * t.p[0] - r.upper[1] * t.p[2];
    t.p.resize(N);
    return t;
}

PolynomialTable evaluate_p_forward(const RecursionCoefficients& rc, double value, int nmax,
                                   std::optional<double> eps_fixed) {
    if (rc.cls() == RecursionClass::Diagonal) return forward(energy_recurrence(rc, nmax), value, nmax);
    if (eps_fixed) return forward(parameter_recurrence(rc, *eps_fixed, nmax), value, nmax);
    PolynomialTable t = forward(parameter_recurrence(rc, value, nmax), rc.c0v(), nmax);
    t.value = value;
    return t;
}

PolynomialTable evaluate_p_backward(const RecursionCoefficients& rc, double eps, int N) {
    if (rc.cls() != RecursionClass::OffDiagonalPlus) throw ClassificationError("backward evaluation needs sigma = +mu");
    PolynomialTable t = backward(parameter_recurrence(rc, eps, N + 1), rc.c0v(), N);
    t.value = eps;
    return t;
}

std::vector<double> equation_residuals(const RecursionCoefficients& rc, double eps, const std::vector<double>& p,
                                       int mlo, int mhi) {
    const int size = static_cast<int>(p.size());
    auto P = [&](int n) { return (n >= 0 && n < size) ? p[n] : 0.0; };
    const bool diag = rc.cls() == RecursionClass::Diagonal;
    std::vector<double> e;
    for (int m = mlo; m <= mhi; ++m) {
        double r = -rc.a(m) * P(m) - (rc.dminus(m) + rc.delta_minus() * eps) * P(m - 1) -
                   (rc.dplus(m) + rc.delta_plus() * eps) * P(m + 1);
        if (diag) r += eps * P(m);
        e.push_back(r);
    }
    return e;
}

} // namespace qes
