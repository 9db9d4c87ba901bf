#include "qes/spectra.hpp"
#include "qes/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace qes {

namespace {

bool diagonal_class(const ConstrainedProblem& cp) { return cp.rc.cls() == RecursionClass::Diagonal; }

std::string describe_bound(const RealityBound& b) {
    std::ostringstream os;
    os.precision(12);
    bool any = false;
    if (b.lower) {
        os << b.name << " > " << *b.lower;
        any = true;
    }
    if (b.upper) {
        os << (any ? " and " : "") << b.name << " < " << *b.upper;
        any = true;
    }
    if (!any) os << "none";
    return os.str();
}

double bisect(auto&& f, double a, double b, double fa) {
    for (int it = 0; it < 300; ++it) {
        const double m = 0.5 * (a + b);
        if (m <= a || m >= b) break;
        const double fm = f(m);
        if (fm == 0.0) return m;
        if ((fm < 0) == (fa < 0)) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    return 0.5 * (a + b);
}

double max_pairwise(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
    double r = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) r = std::max(r, std::abs(a[i] - b[i]));
    return r;
}

} // namespace

SymTridiag block_matrix(const ConstrainedProblem& cp, double eps) {
    const int N = cp.N();
    const Recurrence r = block_recurrence(cp, eps, N);
    SymTridiag m;
    m.diag = r.diag;
    const Offdiag o = symmetrize(r, N);
    if (!o.complex_at.empty()) {
        std::ostringstream os;
        os << "block is not real symmetric: negative product at n = " << o.complex_at.front()
           << "; reality bound: " << describe_bound(reality_bound(cp));
        throw RealityViolation(os.str());
    }
    m.offdiag = o.value;
    return m;
}

std::vector<double> charpoly_roots(const SymTridiag& m) {
    m.validate();
    const int n = m.size();
    double lo, hi;
    gershgorin(m, lo, hi);
    const double pad = 1e-9 * std::max(1.0, m.norm_inf());
    lo -= pad;
    hi += pad;
    auto sgn = [&](double x) { return charpoly_scaled(m, x).sign(); };
    auto f = [&](double x) { return static_cast<double>(sgn(x)); };
    std::vector<double> roots;
    for (int grid = std::max(400, 50 * n); grid <= (1 << 22); grid *= 4) {
        roots.clear();
        const double h = (hi - lo) / grid;
        double xa = lo;
        int sa = sgn(xa);
        for (int i = 1; i <= grid; ++i) {
            const double xb = i == grid ? hi : lo + i * h;
            const int sb = sgn(xb);
            if (sb == 0) {
                roots.push_back(xb);
            } else if (sa != 0 && sa != sb) {
                roots.push_back(bisect(f, xa, xb, sa));
            }
            xa = xb;
            sa = sb;
        }
        if (static_cast<int>(roots.size()) >= n) break;
    }
    std::sort(roots.begin(), roots.end());
    return roots;
}

std::vector<double> roots_of_pN(const ConstrainedProblem& cp) {
    if (!diagonal_class(cp)) throw ClassificationError("roots_of_pN needs the diagonal class");
    const int N = cp.N();
    const SymTridiag m = block_matrix(cp);
    // only the products d^+_{k-1} d^-_k enter, so a reducible block (some d^+ = 0, where p_N itself is
    // undefined) still counts the zeros of the continuant prod d^+ p_N
    const Recurrence r = energy_recurrence(cp.rc, N);
    double lo, hi;
    gershgorin(m, lo, hi);
    const double pad = 1e-9 * std::max(1.0, m.norm_inf());
    lo -= pad;
    hi += pad;

    // Sign pattern of p_0..p_N in ratio form, t_k = d^+_{k-1} p_k / p_{k-1}: the number of positive t_k
    // counts the zeros of p_N below x. Plain interlacing brackets fail when the zeros of p_{k-1} and p_k
    // agree to rounding (eigenvectors with negligible tails).
    auto count = [&](double x) {
        int c = 0;
        double t = 1.0;
        for (int k = 1; k <= N; ++k) {
            t = (x - r.diag[k - 1]) - (k >= 2 ? r.lower[k - 1] * r.upper[k - 2] / t : 0.0);
            if (t == 0.0) t = std::numeric_limits<double>::min();
            c += t > 0;
        }
        return c;
    };
    std::vector<double> roots;
    for (int j = 0; j < N; ++j) {
        double a = lo, b = hi;
        for (int it = 0; it < 200 && b - a > 2 * std::numeric_limits<double>::epsilon() * std::max(std::abs(a), std::abs(b)); ++it) {
            const double mid = 0.5 * (a + b);
            (count(mid) > j ? b : a) = mid;
        }
        roots.push_back(0.5 * (a + b));
    }
    if (count(hi) < N) throw IncompleteSpectrum("roots_of_pN: fewer than N zeros of p_N", roots);
    return roots;
}

Polynomial energy_determinant(const ConstrainedProblem& cp) {
    if (diagonal_class(cp)) throw ClassificationError("energy_determinant needs an off-diagonal class");
    const auto& rc = cp.rc;
    const int N = cp.N();
    std::vector<Polynomial> diag, prod;
    for (int k = 0; k < N; ++k) diag.push_back(Polynomial::constant(rc.a(k)));
    for (int k = 0; k + 1 < N; ++k)
        prod.push_back(Polynomial::linear(rc.dplus(k), rc.delta_plus()) *
                       Polynomial::linear(rc.dminus(k + 1), rc.delta_minus()));
    return continuant(diag, prod);
}

double determinant_residual(const ConstrainedProblem& cp, double eps) {
    const int N = cp.N();
    const Recurrence r = block_recurrence(cp, eps, N);
    const double x = diagonal_class(cp) ? eps : cp.rc.c0v();
    double d2 = 1.0, d1 = r.diag[0] - x, s2 = 1.0, s1 = std::abs(r.diag[0]) + std::abs(x);
    for (int k = 1; k < N; ++k) {
        const double P = r.upper[k - 1] * r.lower[k];
        const double d0 = (r.diag[k] - x) * d1 - P * d2;
        const double s0 = (std::abs(r.diag[k]) + std::abs(x)) * s1 + std::abs(P) * s2;
        d2 = d1;
        d1 = d0;
        s2 = s1;
        s1 = s0;
    }
    return s1 > 0 ? std::abs(d1) / s1 : std::abs(d1);
}

SpectrumReport energy_spectrum(const ConstrainedProblem& cp) {
    if (is_energy_kind(cp.choice.kind))
        throw InvalidInput("energy_spectrum: constraint " + to_string(cp.choice.kind) +
                           " fixes the energy; use the parameter spectrum");
    SpectrumReport rep;
    rep.bound = reality_bound(cp);
    const int N = cp.N();
    if (diagonal_class(cp)) {
        const SymTridiag m = block_matrix(cp);
        rep.matrix = eigenvalues(m);
        rep.charpoly = charpoly_roots(m);
        try {
            rep.pN = roots_of_pN(cp);
        } catch (const IncompleteSpectrum& e) {
            rep.pN = e.found;
        } catch (const SingularEvaluation&) {
            rep.pN_applicable = false;   // reducible block: p_N not defined by the recursion
        }
        rep.eigenvalues = rep.matrix;
        rep.cross_residual = max_pairwise(rep.matrix, rep.charpoly);
        if (rep.pN_applicable)
            rep.cross_residual = std::max({rep.cross_residual, max_pairwise(rep.matrix, rep.pN),
                                           max_pairwise(rep.charpoly, rep.pN)});
    } else {
        const Polynomial det = energy_determinant(cp);
        const auto& rc = cp.rc;
        if (det.degree() >= 1) {
            for (const auto& root : real_roots(det)) {
                const double e = root.x;
                bool ok = true;
                for (int n = 0; n + 1 < N; ++n)
                    if ((rc.dplus(n) + rc.delta_plus() * e) * (rc.dminus(n + 1) + rc.delta_minus() * e) <= 0) ok = false;
                for (int k = 0; k < root.multiplicity; ++k) (ok ? rep.eigenvalues : rep.rejected).push_back(e);
            }
        }
        for (double e : rep.eigenvalues) rep.det_residual.push_back(determinant_residual(cp, e));
        rep.matrix = rep.eigenvalues;
    }
    for (double e : rep.eigenvalues) {
        rep.physical.push_back(cp.rc.physical_energy(e));
        rep.spectral_radius = std::max(rep.spectral_radius, std::abs(e));
    }
    return rep;
}

std::vector<double> ParameterSpectrum::flat() const {
    std::vector<double> r;
    for (const auto& v : values)
        for (int k = 0; k < v.multiplicity; ++k) r.push_back(v.value);
    return r;
}

ParameterSpectrum parameter_spectrum(const ConstrainedProblem& cp) {
    if (!is_energy_kind(cp.choice.kind))
        throw InvalidInput("parameter_spectrum: constraint " + to_string(cp.choice.kind) + " does not fix the energy");
    const auto& pd = cp.problem;
    if (!pd.spectral_slot) throw InvalidInput("parameter_spectrum: problem has no spectral parameter");
    const int N = cp.N();
    const auto& rc = cp.rc;
    ParameterSpectrum ps;
    ps.parameter = pd.spectral_name;
    ps.slot = *pd.spectral_slot;
    ps.eps_N = *cp.eps_N;
    ps.physical_energy = rc.physical_energy(ps.eps_N);
    const Recurrence r = parameter_recurrence(rc, ps.eps_N, N);

    auto push = [&](double value, int mult, double coef) {
        for (auto& v : ps.values)
            if (std::abs(v.value - value) <= 1e-9 * std::max(1.0, std::abs(value))) {
                v.multiplicity += mult;
                return;
            }
        ps.values.push_back({value, mult, coef});
    };

    if (ps.slot == Slot::Center) {
        ps.shape = "diagonal";
        const double Csigma = rc.c0v();   // spectral slot unset
        const Offdiag o = symmetrize(r, N);
        std::vector<double> xs;
        if (o.complex_at.empty()) {
            SymTridiag m{r.diag, o.value};
            xs = eigenvalues(m);
            const bool zero_diag = std::all_of(r.diag.begin(), r.diag.end(), [](double d) { return d == 0.0; });
            if (zero_diag)
                for (int i = 0; i < N / 2; ++i) {
                    const double s = 0.5 * (xs[N - 1 - i] - xs[i]);
                    xs[i] = -s;
                    xs[N - 1 - i] = s;
                }
        } else {
            ps.real = false;
            std::vector<Polynomial> diag, prod;
            for (int k = 0; k < N; ++k) diag.push_back(Polynomial::linear(r.diag[k], -1.0));
            for (int k = 0; k + 1 < N; ++k) prod.push_back(Polynomial::constant(o.squared[k]));
            for (const auto& root : real_roots(continuant(diag, prod)))
                for (int k = 0; k < root.multiplicity; ++k) xs.push_back(root.x);
            ps.diagnostic = "Jacobi form not real symmetric at eps_N (negative product at n = " +
                            std::to_string(o.complex_at.front()) + "); real determinant roots reported";
        }
        std::vector<double> coefs;
        for (double x : xs) coefs.push_back(Csigma - x);
        std::sort(coefs.begin(), coefs.end());
        for (double c : coefs) push(c * pd.spectral_scale, 1, c);
    } else if (ps.slot == Slot::Minus) {
        ps.shape = "off-diagonal-scaling";
        // upper_n = v_- + c_n; the unknown u = v_- + c_0 scales every product when c_n is constant
        const double c0 = r.upper[0] - pd.v[static_cast<int>(Slot::Minus)].value_or(0.0);
        std::vector<Polynomial> diag, prod;
        for (int k = 0; k < N; ++k) diag.push_back(Polynomial::constant(r.diag[k] - rc.c0v()));
        for (int k = 0; k + 1 < N; ++k) {
            const double shift = r.upper[k] - r.upper[0];
            prod.push_back(Polynomial::linear(shift * r.lower[k + 1], r.lower[k + 1]));
        }
        const Polynomial det = continuant(diag, prod);
        if (det.degree() < 1) {
            ps.diagnostic = "determinant does not depend on " + ps.parameter;
        } else {
            for (const auto& root : real_roots(det)) {
                const double u = root.x;
                if (u == 0.0) {
                    push(0.0, 2 * root.multiplicity, -c0);
                    continue;
                }
                bool ok = u * pd.spectral_u_sign > 0;
                for (int k = 0; k + 1 < N; ++k)
                    if ((u + r.upper[k] - r.upper[0]) * r.lower[k + 1] <= 0) ok = false;
                if (!ok) {
                    ps.rejected.push_back(u - c0);
                    continue;
                }
                const double val = std::sqrt(std::abs(u)) * pd.spectral_scale;
                push(-val, root.multiplicity, u - c0);
                push(val, root.multiplicity, u - c0);
            }
        }
    } else {
        throw InvalidInput("parameter_spectrum: unsupported spectral slot");
    }
    std::sort(ps.values.begin(), ps.values.end(),
              [](const ParameterValue& a, const ParameterValue& b) { return a.value < b.value; });
    if (ps.values.empty() && ps.diagnostic.empty())
        ps.diagnostic = "no admissible real roots: reality constraint violated at eps_N";
    return ps;
}

ConstrainedProblem at_parameter(const ConstrainedProblem& cp, const ParameterSpectrum& ps, const ParameterValue& v) {
    return with_slot(cp, ps.slot, v.coefficient);
}

} // namespace qes
