#include "qes/tridiag.hpp"
#include "qes/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace qes {

double SymTridiag::norm_inf() const {
    double r = 0.0;
    const int n = size();
    for (int i = 0; i < n; ++i) {
        double s = std::abs(diag[i]);
        if (i > 0) s += std::abs(offdiag[i - 1]);
        if (i + 1 < n) s += std::abs(offdiag[i]);
        r = std::max(r, s);
    }
    return r;
}

void SymTridiag::validate() const {
    if (diag.empty()) throw InvalidInput("SymTridiag: empty matrix");
    if (offdiag.size() + 1 != diag.size()) throw InvalidInput("SymTridiag: offdiag must have N-1 entries");
    for (double d : diag)
        if (!std::isfinite(d)) throw InvalidInput("SymTridiag: non-finite diagonal entry");
    for (double d : offdiag)
        if (!std::isfinite(d)) throw InvalidInput("SymTridiag: non-finite off-diagonal entry");
}

void gershgorin(const SymTridiag& m, double& lo, double& hi) {
    const int n = m.size();
    lo = std::numeric_limits<double>::infinity();
    hi = -lo;
    for (int i = 0; i < n; ++i) {
        double r = 0.0;
        if (i > 0) r += std::abs(m.offdiag[i - 1]);
        if (i + 1 < n) r += std::abs(m.offdiag[i]);
        lo = std::min(lo, m.diag[i] - r);
        hi = std::max(hi, m.diag[i] + r);
    }
}

int sturm_count(const SymTridiag& m, double x) {
    const int n = m.size();
    const double pivmin = std::numeric_limits<double>::min() * std::max(1.0, m.norm_inf()) / std::numeric_limits<double>::epsilon();
    int count = 0;
    double q = 1.0;
    for (int i = 0; i < n; ++i) {
        const double e2 = i > 0 ? m.offdiag[i - 1] * m.offdiag[i - 1] : 0.0;
        q = (m.diag[i] - x) - (i > 0 ? e2 / q : 0.0);
        if (std::abs(q) < pivmin) q = -pivmin;
        if (q < 0) ++count;
    }
    return count;
}

double ScaledValue::value() const { return std::ldexp(mantissa, exponent); }

namespace {

struct CharpolyWithDerivative {
    ScaledValue d;
    double dprime_over_d_scale;   // derivative mantissa on the same exponent as d
};

// D_k = (diag_k - x) D_{k-1} - e_{k-1}^2 D_{k-2}, and its x-derivative, sharing a common scale
CharpolyWithDerivative charpoly_impl(const SymTridiag& m, double x) {
    const int n = m.size();
    double d2 = 1.0, d1 = m.diag[0] - x;   // D_{k-2}, D_{k-1}
    double p2 = 0.0, p1 = -1.0;            // derivatives
    int exponent = 0;
    for (int k = 1; k < n; ++k) {
        const double e2 = m.offdiag[k - 1] * m.offdiag[k - 1];
        const double d0 = (m.diag[k] - x) * d1 - e2 * d2;
        const double p0 = (m.diag[k] - x) * p1 - d1 - e2 * p2;
        d2 = d1;
        d1 = d0;
        p2 = p1;
        p1 = p0;
        if (k % 8 == 0) {
            const double big = std::max({std::abs(d1), std::abs(d2), std::abs(p1), std::abs(p2)});
            if (big > 0 && std::isfinite(big)) {
                int e = 0;
                std::frexp(big, &e);
                d1 = std::ldexp(d1, -e);
                d2 = std::ldexp(d2, -e);
                p1 = std::ldexp(p1, -e);
                p2 = std::ldexp(p2, -e);
                exponent += e;
            }
        }
    }
    return {{d1, exponent}, p1};
}

// LAPACK-style tridiagonal LU with partial pivoting, solving (T - shift I) x = b in place
void solve_shifted(const SymTridiag& m, double shift, std::vector<double>& b) {
    const int n = m.size();
    std::vector<double> dl(m.offdiag), du(m.offdiag), du2(std::max(0, n - 2), 0.0), d(n);
    std::vector<bool> piv(std::max(0, n - 1), false);
    const double tiny = std::max(1.0, m.norm_inf()) * std::numeric_limits<double>::epsilon();
    for (int i = 0; i < n; ++i) d[i] = m.diag[i] - shift;
    for (int i = 0; i + 1 < n; ++i) {
        if (std::abs(d[i]) >= std::abs(dl[i])) {
            if (d[i] == 0.0) d[i] = tiny;
            const double f = dl[i] / d[i];
            dl[i] = f;
            d[i + 1] -= f * du[i];
        } else {
            const double f = d[i] / dl[i];
            d[i] = dl[i];
            dl[i] = f;
            const double t = du[i];
            du[i] = d[i + 1];
            d[i + 1] = t - f * d[i + 1];
            if (i + 2 < n) {
                du2[i] = du[i + 1];
                du[i + 1] = -f * du[i + 1];
            }
            piv[i] = true;
        }
    }
    if (d[n - 1] == 0.0) d[n - 1] = tiny;
    for (int i = 0; i + 1 < n; ++i) {
        if (!piv[i]) {
            b[i + 1] -= dl[i] * b[i];
        } else {
            const double t = b[i] - dl[i] * b[i + 1];
            b[i] = b[i + 1];
            b[i + 1] = t;
        }
    }
    for (int i = n - 1; i >= 0; --i) {
        double s = b[i];
        if (i + 1 < n) s -= du[i] * b[i + 1];
        if (i + 2 < n) s -= du2[i] * b[i + 2];
        b[i] = s / d[i];
    }
}

double normalize(std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    s = std::sqrt(s);
    if (s > 0)
        for (double& x : v) x /= s;
    return s;
}

std::vector<double> inverse_iteration(const SymTridiag& m, double lambda, const std::vector<std::vector<double>>& against,
                                      int seed) {
    const int n = m.size();
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) v[i] = 1.0 + 0.25 * std::sin(1.7 * (i + 1) + 0.61 * seed);
    const double shift = lambda + 4 * std::numeric_limits<double>::epsilon() * std::max(1.0, m.norm_inf());
    for (int it = 0; it < 4; ++it) {
        for (const auto& u : against) {
            double dot = 0.0;
            for (int i = 0; i < n; ++i) dot += u[i] * v[i];
            for (int i = 0; i < n; ++i) v[i] -= dot * u[i];
        }
        normalize(v);
        solve_shifted(m, shift, v);
        for (double x : v)
            if (!std::isfinite(x)) throw DomainError("eigenvector: inverse iteration diverged");
    }
    for (const auto& u : against) {
        double dot = 0.0;
        for (int i = 0; i < n; ++i) dot += u[i] * v[i];
        for (int i = 0; i < n; ++i) v[i] -= dot * u[i];
    }
    normalize(v);
    int lead = 0;
    for (int i = 0; i < n; ++i)
        if (std::abs(v[i]) > 1e-12) {
            lead = i;
            break;
        }
    if (v[lead] < 0)
        for (double& x : v) x = -x;
    return v;
}

} // namespace

ScaledValue charpoly_scaled(const SymTridiag& m, double x) {
    m.validate();
    return charpoly_impl(m, x).d;
}

double charpoly(const SymTridiag& m, double x) { return charpoly_scaled(m, x).value(); }

std::vector<double> eigenvalues(const SymTridiag& m, double tol) {
    m.validate();
    if (!(tol > 0)) throw InvalidInput("eigenvalues: tol must be positive");
    const int n = m.size();
    double lo, hi;
    gershgorin(m, lo, hi);
    const double scale = std::max(1.0, m.norm_inf());
    lo -= tol * scale;
    hi += tol * scale;
    std::vector<double> ev(n);
    for (int k = 0; k < n; ++k) {
        // smallest x with count(x) > k
        double a = k > 0 ? std::max(lo, ev[k - 1] - tol * scale) : lo, b = hi;
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (a + b);
            if (mid <= a || mid >= b) break;
            if (sturm_count(m, mid) > k) b = mid;
            else a = mid;
            if (b - a <= 0.25 * std::numeric_limits<double>::epsilon() * std::max(std::abs(a), std::abs(b))) break;
        }
        double x = 0.5 * (a + b);
        // Newton polish, kept only if it stays inside the bracket and reduces |D|
        for (int it = 0; it < 2; ++it) {
            const auto cw = charpoly_impl(m, x);
            if (cw.d.mantissa == 0.0 || cw.dprime_over_d_scale == 0.0) break;
            const double xn = x - cw.d.mantissa / cw.dprime_over_d_scale;
            if (!(xn >= a && xn <= b)) break;
            const auto cn = charpoly_impl(m, xn);
            if (std::abs(cn.d.value()) >= std::abs(cw.d.value())) break;
            x = xn;
        }
        ev[k] = x;
    }
    std::sort(ev.begin(), ev.end());
    return ev;
}

std::vector<double> eigenvector(const SymTridiag& m, double lambda) {
    m.validate();
    return inverse_iteration(m, lambda, {}, 0);
}

EigenDecomposition eigen_decomposition(const SymTridiag& m, double tol) {
    EigenDecomposition r;
    r.values = eigenvalues(m, tol);
    const double gap = 1e-10 * std::max(1.0, m.norm_inf());
    std::vector<std::vector<double>> cluster;
    for (std::size_t k = 0; k < r.values.size(); ++k) {
        if (k == 0 || r.values[k] - r.values[k - 1] > gap) cluster.clear();
        auto v = inverse_iteration(m, r.values[k], cluster, static_cast<int>(k));
        cluster.push_back(v);
        r.vectors.push_back(std::move(v));
    }
    return r;
}

std::vector<double> multiply(const SymTridiag& m, const std::vector<double>& v) {
    const int n = m.size();
    std::vector<double> r(n);
    for (int i = 0; i < n; ++i) {
        double s = m.diag[i] * v[i];
        if (i > 0) s += m.offdiag[i - 1] * v[i - 1];
        if (i + 1 < n) s += m.offdiag[i] * v[i + 1];
        r[i] = s;
    }
    return r;
}

} // namespace qes
