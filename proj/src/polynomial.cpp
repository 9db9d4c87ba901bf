#include "qes/polynomial.hpp"
#include "qes/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace qes {

int Polynomial::degree() const {
    for (int k = static_cast<int>(c.size()) - 1; k >= 0; --k)
        if (c[k] != 0.0) return k;
    return -1;
}

double Polynomial::operator()(double x) const {
    double r = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) r = r * x + *it;
    return r;
}

double Polynomial::abs_scale(double x) const {
    double r = 0.0;
    const double ax = std::abs(x);
    for (auto it = c.rbegin(); it != c.rend(); ++it) r = r * ax + std::abs(*it);
    return r;
}

Polynomial Polynomial::derivative() const {
    if (c.size() <= 1) return Polynomial::constant(0.0);
    std::vector<double> d(c.size() - 1);
    for (std::size_t k = 1; k < c.size(); ++k) d[k - 1] = c[k] * static_cast<double>(k);
    return Polynomial(std::move(d));
}

Polynomial operator+(const Polynomial& a, const Polynomial& b) {
    std::vector<double> r(std::max(a.c.size(), b.c.size()), 0.0);
    for (std::size_t k = 0; k < a.c.size(); ++k) r[k] += a.c[k];
    for (std::size_t k = 0; k < b.c.size(); ++k) r[k] += b.c[k];
    return Polynomial(std::move(r));
}

Polynomial operator*(double s, const Polynomial& a) {
    Polynomial r = a;
    for (double& x : r.c) x *= s;
    return r;
}

Polynomial operator-(const Polynomial& a, const Polynomial& b) { return a + (-1.0) * b; }

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    if (a.c.empty() || b.c.empty()) return Polynomial::constant(0.0);
    std::vector<double> r(a.c.size() + b.c.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.c.size(); ++i)
        for (std::size_t j = 0; j < b.c.size(); ++j) r[i + j] += a.c[i] * b.c[j];
    return Polynomial(std::move(r));
}

Polynomial continuant(const std::vector<Polynomial>& diag, const std::vector<Polynomial>& products) {
    if (diag.empty()) return Polynomial::constant(1.0);
    if (products.size() + 1 < diag.size()) throw InvalidInput("continuant: too few off-diagonal products");
    Polynomial d2 = Polynomial::constant(1.0), d1 = diag[0];
    for (std::size_t k = 1; k < diag.size(); ++k) {
        Polynomial d0 = diag[k] * d1 - products[k - 1] * d2;
        d2 = std::move(d1);
        d1 = std::move(d0);
    }
    return d1;
}

namespace {

double max_abs(const std::vector<double>& c) {
    double m = 0.0;
    for (double x : c) m = std::max(m, std::abs(x));
    return m;
}

// roots of a polynomial with nonzero leading and constant coefficients, already balanced
std::vector<RealRoot> roots_balanced(const Polynomial& p, double rel_tol) {
    const int n = p.degree();
    std::vector<RealRoot> out;
    if (n <= 0) return out;
    if (n == 1) {
        out.push_back({-p.c[0] / p.c[1], 1});
        return out;
    }
    double bound = 0.0;
    for (int k = 0; k < n; ++k) bound = std::max(bound, std::abs(p.c[k] / p.c[n]));
    bound = 1.0 + bound;

    std::vector<RealRoot> crit = roots_balanced(p.derivative(), rel_tol);
    std::vector<double> pts{-bound};
    for (const auto& r : crit)
        if (r.x > -bound && r.x < bound) pts.push_back(r.x);
    pts.push_back(bound);

    auto near_zero = [&](double x) { return std::abs(p(x)) <= rel_tol * p.abs_scale(x); };

    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        double a = pts[i], b = pts[i + 1];
        double fa = p(a), fb = p(b);
        if (i > 0 && near_zero(a)) continue;   // multiple root handled below
        if (i + 2 < pts.size() && near_zero(b)) continue;
        if (fa == 0.0 || fb == 0.0 || (fa < 0) == (fb < 0)) continue;
        for (int it = 0; it < 300; ++it) {
            const double m = 0.5 * (a + b);
            if (m <= a || m >= b) break;
            const double fm = p(m);
            if (fm == 0.0) {
                a = b = m;
                break;
            }
            if ((fm < 0) == (fa < 0)) {
                a = m;
                fa = fm;
            } else {
                b = m;
            }
        }
        out.push_back({0.5 * (a + b), 1});
    }
    for (const auto& r : crit)
        if (r.x > -bound && r.x < bound && near_zero(r.x)) out.push_back({r.x, r.multiplicity + 1});
    std::sort(out.begin(), out.end(), [](const RealRoot& a, const RealRoot& b) { return a.x < b.x; });

    // merge coincident entries
    std::vector<RealRoot> merged;
    for (const auto& r : out) {
        if (!merged.empty() && std::abs(r.x - merged.back().x) <= 1e-9 * std::max(1.0, std::abs(r.x)))
            merged.back().multiplicity = std::max(merged.back().multiplicity, r.multiplicity);
        else
            merged.push_back(r);
    }
    return merged;
}

} // namespace

int zero_root_multiplicity(const Polynomial& p, double rel_tol) {
    const double m = max_abs(p.c);
    if (m == 0.0) return 0;
    const int n = p.degree();
    int k = 0;
    while (k < n && std::abs(p.c[k]) <= rel_tol * m) ++k;
    return k;
}

std::vector<RealRoot> real_roots(const Polynomial& p, double rel_tol) {
    const int n = p.degree();
    if (n < 0) throw InvalidInput("real_roots: zero polynomial");
    std::vector<RealRoot> out;
    if (n == 0) return out;

    const int z = zero_root_multiplicity(p, rel_tol);
    std::vector<double> c(p.c.begin() + z, p.c.begin() + n + 1);
    if (z > 0) out.push_back({0.0, z});

    // balance: x = s t with s a power of two so that |c_0| ~ |c_n| s^n
    const int m = static_cast<int>(c.size()) - 1;
    if (m >= 1) {
        const double ratio = std::abs(c[0] / c[m]);
        int e = static_cast<int>(std::lround(std::log2(ratio) / m));
        const double s = std::ldexp(1.0, e);
        std::vector<double> q(c.size());
        for (int k = 0; k <= m; ++k) q[k] = std::ldexp(c[k], e * k);
        // trim leading coefficients that are rounding noise after balancing
        const double qmax = max_abs(q);
        while (q.size() > 1 && std::abs(q.back()) <= 1e-14 * qmax) q.pop_back();
        for (const auto& r : roots_balanced(Polynomial(q), rel_tol)) out.push_back({r.x * s, r.multiplicity});
    }
    std::sort(out.begin(), out.end(), [](const RealRoot& a, const RealRoot& b) { return a.x < b.x; });
    return out;
}

} // namespace qes
