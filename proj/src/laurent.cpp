#include "qes/laurent.hpp"
#include "qes/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace qes {

namespace {

bool is_integer(double p) { return std::abs(p - std::round(p)) <= kPowerTol; }

using Dense = std::vector<double>; // c[i] multiplies y^i

Dense to_dense(const LaurentSum& a, int shift) {
    int deg = 0;
    for (const auto& t : a.terms()) deg = std::max(deg, static_cast<int>(std::lround(t.power)) + shift);
    Dense d(deg + 1, 0.0);
    for (const auto& t : a.terms()) {
        const int i = static_cast<int>(std::lround(t.power)) + shift;
        if (i < 0) throw StructuralError("negative power in dense conversion");
        d[i] += t.coeff;
    }
    return d;
}

LaurentSum from_dense(const Dense& d, int shift, double scale) {
    std::vector<Monomial> t;
    for (std::size_t i = 0; i < d.size(); ++i)
        if (d[i] != 0.0) t.push_back({d[i], static_cast<double>(static_cast<int>(i) - shift)});
    return normalize(std::move(t), kCombineTol, scale);
}

int degree(const Dense& d) {
    int k = static_cast<int>(d.size()) - 1;
    while (k > 0 && d[k] == 0.0) --k;
    return k;
}

Dense dmul(const Dense& a, const Dense& b) {
    Dense r(a.size() + b.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    return r;
}

// p = q*d + r with deg r < deg d
void divmod(const Dense& p, const Dense& d, Dense& q, Dense& r) {
    const int m = degree(d);
    r = p;
    const int n = static_cast<int>(r.size()) - 1;
    q.assign(std::max(n - m + 1, 1), 0.0);
    for (int i = n; i >= m; --i) {
        const double c = r[i] / d[m];
        q[i - m] = c;
        for (int j = 0; j <= m; ++j) r[i - m + j] -= c * d[j];
        r[i] = 0.0;
    }
    r.resize(std::max(m, 1));
}

Dense mod(const Dense& p, const Dense& d) {
    Dense q, r;
    divmod(p, d, q, r);
    return r;
}

// X/D = L + r/D with r a polynomial of degree < deg D, D(0) = 1
void decompose(const LaurentSum& x, const Dense& d, double scale, LaurentSum& l, Dense& r) {
    const int m = degree(d);
    if (x.empty()) {
        l = {};
        r.assign(m, 0.0);
        return;
    }
    const int kk = std::max(0, -static_cast<int>(std::lround(x.min_power())));
    Dense q, rem;
    divmod(to_dense(x, kk), d, q, rem);
    if (kk == 0) {
        l = from_dense(q, 0, scale);
        r = rem;
        return;
    }
    // y^{-1} mod D, valid since D(0) = 1
    Dense yinv(m, 0.0);
    for (int i = 1; i <= m; ++i) yinv[i - 1] = -d[i];
    Dense rr = rem;
    for (int i = 0; i < kk; ++i) rr = mod(dmul(rr, yinv), d);
    rr.resize(m, 0.0);
    // S = (R - y^kk r)/D, exact
    Dense num(std::max(rem.size(), rr.size() + kk), 0.0);
    for (std::size_t i = 0; i < rem.size(); ++i) num[i] += rem[i];
    for (std::size_t i = 0; i < rr.size(); ++i) num[i + kk] -= rr[i];
    Dense s, sr;
    divmod(num, d, s, sr);
    Dense tot(std::max(q.size(), s.size()), 0.0);
    for (std::size_t i = 0; i < q.size(); ++i) tot[i] += q[i];
    for (std::size_t i = 0; i < s.size(); ++i) tot[i] += s[i];
    l = from_dense(tot, kk, scale);
    r = rr;
}

} // namespace

LaurentSum LaurentSum::constant(double c) { return normalize({{c, 0.0}}); }
LaurentSum LaurentSum::monomial(double c, double p) { return normalize({{c, p}}); }

double LaurentSum::coeff_at(double p) const {
    for (const auto& t : terms_)
        if (std::abs(t.power - p) <= kPowerTol) return t.coeff;
    return 0.0;
}

double LaurentSum::max_abs_coeff() const {
    double m = 0.0;
    for (const auto& t : terms_) m = std::max(m, std::abs(t.coeff));
    return m;
}

double LaurentSum::min_power() const { return terms_.empty() ? 0.0 : terms_.front().power; }
double LaurentSum::max_power() const { return terms_.empty() ? 0.0 : terms_.back().power; }

bool LaurentSum::integer_powers() const {
    return std::all_of(terms_.begin(), terms_.end(), [](const Monomial& t) { return is_integer(t.power); });
}

double LaurentSum::operator()(double y) const { return evaluate(*this, y); }

LaurentSum LaurentSum::operator-() const { return scaled(-1.0); }

LaurentSum LaurentSum::scaled(double s) const {
    std::vector<Monomial> t = terms_;
    for (auto& m : t) m.coeff *= s;
    return normalize(std::move(t));
}

LaurentSum LaurentSum::shifted(double dp) const {
    LaurentSum r = *this;
    for (auto& m : r.terms_) m.power += dp;
    return r;
}

std::string LaurentSum::str() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    os.precision(10);
    for (std::size_t i = 0; i < terms_.size(); ++i) {
        if (i) os << " + ";
        os << terms_[i].coeff << "*y^" << terms_[i].power;
    }
    return os.str();
}

LaurentSum normalize(std::vector<Monomial> terms, double tol, double scale) {
    if (tol < 0) throw InvalidInput("normalize: negative tolerance");
    double big = scale;
    for (const auto& t : terms) {
        if (!std::isfinite(t.coeff) || !std::isfinite(t.power))
            throw InvalidInput("normalize: non-finite monomial");
        big = std::max(big, std::abs(t.coeff));
    }
    std::sort(terms.begin(), terms.end(), [](const Monomial& a, const Monomial& b) { return a.power < b.power; });
    LaurentSum out;
    for (const auto& t : terms) {
        if (!out.terms_.empty() && std::abs(out.terms_.back().power - t.power) <= kPowerTol)
            out.terms_.back().coeff += t.coeff;
        else
            out.terms_.push_back(t);
    }
    std::erase_if(out.terms_, [&](const Monomial& m) { return std::abs(m.coeff) <= tol * big; });
    for (auto& m : out.terms_)
        if (is_integer(m.power)) m.power = std::round(m.power);
    return out;
}

LaurentSum add(const LaurentSum& a, const LaurentSum& b) {
    std::vector<Monomial> t = a.terms();
    t.insert(t.end(), b.terms().begin(), b.terms().end());
    return normalize(std::move(t));
}

LaurentSum multiply(const LaurentSum& a, const LaurentSum& b) {
    std::vector<Monomial> t;
    t.reserve(a.size() * b.size());
    for (const auto& x : a.terms())
        for (const auto& y : b.terms()) t.push_back({x.coeff * y.coeff, x.power + y.power});
    return normalize(std::move(t));
}

LaurentSum derivative_in_y(const LaurentSum& a) {
    std::vector<Monomial> t;
    for (const auto& m : a.terms())
        if (m.power != 0.0) t.push_back({m.coeff * m.power, m.power - 1.0});
    return normalize(std::move(t));
}

double evaluate(const LaurentSum& a, double y) {
    if (y <= 0.0) {
        for (const auto& t : a.terms())
            if (t.power < 0 || !is_integer(t.power))
                throw DomainError("evaluate: y <= 0 with negative or fractional power");
    }
    double s = 0.0;
    for (const auto& t : a.terms()) s += t.coeff * (t.power == 0.0 ? 1.0 : std::pow(y, t.power));
    return s;
}

LaurentSum power(const LaurentSum& a, int k) {
    LaurentSum r = LaurentSum::constant(1.0);
    for (int i = 0; i < k; ++i) r = r * a;
    return r;
}

double Rational::operator()(double y) const {
    const double n = evaluate(num, y);
    if (k == 0) return n;
    const double b = evaluate(base, y);
    if (b == 0.0) throw DomainError("rational: pole");
    return n / std::pow(b, k);
}

namespace {
const LaurentSum& common_base(const Rational& a, const Rational& b) {
    if (a.k == 0) return b.base;
    if (b.k == 0) return a.base;
    if (a.base.size() != b.base.size()) throw StructuralError("rational: mismatched denominators");
    for (std::size_t i = 0; i < a.base.size(); ++i) {
        const auto& x = a.base.terms()[i];
        const auto& y = b.base.terms()[i];
        if (std::abs(x.power - y.power) > kPowerTol || std::abs(x.coeff - y.coeff) > 1e-14 * std::abs(x.coeff))
            throw StructuralError("rational: mismatched denominators");
    }
    return a.base;
}
} // namespace

Rational add(const Rational& a, const Rational& b) {
    const LaurentSum base = common_base(a, b);
    const int k = std::max(a.k, b.k);
    const LaurentSum n = a.num * power(base, k - a.k) + b.num * power(base, k - b.k);
    return {n, k ? base : LaurentSum::constant(1.0), k};
}

Rational multiply(const Rational& a, const Rational& b) {
    const LaurentSum base = common_base(a, b);
    const int k = a.k + b.k;
    return {a.num * b.num, k ? base : LaurentSum::constant(1.0), k};
}

Rational multiply(const LaurentSum& a, const Rational& b) { return {a * b.num, b.base, b.k}; }

Rational derivative_in_y(const Rational& a) {
    if (a.k == 0) return Rational::of(derivative_in_y(a.num));
    const LaurentSum n = derivative_in_y(a.num) * a.base - a.num * derivative_in_y(a.base).scaled(a.k);
    return {n, a.base, a.k + 1};
}

SplitRational split(const Rational& r, double scale) {
    SplitRational out;
    if (r.k == 0 || r.num.empty()) {
        out.laurent = r.num;
        return out;
    }
    if (!r.base.integer_powers() || r.base.min_power() < 0)
        throw StructuralError("split: denominator is not a polynomial");
    if (r.base.size() == 1 && r.base.min_power() == 0) {
        out.laurent = r.num.scaled(std::pow(r.base.terms()[0].coeff, -r.k));
        return out;
    }
    if (!r.num.integer_powers())
        throw StructuralError("split: fractional powers over a polynomial denominator");
    Dense d = to_dense(r.base, 0);
    const double d0 = d[0];
    if (d0 == 0.0) throw StructuralError("split: denominator vanishes at y = 0");
    for (auto& c : d) c /= d0;
    const double sc = std::max(scale, r.num.max_abs_coeff());
    LaurentSum x = r.num.scaled(std::pow(d0, -r.k));

    const int m = degree(d);
    std::vector<Dense> poles(r.k + 1);
    for (int j = r.k; j >= 1; --j) {
        LaurentSum l;
        decompose(x, d, sc, l, poles[j]);
        for (auto& c : poles[j])
            if (std::abs(c) <= kCombineTol * sc) c = 0.0;
        x = l;
    }
    out.laurent = x;

    int kmax = 0;
    for (int j = 1; j <= r.k; ++j)
        if (std::any_of(poles[j].begin(), poles[j].end(), [](double c) { return c != 0.0; })) kmax = j;
    const LaurentSum base = from_dense(d, 0, 0.0);
    if (kmax == 0) return out;

    Dense num(1, 0.0);
    Dense dpow(1, 1.0);
    for (int j = kmax; j >= 1; --j) {
        Dense term = dmul(poles[j], dpow);
        if (term.size() > num.size()) num.resize(term.size(), 0.0);
        for (std::size_t i = 0; i < term.size(); ++i) num[i] += term[i];
        dpow = dmul(dpow, d);
    }
    out.pole = {from_dense(num, 0, sc), base, kmax};

    // c/(1 - y^m) -> c + c y^m/(1 - y^m)
    const bool one_minus_ym = [&] {
        for (int i = 1; i < m; ++i)
            if (d[i] != 0.0) return false;
        return d[m] == -1.0;
    }();
    if (kmax == 1 && one_minus_ym && out.pole.num.size() == 1 && out.pole.num.min_power() == 0) {
        const double c = out.pole.num.terms()[0].coeff;
        out.laurent = out.laurent + LaurentSum::constant(c);
        out.pole.num = LaurentSum::monomial(c, m);
    }
    return out;
}

} // namespace qes
