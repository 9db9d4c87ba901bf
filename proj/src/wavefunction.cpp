#include "qes/wavefunction.hpp"
#include "qes/errors.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

namespace qes {

namespace {

struct PSums {
    double P = 0.0, dP = 0.0, d2P = 0.0;
};

PSums p_sums(const std::vector<double>& p, double mu, double y) {
    PSums s;
    for (std::size_t n = 0; n < p.size(); ++n) {
        const double k = mu * static_cast<double>(n);
        if (k == 0.0) {
            s.P += p[n];
            continue;
        }
        const double yk = std::pow(y, k);
        s.P += p[n] * yk;
        s.dP += p[n] * k * yk / y;
        s.d2P += p[n] * k * (k - 1) * yk / (y * y);
    }
    return s;
}

bool half_line(const CoordinateMap& m) { return std::isfinite(m.x_domain.lo); }

} // namespace

double ClosedFormWavefunction::psi(double x) const {
    const double y = map.y_of_x(x);
    // extended accumulation: in the tail the sum cancels to far below its largest term
    long double s = 0.0L;
    for (std::size_t n = 0; n < p.size(); ++n) s += p[n] * std::pow(static_cast<long double>(y), mu * static_cast<long double>(n));
    return static_cast<double>(std::exp(static_cast<long double>(weight.log_omega(y))) * s);
}

double ClosedFormWavefunction::psi_majorant(double x) const {
    const double y = map.y_of_x(x);
    double s = 0.0;
    for (std::size_t n = 0; n < p.size(); ++n) s += std::abs(p[n]) * std::pow(y, mu * static_cast<double>(n));
    return std::exp(weight.log_omega(y)) * s;
}

double ClosedFormWavefunction::psi_dd(double x) const {
    const double y = map.y_of_x(x);
    const PSums s = p_sums(p, mu, y);
    const double dl = weight.dlog(y), d2l = weight.d2log(y);
    const double yp2 = map.yprime_sq(y), ypp = map.ydoubleprime(y);
    const double inner = ypp * (dl * s.P + s.dP) + yp2 * (d2l * s.P + 2 * dl * s.dP + s.d2P);
    return std::exp(weight.log_omega(y)) * inner;
}

double ClosedFormWavefunction::potential_at(double x) const {
    const double y = map.y_of_x(x);
    double v = potential(y) + energy_offset;
    if (!potential_pole.num.empty()) v += potential_pole(y);
    return v;
}

double ClosedFormWavefunction::residual(double x) const { return psi_dd(x) - (potential_at(x) - energy) * psi(x); }

double ClosedFormWavefunction::edge_residual(double x) const {
    const double y = map.y_of_x(x);
    const int N = static_cast<int>(p.size());
    const double w = std::exp(weight.log_omega(y));
    const double upper = upper_claimed ? 0.0 : edge_upper * std::pow(y, sigma + mu * N);
    return w * (edge_lower * std::pow(y, sigma - mu) + upper);
}

bool ClosedFormWavefunction::pointwise_exact(double rel_tol) const {
    double pmax = 0.0;
    for (double x : p) pmax = std::max(pmax, std::abs(x));
    const double scale = std::max(1.0, pmax * std::max(1.0, std::abs(eps)));
    return std::abs(edge_lower) <= rel_tol * scale && std::abs(edge_upper) <= rel_tol * scale;
}

namespace {

// p_0..p_{N-1} by the twisted sweep when x is a zero of the block. The forward recursion alone amplifies the
// dominant solution once p_n starts to decay.
std::optional<std::vector<double>> block_table(const ConstrainedProblem& cp, double eps) {
    const auto& rc = cp.rc;
    const int N = cp.N();
    const bool diag = rc.cls() == RecursionClass::Diagonal;
    const Recurrence r = diag ? energy_recurrence(rc, N) : parameter_recurrence(rc, eps, N);
    const auto x = polish_block_root(r, N, diag ? eps : rc.c0v(), 1e-10);
    if (!x) return std::nullopt;
    return twisted_block_vector(r, N, *x);
}

} // namespace

ClosedFormWavefunction assemble(const ConstrainedProblem& cp, double eps) {
    const auto& rc = cp.rc;
    const int N = cp.N();
    ClosedFormWavefunction w;
    w.map = cp.problem.map;
    w.weight = cp.problem.weight;
    w.sigma = cp.problem.structure.sigma;
    w.mu = cp.problem.structure.mu;
    w.eps = eps;
    w.energy = rc.physical_energy(eps);
    w.potential = cp.problem.potential_laurent();
    w.potential_pole = cp.problem.potential_pole();
    w.energy_offset = cp.problem.energy_offset;
    if (auto t = block_table(cp, eps)) {
        w.p = *t;
    } else if (rc.cls() == RecursionClass::Diagonal) {
        w.p = evaluate_p_forward(rc, eps, N - 1).p;
    } else if (cp.choice.kind == ConstraintKind::OffPlusParam) {
        w.p = evaluate_p_backward(rc, eps, N).p;
    } else {
        w.p = evaluate_p_forward(rc, rc.c0v(), N - 1, eps).p;
    }
    w.p.resize(N);
    const auto e = equation_residuals(rc, eps, w.p, -1, N);
    w.edge_lower = e.front();
    w.edge_upper = e.back();
    const auto k = cp.choice.kind;
    w.upper_claimed = k == ConstraintKind::DiagA || k == ConstraintKind::OffPlusParam || k == ConstraintKind::OffMinusEnergy;
    return w;
}

namespace {

struct Extent {
    double lo, hi, max_abs;
};

std::vector<double> probe_points(const CoordinateMap& m) {
    std::vector<double> xs;
    if (half_line(m)) {
        for (int i = 0; i <= 1800; ++i) xs.push_back(m.x_domain.lo + std::pow(10.0, -6.0 + 9.0 * i / 1800));
    } else {
        for (int i = 0; i <= 3000; ++i) xs.push_back(-50.0 + 150.0 * i / 3000);
    }
    return xs;
}

Extent extent(const ClosedFormWavefunction& w, double cutoff) {
    const auto xs = probe_points(w.map);
    std::vector<double> a(xs.size());
    double mx = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        a[i] = std::abs(w.psi(xs[i]));
        if (std::isfinite(a[i])) mx = std::max(mx, a[i]);
    }
    if (!(mx > 0)) throw DomainError("wavefunction vanishes on the sample grid");
    std::size_t lo = xs.size(), hi = 0;
    for (std::size_t i = 0; i < xs.size(); ++i)
        if (std::isfinite(a[i]) && a[i] >= cutoff * mx) {
            lo = std::min(lo, i);
            hi = i;
        }
    lo = lo > 0 ? lo - 1 : 0;
    hi = std::min(hi + 1, xs.size() - 1);
    return {xs[lo], xs[hi], mx};
}

} // namespace

std::vector<double> residual_grid(const ClosedFormWavefunction& w, const GridSpec& g) {
    const Extent ex = extent(w, g.cutoff);
    std::vector<double> xs;
    if (half_line(w.map)) {
        const double x0 = w.map.x_domain.lo;
        const double t0 = std::log10(std::max(ex.lo - x0, g.margin)), t1 = std::log10(ex.hi - x0);
        for (int i = 0; i < g.points; ++i) xs.push_back(x0 + std::pow(10.0, t0 + (t1 - t0) * i / (g.points - 1)));
    } else {
        for (int i = 0; i < g.points; ++i) xs.push_back(ex.lo + (ex.hi - ex.lo) * i / (g.points - 1));
    }
    return xs;
}

ResidualReport schrodinger_residual(const ClosedFormWavefunction& w, const GridSpec& g) {
    const auto xs = residual_grid(w, g);
    const std::size_t n = xs.size();
    std::vector<double> scale(n), r(n), e(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double ps = w.psi(xs[i]), dd = w.psi_dd(xs[i]);
        const double ve = w.potential_at(xs[i]) - w.energy;
        const double vps = ve * ps;
        scale[i] = std::max({std::abs(vps), std::abs(dd), std::abs(ve) * w.psi_majorant(xs[i])});
        r[i] = dd - vps;
        e[i] = w.edge_residual(xs[i]);
    }
    // pointwise relative. The scale uses the term majorant omega sum |p_n| y^{mu n} so that the tail, where
    // psi is a cancelling sum, is not judged against its own cancelled value; neighbours floor it at nodes.
    ResidualReport rep;
    int used = 0;
    for (std::size_t i = 0; i < n; ++i) {
        double d = scale[i];
        if (i > 0) d = std::max(d, scale[i - 1]);
        if (i + 1 < n) d = std::max(d, scale[i + 1]);
        if (!(d > 0) || !std::isfinite(d)) continue;
        rep.raw = std::max(rep.raw, std::abs(r[i]) / d);
        rep.interior = std::max(rep.interior, std::abs(r[i] - e[i]) / d);
        ++used;
    }
    if (used == 0) throw DomainError("schrodinger_residual: degenerate sample (psi ~ 0 on the grid)");
    rep.x_lo = xs.front();
    rep.x_hi = xs.back();
    rep.points = static_cast<int>(n);
    rep.pointwise_exact = w.pointwise_exact();
    return rep;
}

double fd_second_derivative(const ClosedFormWavefunction& w, double x, double h) {
    auto d = [&](double s) { return (w.psi(x + s) - 2 * w.psi(x) + w.psi(x - s)) / (s * s); };
    return (4 * d(h / 2) - d(h)) / 3;
}

double l2_norm(const ClosedFormWavefunction& w) {
    const Extent ex = extent(w, 1e-10);
    const auto xs = probe_points(w.map);
    const double far = std::abs(w.psi(xs.back()));
    if (!std::isfinite(far) || far > 1e-8 * ex.max_abs)
        throw DivergenceError("l2_norm: psi does not decay at large x");
    double a, b;
    if (half_line(w.map)) {
        const double x0 = w.map.x_domain.lo;
        const double near = std::abs(w.psi(x0 + 1e-8)), mid = std::abs(w.psi(x0 + 1e-6));
        if (!std::isfinite(near) || !(near < mid))
            throw DivergenceError("l2_norm: psi does not vanish at the endpoint x = " + std::to_string(x0));
        a = x0;
        b = ex.hi;
    } else {
        const double left = std::abs(w.psi(xs.front()));
        if (!std::isfinite(left) || left > 1e-8 * ex.max_abs)
            throw DivergenceError("l2_norm: psi does not decay at large negative x");
        a = ex.lo;
        b = ex.hi;
    }
    auto f = [&](double x) {
        const double v = w.psi(x);
        return v * v;
    };
    // split so each piece spans at most a decade near a finite endpoint
    std::vector<double> cuts{a};
    if (half_line(w.map))
        for (int k = -6; k <= 3; ++k) {
            const double c = a + std::pow(10.0, k);
            if (c < b) cuts.push_back(c);
        }
    cuts.push_back(b);
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
        total += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, cuts[i], cuts[i + 1], 6, 1e-10);
    if (!std::isfinite(total)) throw DivergenceError("l2_norm: integral diverges");
    return total;
}

} // namespace qes
