#include "qes/constraints.hpp"
#include "qes/errors.hpp"

#include <algorithm>
#include <cmath>

namespace qes {

ConstrainedProblem apply_constraint(const ProblemDefinition& problem, ConstraintChoice choice) {
    if (choice.N < 1) throw InvalidInput("apply_constraint: N must be positive");
    const RecursionCoefficients rc0 = problem.recursion();
    if (rc0.cls() != class_of(choice.kind))
        throw ClassificationError("constraint " + to_string(choice.kind) + " does not match class " +
                                  to_string(rc0.cls()));
    ConstrainedProblem cp{problem, choice, {}, 0.0, {}, ConstraintStatus::Ok, {}, {}};
    cp.problem.N = choice.N;
    cp.problem.constraint = choice.kind;
    const int N = choice.N;

    // d is linear in the free coefficients with unit slope: d_n^- = v_+ - ..., d_n^+ = v_- - ...
    auto solve = [&](Slot s, double d_at_current) {
        const double cur = problem.v[static_cast<int>(s)].value_or(0.0);
        cp.solved_slot = s;
        cp.solved_value = cur - d_at_current;
        cp.problem.v[static_cast<int>(s)] = cp.solved_value;
    };
    switch (choice.kind) {
    case ConstraintKind::DiagA:
    case ConstraintKind::OffPlusParam: solve(Slot::Plus, rc0.dminus(N)); break;
    case ConstraintKind::DiagB:
    case ConstraintKind::OffMinusParam: solve(Slot::Minus, rc0.dplus(N - 1)); break;
    case ConstraintKind::OffMinusEnergy: cp.eps_N = -rc0.dminus(N); break;
    case ConstraintKind::OffPlusEnergy: cp.eps_N = -rc0.dplus(N - 1); break;
    }
    cp.rc = cp.problem.recursion();

    if (cp.solved_slot) {
        const double scale = 1.0 + std::max({std::abs(rc0.a(N)), std::abs(rc0.dminus(N)), std::abs(rc0.dplus(N - 1))});
        if (std::abs(cp.solved_value) <= 1e-12 * scale) {
            cp.status = ConstraintStatus::ReducesToExact;
            auto it = problem.exact_models.find(choice.kind);
            cp.exact_model = it != problem.exact_models.end() ? it->second : "exactly solvable";
        }
    }
    return cp;
}

ConstrainedProblem with_slot(const ConstrainedProblem& cp, Slot s, double value) {
    ConstrainedProblem r = cp;
    r.problem.v[static_cast<int>(s)] = value;
    r.rc = r.problem.recursion();
    return r;
}

Recurrence block_recurrence(const ConstrainedProblem& cp, double eps, int rows) {
    if (cp.rc.cls() == RecursionClass::Diagonal) return energy_recurrence(cp.rc, rows);
    return parameter_recurrence(cp.rc, cp.eps_N.value_or(eps), rows);
}

RealityBound reality_bound(const ConstrainedProblem& cp) {
    const auto& rc = cp.rc;
    const int N = cp.N();
    const double eN = cp.eps_N.value_or(0.0);
    RealityBound b;

    // the bound variable t enters either the upper factor U_n or the lower factor L_{n+1}
    bool in_upper = true;
    switch (cp.choice.kind) {
    case ConstraintKind::DiagA:
    case ConstraintKind::OffMinusEnergy:
        b.variable = RealityBound::Variable::Coefficient;
        b.slot = Slot::Minus;
        in_upper = true;
        break;
    case ConstraintKind::DiagB:
    case ConstraintKind::OffPlusEnergy:
        b.variable = RealityBound::Variable::Coefficient;
        b.slot = Slot::Plus;
        in_upper = false;
        break;
    case ConstraintKind::OffMinusParam: in_upper = false; break;
    case ConstraintKind::OffPlusParam: in_upper = true; break;
    }
    b.name = b.slot ? cp.problem.v_names[static_cast<int>(*b.slot)] : "eps";
    const double t0 = b.slot ? cp.problem.v[static_cast<int>(*b.slot)].value_or(0.0) : 0.0;

    for (int n = 0; n + 1 < N; ++n) {
        const double U = rc.dplus(n) + (cp.eps_N ? rc.delta_plus() * eN : 0.0);
        const double Lw = rc.dminus(n + 1) + (cp.eps_N ? rc.delta_minus() * eN : 0.0);
        const double f = in_upper ? U : Lw;   // f(t) = f + (t - t0)
        const double g = in_upper ? Lw : U;
        const double theta = t0 - f;
        if (g == 0.0) {
            b.degenerate.push_back(n);
        } else if (g > 0) {
            if (!b.lower || theta > *b.lower) {
                b.lower = theta;
                b.lower_index = n;
            }
        } else {
            if (!b.upper || theta < *b.upper) {
                b.upper = theta;
                b.upper_index = n;
            }
        }
    }
    return b;
}

std::optional<double> bound_variable_value(const ConstrainedProblem& cp, const RealityBound& b) {
    if (!b.slot) return std::nullopt;
    return cp.problem.v[static_cast<int>(*b.slot)];
}

ReductionReport verify_reduction(const ConstrainedProblem& cp, int nprobe, std::optional<double> eps) {
    const int N = cp.N();
    if (nprobe <= N) throw InvalidInput("verify_reduction: nprobe must exceed N");
    if (cp.rc.cls() != RecursionClass::Diagonal && !cp.eps_N && !eps)
        throw InvalidInput("verify_reduction: off-diagonal parameter constraint needs eps");
    const Recurrence r = block_recurrence(cp, eps.value_or(0.0), nprobe + 1);
    ReductionReport rep;
    for (int n = 0; n < nprobe; ++n) {
        const double s = r.upper[n] * r.lower[n + 1];
        rep.products.push_back(s);
        if (s < 0 && n <= N - 2) rep.complex_in_block.push_back(n);
        if (s < 0 && n >= N) rep.complex_outside.push_back(n);
    }
    rep.target_product = rep.products[N - 1];
    const double u = std::abs(r.upper[N - 1]), l = std::abs(r.lower[N]);
    const double scale = std::max({1.0, u, l, std::abs(r.diag[N])});
    if (std::min(u, l) > 1e-10 * scale)
        throw Error("internal consistency: truncation coefficient does not vanish after the constraint");
    return rep;
}

} // namespace qes
