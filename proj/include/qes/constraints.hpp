#pragma once

#include "qes/catalog.hpp"

#include <optional>
#include <string>
#include <vector>

namespace qes {

struct ConstraintChoice {
    ConstraintKind kind;
    int N;
};

enum class ConstraintStatus { Ok, ReducesToExact };

struct ConstrainedProblem {
    ProblemDefinition problem;     // solved slot filled in
    ConstraintChoice choice;
    std::optional<Slot> solved_slot;
    double solved_value = 0.0;     // free coefficient fixed by a parameter-type constraint
    std::optional<double> eps_N;   // fixed energy (recursion convention) for energy-type constraints
    ConstraintStatus status = ConstraintStatus::Ok;
    std::string exact_model;
    RecursionCoefficients rc;

    int N() const { return choice.N; }
};

ConstrainedProblem apply_constraint(const ProblemDefinition& problem, ConstraintChoice choice);

// Same problem with the parameter-spectrum slot set to a value (free-coefficient units).
ConstrainedProblem with_slot(const ConstrainedProblem& cp, Slot s, double value);

struct RealityBound {
    enum class Variable { Energy, Coefficient };
    Variable variable = Variable::Energy;
    std::optional<Slot> slot;        // for Coefficient bounds
    std::string name;                // "eps" or the coefficient's name
    std::optional<double> lower;     // variable > lower
    std::optional<double> upper;     // variable < upper
    int lower_index = -1;            // n attaining the bound
    int upper_index = -1;
    std::vector<int> degenerate;     // n with an identically vanishing product
    bool feasible() const { return !lower || !upper || *lower < *upper; }
    bool admits(double t) const { return (!lower || t > *lower) && (!upper || t < *upper) && degenerate.empty(); }
};

RealityBound reality_bound(const ConstrainedProblem& cp);
// the current value of the bound variable (coefficient bounds only)
std::optional<double> bound_variable_value(const ConstrainedProblem& cp, const RealityBound& b);

struct ReductionReport {
    double target_product = 0.0;       // b_{N-1}^2 (or c_{N-1}^2), zero by construction
    std::vector<double> products;      // b_n^2, n < nprobe
    std::vector<int> complex_in_block; // n <= N-2 with negative product
    std::vector<int> complex_outside;  // n >= N with negative product
};

// eps is required for off-diagonal parameter-type constraints (c_n depend on it)
ReductionReport verify_reduction(const ConstrainedProblem& cp, int nprobe, std::optional<double> eps = std::nullopt);

// the recurrence whose products b_n^2 define the block, at eps for the off-diagonal classes
Recurrence block_recurrence(const ConstrainedProblem& cp, double eps, int rows);

} // namespace qes
