#pragma once

#include "planopt/error.h"

#include <chrono>
#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

// Exact dense solver for small linear programs with optional binary variables:
// bounded-variable primal simplex (Bland's rule) under a depth-first
// branch-and-bound on the binaries.
namespace planopt::lp {

inline constexpr double infinity = std::numeric_limits<double>::infinity();

inline constexpr double feasibility_tolerance = 1e-7;
inline constexpr double optimality_tolerance  = 1e-9;
inline constexpr double integrality_tolerance = 1e-6;

enum class Relation
{
    LessEqual,
    Equal,
    GreaterEqual,
};

enum class Sense
{
    Minimize,
    Maximize,
};

enum class Status
{
    Optimal,
    Infeasible,
    Unbounded,
};

std::string_view to_string(Relation relation) noexcept;
std::string_view to_string(Sense sense) noexcept;
std::string_view to_string(Status status) noexcept;

struct Variable
{
    std::string name;
    double lower = 0.0;
    double upper = infinity;
    bool binary  = false;

    bool operator==(const Variable&) const = default;
};

using Coefficients = std::map<std::string, double>;

struct Constraint
{
    Coefficients coefficients;
    Relation relation = Relation::LessEqual;
    double rhs        = 0.0;
    std::string name;

    bool operator==(const Constraint&) const = default;
};

struct Objective
{
    Coefficients coefficients;
    Sense sense = Sense::Minimize;

    bool operator==(const Objective&) const = default;
};

struct LinearProgram
{
    std::vector<Variable> variables;
    std::vector<Constraint> constraints;
    Objective objective;

    std::size_t add_variable(std::string name, double lower, double upper, bool binary = false);
    void add_constraint(Coefficients coefficients, Relation relation, double rhs, std::string name = {});

    bool operator==(const LinearProgram&) const = default;
};

struct Solution
{
    Status status = Status::Infeasible;
    // Aligned with LinearProgram::variables; empty unless optimal.
    std::vector<double> values;
    // In the program's own sense; set iff optimal.
    std::optional<double> objective_value;
    std::size_t iterations = 0;
    std::size_t nodes      = 0;

    bool optimal() const noexcept
    {
        return status == Status::Optimal;
    }
};

struct SolveOptions
{
    // Simplex pivots allowed per relaxation; 0 selects a size-based default.
    std::size_t iteration_limit = 0;
    std::optional<std::chrono::steady_clock::time_point> deadline;
};

class InvalidModel : public ValidationError
{
public:
    explicit InvalidModel(std::vector<std::string> violations);
};

class IterationLimit : public Error
{
public:
    using Error::Error;
};

/// Lists every broken LinearProgram invariant; empty when the program is well formed.
std::vector<std::string> validate(const LinearProgram& lp);

/// Solves `lp` to optimality, or reports it infeasible/unbounded.
/// Throws InvalidModel when validate() is not empty, IterationLimit when the pivot
/// budget runs out and TimeoutError when the deadline passes.
Solution solve(const LinearProgram& lp, const SolveOptions& options = {});

/// Human readable, one equation per line. Diagnostics only.
std::string to_text(const LinearProgram& lp);

}
