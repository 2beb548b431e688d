#include "planopt/lp.h"

#include "simplex.h"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <unordered_set>

namespace planopt::lp {

std::string_view to_string(Relation relation) noexcept
{
    switch (relation) {
    case Relation::LessEqual:
        return "<=";
    case Relation::Equal:
        return "=";
    case Relation::GreaterEqual:
        return ">=";
    }
    return "?";
}

std::string_view to_string(Sense sense) noexcept
{
    return sense == Sense::Minimize ? "minimize" : "maximize";
}

std::string_view to_string(Status status) noexcept
{
    switch (status) {
    case Status::Optimal:
        return "optimal";
    case Status::Infeasible:
        return "infeasible";
    case Status::Unbounded:
        return "unbounded";
    }
    return "?";
}

std::size_t LinearProgram::add_variable(std::string name, double lower, double upper, bool binary)
{
    variables.push_back(Variable{std::move(name), lower, upper, binary});
    return variables.size() - 1;
}

void LinearProgram::add_constraint(Coefficients coefficients, Relation relation, double rhs, std::string name)
{
    constraints.push_back(Constraint{std::move(coefficients), relation, rhs, std::move(name)});
}

static std::vector<Violation> to_violations(std::vector<std::string> messages)
{
    std::vector<Violation> result;
    for (auto& m : messages) {
        result.push_back(Violation{{}, std::move(m)});
    }
    return result;
}

InvalidModel::InvalidModel(std::vector<std::string> violations)
: ValidationError({}, to_violations(std::move(violations)))
{
}

std::vector<std::string> validate(const LinearProgram& lp)
{
    std::vector<std::string> result;
    std::unordered_set<std::string> names;

    for (std::size_t j = 0; j < lp.variables.size(); ++j) {
        const auto& v = lp.variables[j];
        if (v.name.empty()) {
            result.push_back(fmt::format("variable {} has an empty name", j));
        } else if (!names.insert(v.name).second) {
            result.push_back(fmt::format("duplicate variable name {}", v.name));
        }
        if (std::isnan(v.lower) || std::isnan(v.upper)) {
            result.push_back(fmt::format("variable {} has a NaN bound", v.name));
            continue;
        }
        if (v.lower == infinity || v.upper == -infinity) {
            result.push_back(fmt::format("variable {} has an infinite bound on the wrong side", v.name));
        }
        if (v.lower > v.upper) {
            result.push_back(fmt::format("variable {} has lower bound {} greater than upper bound {}", v.name, v.lower, v.upper));
        }
        if (v.binary && (v.lower < 0.0 || v.upper > 1.0)) {
            result.push_back(fmt::format("binary variable {} has bounds outside [0, 1]", v.name));
        }
    }

    for (std::size_t i = 0; i < lp.constraints.size(); ++i) {
        const auto& c = lp.constraints[i];
        for (const auto& [name, coef] : c.coefficients) {
            if (!names.contains(name)) {
                result.push_back(fmt::format("constraint {} references unknown variable {}", i, name));
            } else if (!std::isfinite(coef)) {
                result.push_back(fmt::format("constraint {} has a non-finite coefficient for {}", i, name));
            }
        }
        if (!std::isfinite(c.rhs)) {
            result.push_back(fmt::format("constraint {} has a non-finite right-hand side", i));
        }
    }

    for (const auto& [name, coef] : lp.objective.coefficients) {
        if (!names.contains(name)) {
            result.push_back(fmt::format("objective references unknown variable {}", name));
        } else if (!std::isfinite(coef)) {
            result.push_back(fmt::format("objective has a non-finite coefficient for {}", name));
        }
    }
    return result;
}

namespace {

using detail::IndexedProgram;
using detail::Relaxation;
using detail::SolveControl;

// Most fractional binary (closest to 0.5), lowest index on ties; npos when integral.
std::size_t most_fractional(const IndexedProgram& program, const std::vector<double>& x)
{
    std::size_t pick = std::string::npos;
    double best      = integrality_tolerance;
    for (std::size_t j = 0; j < program.size(); ++j) {
        if (!program.binary[j]) {
            continue;
        }
        const double frac = std::min(x[j] - std::floor(x[j]), std::ceil(x[j]) - x[j]);
        if (frac > best) {
            best = frac;
            pick = j;
        }
    }
    return pick;
}

struct Node
{
    std::vector<double> lower;
    std::vector<double> upper;
};

Solution finish(const IndexedProgram& program, Relaxation r, const SolveControl& control, std::size_t nodes)
{
    Solution s;
    s.status     = r.status;
    s.iterations = control.total_iterations();
    s.nodes      = nodes;
    if (r.status == Status::Optimal) {
        s.values          = std::move(r.values);
        s.objective_value = program.maximize ? -r.objective : r.objective;
    }
    return s;
}

}

Solution solve(const LinearProgram& lp, const SolveOptions& options)
{
    if (auto violations = validate(lp); !violations.empty()) {
        throw InvalidModel(std::move(violations));
    }

    const IndexedProgram program(lp);
    SolveControl control(options, program.rows.size(), program.size());

    const bool has_binaries = std::find(program.binary.begin(), program.binary.end(), true) != program.binary.end();
    if (!has_binaries) {
        return finish(program, detail::solve_relaxation(program, program.lower, program.upper, control), control, 1);
    }

    // Depth-first branch-and-bound over the binaries.
    std::vector<Node> stack;
    stack.push_back(Node{program.lower, program.upper});
    std::optional<Relaxation> incumbent;
    std::size_t nodes = 0;

    auto push_children = [&](const Node& node, std::size_t var, double value) {
        Node down = node, up = node;
        down.upper[var] = 0.0;
        up.lower[var]   = 1.0;
        // The child nearest the relaxed value is explored first.
        if (value >= 0.5) {
            stack.push_back(std::move(down));
            stack.push_back(std::move(up));
        } else {
            stack.push_back(std::move(up));
            stack.push_back(std::move(down));
        }
    };

    while (!stack.empty()) {
        Node node = std::move(stack.back());
        stack.pop_back();
        ++nodes;

        Relaxation r = detail::solve_relaxation(program, node.lower, node.upper, control);
        if (r.status == Status::Infeasible) {
            continue;
        }
        if (r.status == Status::Unbounded) {
            // Unbounded relaxation: the MILP is unbounded as soon as this node holds
            // an integral feasible point, since binaries cannot carry the ray.
            Relaxation feasible = detail::solve_relaxation(program, node.lower, node.upper, control, true);
            const auto var      = most_fractional(program, feasible.values);
            if (var == std::string::npos) {
                Relaxation unbounded;
                unbounded.status = Status::Unbounded;
                return finish(program, std::move(unbounded), control, nodes);
            }
            push_children(node, var, feasible.values[var]);
            continue;
        }
        if (incumbent && r.objective >= incumbent->objective - 1e-9 * std::max(1.0, std::abs(incumbent->objective))) {
            continue;
        }
        const auto var = most_fractional(program, r.values);
        if (var != std::string::npos) {
            push_children(node, var, r.values[var]);
            continue;
        }

        // Integral leaf: re-solve with the binaries pinned so they are exactly 0/1.
        Node fixed = node;
        for (std::size_t j = 0; j < program.size(); ++j) {
            if (program.binary[j]) {
                fixed.lower[j] = fixed.upper[j] = std::round(r.values[j]);
            }
        }
        Relaxation pinned = detail::solve_relaxation(program, fixed.lower, fixed.upper, control);
        if (pinned.status == Status::Optimal) {
            r = std::move(pinned);
        }
        if (!incumbent || r.objective < incumbent->objective) {
            incumbent = std::move(r);
        }
    }

    if (!incumbent) {
        return finish(program, Relaxation{}, control, nodes);
    }
    return finish(program, std::move(*incumbent), control, nodes);
}

static std::string format_terms(const Coefficients& coefficients)
{
    std::string text;
    for (const auto& [name, coef] : coefficients) {
        if (text.empty()) {
            text += coef < 0 ? fmt::format("-{} {}", -coef, name) : fmt::format("{} {}", coef, name);
        } else {
            text += coef < 0 ? fmt::format(" - {} {}", -coef, name) : fmt::format(" + {} {}", coef, name);
        }
    }
    return text.empty() ? "0" : text;
}

std::string to_text(const LinearProgram& lp)
{
    std::string out = fmt::format("{}\n  obj: {}\nsubject to\n", to_string(lp.objective.sense), format_terms(lp.objective.coefficients));
    for (std::size_t i = 0; i < lp.constraints.size(); ++i) {
        const auto& c    = lp.constraints[i];
        const auto label = c.name.empty() ? fmt::format("c{}", i) : c.name;
        out += fmt::format("  {}: {} {} {}\n", label, format_terms(c.coefficients), to_string(c.relation), c.rhs);
    }
    out += "bounds\n";
    for (const auto& v : lp.variables) {
        out += fmt::format("  {} <= {} <= {}{}\n", v.lower, v.name, v.upper, v.binary ? "  (binary)" : "");
    }
    return out;
}

}
