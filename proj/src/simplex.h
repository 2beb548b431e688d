#pragma once

#include "planopt/lp.h"

#include <span>
#include <vector>

namespace planopt::lp::detail {

/// LinearProgram with names resolved to indices and the objective turned into
/// minimization form.
struct IndexedProgram
{
    struct Row
    {
        std::vector<std::pair<std::size_t, double>> terms;
        Relation relation = Relation::LessEqual;
        double rhs        = 0.0;
    };

    std::vector<double> lower;
    std::vector<double> upper;
    std::vector<bool> binary;
    std::vector<Row> rows;
    std::vector<double> cost; // minimization sense
    bool maximize = false;

    explicit IndexedProgram(const LinearProgram& lp);

    std::size_t size() const noexcept
    {
        return lower.size();
    }
};

class SolveControl
{
public:
    SolveControl(const SolveOptions& options, std::size_t rows, std::size_t columns);

    // Counts one pivot; throws on iteration limit or deadline.
    void tick();
    void reset_relaxation() noexcept
    {
        _relaxation_iterations = 0;
    }
    std::size_t total_iterations() const noexcept
    {
        return _total;
    }

private:
    std::size_t _limit;
    std::size_t _relaxation_iterations = 0;
    std::size_t _total                 = 0;
    std::optional<std::chrono::steady_clock::time_point> _deadline;
};

struct Relaxation
{
    Status status = Status::Infeasible;
    std::vector<double> values;
    double objective = 0.0; // minimization sense
};

/// Solves the continuous relaxation of `program` with the given variable bounds
/// (binary flags are ignored).
Relaxation solve_relaxation(const IndexedProgram& program, std::span<const double> lower, std::span<const double> upper,
                            SolveControl& control, bool zero_objective = false);

}
