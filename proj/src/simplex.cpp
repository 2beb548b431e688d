#include "simplex.h"

#include <algorithm>
#include <cmath>
#include <unordered_map>

namespace planopt::lp::detail {

namespace {

constexpr double pivot_tolerance = 1e-9;
constexpr double drop_tolerance  = 1e-14;

double nearest_power_of_two(double s)
{
    return std::exp2(std::round(std::log2(s)));
}

double relative(double scale)
{
    return std::max(1.0, std::abs(scale));
}

enum class ColumnState : unsigned char
{
    Basic,
    AtLower,
    AtUpper,
};

// How an original variable maps onto nonnegative standard-form columns.
struct Substitution
{
    enum class Kind
    {
        Shifted,  // x = lower + y
        Mirrored, // x = upper - y
        Split,    // x = y1 - y2
    };

    Kind kind          = Kind::Shifted;
    double offset      = 0.0;
    std::size_t column = 0;
};

// Dense bounded-variable simplex tableau. Every column has lower bound 0 and an
// upper bound that may be +inf; nonbasic columns sit at one of their bounds.
class Tableau
{
public:
    Tableau(std::size_t rows, std::size_t columns)
    : _m(rows)
    , _n(columns)
    , _cells(rows * columns, 0.0)
    , _xb(rows, 0.0)
    , _basis(rows, 0)
    , _state(columns, ColumnState::AtLower)
    , _upper(columns, infinity)
    , _blocked(columns, false)
    , _reduced(columns, 0.0)
    {
    }

    double& at(std::size_t i, std::size_t j)
    {
        return _cells[i * _n + j];
    }

    double at(std::size_t i, std::size_t j) const
    {
        return _cells[i * _n + j];
    }

    void set_basic(std::size_t row, std::size_t column, double value)
    {
        _basis[row]     = column;
        _state[column]  = ColumnState::Basic;
        _xb[row]        = value;
    }

    void set_upper(std::size_t column, double upper)
    {
        _upper[column] = upper;
    }

    void block(std::size_t column)
    {
        _blocked[column] = true;
    }

    std::size_t basic(std::size_t row) const
    {
        return _basis[row];
    }

    double basic_value(std::size_t row) const
    {
        return _xb[row];
    }

    bool is_basic(std::size_t column) const
    {
        return _state[column] == ColumnState::Basic;
    }

    double nonbasic_value(std::size_t column) const
    {
        return _state[column] == ColumnState::AtUpper ? _upper[column] : 0.0;
    }

    void price(const std::vector<double>& cost)
    {
        for (std::size_t j = 0; j < _n; ++j) {
            double d = cost[j];
            for (std::size_t i = 0; i < _m; ++i) {
                const double cb = cost[_basis[i]];
                if (cb != 0.0) {
                    d -= cb * at(i, j);
                }
            }
            _reduced[j] = _state[j] == ColumnState::Basic ? 0.0 : d;
        }
    }

    // Primal simplex on the current reduced costs. Bland's rule for both the
    // entering column (lowest eligible index) and ratio-test ties.
    Status iterate(SolveControl& control)
    {
        while (true) {
            std::size_t q = _n;
            double dir    = 0.0;
            for (std::size_t j = 0; j < _n; ++j) {
                if (_state[j] == ColumnState::Basic || _blocked[j]) {
                    continue;
                }
                if (_state[j] == ColumnState::AtLower) {
                    if (_reduced[j] < -optimality_tolerance && _upper[j] > 0.0) {
                        q   = j;
                        dir = 1.0;
                        break;
                    }
                } else if (_reduced[j] > optimality_tolerance) {
                    q   = j;
                    dir = -1.0;
                    break;
                }
            }
            if (q == _n) {
                return Status::Optimal;
            }
            control.tick();

            double step        = _upper[q]; // bound flip distance
            std::size_t leave  = _m;
            bool leaves_at_top = false;
            for (std::size_t i = 0; i < _m; ++i) {
                const double alpha = at(i, q) * dir;
                double limit       = 0.0;
                bool to_upper      = false;
                if (alpha > pivot_tolerance) {
                    limit = std::max(_xb[i], 0.0) / alpha;
                } else if (alpha < -pivot_tolerance) {
                    const double ub = _upper[_basis[i]];
                    if (!std::isfinite(ub)) {
                        continue;
                    }
                    limit    = std::max(ub - _xb[i], 0.0) / -alpha;
                    to_upper = true;
                } else {
                    continue;
                }

                bool take = false;
                if (!std::isfinite(step)) {
                    take = true;
                } else {
                    const double tie = 1e-12 * relative(step);
                    if (limit < step - tie) {
                        take = true;
                    } else if (leave != _m && limit <= step + tie && _basis[i] < _basis[leave]) {
                        take = true;
                    }
                }
                if (take) {
                    step          = std::isfinite(step) ? std::min(step, limit) : limit;
                    leave         = i;
                    leaves_at_top = to_upper;
                }
            }

            if (!std::isfinite(step)) {
                return Status::Unbounded;
            }

            for (std::size_t i = 0; i < _m; ++i) {
                _xb[i] -= at(i, q) * dir * step;
            }

            if (leave == _m) {
                _state[q] = dir > 0 ? ColumnState::AtUpper : ColumnState::AtLower;
                continue;
            }

            const double entering_value = nonbasic_value(q) + dir * step;
            _state[_basis[leave]]       = leaves_at_top ? ColumnState::AtUpper : ColumnState::AtLower;
            pivot(leave, q);
            _xb[leave] = entering_value;
        }
    }

    // Exchanges the basic variable of `r` for column `q` without moving any value.
    void exchange(std::size_t r, std::size_t q)
    {
        const double value    = nonbasic_value(q);
        _state[_basis[r]]     = ColumnState::AtLower;
        pivot(r, q);
        _xb[r] = value;
    }

    // Recomputes the basic values from the untouched constraint matrix, removing
    // drift accumulated through pivoting. Leaves values as they are when the
    // basis matrix is numerically singular.
    void refine(const std::vector<double>& matrix, const std::vector<double>& rhs)
    {
        std::vector<double> b(rhs);
        for (std::size_t j = 0; j < _n; ++j) {
            if (_state[j] == ColumnState::Basic) {
                continue;
            }
            const double v = nonbasic_value(j);
            if (v == 0.0) {
                continue;
            }
            for (std::size_t i = 0; i < _m; ++i) {
                b[i] -= matrix[i * _n + j] * v;
            }
        }
        std::vector<double> basis_matrix(_m * _m);
        for (std::size_t i = 0; i < _m; ++i) {
            for (std::size_t k = 0; k < _m; ++k) {
                basis_matrix[i * _m + k] = matrix[i * _n + _basis[k]];
            }
        }
        for (std::size_t col = 0; col < _m; ++col) {
            std::size_t p = col;
            for (std::size_t r = col + 1; r < _m; ++r) {
                if (std::abs(basis_matrix[r * _m + col]) > std::abs(basis_matrix[p * _m + col])) {
                    p = r;
                }
            }
            if (std::abs(basis_matrix[p * _m + col]) < 1e-12) {
                return;
            }
            if (p != col) {
                for (std::size_t k = 0; k < _m; ++k) {
                    std::swap(basis_matrix[p * _m + k], basis_matrix[col * _m + k]);
                }
                std::swap(b[p], b[col]);
            }
            const double pivot = basis_matrix[col * _m + col];
            for (std::size_t r = col + 1; r < _m; ++r) {
                const double f = basis_matrix[r * _m + col] / pivot;
                if (f == 0.0) {
                    continue;
                }
                for (std::size_t k = col; k < _m; ++k) {
                    basis_matrix[r * _m + k] -= f * basis_matrix[col * _m + k];
                }
                b[r] -= f * b[col];
            }
        }
        std::vector<double> x(_m);
        for (std::size_t i = _m; i-- > 0;) {
            double s = b[i];
            for (std::size_t k = i + 1; k < _m; ++k) {
                s -= basis_matrix[i * _m + k] * x[k];
            }
            x[i] = s / basis_matrix[i * _m + i];
        }
        _xb = std::move(x);
    }

    std::vector<double> column_values() const
    {
        std::vector<double> values(_n);
        for (std::size_t j = 0; j < _n; ++j) {
            values[j] = nonbasic_value(j);
        }
        for (std::size_t i = 0; i < _m; ++i) {
            values[_basis[i]] = _xb[i];
        }
        return values;
    }

private:
    void pivot(std::size_t r, std::size_t q)
    {
        double* row      = &_cells[r * _n];
        const double inv = 1.0 / row[q];
        std::vector<std::size_t> nonzero;
        for (std::size_t j = 0; j < _n; ++j) {
            if (row[j] != 0.0) {
                row[j] *= inv;
                nonzero.push_back(j);
            }
        }
        row[q] = 1.0;

        for (std::size_t i = 0; i < _m; ++i) {
            if (i == r) {
                continue;
            }
            double* other  = &_cells[i * _n];
            const double f = other[q];
            if (f == 0.0) {
                continue;
            }
            for (auto j : nonzero) {
                double v = other[j] - f * row[j];
                other[j] = std::abs(v) < drop_tolerance ? 0.0 : v;
            }
            other[q] = 0.0;
        }

        const double f = _reduced[q];
        if (f != 0.0) {
            for (auto j : nonzero) {
                _reduced[j] -= f * row[j];
            }
        }
        _reduced[q] = 0.0;

        _basis[r]  = q;
        _state[q]  = ColumnState::Basic;
    }

    std::size_t _m;
    std::size_t _n;
    std::vector<double> _cells;
    std::vector<double> _xb;
    std::vector<std::size_t> _basis;
    std::vector<ColumnState> _state;
    std::vector<double> _upper;
    std::vector<bool> _blocked;
    std::vector<double> _reduced;
};

}

IndexedProgram::IndexedProgram(const LinearProgram& lp)
{
    std::unordered_map<std::string, std::size_t> index;
    index.reserve(lp.variables.size());
    for (const auto& v : lp.variables) {
        index.emplace(v.name, lower.size());
        lower.push_back(v.lower);
        upper.push_back(v.upper);
        binary.push_back(v.binary);
    }

    rows.reserve(lp.constraints.size());
    for (const auto& c : lp.constraints) {
        Row row;
        row.relation = c.relation;
        row.rhs      = c.rhs;
        for (const auto& [name, coef] : c.coefficients) {
            if (coef != 0.0) {
                row.terms.emplace_back(index.at(name), coef);
            }
        }
        rows.push_back(std::move(row));
    }

    maximize = lp.objective.sense == Sense::Maximize;
    cost.assign(lower.size(), 0.0);
    for (const auto& [name, coef] : lp.objective.coefficients) {
        cost[index.at(name)] += maximize ? -coef : coef;
    }
}

SolveControl::SolveControl(const SolveOptions& options, std::size_t rows, std::size_t columns)
: _limit(options.iteration_limit != 0 ? options.iteration_limit : 50 * (rows + columns) + 5000)
, _deadline(options.deadline)
{
    if (_deadline && std::chrono::steady_clock::now() > *_deadline) {
        throw TimeoutError("solver deadline exceeded");
    }
}

void SolveControl::tick()
{
    ++_total;
    if (++_relaxation_iterations > _limit) {
        throw IterationLimit("simplex iteration limit exceeded");
    }
    if (_deadline && (_total & 31u) == 0 && std::chrono::steady_clock::now() > *_deadline) {
        throw TimeoutError("solver deadline exceeded");
    }
}

Relaxation solve_relaxation(const IndexedProgram& program, std::span<const double> lower, std::span<const double> upper,
                            SolveControl& control, bool zero_objective)
{
    control.reset_relaxation();

    const std::size_t nvars = program.size();
    for (std::size_t j = 0; j < nvars; ++j) {
        if (lower[j] > upper[j]) {
            return {};
        }
    }

    // Substitute every variable by nonnegative columns.
    std::vector<Substitution> subs(nvars);
    std::vector<double> col_upper;
    for (std::size_t j = 0; j < nvars; ++j) {
        auto& s = subs[j];
        s.column = col_upper.size();
        if (std::isfinite(lower[j])) {
            s.kind   = Substitution::Kind::Shifted;
            s.offset = lower[j];
            col_upper.push_back(std::isfinite(upper[j]) ? upper[j] - lower[j] : infinity);
        } else if (std::isfinite(upper[j])) {
            s.kind   = Substitution::Kind::Mirrored;
            s.offset = upper[j];
            col_upper.push_back(infinity);
        } else {
            s.kind = Substitution::Kind::Split;
            col_upper.push_back(infinity);
            col_upper.push_back(infinity);
        }
    }

    const std::size_t m  = program.rows.size();
    const std::size_t ns = col_upper.size();
    std::vector<double> a(m * ns, 0.0);
    std::vector<double> b(m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        const auto& row = program.rows[i];
        b[i]            = row.rhs;
        for (const auto& [j, coef] : row.terms) {
            const auto& s = subs[j];
            switch (s.kind) {
            case Substitution::Kind::Shifted:
                a[i * ns + s.column] += coef;
                b[i] -= coef * s.offset;
                break;
            case Substitution::Kind::Mirrored:
                a[i * ns + s.column] -= coef;
                b[i] -= coef * s.offset;
                break;
            case Substitution::Kind::Split:
                a[i * ns + s.column] += coef;
                a[i * ns + s.column + 1] -= coef;
                break;
            }
        }
    }
    std::vector<double> cost(ns, 0.0);
    if (!zero_objective) {
        for (std::size_t j = 0; j < nvars; ++j) {
            const auto& s = subs[j];
            const double c = program.cost[j];
            switch (s.kind) {
            case Substitution::Kind::Shifted:
                cost[s.column] += c;
                break;
            case Substitution::Kind::Mirrored:
                cost[s.column] -= c;
                break;
            case Substitution::Kind::Split:
                cost[s.column] += c;
                cost[s.column + 1] -= c;
                break;
            }
        }
    }

    // Geometric row/column scaling with power-of-two factors (exact in floating point).
    std::vector<double> row_scale(m, 1.0), col_scale(ns, 1.0);
    for (int pass = 0; pass < 4 && m > 0; ++pass) {
        for (std::size_t i = 0; i < m; ++i) {
            double lo = infinity, hi = 0.0;
            for (std::size_t j = 0; j < ns; ++j) {
                const double v = std::abs(a[i * ns + j]) * row_scale[i] * col_scale[j];
                if (v > 0.0) {
                    lo = std::min(lo, v);
                    hi = std::max(hi, v);
                }
            }
            if (hi > 0.0) {
                row_scale[i] /= nearest_power_of_two(std::sqrt(lo * hi));
            }
        }
        for (std::size_t j = 0; j < ns; ++j) {
            double lo = infinity, hi = 0.0;
            for (std::size_t i = 0; i < m; ++i) {
                const double v = std::abs(a[i * ns + j]) * row_scale[i] * col_scale[j];
                if (v > 0.0) {
                    lo = std::min(lo, v);
                    hi = std::max(hi, v);
                }
            }
            if (hi > 0.0) {
                col_scale[j] /= nearest_power_of_two(std::sqrt(lo * hi));
            }
        }
    }
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < ns; ++j) {
            a[i * ns + j] *= row_scale[i] * col_scale[j];
        }
        b[i] *= row_scale[i];
    }
    for (std::size_t j = 0; j < ns; ++j) {
        col_upper[j] /= col_scale[j];
        cost[j] *= col_scale[j];
    }

    // Slack columns for inequalities, then artificial columns for rows whose slack
    // cannot start in the basis.
    std::vector<double> slack_sign(m, 0.0);
    std::size_t nslack = 0;
    for (std::size_t i = 0; i < m; ++i) {
        switch (program.rows[i].relation) {
        case Relation::LessEqual:
            slack_sign[i] = 1.0;
            ++nslack;
            break;
        case Relation::GreaterEqual:
            slack_sign[i] = -1.0;
            ++nslack;
            break;
        case Relation::Equal:
            break;
        }
    }
    std::vector<double> row_sign(m, 1.0);
    std::size_t nart = 0;
    for (std::size_t i = 0; i < m; ++i) {
        if (b[i] < 0.0) {
            row_sign[i] = -1.0;
        }
        if (slack_sign[i] * row_sign[i] <= 0.0) {
            ++nart;
        }
    }

    const std::size_t n = ns + nslack + nart;
    Tableau tab(m, n);
    std::vector<double> original(m * n, 0.0);
    std::vector<double> rhs(m);
    std::vector<bool> is_artificial(n, false);
    std::size_t next_slack = ns, next_art = ns + nslack;
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < ns; ++j) {
            original[i * n + j] = row_sign[i] * a[i * ns + j];
        }
        rhs[i] = row_sign[i] * b[i];
        std::size_t basic = n;
        if (slack_sign[i] != 0.0) {
            const double coef                = slack_sign[i] * row_sign[i];
            original[i * n + next_slack]     = coef;
            if (coef > 0.0) {
                basic = next_slack;
            }
            ++next_slack;
        }
        if (basic == n) {
            original[i * n + next_art] = 1.0;
            is_artificial[next_art]    = true;
            basic                      = next_art++;
        }
        tab.set_basic(i, basic, rhs[i]);
    }
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            tab.at(i, j) = original[i * n + j];
        }
    }
    for (std::size_t j = 0; j < ns; ++j) {
        tab.set_upper(j, col_upper[j]);
    }

    if (nart > 0) {
        std::vector<double> phase1(n, 0.0);
        for (std::size_t j = 0; j < n; ++j) {
            if (is_artificial[j]) {
                phase1[j] = 1.0;
            }
        }
        tab.price(phase1);
        tab.iterate(control);

        for (std::size_t i = 0; i < m; ++i) {
            if (is_artificial[tab.basic(i)] && tab.basic_value(i) > feasibility_tolerance * relative(rhs[i])) {
                return {};
            }
        }
        // Drive remaining (zero-valued) artificials out of the basis where possible.
        for (std::size_t i = 0; i < m; ++i) {
            if (!is_artificial[tab.basic(i)]) {
                continue;
            }
            std::size_t best = n;
            double best_abs  = 1e-7;
            for (std::size_t j = 0; j < ns + nslack; ++j) {
                if (!tab.is_basic(j) && std::abs(tab.at(i, j)) > best_abs) {
                    best     = j;
                    best_abs = std::abs(tab.at(i, j));
                }
            }
            if (best != n) {
                tab.exchange(i, best);
            }
        }
        for (std::size_t j = 0; j < n; ++j) {
            if (is_artificial[j]) {
                tab.set_upper(j, 0.0);
                tab.block(j);
            }
        }
    }

    std::vector<double> phase2(n, 0.0);
    std::copy(cost.begin(), cost.end(), phase2.begin());
    tab.price(phase2);
    if (tab.iterate(control) == Status::Unbounded) {
        Relaxation r;
        r.status = Status::Unbounded;
        return r;
    }

    tab.refine(original, rhs);
    const auto y = tab.column_values();

    Relaxation result;
    result.status = Status::Optimal;
    result.values.resize(nvars);
    auto column = [&](std::size_t c) {
        double v = y[c];
        if (v < 0.0) {
            v = 0.0;
        }
        if (std::isfinite(col_upper[c]) && v > col_upper[c]) {
            v = col_upper[c];
        }
        return v * col_scale[c];
    };
    for (std::size_t j = 0; j < nvars; ++j) {
        const auto& s = subs[j];
        double x      = 0.0;
        switch (s.kind) {
        case Substitution::Kind::Shifted:
            x = s.offset + column(s.column);
            break;
        case Substitution::Kind::Mirrored:
            x = s.offset - column(s.column);
            break;
        case Substitution::Kind::Split:
            x = column(s.column) - column(s.column + 1);
            break;
        }
        if (std::isfinite(lower[j]) && std::abs(x - lower[j]) <= 1e-9 * relative(lower[j])) {
            x = lower[j];
        } else if (std::isfinite(upper[j]) && std::abs(x - upper[j]) <= 1e-9 * relative(upper[j])) {
            x = upper[j];
        }
        x                = std::clamp(x, lower[j], upper[j]);
        result.values[j] = x;
    }
    if (!zero_objective) {
        for (std::size_t j = 0; j < nvars; ++j) {
            result.objective += program.cost[j] * result.values[j];
        }
    }
    return result;
}

}
