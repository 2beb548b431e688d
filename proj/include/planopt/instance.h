#pragma once

#include "planopt/error.h"

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace planopt {

/// Dense row-major matrix of reals.
class Matrix
{
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
    : _rows(rows)
    , _cols(cols)
    , _data(rows * cols, fill)
    {
    }

    std::size_t rows() const noexcept
    {
        return _rows;
    }

    std::size_t cols() const noexcept
    {
        return _cols;
    }

    double& operator()(std::size_t r, std::size_t c)
    {
        return _data[r * _cols + c];
    }

    double operator()(std::size_t r, std::size_t c) const
    {
        return _data[r * _cols + c];
    }

    bool operator==(const Matrix&) const = default;

private:
    std::size_t _rows = 0;
    std::size_t _cols = 0;
    std::vector<double> _data;
};

enum class ActivityKind
{
    Primary,
    Secondary,
};

std::string_view to_string(ActivityKind kind) noexcept;

struct Activity
{
    std::string id;
    std::string name;
    ActivityKind kind = ActivityKind::Primary;
    double lower      = 0.0; // magnitude units (e.g. MW); negative means decommissioning
    double upper      = 0.0;
    double unit_cost    = 0.0;
    double unit_outcome = 0.0;

    bool operator==(const Activity&) const = default;
};

struct BoilerType
{
    std::string id;
    std::string name;

    bool operator==(const BoilerType&) const = default;
};

/// Best/average/worst factors of one emission for one indicator, in kg of
/// reference-substance equivalent per kg emitted.
struct IndicatorFactors
{
    double best    = 0.0;
    double average = 0.0;
    double worst   = 0.0;

    bool operator==(const IndicatorFactors&) const = default;
};

/// Named reals in a fixed order (instance order when produced by the engine).
using NamedValues = std::vector<std::pair<std::string, double>>;

std::optional<double> lookup(const NamedValues& values, std::string_view name);

using IndicatorValues = IndicatorFactors;

/// Best/worst/average factors over the members of a compound class: the lowest
/// factor, the highest one and their arithmetic mean.
IndicatorFactors factors_from_members(const std::vector<double>& members);

struct IndicatorTable
{
    std::string name;
    std::vector<std::pair<std::string, IndicatorFactors>> rows; // emission name -> factors

    const IndicatorFactors* find(std::string_view emission) const;

    bool operator==(const IndicatorTable&) const = default;
};

/// One regional plan problem. Matrix layouts:
///   dep_plus, dep_minus  primary x secondary (activities in instance order)
///   mop                  activity x pressure
///   mpr                  pressure x receptor
///   moc                  activity x boiler, entries 0/1
///   mec                  emission x boiler, g/GJ
struct PlanInstance
{
    std::string name;
    std::vector<Activity> activities;
    double budget      = 0.0;
    double min_outcome = 0.0;
    Matrix dep_plus;
    Matrix dep_minus;
    Matrix mop;
    Matrix mpr;
    std::vector<std::string> pressure_names;
    std::vector<std::string> receptor_names;
    std::vector<BoilerType> boilers;
    Matrix moc;
    Matrix mec;
    std::vector<std::string> emission_names;
    std::vector<IndicatorTable> indicator_tables;
    double hours_per_year = 0.0; // h/yr
    double efficiency     = 0.0; // output/input power, (0, 1]
    // Optional display grouping of emissions (emission name -> group label).
    std::vector<std::pair<std::string, std::string>> emission_groups;

    std::vector<std::size_t> primaries() const;
    std::vector<std::size_t> secondaries() const;

    std::optional<std::size_t> activity_index(std::string_view id) const;
    std::optional<std::size_t> pressure_index(std::string_view name) const;
    std::optional<std::size_t> receptor_index(std::string_view name) const;
    std::optional<std::size_t> emission_index(std::string_view name) const;
    std::optional<std::size_t> boiler_index(std::string_view id) const;
    std::optional<std::size_t> indicator_index(std::string_view name) const;

    /// True when the activity is primary with a negative lower bound, i.e. it is
    /// modeled with a positive/negative part split.
    bool decommissionable(std::size_t activity) const;
    bool has_boilers(std::size_t activity) const;

    bool operator==(const PlanInstance&) const = default;
};

struct ValidationReport
{
    std::vector<Violation> errors;
    std::vector<Violation> warnings;

    bool ok() const noexcept
    {
        return errors.empty();
    }
};

/// Checks every PlanInstance invariant. Missing indicator factor rows are warnings.
ValidationReport validate(const PlanInstance& instance);

}
