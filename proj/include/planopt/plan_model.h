#pragma once

#include "planopt/instance.h"
#include "planopt/lp.h"
#include "planopt/quantity.h"

#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace planopt {

enum class ScenarioKind
{
    Boundary,     // optimizes a single objective
    Intermediate, // balances several objectives
};

std::string_view to_string(ScenarioKind kind) noexcept;

/// One solved plan together with its assessment.
struct Scenario
{
    ScenarioKind kind = ScenarioKind::Boundary;
    NamedValues magnitudes;     // per activity
    NamedValues positive_parts; // max(magnitude, 0)
    NamedValues pressures;
    NamedValues receptors;
    NamedValues boiler_powers;  // MW
    NamedValues emissions;      // g/yr
    std::vector<std::pair<std::string, IndicatorValues>> indicators;
    double total_cost    = 0.0;
    double total_outcome = 0.0;
    NamedValues objective_values; // objective label -> value, in the objective's own sense
    NamedValues activity_costs;    // positive part * unit cost
    NamedValues activity_outcomes; // magnitude * unit outcome

    bool operator==(const Scenario&) const = default;
};

/// Value of a weighted quantity expression on a scenario.
double evaluate(const Scenario& scenario, const Terms& terms);

enum class EntityKind
{
    Magnitude,
    PositivePart,
    NegativePart,
    Switch, // complementarity binary of a split activity
    BoilerPower,
    Pressure,
    Receptor,
    Emission,
    Indicator, // worst case
    TotalCost,
    TotalOutcome,
};

struct Entity
{
    EntityKind kind   = EntityKind::Magnitude;
    std::size_t index = 0; // activity/boiler/pressure/... index in the instance

    auto operator<=>(const Entity&) const = default;
};

/// Bidirectional mapping between model entities and LP variables.
class VariableMap
{
public:
    std::size_t add(Entity entity, std::string name);

    std::optional<std::size_t> variable(Entity entity) const;
    std::optional<Entity> entity(std::string_view name) const;
    Entity entity(std::size_t variable) const;
    const std::string& name(std::size_t variable) const;
    const std::string& name(Entity entity) const;

    std::size_t size() const noexcept
    {
        return _entities.size();
    }

private:
    std::map<Entity, std::size_t> _by_entity;
    std::unordered_map<std::string, std::size_t> _by_name;
    std::vector<Entity> _entities;
    std::vector<std::string> _names;
};

struct PlanModel
{
    lp::LinearProgram lp;
    VariableMap vars;
};

/// Translates instance + objective + extra constraints into a MILP:
///  - primaries with a negative lower bound are split as ope = P - N with a
///    binary switching P (ope >= 0) or N (ope < 0) on;
///  - secondaries follow ope_j = sum_i dep+_ij * P_i + dep-_ij * N_i;
///  - cost is charged on positive parts only, outcome on magnitudes;
///  - boiler powers sum to the magnitude of activities with boiler rows;
///  - pressures, receptors, emissions, worst-case indicators, total cost and total
///    outcome get defining equality rows so objective terms are single variables.
/// Throws ValidationError for an invalid instance and NameError for unresolved terms.
PlanModel build_lp(const PlanInstance& instance, const ObjectiveSpec& objective, const std::vector<UserConstraint>& extra);

/// Linear form of a quantity expression over the model variables.
lp::Coefficients linear_form(const PlanModel& model, const Terms& terms);

/// Label used for an objective: its own label or the canonical text.
std::string objective_label(const ObjectiveSpec& objective);

/// Assembles a Scenario from an optimal solution. Derived quantities come from the
/// assessment module and are cross-checked against the solver's auxiliary values.
Scenario extract_scenario(const PlanInstance& instance, const lp::Solution& solution, const PlanModel& model,
                          const std::vector<ObjectiveSpec>& objectives, ScenarioKind kind);

/// Raised when an optimization has no optimum.
class NoOptimum : public Error
{
public:
    NoOptimum(lp::Status status, std::string detail);

    lp::Status status() const noexcept
    {
        return _status;
    }

private:
    lp::Status _status;
};

/// build_lp + solve + extract_scenario for a single objective. Throws NoOptimum when
/// the model is infeasible or unbounded.
Scenario solve_plan(const PlanInstance& instance, const ObjectiveSpec& objective, const std::vector<UserConstraint>& extra,
                    const lp::SolveOptions& options = {});

}
