#include "planopt/plan_model.h"
#include "planopt/assessment.h"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace planopt {

using lp::infinity;

std::string_view to_string(ScenarioKind kind) noexcept
{
    return kind == ScenarioKind::Boundary ? "boundary" : "intermediate";
}

std::size_t VariableMap::add(Entity entity, std::string name)
{
    const auto index = _entities.size();
    if (!_by_entity.emplace(entity, index).second || !_by_name.emplace(name, index).second) {
        throw std::logic_error(fmt::format("duplicate model variable {}", name));
    }
    _entities.push_back(entity);
    _names.push_back(std::move(name));
    return index;
}

std::optional<std::size_t> VariableMap::variable(Entity entity) const
{
    if (auto it = _by_entity.find(entity); it != _by_entity.end()) {
        return it->second;
    }
    return std::nullopt;
}

std::optional<Entity> VariableMap::entity(std::string_view name) const
{
    if (auto it = _by_name.find(std::string(name)); it != _by_name.end()) {
        return _entities[it->second];
    }
    return std::nullopt;
}

Entity VariableMap::entity(std::size_t variable) const
{
    return _entities.at(variable);
}

const std::string& VariableMap::name(std::size_t variable) const
{
    return _names.at(variable);
}

const std::string& VariableMap::name(Entity entity) const
{
    return _names.at(_by_entity.at(entity));
}

NoOptimum::NoOptimum(lp::Status status, std::string detail)
: Error(std::move(detail))
, _status(status)
{
}

std::string objective_label(const ObjectiveSpec& objective)
{
    return objective.label.empty() ? format_objective(objective.sense, objective.terms) : objective.label;
}

namespace {

class Builder
{
public:
    Builder(const PlanInstance& instance, PlanModel& model)
    : _in(instance)
    , _model(model)
    {
    }

    void variable(Entity e, std::string name, double lower, double upper, bool binary = false)
    {
        const auto index = _model.vars.add(e, name);
        const auto added = _model.lp.add_variable(std::move(name), lower, upper, binary);
        if (index != added) {
            throw std::logic_error("variable map out of sync with the program");
        }
    }

    const std::string& name(EntityKind kind, std::size_t index = 0) const
    {
        return _model.vars.name(Entity{kind, index});
    }

    bool has(EntityKind kind, std::size_t index) const
    {
        return _model.vars.variable(Entity{kind, index}).has_value();
    }

    // Variable carrying ope+ of an activity: P for split activities, ope otherwise.
    const std::string& positive_part(std::size_t activity) const
    {
        return has(EntityKind::PositivePart, activity) ? name(EntityKind::PositivePart, activity)
                                                       : name(EntityKind::Magnitude, activity);
    }

    void row(lp::Coefficients coefficients, lp::Relation relation, double rhs, std::string label)
    {
        std::erase_if(coefficients, [](const auto& kv) { return kv.second == 0.0; });
        _model.lp.add_constraint(std::move(coefficients), relation, rhs, std::move(label));
    }

    static void add(lp::Coefficients& c, const std::string& var, double coef)
    {
        if (coef != 0.0) {
            c[var] += coef;
        }
    }

private:
    const PlanInstance& _in;
    PlanModel& _model;
};

}

PlanModel build_lp(const PlanInstance& instance, const ObjectiveSpec& objective, const std::vector<UserConstraint>& extra)
{
    if (auto report = validate(instance); !report.ok()) {
        throw ValidationError("invalid instance", std::move(report.errors));
    }
    resolve_terms(instance, objective.terms, "objective");
    for (std::size_t k = 0; k < extra.size(); ++k) {
        resolve_terms(instance, extra[k].terms, fmt::format("constraints[{}]", k));
        if (!std::isfinite(extra[k].rhs)) {
            throw NameError(fmt::format("constraints[{}].rhs", k), "right-hand side must be finite");
        }
    }

    PlanModel model;
    Builder b(instance, model);
    const auto nact        = instance.activities.size();
    const auto primaries   = instance.primaries();
    const auto secondaries = instance.secondaries();

    for (std::size_t i = 0; i < nact; ++i) {
        const auto& a = instance.activities[i];
        b.variable({EntityKind::Magnitude, i}, fmt::format("ope[{}]", a.id), a.lower, a.upper);
    }
    for (std::size_t i = 0; i < nact; ++i) {
        if (!instance.decommissionable(i)) {
            continue;
        }
        const auto& a = instance.activities[i];
        b.variable({EntityKind::PositivePart, i}, fmt::format("pos[{}]", a.id), 0.0, std::max(a.upper, 0.0));
        b.variable({EntityKind::NegativePart, i}, fmt::format("neg[{}]", a.id), 0.0, std::max(-a.lower, 0.0));
        b.variable({EntityKind::Switch, i}, fmt::format("on[{}]", a.id), 0.0, 1.0, true);
    }
    for (std::size_t k = 0; k < instance.boilers.size(); ++k) {
        bool used = false;
        for (std::size_t i = 0; i < nact; ++i) {
            used = used || instance.moc(i, k) != 0.0;
        }
        // A boiler no activity can use stays off.
        b.variable({EntityKind::BoilerPower, k}, fmt::format("b[{}]", instance.boilers[k].id), 0.0, used ? infinity : 0.0);
    }
    for (std::size_t j = 0; j < instance.pressure_names.size(); ++j) {
        b.variable({EntityKind::Pressure, j}, fmt::format("pre[{}]", instance.pressure_names[j]), 0.0, infinity);
    }
    for (std::size_t j = 0; j < instance.receptor_names.size(); ++j) {
        b.variable({EntityKind::Receptor, j}, fmt::format("ric[{}]", instance.receptor_names[j]), 0.0, infinity);
    }
    for (std::size_t j = 0; j < instance.emission_names.size(); ++j) {
        b.variable({EntityKind::Emission, j}, fmt::format("em[{}]", instance.emission_names[j]), 0.0, infinity);
    }
    for (std::size_t t = 0; t < instance.indicator_tables.size(); ++t) {
        b.variable({EntityKind::Indicator, t}, fmt::format("ind[{}]", instance.indicator_tables[t].name), -infinity, infinity);
    }
    b.variable({EntityKind::TotalCost, 0}, "total_cost", -infinity, infinity);
    b.variable({EntityKind::TotalOutcome, 0}, "total_outcome", -infinity, infinity);

    // Positive/negative part split with complementarity switch.
    for (std::size_t i = 0; i < nact; ++i) {
        if (!instance.decommissionable(i)) {
            continue;
        }
        const auto& a   = instance.activities[i];
        const auto& ope = b.name(EntityKind::Magnitude, i);
        const auto& pos = b.name(EntityKind::PositivePart, i);
        const auto& neg = b.name(EntityKind::NegativePart, i);
        const auto& on  = b.name(EntityKind::Switch, i);
        const double up = std::max(a.upper, 0.0);
        const double dn = std::max(-a.lower, 0.0);
        b.row({{ope, 1.0}, {pos, -1.0}, {neg, 1.0}}, lp::Relation::Equal, 0.0, fmt::format("split[{}]", a.id));
        b.row({{pos, 1.0}, {on, -up}}, lp::Relation::LessEqual, 0.0, fmt::format("pos_on[{}]", a.id));
        b.row({{neg, 1.0}, {on, dn}}, lp::Relation::LessEqual, dn, fmt::format("neg_off[{}]", a.id));
    }

    // Secondary activities from primary positive and negative parts.
    for (std::size_t s = 0; s < secondaries.size(); ++s) {
        const auto j = secondaries[s];
        lp::Coefficients c{{b.name(EntityKind::Magnitude, j), 1.0}};
        for (std::size_t p = 0; p < primaries.size(); ++p) {
            const auto i = primaries[p];
            Builder::add(c, b.positive_part(i), -instance.dep_plus(p, s));
            if (b.has(EntityKind::NegativePart, i)) {
                Builder::add(c, b.name(EntityKind::NegativePart, i), -instance.dep_minus(p, s));
            }
        }
        b.row(std::move(c), lp::Relation::Equal, 0.0, fmt::format("dep[{}]", instance.activities[j].id));
    }

    // Cost on positive parts, outcome on magnitudes.
    {
        lp::Coefficients cost{{"total_cost", 1.0}};
        lp::Coefficients outcome{{"total_outcome", 1.0}};
        for (std::size_t i = 0; i < nact; ++i) {
            Builder::add(cost, b.positive_part(i), -instance.activities[i].unit_cost);
            Builder::add(outcome, b.name(EntityKind::Magnitude, i), -instance.activities[i].unit_outcome);
        }
        b.row(std::move(cost), lp::Relation::Equal, 0.0, "def[total_cost]");
        b.row({{"total_cost", 1.0}}, lp::Relation::LessEqual, instance.budget, "budget");
        b.row(std::move(outcome), lp::Relation::Equal, 0.0, "def[total_outcome]");
        b.row({{"total_outcome", 1.0}}, lp::Relation::GreaterEqual, instance.min_outcome, "min_outcome");
    }

    // Boiler coupling on activities with boiler rows (never split, see validate()).
    for (std::size_t i = 0; i < nact; ++i) {
        if (!instance.has_boilers(i)) {
            continue;
        }
        lp::Coefficients c{{b.positive_part(i), 1.0}};
        for (std::size_t k = 0; k < instance.boilers.size(); ++k) {
            Builder::add(c, b.name(EntityKind::BoilerPower, k), -instance.moc(i, k));
        }
        b.row(std::move(c), lp::Relation::Equal, 0.0, fmt::format("boilers[{}]", instance.activities[i].id));
    }

    for (std::size_t j = 0; j < instance.pressure_names.size(); ++j) {
        lp::Coefficients c{{b.name(EntityKind::Pressure, j), 1.0}};
        for (std::size_t i = 0; i < nact; ++i) {
            Builder::add(c, b.positive_part(i), -instance.mop(i, j));
        }
        b.row(std::move(c), lp::Relation::Equal, 0.0, fmt::format("def[pre:{}]", instance.pressure_names[j]));
    }
    for (std::size_t j = 0; j < instance.receptor_names.size(); ++j) {
        lp::Coefficients c{{b.name(EntityKind::Receptor, j), 1.0}};
        for (std::size_t i = 0; i < instance.pressure_names.size(); ++i) {
            Builder::add(c, b.name(EntityKind::Pressure, i), -instance.mpr(i, j));
        }
        b.row(std::move(c), lp::Relation::Equal, 0.0, fmt::format("def[ric:{}]", instance.receptor_names[j]));
    }
    const double fuel_per_mw = instance.boilers.empty() ? 0.0 : fuel_energy_gj(instance, 1.0);
    for (std::size_t e = 0; e < instance.emission_names.size(); ++e) {
        lp::Coefficients c{{b.name(EntityKind::Emission, e), 1.0}};
        for (std::size_t k = 0; k < instance.boilers.size(); ++k) {
            Builder::add(c, b.name(EntityKind::BoilerPower, k), -instance.mec(e, k) * fuel_per_mw);
        }
        b.row(std::move(c), lp::Relation::Equal, 0.0, fmt::format("def[em:{}]", instance.emission_names[e]));
    }
    for (std::size_t t = 0; t < instance.indicator_tables.size(); ++t) {
        const auto& table = instance.indicator_tables[t];
        lp::Coefficients c{{b.name(EntityKind::Indicator, t), 1.0}};
        for (std::size_t e = 0; e < instance.emission_names.size(); ++e) {
            if (const auto* f = table.find(instance.emission_names[e])) {
                Builder::add(c, b.name(EntityKind::Emission, e), -f->worst * kg_per_g);
            }
        }
        b.row(std::move(c), lp::Relation::Equal, 0.0, fmt::format("def[ind:{}]", table.name));
    }

    for (std::size_t k = 0; k < extra.size(); ++k) {
        b.row(linear_form(model, extra[k].terms), extra[k].relation, extra[k].rhs, fmt::format("user[{}]", k));
    }

    // Canonical minimization; maximization objectives are negated.
    auto coefficients = linear_form(model, objective.terms);
    if (objective.sense == lp::Sense::Maximize) {
        for (auto& [var, coef] : coefficients) {
            coef = -coef;
        }
    }
    std::erase_if(coefficients, [](const auto& kv) { return kv.second == 0.0; });
    model.lp.objective = lp::Objective{std::move(coefficients), lp::Sense::Minimize};
    return model;
}

lp::Coefficients linear_form(const PlanModel& model, const Terms& terms)
{
    lp::Coefficients c;
    for (const auto& [key, weight] : terms) {
        std::optional<Entity> entity;
        switch (key.kind) {
        case QuantityKind::TotalCost:
            entity = Entity{EntityKind::TotalCost, 0};
            break;
        case QuantityKind::TotalOutcome:
            entity = Entity{EntityKind::TotalOutcome, 0};
            break;
        case QuantityKind::Activity:
            entity = model.vars.entity("ope[" + key.name + "]");
            break;
        case QuantityKind::Receptor:
            entity = model.vars.entity("ric[" + key.name + "]");
            break;
        case QuantityKind::Emission:
            entity = model.vars.entity("em[" + key.name + "]");
            break;
        case QuantityKind::Indicator:
            entity = model.vars.entity("ind[" + key.name + "]");
            break;
        }
        if (!entity) {
            throw NameError(key.to_string(), fmt::format("unknown quantity {}", key.to_string()));
        }
        c[model.vars.name(*entity)] += weight;
    }
    return c;
}

double evaluate(const Scenario& scenario, const Terms& terms)
{
    double total = 0.0;
    for (const auto& [key, weight] : terms) {
        std::optional<double> value;
        switch (key.kind) {
        case QuantityKind::TotalCost:
            value = scenario.total_cost;
            break;
        case QuantityKind::TotalOutcome:
            value = scenario.total_outcome;
            break;
        case QuantityKind::Activity:
            value = lookup(scenario.magnitudes, key.name);
            break;
        case QuantityKind::Receptor:
            value = lookup(scenario.receptors, key.name);
            break;
        case QuantityKind::Emission:
            value = lookup(scenario.emissions, key.name);
            break;
        case QuantityKind::Indicator:
            for (const auto& [name, triple] : scenario.indicators) {
                if (name == key.name) {
                    value = triple.worst;
                }
            }
            break;
        }
        if (!value) {
            throw NameError(key.to_string(), fmt::format("scenario has no quantity {}", key.to_string()));
        }
        total += weight * *value;
    }
    return total;
}

namespace {

bool close(double a, double b)
{
    return std::abs(a - b) <= 1e-6 * std::max({1.0, std::abs(a), std::abs(b)});
}

void cross_check(const std::vector<double>& solver, const std::vector<double>& recomputed, std::string_view what)
{
    for (std::size_t i = 0; i < solver.size(); ++i) {
        if (!close(solver[i], recomputed[i])) {
            throw std::logic_error(
                fmt::format("{} {} disagrees with its assessment: solver {} vs {}", what, i, solver[i], recomputed[i]));
        }
    }
}

}

Scenario extract_scenario(const PlanInstance& instance, const lp::Solution& solution, const PlanModel& model,
                          const std::vector<ObjectiveSpec>& objectives, ScenarioKind kind)
{
    if (!solution.optimal()) {
        throw Error(fmt::format("cannot extract a scenario from a {} solution", lp::to_string(solution.status)));
    }
    const auto& vars = model.vars;
    auto value       = [&](EntityKind k, std::size_t i) { return solution.values.at(*vars.variable(Entity{k, i})); };
    auto values      = [&](EntityKind k, std::size_t n) {
        std::vector<double> out(n);
        for (std::size_t i = 0; i < n; ++i) {
            out[i] = value(k, i);
        }
        return out;
    };

    const auto nact = instance.activities.size();
    std::vector<double> magnitudes = values(EntityKind::Magnitude, nact);
    for (std::size_t i = 0; i < nact; ++i) {
        // P and N sit exactly on their bounds when switched off.
        if (vars.variable(Entity{EntityKind::PositivePart, i})) {
            magnitudes[i] = value(EntityKind::PositivePart, i) - value(EntityKind::NegativePart, i);
        }
    }
    std::vector<double> boilers    = values(EntityKind::BoilerPower, instance.boilers.size());
    for (auto& p : boilers) {
        p = std::max(p, 0.0);
    }

    const auto result = assess(instance, magnitudes, boilers);
    cross_check(values(EntityKind::Pressure, instance.pressure_names.size()), result.pressures, "pressure");
    cross_check(values(EntityKind::Receptor, instance.receptor_names.size()), result.receptors, "receptor");
    cross_check(values(EntityKind::Emission, instance.emission_names.size()), result.emissions, "emission");
    {
        std::vector<double> worst;
        for (const auto& t : result.indicators) {
            worst.push_back(t.worst);
        }
        cross_check(values(EntityKind::Indicator, instance.indicator_tables.size()), worst, "indicator");
    }

    Scenario s;
    s.kind = kind;
    for (std::size_t i = 0; i < nact; ++i) {
        const auto& a         = instance.activities[i];
        const double positive = std::max(magnitudes[i], 0.0);
        s.magnitudes.emplace_back(a.id, magnitudes[i]);
        s.positive_parts.emplace_back(a.id, positive);
        s.activity_costs.emplace_back(a.id, positive * a.unit_cost);
        s.activity_outcomes.emplace_back(a.id, magnitudes[i] * a.unit_outcome);
        s.total_cost += positive * a.unit_cost;
        s.total_outcome += magnitudes[i] * a.unit_outcome;
    }
    for (std::size_t j = 0; j < instance.pressure_names.size(); ++j) {
        s.pressures.emplace_back(instance.pressure_names[j], result.pressures[j]);
    }
    for (std::size_t j = 0; j < instance.receptor_names.size(); ++j) {
        s.receptors.emplace_back(instance.receptor_names[j], result.receptors[j]);
    }
    for (std::size_t k = 0; k < instance.boilers.size(); ++k) {
        s.boiler_powers.emplace_back(instance.boilers[k].id, boilers[k]);
    }
    for (std::size_t e = 0; e < instance.emission_names.size(); ++e) {
        s.emissions.emplace_back(instance.emission_names[e], result.emissions[e]);
    }
    for (std::size_t t = 0; t < instance.indicator_tables.size(); ++t) {
        s.indicators.emplace_back(instance.indicator_tables[t].name, result.indicators[t]);
    }
    for (const auto& objective : objectives) {
        s.objective_values.emplace_back(objective_label(objective), evaluate(s, objective.terms));
    }
    return s;
}

Scenario solve_plan(const PlanInstance& instance, const ObjectiveSpec& objective, const std::vector<UserConstraint>& extra,
                    const lp::SolveOptions& options)
{
    const auto model    = build_lp(instance, objective, extra);
    const auto solution = lp::solve(model.lp, options);
    if (!solution.optimal()) {
        throw NoOptimum(solution.status, fmt::format("the plan model is {}", lp::to_string(solution.status)));
    }
    return extract_scenario(instance, solution, model, {objective}, ScenarioKind::Boundary);
}

}
