#include "planopt/assessment.h"

#include <fmt/format.h>

#include <algorithm>

namespace planopt {

static void expect_size(std::size_t actual, std::size_t expected, std::string_view what)
{
    if (actual != expected) {
        throw DimensionError(fmt::format("{}: expected {} values, got {}", what, expected, actual));
    }
}

std::vector<double> compute_pressures(const PlanInstance& instance, std::span<const double> magnitudes)
{
    expect_size(magnitudes.size(), instance.activities.size(), "magnitudes");
    expect_size(instance.mop.rows(), instance.activities.size(), "mop rows");
    std::vector<double> pressures(instance.mop.cols(), 0.0);
    for (std::size_t i = 0; i < magnitudes.size(); ++i) {
        const double positive = std::max(magnitudes[i], 0.0);
        if (positive == 0.0) {
            continue;
        }
        for (std::size_t j = 0; j < pressures.size(); ++j) {
            pressures[j] += instance.mop(i, j) * positive;
        }
    }
    return pressures;
}

std::vector<double> compute_receptors(const PlanInstance& instance, std::span<const double> pressures)
{
    expect_size(pressures.size(), instance.mpr.rows(), "pressures");
    std::vector<double> receptors(instance.mpr.cols(), 0.0);
    for (std::size_t i = 0; i < pressures.size(); ++i) {
        for (std::size_t j = 0; j < receptors.size(); ++j) {
            receptors[j] += instance.mpr(i, j) * pressures[i];
        }
    }
    return receptors;
}

double fuel_energy_gj(const PlanInstance& instance, double power_mw)
{
    if (!(instance.efficiency > 0.0)) {
        throw ValidationError({}, {Violation{"efficiency", "must be positive to compute emissions"}});
    }
    // MW * h/yr = MWh/yr of output; divide by efficiency for input, then MWh -> GJ.
    return instance.hours_per_year / instance.efficiency * power_mw * gj_per_mwh;
}

std::vector<double> compute_emissions(const PlanInstance& instance, std::span<const double> boiler_powers)
{
    expect_size(boiler_powers.size(), instance.boilers.size(), "boiler powers");
    expect_size(instance.mec.cols(), instance.boilers.size(), "mec columns");
    std::vector<double> emissions(instance.mec.rows(), 0.0);
    for (std::size_t j = 0; j < boiler_powers.size(); ++j) {
        if (boiler_powers[j] < 0.0) {
            throw ValidationError({}, {Violation{fmt::format("boiler_powers.{}", instance.boilers[j].id),
                                                 "boiler power must be nonnegative"}});
        }
        const double fuel = fuel_energy_gj(instance, boiler_powers[j]);
        for (std::size_t i = 0; i < emissions.size(); ++i) {
            emissions[i] += instance.mec(i, j) * fuel;
        }
    }
    return emissions;
}

std::vector<IndicatorValues> compute_indicators(const PlanInstance& instance, std::span<const double> emissions)
{
    expect_size(emissions.size(), instance.emission_names.size(), "emissions");
    std::vector<IndicatorValues> result;
    result.reserve(instance.indicator_tables.size());
    for (const auto& table : instance.indicator_tables) {
        IndicatorValues total;
        for (std::size_t i = 0; i < emissions.size(); ++i) {
            const auto* f = table.find(instance.emission_names[i]);
            if (!f) {
                continue;
            }
            const double kg = emissions[i] * kg_per_g;
            total.best += f->best * kg;
            total.average += f->average * kg;
            total.worst += f->worst * kg;
        }
        result.push_back(total);
    }
    return result;
}

AssessmentResult assess(const PlanInstance& instance, std::span<const double> magnitudes,
                        std::span<const double> boiler_powers)
{
    AssessmentResult r;
    r.pressures  = compute_pressures(instance, magnitudes);
    r.receptors  = compute_receptors(instance, r.pressures);
    r.emissions  = compute_emissions(instance, boiler_powers);
    r.indicators = compute_indicators(instance, r.emissions);
    return r;
}

std::vector<Violation> check_bounds(const PlanInstance& instance, std::span<const double> magnitudes)
{
    expect_size(magnitudes.size(), instance.activities.size(), "magnitudes");
    std::vector<Violation> out;
    for (std::size_t i = 0; i < magnitudes.size(); ++i) {
        const auto& a = instance.activities[i];
        if (magnitudes[i] < a.lower || magnitudes[i] > a.upper) {
            out.push_back({fmt::format("magnitudes.{}", a.id),
                           fmt::format("value {} outside bounds [{}, {}]", magnitudes[i], a.lower, a.upper)});
        }
    }
    return out;
}

std::vector<double> align(const NamedValues& values, const std::vector<std::string>& names, const std::string& field)
{
    std::vector<double> result(names.size(), 0.0);
    for (const auto& [name, value] : values) {
        const auto it = std::find(names.begin(), names.end(), name);
        if (it == names.end()) {
            throw NameError(fmt::format("{}.{}", field, name), fmt::format("unknown name '{}'", name));
        }
        result[std::size_t(it - names.begin())] = value;
    }
    return result;
}

std::vector<double> align_magnitudes(const PlanInstance& instance, const NamedValues& magnitudes)
{
    std::vector<std::string> ids;
    for (const auto& a : instance.activities) {
        ids.push_back(a.id);
    }
    return align(magnitudes, ids, "magnitudes");
}

std::vector<double> align_boiler_powers(const PlanInstance& instance, const NamedValues& boiler_powers)
{
    std::vector<std::string> ids;
    for (const auto& b : instance.boilers) {
        ids.push_back(b.id);
    }
    return align(boiler_powers, ids, "boiler_powers");
}

}
