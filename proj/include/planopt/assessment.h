#pragma once

#include "planopt/instance.h"

#include <span>
#include <vector>

// Environmental assessment of a fixed plan, independent of the optimizer:
// pressures from positive activity parts, receptors from pressures, emissions
// from boiler output power, and best/average/worst indicator aggregates.
namespace planopt {

/// GJ per MWh.
inline constexpr double gj_per_mwh = 3.6;
/// Indicator factors are per kg while emissions are in g.
inline constexpr double kg_per_g = 1e-3;

struct AssessmentResult
{
    std::vector<double> pressures; // per pressure
    std::vector<double> receptors; // per receptor
    std::vector<double> emissions; // per emission, g/yr
    std::vector<IndicatorValues> indicators; // per indicator table, kg equivalent

    bool operator==(const AssessmentResult&) const = default;
};

/// pressure_j = sum_i mop_ij * max(magnitude_i, 0)
std::vector<double> compute_pressures(const PlanInstance& instance, std::span<const double> magnitudes);

/// receptor_j = sum_i mpr_ij * pressure_i
std::vector<double> compute_receptors(const PlanInstance& instance, std::span<const double> pressures);

/// Fuel energy (GJ/yr) burned by `power_mw` of boiler output running
/// hours_per_year at the instance efficiency.
double fuel_energy_gj(const PlanInstance& instance, double power_mw);

/// emission_i = sum_j mec_ij * fuel_energy_gj(b_j), in g/yr.
std::vector<double> compute_emissions(const PlanInstance& instance, std::span<const double> boiler_powers);

/// For every indicator table and case: sum_i factor(case, emission_i) * emission_i[kg].
/// Emissions without a factor row contribute nothing.
std::vector<IndicatorValues> compute_indicators(const PlanInstance& instance, std::span<const double> emissions);

AssessmentResult assess(const PlanInstance& instance, std::span<const double> magnitudes,
                        std::span<const double> boiler_powers);

/// Violations for magnitudes outside their activity bounds (path "magnitudes.<id>").
std::vector<Violation> check_bounds(const PlanInstance& instance, std::span<const double> magnitudes);

/// Aligns named values with `names`; unknown names throw NameError (path `field`),
/// absent names read as 0.
std::vector<double> align(const NamedValues& values, const std::vector<std::string>& names, const std::string& field);

std::vector<double> align_magnitudes(const PlanInstance& instance, const NamedValues& magnitudes);
std::vector<double> align_boiler_powers(const PlanInstance& instance, const NamedValues& boiler_powers);

}
