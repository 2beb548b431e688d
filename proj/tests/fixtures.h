#pragma once

// Small hand-built plan instances shared by the model, pareto and service suites.

#include "planopt/instance.h"
#include "planopt/quantity.h"

#include <random>
#include <vector>

namespace planopt::test {

Activity primary(std::string id, double lower, double upper, double cost = 0.0, double outcome = 0.0);
Activity secondary(std::string id, double lower, double upper, double cost = 0.0, double outcome = 0.0);

/// Instance skeleton: given activities, no pressures/receptors/boilers/emissions,
/// zero dependency matrices, budget and min_outcome as given, h = 1000, eta = 0.39.
PlanInstance bare_instance(std::vector<Activity> activities, double budget, double min_outcome);

/// One primary activity with bounds [0, 10], cost 2, outcome 1; budget 10, min outcome 3.
PlanInstance single_primary();

/// Primary a in [-5, 5] feeding secondary s with the given dependency coefficients.
PlanInstance split_pair(double dep_plus, double dep_minus);

/// Two primaries x, y in [0, 1] with x + y pinned to 1 by budget and outcome,
/// one pressure and one receptor per activity (identity maps).
PlanInstance toy_segment();

/// One 1 MW-capable primary with a single boiler, 1000 h/yr, eta 0.39, one emission
/// at 2 g/GJ and a NOx-style indicator table.
PlanInstance boiler_instance();

/// Random valid instance mixing split and plain primaries, secondaries, pressures,
/// receptors, boilers, emissions and indicators. Not necessarily feasible.
PlanInstance random_instance(std::mt19937_64& rng);

/// activity:<id> = value.
UserConstraint fix(const std::string& activity, double value);

/// Random objective of up to three weighted quantity keys over `in`, either sense.
ObjectiveSpec random_objective(const PlanInstance& in, std::mt19937_64& rng);

}
