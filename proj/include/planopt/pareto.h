#pragma once

#include "planopt/plan_model.h"

#include <cstddef>
#include <string>
#include <vector>

// Multi-objective fronts by the normalized normal constraint method:
//   1. solve every objective alone (anchors, the boundary scenarios);
//   2. normalize objectives so the utopia point is 0 and the worst anchor value 1;
//   3. spread reference points evenly over the hyperplane through the anchors;
//   4. per reference point, minimize the last objective with every other anchor
//      direction cut off by a normal constraint through the point;
//   5. keep the non-dominated optima.
namespace planopt {

/// Largest accepted `points`.
inline constexpr int max_points = 10000;

struct ParetoRequest
{
    std::vector<ObjectiveSpec> objectives; // at least two, unique labels
    int points = 0;                        // at least two
    std::vector<UserConstraint> extra;
};

struct ParetoOptions
{
    lp::SolveOptions solve;
    // Worker threads for the subproblems; 0 picks the hardware concurrency.
    unsigned threads = 0;
};

struct ParetoFront
{
    std::vector<std::string> objectives;          // labels, request order
    std::vector<std::string> constant_objectives; // equal at every anchor
    std::vector<Scenario> scenarios;               // ordered by objective values, first objective first
    std::vector<double> utopia;                    // best anchor value per objective, user sense
    std::vector<double> nadir_estimate;            // worst anchor value per objective, user sense
    std::size_t dropped = 0;                       // subproblems that failed or were filtered out

    bool operator==(const ParetoFront&) const = default;
};

struct Normalization
{
    std::vector<double> utopia;       // min-sense
    std::vector<double> denominators; // max anchor value - utopia, or 1 when that is 0
    std::vector<bool> constant;
};

/// Throws ValidationError listing every broken request invariant (objective count,
/// points, duplicate labels, unresolved names).
void check_request(const PlanInstance& instance, const ParetoRequest& request);

/// Makes labels unique by suffixing repeats with " #2", " #3", ... in order.
void disambiguate_labels(std::vector<ObjectiveSpec>& objectives);

/// Objective value to be minimized: the value itself, negated for maximization.
double min_sense(const ObjectiveSpec& objective, double value);

/// Minimization terms of an objective (weights negated for maximization).
Terms min_sense_terms(const ObjectiveSpec& objective);

/// One boundary scenario per objective. Each anchor minimizes its objective and
/// then, among those optima, the sum of the remaining objectives, so anchors are
/// not weakly dominated. Throws NoOptimum (naming the culprit user constraint when
/// one makes the plan infeasible).
std::vector<Scenario> compute_anchors(const PlanInstance& instance, const ParetoRequest& request,
                                      const ParetoOptions& options = {});

/// anchor_values[k][j]: objective j (min sense) at anchor k.
Normalization normalize(const std::vector<std::vector<double>>& anchor_values);

/// Convex weights; n = 2 gives `points` evenly spaced pairs, n > 2 the simplex
/// lattice of the smallest resolution with at least `points` members. Ordered with
/// the first weight descending, then the next, and so on.
std::vector<std::vector<double>> reference_points(std::size_t n, int points);

/// Scenarios not strictly dominated by another (minimization sense per objective,
/// relative tolerance 1e-9). Duplicates collapse into the member with the
/// lexicographically smallest magnitudes; it is tagged boundary when any member
/// was. Result ordered by objective values. Throws Error on a missing value.
std::vector<Scenario> pareto_filter(std::vector<Scenario> scenarios, const std::vector<ObjectiveSpec>& objectives);

/// Whole front. Subproblems without an optimum are dropped; TimeoutError propagates.
ParetoFront nnc_front(const PlanInstance& instance, const ParetoRequest& request, const ParetoOptions& options = {});

}
