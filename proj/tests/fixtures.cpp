#include "fixtures.h"

#include <algorithm>
#include <cmath>

namespace planopt::test {

Activity primary(std::string id, double lower, double upper, double cost, double outcome)
{
    return Activity{id, id, ActivityKind::Primary, lower, upper, cost, outcome};
}

Activity secondary(std::string id, double lower, double upper, double cost, double outcome)
{
    return Activity{id, id, ActivityKind::Secondary, lower, upper, cost, outcome};
}

PlanInstance bare_instance(std::vector<Activity> activities, double budget, double min_outcome)
{
    PlanInstance in;
    in.name        = "fixture";
    in.activities  = std::move(activities);
    in.budget      = budget;
    in.min_outcome = min_outcome;
    const auto np  = in.primaries().size();
    const auto ns  = in.secondaries().size();
    const auto na  = in.activities.size();
    in.dep_plus    = Matrix(np, ns);
    in.dep_minus   = Matrix(np, ns);
    in.mop         = Matrix(na, 0);
    in.mpr         = Matrix(0, 0);
    in.moc         = Matrix(na, 0);
    in.mec         = Matrix(0, 0);
    in.hours_per_year = 1000.0;
    in.efficiency     = 0.39;
    return in;
}

PlanInstance single_primary()
{
    return bare_instance({primary("a", 0, 10, 2, 1)}, 10, 3);
}

PlanInstance split_pair(double dep_plus, double dep_minus)
{
    auto in            = bare_instance({primary("a", -5, 5, 1, 0), secondary("s", 0, 100, 0, 0)}, 1000, -1000);
    in.dep_plus(0, 0)  = dep_plus;
    in.dep_minus(0, 0) = dep_minus;
    return in;
}

PlanInstance toy_segment()
{
    auto in           = bare_instance({primary("x", 0, 1, 1, 1), primary("y", 0, 1, 1, 1)}, 1, 1);
    in.name           = "toy-segment";
    in.pressure_names = {"p1", "p2"};
    in.receptor_names = {"r1", "r2"};
    in.mop            = Matrix(2, 2);
    in.mpr            = Matrix(2, 2);
    for (std::size_t i = 0; i < 2; ++i) {
        in.mop(i, i) = 1.0;
        in.mpr(i, i) = 1.0;
    }
    return in;
}

PlanInstance boiler_instance()
{
    auto in           = bare_instance({primary("plant", 0, 1, 1, 1)}, 10, 1);
    in.boilers        = {BoilerType{"grate", "Grate"}};
    in.moc            = Matrix(1, 1, 1.0);
    in.emission_names = {"NOx"};
    in.mec            = Matrix(1, 1, 2.0);
    in.indicator_tables = {IndicatorTable{"human_toxicity", {{"NOx", factors_from_members({95, 300})}}}};
    return in;
}

PlanInstance random_instance(std::mt19937_64& rng)
{
    auto uniform = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
    auto count   = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
    auto coin    = [&](double p) { return std::bernoulli_distribution(p)(rng); };

    std::vector<Activity> acts;
    const int np = count(1, 4);
    const int ns = count(0, 3);
    for (int i = 0; i < np; ++i) {
        const double lower = coin(0.5) ? -std::round(uniform(1, 20)) : 0.0;
        acts.push_back(primary("p" + std::to_string(i), lower, std::round(uniform(1, 20)), std::round(uniform(0, 10)),
                               std::round(uniform(-2, 5))));
    }
    for (int j = 0; j < ns; ++j) {
        acts.push_back(secondary("s" + std::to_string(j), 0, std::round(uniform(5, 60)), std::round(uniform(0, 5)),
                                 std::round(uniform(-1, 3))));
    }
    auto in = bare_instance(std::move(acts), std::round(uniform(20, 200)), std::round(uniform(-20, 20)));
    for (std::size_t i = 0; i < in.dep_plus.rows(); ++i) {
        for (std::size_t j = 0; j < in.dep_plus.cols(); ++j) {
            in.dep_plus(i, j)  = coin(0.6) ? std::round(uniform(0, 4)) / 4 : 0.0;
            in.dep_minus(i, j) = coin(0.6) ? std::round(uniform(0, 4)) / 4 : 0.0;
        }
    }

    const auto na = in.activities.size();
    const int npre = count(0, 3);
    const int nric = count(0, 2);
    for (int j = 0; j < npre; ++j) {
        in.pressure_names.push_back("pre" + std::to_string(j));
    }
    for (int j = 0; j < nric; ++j) {
        in.receptor_names.push_back("ric" + std::to_string(j));
    }
    in.mop = Matrix(na, npre);
    for (std::size_t i = 0; i < na; ++i) {
        for (int j = 0; j < npre; ++j) {
            in.mop(i, j) = std::round(uniform(0, 4)) / 4;
        }
    }
    in.mpr = Matrix(npre, nric);
    for (int i = 0; i < npre; ++i) {
        for (int j = 0; j < nric; ++j) {
            in.mpr(i, j) = std::round(uniform(0, 4)) / 4;
        }
    }

    const int nb = count(0, 2);
    const int ne = nb == 0 ? 0 : count(1, 2);
    for (int k = 0; k < nb; ++k) {
        in.boilers.push_back(BoilerType{"b" + std::to_string(k), "boiler " + std::to_string(k)});
    }
    for (int e = 0; e < ne; ++e) {
        in.emission_names.push_back("e" + std::to_string(e));
    }
    in.moc = Matrix(na, nb);
    for (std::size_t i = 0; i < na; ++i) {
        // Only never-decommissioned activities may burn fuel.
        if (in.activities[i].lower < 0 || !coin(0.4)) {
            continue;
        }
        for (int k = 0; k < nb; ++k) {
            in.moc(i, k) = coin(0.6) ? 1.0 : 0.0;
        }
    }
    in.mec = Matrix(ne, nb);
    for (int e = 0; e < ne; ++e) {
        for (int k = 0; k < nb; ++k) {
            in.mec(e, k) = std::round(uniform(0, 50));
        }
    }
    if (ne > 0) {
        IndicatorTable t{"tox", {}};
        for (int e = 0; e < ne; ++e) {
            t.rows.emplace_back(in.emission_names[e], factors_from_members({uniform(0, 1), uniform(1, 3)}));
        }
        in.indicator_tables.push_back(std::move(t));
    }
    in.hours_per_year = std::round(uniform(100, 8000));
    in.efficiency     = uniform(0.2, 1.0);
    return in;
}

UserConstraint fix(const std::string& activity, double value)
{
    return UserConstraint{{{QuantityKey{QuantityKind::Activity, activity}, 1.0}}, lp::Relation::Equal, value};
}

ObjectiveSpec random_objective(const PlanInstance& in, std::mt19937_64& rng)
{
    std::vector<QuantityKey> keys{{QuantityKind::TotalCost, ""}, {QuantityKind::TotalOutcome, ""}};
    for (const auto& a : in.activities) {
        keys.push_back({QuantityKind::Activity, a.id});
    }
    for (const auto& r : in.receptor_names) {
        keys.push_back({QuantityKind::Receptor, r});
    }
    for (const auto& e : in.emission_names) {
        keys.push_back({QuantityKind::Emission, e});
    }
    for (const auto& t : in.indicator_tables) {
        keys.push_back({QuantityKind::Indicator, t.name});
    }
    std::uniform_int_distribution<std::size_t> pick(0, keys.size() - 1);
    std::uniform_real_distribution<double> weight(-2.0, 2.0);
    ObjectiveSpec o;
    o.sense = std::bernoulli_distribution(0.5)(rng) ? lp::Sense::Minimize : lp::Sense::Maximize;
    for (int k = 0; k < 3; ++k) {
        add_term(o.terms, keys[pick(rng)], std::round(weight(rng) * 4) / 4);
    }
    return o;
}

}
