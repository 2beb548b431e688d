#include "planopt/pareto.h"

#include <fmt/format.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <optional>
#include <set>
#include <thread>

namespace planopt {

namespace {

double tolerance(double a, double b)
{
    return 1e-9 * std::max({1.0, std::abs(a), std::abs(b)});
}

// Min-sense objective values of a scenario, in request order.
std::vector<double> values_of(const Scenario& s, const std::vector<ObjectiveSpec>& objectives)
{
    std::vector<double> out;
    out.reserve(objectives.size());
    for (const auto& o : objectives) {
        const auto label = objective_label(o);
        const auto v     = lookup(s.objective_values, label);
        if (!v) {
            throw Error(fmt::format("scenario has no value for objective '{}'", label));
        }
        out.push_back(min_sense(o, *v));
    }
    return out;
}

bool dominates(const std::vector<double>& a, const std::vector<double>& b)
{
    bool strictly = false;
    for (std::size_t j = 0; j < a.size(); ++j) {
        const double tol = tolerance(a[j], b[j]);
        if (a[j] > b[j] + tol) {
            return false;
        }
        strictly = strictly || a[j] < b[j] - tol;
    }
    return strictly;
}

bool same(const std::vector<double>& a, const std::vector<double>& b)
{
    for (std::size_t j = 0; j < a.size(); ++j) {
        if (std::abs(a[j] - b[j]) > tolerance(a[j], b[j])) {
            return false;
        }
    }
    return true;
}

std::vector<double> magnitudes_of(const Scenario& s)
{
    std::vector<double> out;
    for (const auto& [id, v] : s.magnitudes) {
        out.push_back(v);
    }
    return out;
}

// Finds the first user constraint that turns a feasible plan infeasible.
std::string explain_infeasibility(const PlanInstance& instance, const ObjectiveSpec& objective,
                                  const std::vector<UserConstraint>& extra, const lp::SolveOptions& options)
{
    std::vector<UserConstraint> prefix;
    for (std::size_t k = 0; k <= extra.size(); ++k) {
        const auto model = build_lp(instance, objective, prefix);
        if (lp::solve(model.lp, options).status == lp::Status::Infeasible) {
            if (k == 0) {
                return "the plan is infeasible without any user constraint";
            }
            return fmt::format("constraints[{}] ({}) makes the plan infeasible", k - 1, format_constraint(extra[k - 1]));
        }
        if (k < extra.size()) {
            prefix.push_back(extra[k]);
        }
    }
    return "the plan is infeasible";
}

}

void disambiguate_labels(std::vector<ObjectiveSpec>& objectives)
{
    std::set<std::string> seen;
    for (auto& o : objectives) {
        auto label = objective_label(o);
        for (int k = 2; seen.count(label); ++k) {
            label = fmt::format("{} #{}", objective_label(o), k);
        }
        o.label = label;
        seen.insert(label);
    }
}

double min_sense(const ObjectiveSpec& objective, double value)
{
    return objective.sense == lp::Sense::Maximize ? -value : value;
}

Terms min_sense_terms(const ObjectiveSpec& objective)
{
    auto terms = objective.terms;
    if (objective.sense == lp::Sense::Maximize) {
        for (auto& [key, weight] : terms) {
            weight = -weight;
        }
    }
    return terms;
}

void check_request(const PlanInstance& instance, const ParetoRequest& request)
{
    std::vector<Violation> violations;
    if (request.objectives.size() < 2) {
        violations.push_back({"objectives", fmt::format("at least 2 objectives are required, got {}",
                                                        request.objectives.size())});
    }
    if (request.points < 2 || request.points > max_points) {
        violations.push_back({"points", fmt::format("must lie in [2, {}], got {}", max_points, request.points)});
    }
    std::set<std::string> labels;
    for (std::size_t k = 0; k < request.objectives.size(); ++k) {
        const auto path = fmt::format("objectives[{}]", k);
        if (!labels.insert(objective_label(request.objectives[k])).second) {
            violations.push_back({path, fmt::format("duplicate objective label '{}'", objective_label(request.objectives[k]))});
        }
        try {
            resolve_terms(instance, request.objectives[k].terms, path);
        } catch (const ValidationError& e) {
            violations.insert(violations.end(), e.violations().begin(), e.violations().end());
        }
    }
    for (std::size_t k = 0; k < request.extra.size(); ++k) {
        try {
            resolve_terms(instance, request.extra[k].terms, fmt::format("constraints[{}]", k));
        } catch (const ValidationError& e) {
            violations.insert(violations.end(), e.violations().begin(), e.violations().end());
        }
    }
    if (!violations.empty()) {
        throw ValidationError({}, std::move(violations));
    }
}

std::vector<Scenario> compute_anchors(const PlanInstance& instance, const ParetoRequest& request,
                                      const ParetoOptions& options)
{
    const auto& objectives = request.objectives;
    std::vector<Scenario> anchors;
    for (std::size_t k = 0; k < objectives.size(); ++k) {
        const auto& objective = objectives[k];
        const auto label      = objective_label(objective);

        const auto first = build_lp(instance, objective, request.extra);
        const auto sol   = lp::solve(first.lp, options.solve);
        if (sol.status == lp::Status::Infeasible) {
            throw NoOptimum(sol.status, explain_infeasibility(instance, objective, request.extra, options.solve));
        }
        if (!sol.optimal()) {
            throw NoOptimum(sol.status, fmt::format("objective '{}' is {}", label, lp::to_string(sol.status)));
        }
        auto anchor = extract_scenario(instance, sol, first, objectives, ScenarioKind::Boundary);

        // Second stage: best compromise on the other objectives at this optimum.
        const double best = min_sense(objective, *lookup(anchor.objective_values, label));
        ObjectiveSpec rest{{}, lp::Sense::Minimize, "anchor tie-break"};
        for (std::size_t j = 0; j < objectives.size(); ++j) {
            if (j != k) {
                for (auto& [key, weight] : min_sense_terms(objectives[j])) {
                    add_term(rest.terms, key, weight);
                }
            }
        }
        auto pinned = request.extra;
        pinned.push_back(UserConstraint{min_sense_terms(objective), lp::Relation::LessEqual, best});
        try {
            const auto second = build_lp(instance, rest, pinned);
            const auto refined = lp::solve(second.lp, options.solve);
            if (refined.optimal()) {
                auto s = extract_scenario(instance, refined, second, objectives, ScenarioKind::Boundary);
                const double again = min_sense(objective, *lookup(s.objective_values, label));
                if (again <= best + 1e-6 * std::max(1.0, std::abs(best))) {
                    anchor = std::move(s);
                }
            }
        } catch (const lp::IterationLimit&) {
            // keep the first-stage anchor
        }
        anchors.push_back(std::move(anchor));
    }
    return anchors;
}

Normalization normalize(const std::vector<std::vector<double>>& anchor_values)
{
    const auto n = anchor_values.size();
    Normalization out;
    for (std::size_t j = 0; j < n; ++j) {
        const double utopia = anchor_values[j][j];
        double worst        = utopia;
        for (std::size_t k = 0; k < n; ++k) {
            worst = std::max(worst, anchor_values[k][j]);
        }
        const double span = worst - utopia;
        const bool flat   = span <= tolerance(worst, utopia);
        out.utopia.push_back(utopia);
        out.denominators.push_back(flat ? 1.0 : span);
        out.constant.push_back(flat);
    }
    return out;
}

std::vector<std::vector<double>> reference_points(std::size_t n, int points)
{
    if (n == 0 || points < 1) {
        return {};
    }
    if (n == 1) {
        return {{1.0}};
    }
    // Smallest lattice resolution r with C(r + n - 1, n - 1) >= points.
    int r = 0;
    while (true) {
        double count = 1.0;
        for (std::size_t i = 1; i < n; ++i) {
            count = count * double(r + i) / double(i);
        }
        if (count >= points) {
            break;
        }
        ++r;
    }
    std::vector<std::vector<double>> out;
    std::vector<int> parts(n, 0);
    auto fill = [&](auto&& self, std::size_t i, int left) -> void {
        if (i + 1 == n) {
            parts[i] = left;
            std::vector<double> w(n);
            for (std::size_t k = 0; k < n; ++k) {
                w[k] = r == 0 ? 1.0 / double(n) : double(parts[k]) / r;
            }
            out.push_back(std::move(w));
            return;
        }
        for (int a = left; a >= 0; --a) {
            parts[i] = a;
            self(self, i + 1, left - a);
        }
    };
    fill(fill, 0, r);
    return out;
}

std::vector<Scenario> pareto_filter(std::vector<Scenario> scenarios, const std::vector<ObjectiveSpec>& objectives)
{
    std::vector<std::vector<double>> values;
    for (const auto& s : scenarios) {
        values.push_back(values_of(s, objectives));
    }
    const auto count = scenarios.size();
    std::vector<std::size_t> alive;
    for (std::size_t i = 0; i < count; ++i) {
        bool dominated = false;
        for (std::size_t k = 0; k < count && !dominated; ++k) {
            dominated = k != i && dominates(values[k], values[i]);
        }
        if (!dominated) {
            alive.push_back(i);
        }
    }

    std::vector<bool> grouped(count, false);
    std::vector<std::size_t> kept;
    for (auto i : alive) {
        if (grouped[i]) {
            continue;
        }
        std::size_t best = i;
        bool boundary    = false;
        for (auto k : alive) {
            if (grouped[k] || !same(values[i], values[k])) {
                continue;
            }
            grouped[k] = true;
            boundary   = boundary || scenarios[k].kind == ScenarioKind::Boundary;
            if (magnitudes_of(scenarios[k]) < magnitudes_of(scenarios[best])) {
                best = k;
            }
        }
        scenarios[best].kind = boundary ? ScenarioKind::Boundary : ScenarioKind::Intermediate;
        kept.push_back(best);
    }
    std::sort(kept.begin(), kept.end(), [&](std::size_t a, std::size_t b) {
        if (values[a] != values[b]) {
            return values[a] < values[b];
        }
        return magnitudes_of(scenarios[a]) < magnitudes_of(scenarios[b]);
    });

    std::vector<Scenario> out;
    out.reserve(kept.size());
    for (auto i : kept) {
        out.push_back(std::move(scenarios[i]));
    }
    return out;
}

ParetoFront nnc_front(const PlanInstance& instance, const ParetoRequest& request, const ParetoOptions& options)
{
    check_request(instance, request);
    const auto& objectives = request.objectives;
    const auto n           = objectives.size();

    auto anchors = compute_anchors(instance, request, options);
    std::vector<std::vector<double>> anchor_values;
    for (const auto& a : anchors) {
        anchor_values.push_back(values_of(a, objectives));
    }
    const auto norm = normalize(anchor_values);

    // Normalized anchors V[k][j].
    std::vector<std::vector<double>> v(n, std::vector<double>(n));
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t j = 0; j < n; ++j) {
            v[k][j] = (anchor_values[k][j] - norm.utopia[j]) / norm.denominators[j];
        }
    }
    std::vector<Terms> terms;
    for (const auto& o : objectives) {
        terms.push_back(min_sense_terms(o));
    }
    ObjectiveSpec last{terms[n - 1], lp::Sense::Minimize, objective_label(objectives[n - 1])};

    const auto weights = reference_points(n, request.points);
    auto subproblem    = [&](std::size_t p) -> std::optional<Scenario> {
        std::vector<double> x(n, 0.0);
        for (std::size_t k = 0; k < n; ++k) {
            for (std::size_t j = 0; j < n; ++j) {
                x[j] += weights[p][k] * v[k][j];
            }
        }
        auto extra = request.extra;
        for (std::size_t k = 0; k + 1 < n; ++k) {
            // D_k . (normalized F - X) <= 0 with D_k = V_n - V_k.
            UserConstraint c{{}, lp::Relation::LessEqual, 0.0};
            bool any = false;
            for (std::size_t j = 0; j < n; ++j) {
                const double d = v[n - 1][j] - v[k][j];
                if (d == 0.0) {
                    continue;
                }
                any = true;
                for (const auto& [key, weight] : terms[j]) {
                    add_term(c.terms, key, weight * d / norm.denominators[j]);
                }
                c.rhs += d * (x[j] + norm.utopia[j] / norm.denominators[j]);
            }
            if (any) {
                extra.push_back(std::move(c));
            }
        }
        try {
            const auto model = build_lp(instance, last, extra);
            const auto sol   = lp::solve(model.lp, options.solve);
            if (!sol.optimal()) {
                return std::nullopt;
            }
            return extract_scenario(instance, sol, model, objectives, ScenarioKind::Intermediate);
        } catch (const lp::IterationLimit&) {
            return std::nullopt;
        }
    };

    std::vector<std::optional<Scenario>> results(weights.size());
    unsigned threads = options.threads ? options.threads : std::max(1u, std::thread::hardware_concurrency());
    threads          = std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(1, weights.size())));
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        while (true) {
            const auto p = next.fetch_add(1);
            if (p >= weights.size()) {
                return;
            }
            try {
                results[p] = subproblem(p);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) {
                    failure = std::current_exception();
                }
                next = weights.size();
                return;
            }
        }
    };
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < threads; ++t) {
            pool.emplace_back(worker);
        }
        for (auto& t : pool) {
            t.join();
        }
    }
    if (failure) {
        std::rethrow_exception(failure);
    }

    ParetoFront front;
    std::size_t failed = 0;
    std::vector<Scenario> candidates = anchors;
    for (auto& r : results) {
        if (r) {
            candidates.push_back(std::move(*r));
        } else {
            ++failed;
        }
    }
    const auto solved = candidates.size();
    front.scenarios   = pareto_filter(std::move(candidates), objectives);
    // Anchors always survive in some form; everything else that vanished was dropped.
    front.dropped = failed + (solved - front.scenarios.size());

    for (std::size_t j = 0; j < n; ++j) {
        front.objectives.push_back(objective_label(objectives[j]));
        if (norm.constant[j]) {
            front.constant_objectives.push_back(front.objectives.back());
        }
        double worst = norm.utopia[j];
        for (std::size_t k = 0; k < n; ++k) {
            worst = std::max(worst, anchor_values[k][j]);
        }
        const double sign = objectives[j].sense == lp::Sense::Maximize ? -1.0 : 1.0;
        front.utopia.push_back(sign * norm.utopia[j]);
        front.nadir_estimate.push_back(sign * worst);
    }
    return front;
}

}
